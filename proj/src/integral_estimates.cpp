#include "brenier/integral_estimates.hpp"

#include <cmath>

#include "brenier/error.hpp"
#include "brenier/io.hpp"
#include "brenier/linalg.hpp"
#include "brenier/quadrature.hpp"
#include "brenier/seed.hpp"

namespace brenier {
namespace {

const Potential& side_measure(const Scenario& s, MeasureSide side) {
  return side == MeasureSide::kMu ? s.source() : s.target();
}

struct Box {
  Vec lo, hi;
};

Box quadrature_box(const Potential& m, double truncation) {
  if (m.is_ball()) throw Error(ErrorCode::kRouteUnavailable, "quadrature needs a product measure");
  const int d = static_cast<int>(m.factors().size());
  Box b{Vec(d), Vec(d)};
  for (int i = 0; i < d; ++i) {
    const Interval w = m.factors()[i].window();
    b.lo(i) = std::max(w.lo, -truncation);
    b.hi(i) = std::min(w.hi, truncation);
  }
  return b;
}

double mass_in_box(const Potential& m, const Box& b, double tol) {
  double mass = 1.0;
  for (std::size_t i = 0; i < m.factors().size(); ++i) {
    const Potential1d& f = m.factors()[i];
    mass *= quad::adaptive([&](double t) { return std::exp(-f.derivs(t, 0)[0]); }, b.lo(i), b.hi(i),
                           {.abs_tol = tol})
                .value;
  }
  return mass;
}

double integrate_box(const std::function<double(const Vec&)>& field, const Potential& m, const Box& b,
                     double tol) {
  return quad::box([&](const Vec& x) { return field(x) * std::exp(-m.jet(x, 0).value); }, b.lo, b.hi,
                   {.abs_tol = tol})
      .value;
}

// ∫ field dμ by quadrature over the default box. Λ has kinks where the top
// eigenvalue changes factor, so nested quadrature gets a looser target.
double mu_integral(const Scenario& s, const std::function<double(const Vec&)>& field) {
  const double tol = s.dim() == 1 ? 1e-11 : 1e-8;
  return integrate_box(field, s.source(), quadrature_box(s.source(), 8.0), tol);
}

void require_quadrature(const Scenario& s, const char* what) {
  if (!s.separable()) {
    throw Error(ErrorCode::kRouteUnavailable, std::string(what) + " needs a 1D or product scenario");
  }
}

double v_plus(const Scenario& s, const Vec& x) { return linalg::max_eigenvalue(s.source().jet(x, 2).hess); }

double w_minus(const Scenario& s, const Vec& x) {
  return linalg::min_eigenvalue(s.target().jet(s.transport(x), 2).hess);
}

}  // namespace

double lambda_field(const Scenario& s, const Vec& x) {
  return linalg::max_eigenvalue(s.phi_derivatives(x, 2).hess);
}

LambdaJet lambda_jet(const Scenario& s, const Vec& x) {
  const Jet phi = s.phi_derivatives(x, 3);
  const int d = s.dim();
  Eigen::SelfAdjointEigenSolver<Mat> es(phi.hess);
  LambdaJet out;
  out.value = es.eigenvalues()(d - 1);
  out.grad = Vec::Zero(d);
  if (d > 1 && es.eigenvalues()(d - 1) - es.eigenvalues()(d - 2) < 1e-8) {
    out.simple = false;
    return out;
  }
  const Vec v = es.eigenvectors().col(d - 1);
  for (int k = 0; k < d; ++k) out.grad(k) = v.dot(linalg::slice(phi.d3, k) * v);
  out.metric_sq = out.grad.dot(phi.hess.llt().solve(out.grad));
  return out;
}

IntegralEstimate integrate(const std::function<double(const Vec&)>& field, const Scenario& s, MeasureSide side,
                           IntegrationMethod method, const IntegrationParams& params) {
  const Potential& m = side_measure(s, side);
  IntegralEstimate out;
  if (method == IntegrationMethod::kQuadrature) {
    const Box b = quadrature_box(m, params.truncation);
    const auto r = quad::box([&](const Vec& x) { return field(x) * std::exp(-m.jet(x, 0).value); }, b.lo, b.hi,
                             {.abs_tol = params.abs_tol});
    out.value = r.value;
    out.error = r.error;
    out.truncated_mass = std::max(0.0, 1.0 - mass_in_box(m, b, 1e-14));
    return out;
  }
  if (!params.seed) throw Error(ErrorCode::kSeedRequired, "Monte Carlo integration needs a seed");
  if (params.samples < 2) throw Error(ErrorCode::kInvalidArgument, "Monte Carlo needs at least two samples");
  auto rng = stream(*params.seed, std::string("integrate/") + (side == MeasureSide::kMu ? "mu/" : "nu/") +
                                      s.descriptor().dump());
  double mean = 0.0, m2 = 0.0;
  for (int k = 0; k < params.samples; ++k) {
    const double y = field(m.sample(rng));
    const double delta = y - mean;
    mean += delta / (k + 1);
    m2 += delta * (y - mean);
  }
  out.value = mean;
  out.error = std::sqrt(m2 / (params.samples - 1) / params.samples);
  return out;
}

nlohmann::json IntegralReport::to_json() const {
  nlohmann::json j = {{"name", name},
                      {"lhs", lhs},
                      {"rhs", rhs},
                      {"slack", slack},
                      {"ratio", ratio},
                      {"method", method == IntegrationMethod::kQuadrature ? "quadrature" : "monte_carlo"},
                      {"tolerance", tolerance},
                      {"pass", pass},
                      {"details", details}};
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

LambdaWeight LambdaWeight::power(int k) {
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "weight power must be non-negative");
  LambdaWeight w;
  w.name = k == 0 ? "1" : (k == 1 ? "Lambda" : "Lambda^" + std::to_string(k));
  w.f = [k](double t) { return std::pow(t, k); };
  w.df = [k](double t) { return k == 0 ? 0.0 : k * std::pow(t, k - 1); };
  return w;
}

IntegralReport theorem61_check(const Scenario& s, const LambdaWeight& f, double tolerance) {
  require_quadrature(s, "theorem61_check");
  int skipped = 0;
  IntegralReport r;
  r.name = "theorem61[f=" + f.name + "]";
  r.tolerance = tolerance;
  r.lhs = mu_integral(s, [&](const Vec& x) { return v_plus(s, x) * f.f(lambda_field(s, x)); });
  r.rhs = mu_integral(s, [&](const Vec& x) {
    const LambdaJet l = lambda_jet(s, x);
    if (!l.simple) {
      ++skipped;
      return 0.0;
    }
    const double lam = l.value;
    return w_minus(s, x) * lam * lam * f.f(lam) + (f.df(lam) + f.f(lam) / lam) * l.metric_sq;
  });
  r.slack = r.lhs - r.rhs;
  r.ratio = r.rhs / r.lhs;
  r.pass = r.slack >= -tolerance;
  r.details["skipped_points"] = skipped;
  return r;
}

IntegralReport lm_check(const Scenario& s, double tolerance) {
  require_quadrature(s, "lm_check");
  int skipped = 0;
  IntegralReport r;
  r.name = "lm";
  r.tolerance = tolerance;
  r.lhs = mu_integral(s, [&](const Vec& x) { return v_plus(s, x); });
  r.rhs = mu_integral(s, [&](const Vec& x) {
    const LambdaJet l = lambda_jet(s, x);
    if (!l.simple) {
      ++skipped;
      return 0.0;
    }
    return l.metric_sq / l.value;  // 4⟨∇_M√Λ, ∇_M√Λ⟩_M
  });
  r.slack = r.lhs - r.rhs;
  r.ratio = r.rhs;
  r.pass = r.slack >= -tolerance;
  r.details["skipped_points"] = skipped;
  return r;
}

IntegralReport variance_estimate(const Scenario& s) {
  require_quadrature(s, "variance_estimate");
  IntegralReport r;
  r.name = "variance";
  r.tolerance = 1e-10;
  const double m1 = mu_integral(s, [&](const Vec& x) { return lambda_field(s, x); });
  const double mh = mu_integral(s, [&](const Vec& x) { return std::sqrt(lambda_field(s, x)); });
  r.lhs = m1 - mh * mh;
  r.rhs = s.target_diameter();
  r.ratio = r.lhs / r.rhs;
  r.slack = r.lhs;
  r.pass = std::isfinite(r.ratio) && r.lhs >= -r.tolerance;
  r.details = {{"int_lambda", m1}, {"int_sqrt_lambda", mh}, {"fitted_c", r.ratio}};
  return r;
}

double reverse_holder_constant(double p) {
  if (!(p > 0) || !(p < 2 + 2 * std::sqrt(2.0))) {
    throw Error(ErrorCode::kInvalidExponent, "reverse Hölder needs 0 < p < 2 + 2√2");
  }
  const double a = 4 * (p + 1) / (p * p);
  return a / (a - 1);
}

IntegralReport reverse_holder(const Scenario& s, double p) {
  const double cp = reverse_holder_constant(p);
  require_quadrature(s, "reverse_holder");
  IntegralReport r;
  r.name = "reverse_holder[p=" + io::fmt(p) + "]";
  r.lhs = mu_integral(s, [&](const Vec& x) { return std::pow(lambda_field(s, x), p); });
  const double half = mu_integral(s, [&](const Vec& x) { return std::pow(lambda_field(s, x), 0.5 * p); });
  r.rhs = cp * half * half;
  r.ratio = r.lhs / (half * half);
  r.slack = r.rhs - r.lhs;
  r.tolerance = 1e-9 * std::max(1.0, r.rhs);
  r.pass = r.slack >= -r.tolerance;
  r.details = {{"p", p}, {"C_p", cp}};
  return r;
}

IntegralReport vw_check(const Scenario& s, double tolerance) {
  require_quadrature(s, "vw_check");
  IntegralReport r;
  r.name = "vw";
  r.tolerance = tolerance;
  r.lhs = mu_integral(s, [&](const Vec& x) { return s.source().jet(x, 1).grad.squaredNorm(); });
  r.rhs = mu_integral(s, [&](const Vec& x) {
    const Mat g = s.phi_derivatives(x, 2).hess;
    const Mat w2 = s.target().jet(s.transport(x), 2).hess;
    return (g * w2 * g).trace();
  });
  r.slack = r.lhs - r.rhs;
  r.ratio = r.rhs / r.lhs;
  r.pass = r.slack >= -tolerance;
  return r;
}

IntegralReport poincare_rayleigh(const Scenario& s, const std::vector<TestField>& fields) {
  require_quadrature(s, "poincare_rayleigh");
  const Box full = quadrature_box(s.source(), 8.0);
  IntegralReport r;
  r.name = "poincare";
  r.tolerance = 0.0;
  r.lhs = kInf;
  nlohmann::json per = nlohmann::json::array();
  for (const TestField& f : fields) {
    if (f.dim() != s.dim()) throw Error(ErrorCode::kInvalidArgument, "field dimension mismatch");
    Box b = full;
    const SupportBox sup = f.support();
    if (sup.kind != SupportBox::Kind::kAllSpace) {
      for (int i = 0; i < s.dim(); ++i) {
        b.lo(i) = std::max(b.lo(i), sup.lo(i));
        b.hi(i) = std::min(b.hi(i), sup.hi(i));
      }
    }
    // Integrals of f and f² over the full box, of Γ(f) over the support only.
    const double m1 = integrate_box([&](const Vec& x) { return f.value(x); }, s.source(), full, 1e-12);
    const double m2 = integrate_box([&](const Vec& x) { return std::pow(f.value(x), 2); }, s.source(), full, 1e-12);
    const double var = m2 - m1 * m1;
    const double energy = integrate_box(
        [&](const Vec& x) {
          const Jet j = f.jet(x, 1);
          return j.grad.dot(s.phi_derivatives(x, 2).hess.llt().solve(j.grad));
        },
        s.source(), b, 1e-12);
    if (!(var > 1e-14)) {
      per.push_back({{"field", f.name()}, {"excluded", true}});
      continue;
    }
    const double q = energy / var;
    per.push_back({{"field", f.name()}, {"energy", energy}, {"variance", var}, {"quotient", q}});
    r.lhs = std::min(r.lhs, q);
  }
  if (!std::isfinite(r.lhs)) throw Error(ErrorCode::kInvalidArgument, "no test field with positive variance");
  r.rhs = 0.0;
  r.slack = r.lhs;
  r.ratio = r.lhs * s.target_diameter();
  r.pass = r.lhs > 0;
  r.details = {{"fields", per}, {"empirical_c", r.ratio}};
  return r;
}

}  // namespace brenier
