#include "brenier/scenario.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "brenier/error.hpp"
#include "brenier/linalg.hpp"
#include "brenier/quadrature.hpp"

namespace brenier {
namespace {

Potential product_of(const std::vector<std::shared_ptr<const Transport1d>>& factors, bool source) {
  std::vector<Potential1d> parts;
  parts.reserve(factors.size());
  for (const auto& f : factors) parts.push_back(source ? f->source() : f->target());
  return Potential::product(std::move(parts));
}

Mat spd_inverse(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularHessian, "D²Φ is not positive definite");
  }
  return llt.solve(Mat::Identity(g.rows(), g.cols()));
}

// Matrix slice M(i, l) = T(i, k, l, ...) with the remaining slots fixed.
Mat slice3(const Tensor& t, int k) { return linalg::slice(t, k); }

Mat slice4(const Tensor& t, int k, int m) {
  const int d = t.dim();
  Mat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) out(i, l) = t(i, k, l, m);
  return out;
}

Mat slice5(const Tensor& t, int k, int m, int n) {
  const int d = t.dim();
  Mat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) out(i, l) = t(i, k, l, m, n);
  return out;
}

double frob(const Mat& a, const Mat& b) { return a.cwiseProduct(b).sum(); }

void require_dim(const Vec& x, int dim) {
  if (x.size() != dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "point has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(dim));
  }
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kIdentity: return "identity";
    case ScenarioKind::kGaussianScale: return "gaussian_scale";
    case ScenarioKind::kGaussianToUniform1d: return "gaussian_to_uniform_1d";
    case ScenarioKind::kProduct: return "product";
    case ScenarioKind::kRadialGaussianToBall: return "radial_gaussian_to_ball";
    case ScenarioKind::kCustom1d: return "custom_1d";
  }
  return "unknown";
}

std::vector<std::string> catalog_names() {
  return {"identity", "gaussian_scale", "gaussian_to_uniform_1d", "product", "radial_gaussian_to_ball",
          "custom_1d"};
}

Scenario Scenario::identity(int dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dim must be >= 1");
  Scenario s;
  s.kind_ = ScenarioKind::kIdentity;
  s.dim_ = dim;
  for (int i = 0; i < dim; ++i) s.factors_.push_back(make_quadratic_map(1.0));
  s.source_ = product_of(s.factors_, true);
  s.target_ = product_of(s.factors_, false);
  s.params_ = nlohmann::json::object();
  return s;
}

Scenario Scenario::gaussian_scale(std::vector<double> sigma) {
  if (sigma.empty()) throw Error(ErrorCode::kInvalidArgument, "gaussian_scale needs sigma");
  Scenario s;
  s.kind_ = ScenarioKind::kGaussianScale;
  s.dim_ = static_cast<int>(sigma.size());
  for (double v : sigma) s.factors_.push_back(make_quadratic_map(v));
  s.source_ = product_of(s.factors_, true);
  s.target_ = product_of(s.factors_, false);
  s.params_ = {{"sigma", sigma}};
  return s;
}

Scenario Scenario::gaussian_to_uniform_1d(double diameter) {
  Scenario s;
  s.kind_ = ScenarioKind::kGaussianToUniform1d;
  s.dim_ = 1;
  s.factors_.push_back(make_gauss_to_uniform_map(diameter));
  s.source_ = product_of(s.factors_, true);
  s.target_ = product_of(s.factors_, false);
  s.params_ = {{"D", diameter}};
  return s;
}

Scenario Scenario::product(const std::vector<Scenario>& factors) {
  if (factors.empty()) throw Error(ErrorCode::kInvalidArgument, "product needs factors");
  Scenario s;
  s.kind_ = ScenarioKind::kProduct;
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& f : factors) {
    if (!f.separable()) {
      throw Error(ErrorCode::kInvalidArgument, "product factors must be separable scenarios");
    }
    s.factors_.insert(s.factors_.end(), f.factors_.begin(), f.factors_.end());
    parts.push_back(f.descriptor());
  }
  s.dim_ = static_cast<int>(s.factors_.size());
  s.source_ = product_of(s.factors_, true);
  s.target_ = product_of(s.factors_, false);
  s.params_ = {{"factors", parts}};
  return s;
}

Scenario Scenario::radial_gaussian_to_ball(int dim, double diameter) {
  if (dim < 1 || !(diameter > 0)) throw Error(ErrorCode::kInvalidArgument, "radial needs dim >= 1, D > 0");
  Scenario s;
  s.kind_ = ScenarioKind::kRadialGaussianToBall;
  s.dim_ = dim;
  s.radial_d_ = diameter;
  s.source_ = Potential::product(std::vector<Potential1d>(dim, Potential1d::gaussian(0, 1)));
  s.target_ = Potential::uniform_ball(dim, 0.5 * diameter);
  s.params_ = {{"D", diameter}};
  return s;
}

Scenario Scenario::custom_1d(Potential1d v, Potential1d w) {
  Scenario s;
  s.kind_ = ScenarioKind::kCustom1d;
  s.dim_ = 1;
  s.params_ = {{"V", v.descriptor()}, {"W", w.descriptor()}};
  s.factors_.push_back(make_solved_map(std::move(v), std::move(w)));
  s.source_ = product_of(s.factors_, true);
  s.target_ = product_of(s.factors_, false);
  return s;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    const int dim = j.value("dim", 1);
    Scenario s;
    if (kind == "identity") {
      s = identity(dim);
    } else if (kind == "gaussian_scale") {
      const auto& sig = params.at("sigma");
      s = sig.is_array() ? gaussian_scale(sig.get<std::vector<double>>())
                         : gaussian_scale(std::vector<double>(dim, sig.get<double>()));
    } else if (kind == "gaussian_to_uniform_1d") {
      s = gaussian_to_uniform_1d(params.value("D", 1.0));
    } else if (kind == "product") {
      std::vector<Scenario> parts;
      for (const auto& f : params.at("factors")) parts.push_back(from_json(f));
      s = product(parts);
    } else if (kind == "radial_gaussian_to_ball" || kind == "radial") {
      s = radial_gaussian_to_ball(dim, params.value("D", 1.0));
    } else if (kind == "custom_1d") {
      s = custom_1d(Potential1d::from_json(params.at("V")), Potential1d::from_json(params.at("W")));
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown scenario kind '" + kind + "'");
    }
    if (j.contains("dim") && s.dim() != dim) {
      throw Error(ErrorCode::kInvalidArgument, "descriptor dim does not match its parameters");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed scenario descriptor: ") + e.what());
  }
}

nlohmann::json Scenario::descriptor() const {
  return {{"kind", to_string(kind_)}, {"dim", dim_}, {"params", params_}};
}

bool Scenario::in_smooth_region(const Vec& x) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  if (!separable()) {
    // ∇Φ reaches the sphere once the χ tail underflows.
    return boost::math::gamma_q(0.5 * dim_, 0.5 * x.squaredNorm()) > 1e-14;
  }
  for (int i = 0; i < dim_; ++i)
    if (!factors_[i]->in_smooth_region(x(i))) return false;
  return true;
}

void Scenario::check_point(const Vec& x) const {
  require_dim(x, dim_);
  if (!in_smooth_region(x)) throw Error(ErrorCode::kDomainError, "x outside smooth region");
}

namespace {

struct RadialProfile {
  double rho;       // Φ'(r)
  double rho_over_r;
  double drho;      // Φ''(r)
  double log_rho_over_r;
  double log_drho;
};

RadialProfile radial_profile(int d, double radius, double r) {
  const double h = 0.5 * d;
  RadialProfile p{};
  if (r < 1e-12) {
    p.log_drho = std::log(radius) - 0.5 * std::log(2.0) - std::lgamma(h + 1) / d;
    p.log_rho_over_r = p.log_drho;
    p.drho = p.rho_over_r = std::exp(p.log_drho);
    p.rho = p.rho_over_r * r;
    return p;
  }
  const double f = boost::math::gamma_p(h, 0.5 * r * r);
  const double log_f = std::log(f);
  p.rho = radius * std::pow(f, 1.0 / d);
  p.log_rho_over_r = std::log(radius) + log_f / d - std::log(r);
  p.rho_over_r = std::exp(p.log_rho_over_r);
  p.log_drho = std::log(radius) - std::log(static_cast<double>(d)) + (1.0 / d - 1.0) * log_f +
               (d - 1) * std::log(r) - 0.5 * r * r - (h - 1) * std::log(2.0) - std::lgamma(h);
  p.drho = std::exp(p.log_drho);
  return p;
}

}  // namespace

double Scenario::phi_value(const Vec& x) const {
  check_point(x);
  if (separable()) {
    double sum = 0.0;
    for (int i = 0; i < dim_; ++i) sum += factors_[i]->value(x(i));
    return sum;
  }
  const double radius = 0.5 * radial_d_;
  const double r = x.norm();
  if (r == 0) return 0.0;
  return quad::adaptive([&](double t) { return radial_profile(dim_, radius, t).rho; }, 0.0, r,
                        {.abs_tol = 1e-13})
      .value;
}

Vec Scenario::transport(const Vec& x) const {
  check_point(x);
  if (separable()) {
    Vec y(dim_);
    for (int i = 0; i < dim_; ++i) y(i) = factors_[i]->derivs(x(i), 1)[1];
    return y;
  }
  const double r = x.norm();
  return radial_profile(dim_, 0.5 * radial_d_, r).rho_over_r * x;
}

double Scenario::log_det_hessian(const Vec& x) const {
  check_point(x);
  if (separable()) {
    double sum = 0.0;
    for (int i = 0; i < dim_; ++i) sum += factors_[i]->log_second(x(i));
    return sum;
  }
  const auto p = radial_profile(dim_, 0.5 * radial_d_, x.norm());
  return p.log_drho + (dim_ - 1) * p.log_rho_over_r;
}

Jet Scenario::phi_derivatives(const Vec& x, int order) const {
  if (order < 0 || order > max_jet_order()) {
    throw Error(ErrorCode::kOrderUnsupported, "jet order " + std::to_string(order) + " exceeds " +
                                                  std::to_string(max_jet_order()) + " for " +
                                                  to_string(kind_));
  }
  check_point(x);
  Jet j = Jet::zero(x, order);
  if (order == 0) return j;
  if (separable()) {
    for (int i = 0; i < dim_; ++i) {
      const auto d = factors_[i]->derivs(x(i), order);
      j.grad(i) = d[1];
      if (order >= 2) j.hess(i, i) = d[2];
      if (order >= 3) j.d3(i, i, i) = d[3];
      if (order >= 4) j.d4(i, i, i, i) = d[4];
      if (order >= 5) j.d5(i, i, i, i, i) = d[5];
    }
    return j;
  }
  const double r = x.norm();
  const auto p = radial_profile(dim_, 0.5 * radial_d_, r);
  j.grad = p.rho_over_r * x;
  if (order >= 2) {
    if (r < 1e-12) {
      j.hess = p.drho * Mat::Identity(dim_, dim_);
    } else {
      const Vec e = x / r;
      j.hess = p.rho_over_r * Mat::Identity(dim_, dim_) + (p.drho - p.rho_over_r) * e * e.transpose();
    }
  }
  return j;
}

Jet jets_phi(const Scenario& s, const Vec& x, int order) {
  Jet j = s.phi_derivatives(x, order);
  j.value = s.phi_value(x);
  return j;
}

Jet jets_potential(const Scenario& s, PotentialSide which, const Vec& p, int order) {
  require_dim(p, s.dim());
  return which == PotentialSide::kSourceV ? s.source().jet(p, order) : s.target().jet(p, order);
}

TargetComposites derive_composites(const Jet& phi, const Jet& v, int order) {
  if (order < 1 || order > 3) throw Error(ErrorCode::kOrderUnsupported, "composites: order 1..3");
  if (phi.order < order + 2 || v.order < order) {
    throw Error(ErrorCode::kOrderUnsupported, "derived composites of order " + std::to_string(order) +
                                                  " need Φ to order " + std::to_string(order + 2));
  }
  const int d = phi.dim();
  const Mat& g = phi.hess;
  const Mat a = spd_inverse(g);
  TargetComposites out;
  out.order = order;

  std::vector<Mat> p3(d);
  for (int k = 0; k < d; ++k) p3[k] = slice3(phi.d3, k);
  Vec c(d);
  for (int k = 0; k < d; ++k) c(k) = frob(a, p3[k]);
  out.w1 = a * (c + v.grad);
  if (order == 1) return out;

  // dA_m = ∂_m g⁻¹ = −A Φ_{··m} A.
  std::vector<Mat> da(d);
  for (int m = 0; m < d; ++m) da[m] = -a * p3[m] * a;
  Mat big_m(d, d);
  for (int k = 0; k < d; ++k) {
    const Vec p3w = p3[k] * out.w1;
    for (int m = 0; m < d; ++m) {
      big_m(k, m) = frob(da[m], p3[k]) + frob(a, slice4(phi.d4, k, m)) + v.hess(k, m) - p3w(m);
    }
  }
  out.w2 = a * big_m * a;
  if (order == 2) return out;

  const Mat wg = out.w2 * g;
  const Mat gw = g * out.w2;
  Tensor n3(d, 3);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      const Mat p4mn = slice4(phi.d4, m, n);
      const Mat dda = -da[n] * p3[m] * a - a * p4mn * a - a * p3[m] * da[n];
      for (int k = 0; k < d; ++k) {
        double val = frob(dda, p3[k]) + frob(da[m], slice4(phi.d4, k, n)) +
                     frob(da[n], slice4(phi.d4, k, m)) + frob(a, slice5(phi.d5, k, m, n));
        val += v.d3(k, m, n);
        for (int j = 0; j < d; ++j) {
          val -= phi.d4(k, j, m, n) * out.w1(j);
          val -= phi.d3(k, j, m) * wg(j, n) + phi.d3(k, j, n) * wg(j, m) + gw(k, j) * phi.d3(j, m, n);
        }
        n3(k, m, n) = val;
      }
    }
  }
  out.w3 = linalg::transform(n3, a);
  return out;
}

TargetComposites target_composites(const Scenario& s, const Vec& x, int order, CompositeMode mode) {
  if (order < 1 || order > 3) throw Error(ErrorCode::kOrderUnsupported, "composites: order 1..3");
  if (mode == CompositeMode::kDerived) {
    return derive_composites(s.phi_derivatives(x, order + 2), s.source().jet(x, order), order);
  }
  const Jet w = s.target().jet(s.transport(x), order);
  TargetComposites out;
  out.order = order;
  out.w1 = w.grad;
  if (order >= 2) out.w2 = w.hess;
  if (order >= 3) out.w3 = w.d3;
  return out;
}

Vec monge_ampere_gradient_residual(const Scenario& s, const Vec& x) {
  if (!s.separable()) {
    // g^{jk}Φ_ijk = ∂_i log det D²Φ, with log det = log ρ' + (d − 1) log(ρ/r)
    // differentiated along the ray. F = P(d/2, r²/2) and F' its r-derivative.
    const Jet phi = s.phi_derivatives(x, 2);
    const Jet v = s.source().jet(x, 1);
    const auto comps = target_composites(s, x, 1, CompositeMode::kDirect);
    const int d = s.dim();
    const double r = x.norm();
    Vec dlog = Vec::Zero(d);
    if (r >= 1e-12) {
      const double h = 0.5 * d;
      const double log_f = std::log(boost::math::gamma_p(h, 0.5 * r * r));
      const double log_df = (d - 1) * std::log(r) - 0.5 * r * r - (h - 1) * std::log(2.0) - std::lgamma(h);
      const double ratio = std::exp(log_df - log_f);  // F'/F
      const double dlog_drho = (1.0 / d - 1.0) * ratio + (d - 1) / r - r;
      const double dlog_rho_over_r = ratio / d - 1.0 / r;
      dlog = (dlog_drho + (d - 1) * dlog_rho_over_r) / r * x;
    }
    return dlog + v.grad - phi.hess * comps.w1;
  }
  const Jet phi = s.phi_derivatives(x, 3);
  const Jet v = s.source().jet(x, 1);
  const auto comps = target_composites(s, x, 1, CompositeMode::kDirect);
  const Mat a = spd_inverse(phi.hess);
  Vec r(s.dim());
  for (int i = 0; i < s.dim(); ++i) r(i) = frob(a, slice3(phi.d3, i)) + v.grad(i);
  return r - phi.hess * comps.w1;
}

Jet legendre_dual_jets(const Jet& phi) {
  if (phi.order < 2 || phi.order > 4) {
    throw Error(ErrorCode::kOrderUnsupported, "legendre_dual_jets needs an input jet of order 2..4");
  }
  const int d = phi.dim();
  const Mat& g = phi.hess;
  const Mat a = spd_inverse(g);
  Jet out = Jet::zero(phi.grad, phi.order);
  out.value = phi.point.dot(phi.grad) - phi.value;
  out.grad = phi.point;
  out.hess = a;
  if (phi.order < 3) return out;
  const Tensor t3 = linalg::transform(phi.d3, a);
  out.d3 = t3;
  out.d3 *= -1.0;
  if (phi.order < 4) return out;
  // x(a, b, q) = Σ_s T3(a, b, s) g(s, q)
  Tensor x(d, 3);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int q = 0; q < d; ++q) {
        double sum = 0.0;
        for (int s = 0; s < d; ++s) sum += t3(i, j, s) * g(s, q);
        x(i, j, q) = sum;
      }
  const Tensor t4 = linalg::transform(phi.d4, a);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double sum = 0.0;
          for (int q = 0; q < d; ++q) {
            sum += x(i, l, q) * t3(q, j, k) + x(j, l, q) * t3(i, q, k) + x(k, l, q) * t3(i, j, q);
          }
          out.d4(i, j, k, l) = sum - t4(i, j, k, l);
        }
  return out;
}

double ma_residual(const Scenario& s, const Vec& x) {
  const Vec y = s.transport(x);
  return s.source().jet(x, 0).value - s.target().jet(y, 0).value + s.log_det_hessian(x);
}

double ma_residual(const Scenario& s, const Jet& phi) {
  if (phi.order < 2) throw Error(ErrorCode::kOrderUnsupported, "ma_residual needs a jet of order >= 2");
  Eigen::LLT<Mat> llt(phi.hess);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kSingularHessian, "D²Φ not positive definite");
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return s.source().jet(phi.point, 0).value - s.target().jet(phi.grad, 0).value + log_det;
}

}  // namespace brenier
