#include "brenier/transport_1d.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "brenier/error.hpp"
#include "brenier/quadrature.hpp"

namespace brenier {
namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

class QuadraticMap final : public Transport1d {
 public:
  explicit QuadraticMap(double sigma)
      : Transport1d(Potential1d::gaussian(0, 1), Potential1d::gaussian(0, sigma)), sigma_(sigma) {}

  std::array<double, 6> derivs(double x, int order) const override {
    std::array<double, 6> d{};
    if (order >= 1) d[1] = sigma_ * x;
    if (order >= 2) d[2] = sigma_;
    return d;
  }
  double value(double x) const override { return 0.5 * sigma_ * x * x; }
  double log_second(double) const override { return std::log(sigma_); }
  bool in_smooth_region(double x) const override { return std::isfinite(x); }
  nlohmann::json descriptor() const override {
    return {{"kind", "gaussian_scale"}, {"dim", 1}, {"params", {{"sigma", {sigma_}}}}};
  }

 private:
  double sigma_;
};

class GaussToUniformMap final : public Transport1d {
 public:
  explicit GaussToUniformMap(double diameter)
      : Transport1d(Potential1d::gaussian(0, 1), Potential1d::uniform(0, diameter)), d_(diameter) {}

  std::array<double, 6> derivs(double x, int order) const override {
    if (!in_smooth_region(x)) throw Error(ErrorCode::kDomainError, "x outside smooth region");
    const double p = d_ * normal_pdf(x);
    const double x2 = x * x;
    std::array<double, 6> d{};
    if (order >= 1) d[1] = d_ * normal_cdf(x);
    if (order >= 2) d[2] = p;
    if (order >= 3) d[3] = -x * p;
    if (order >= 4) d[4] = (x2 - 1) * p;
    if (order >= 5) d[5] = (3 * x - x2 * x) * p;
    return d;
  }
  double value(double x) const override {
    if (!in_smooth_region(x)) throw Error(ErrorCode::kDomainError, "x outside smooth region");
    return d_ * (x * normal_cdf(x) + normal_pdf(x) - kInvSqrt2Pi);
  }
  double log_second(double x) const override {
    return std::log(d_) - 0.5 * x * x - 0.5 * std::log(2 * std::numbers::pi);
  }
  // Beyond |x| = 8 the CDF rounds to the support boundary.
  bool in_smooth_region(double x) const override { return std::abs(x) <= 8.0; }
  nlohmann::json descriptor() const override {
    return {{"kind", "gaussian_to_uniform_1d"}, {"dim", 1}, {"params", {{"D", d_}}}};
  }

 private:
  double d_;
};

constexpr double kCdfTol = 1e-12;
const quad::Options kCdfQuad{.abs_tol = 1e-13, .max_intervals = 4000};

class SolvedMap final : public Transport1d {
 public:
  SolvedMap(Potential1d v, Potential1d w) : Transport1d(std::move(v), std::move(w)) {}

  std::array<double, 6> derivs(double x, int order) const override {
    if (order < 1 || order > 5) throw Error(ErrorCode::kOrderUnsupported, "solve_1d: order 1..5");
    if (!in_smooth_region(x)) throw Error(ErrorCode::kDomainError, "x outside source window");
    std::array<double, 6> d{};
    const double y = invert(x);
    d[1] = y;
    if (order == 1) return d;
    const auto v = source().derivs(x, std::min(order - 2, 3));
    const auto w = target().derivs(y, std::min(order - 2, 3));
    d[2] = std::exp(w[0] - v[0]);
    transport_recursion(d, v, w, order);
    return d;
  }

  double value(double x) const override {
    const double c = source().center();
    if (x == c) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(x - c) / 0.5)));
    const double h = (x - c) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
      sum += quad::gauss_legendre5([this](double t) { return derivs(t, 1)[1]; }, c + k * h,
                                   c + (k + 1) * h);
    }
    return sum;
  }

  double log_second(double x) const override {
    const double y = invert(x);
    return target().derivs(y, 0)[0] - source().derivs(x, 0)[0];
  }

  bool in_smooth_region(double x) const override {
    const Interval win = source().window();
    return source().in_interior(x) && x > win.lo && x < win.hi;
  }

  nlohmann::json descriptor() const override {
    return {{"kind", "custom_1d"},
            {"dim", 1},
            {"params", {{"V", source().descriptor()}, {"W", target().descriptor()}}}};
  }

 private:
  static double density_mass(const Potential1d& u, double a, double b) {
    return quad::adaptive([&u](double t) { return std::exp(-u.derivs(t, 0)[0]); }, a, b, kCdfQuad)
        .value;
  }

  // Solves F_ν(y) = F_μ(x), working in whichever tail is smaller so that the
  // absolute CDF tolerance stays meaningful.
  double invert(double x) const {
    const Interval sw = source().window();
    const Interval tw = target().window();
    const bool lower = x <= source().center();
    const double mass = lower ? density_mass(source(), sw.lo, x) : density_mass(source(), x, sw.hi);
    auto residual = [&](double y) {
      if (y <= tw.lo) return lower ? -mass : mass - 1.0;
      if (y >= tw.hi) return lower ? 1.0 - mass : mass;
      return lower ? density_mass(target(), tw.lo, y) - mass : mass - density_mass(target(), y, tw.hi);
    };
    const double f_lo = residual(tw.lo);
    const double f_hi = residual(tw.hi);
    if (f_lo > 0 || f_hi < 0) throw Error(ErrorCode::kInversionFailure, "CDF target not bracketed");
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        residual, tw.lo, tw.hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(50), iters);
    const double y = 0.5 * (a + b);
    if (!(std::abs(residual(y)) <= kCdfTol)) {
      throw Error(ErrorCode::kInversionFailure, "CDF inversion tolerance not met");
    }
    return y;
  }
};

}  // namespace

double Transport1d::log_second(double x) const { return std::log(derivs(x, 2)[2]); }

bool Transport1d::in_smooth_region(double x) const { return source().in_interior(x); }

std::shared_ptr<const Transport1d> make_quadratic_map(double sigma) {
  if (!(sigma > 0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be positive");
  return std::make_shared<QuadraticMap>(sigma);
}

std::shared_ptr<const Transport1d> make_gauss_to_uniform_map(double diameter) {
  if (!(diameter > 0)) throw Error(ErrorCode::kInvalidArgument, "D must be positive");
  return std::make_shared<GaussToUniformMap>(diameter);
}

std::shared_ptr<const Transport1d> make_solved_map(Potential1d v, Potential1d w) {
  return std::make_shared<SolvedMap>(std::move(v), std::move(w));
}

void transport_recursion(std::array<double, 6>& d, const std::array<double, 4>& v,
                         const std::array<double, 4>& w, int order) {
  // ℓ = log Φ'' = W(y) − V(x) with y = Φ'; y' = Φ'', y'' = Φ''', y''' = Φ''''.
  if (order < 3) return;
  const double l1 = w[1] * d[2] - v[1];
  d[3] = d[2] * l1;
  if (order < 4) return;
  const double l2 = w[2] * d[2] * d[2] + w[1] * d[3] - v[2];
  d[4] = d[2] * (l2 + l1 * l1);
  if (order < 5) return;
  const double l3 = w[3] * d[2] * d[2] * d[2] + 3 * w[2] * d[2] * d[3] + w[1] * d[4] - v[3];
  d[5] = d[2] * (l3 + 3 * l1 * l2 + l1 * l1 * l1);
}

Jet solve_1d(const Potential1d& v, const Potential1d& w, double x, int order) {
  if (order < 0 || order > 5) throw Error(ErrorCode::kOrderUnsupported, "solve_1d: order 0..5");
  const SolvedMap map(v, w);
  Jet j = Jet::zero(Vec::Constant(1, x), order);
  j.value = map.value(x);
  if (order == 0) return j;
  const auto d = map.derivs(x, order);
  j.grad(0) = d[1];
  if (order >= 2) j.hess(0, 0) = d[2];
  if (order >= 3) j.d3(0, 0, 0) = d[3];
  if (order >= 4) j.d4(0, 0, 0, 0) = d[4];
  if (order >= 5) j.d5(0, 0, 0, 0, 0) = d[5];
  return j;
}

}  // namespace brenier
