#include "brenier/potentials.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "brenier/error.hpp"
#include "brenier/quadrature.hpp"

namespace brenier {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2π)

}  // namespace

Potential1d::Potential1d(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

Potential1d Potential1d::gaussian(double mean, double sd) {
  if (!(sd > 0) || !std::isfinite(mean)) {
    throw Error(ErrorCode::kInvalidArgument, "gaussian potential needs sd > 0");
  }
  Potential1d p(Kind::kGaussian, mean, sd);
  p.log_norm_ = 0.5 * kLog2Pi + std::log(sd);
  return p;
}

Potential1d Potential1d::uniform(double a, double b) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::kInvalidArgument, "uniform potential needs a < b");
  }
  Potential1d p(Kind::kUniform, a, b);
  p.log_norm_ = std::log(b - a);
  return p;
}

Potential1d Potential1d::quartic(double eps) {
  if (!(eps >= 0)) throw Error(ErrorCode::kInvalidArgument, "quartic potential needs eps >= 0");
  Potential1d p(Kind::kQuartic, eps, 0.0);
  const auto z = quad::adaptive([eps](double x) { return std::exp(-0.5 * x * x - eps * x * x * x * x); },
                                -12.0, 12.0, {.abs_tol = 1e-15});
  p.log_norm_ = std::log(z.value);
  return p;
}

Potential1d Potential1d::from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "gaussian") return gaussian(j.value("mean", 0.0), j.value("sd", 1.0));
  if (type == "uniform") return uniform(j.at("a").get<double>(), j.at("b").get<double>());
  if (type == "quartic") return quartic(j.at("eps").get<double>());
  throw Error(ErrorCode::kInvalidArgument, "unknown potential type '" + type + "'");
}

nlohmann::json Potential1d::descriptor() const {
  switch (kind_) {
    case Kind::kGaussian: return {{"type", "gaussian"}, {"mean", a_}, {"sd", b_}};
    case Kind::kUniform: return {{"type", "uniform"}, {"a", a_}, {"b", b_}};
    case Kind::kQuartic: return {{"type", "quartic"}, {"eps", a_}};
  }
  return {};
}

std::array<double, 4> Potential1d::derivs(double p, int order) const {
  if (!in_interior(p)) {
    throw Error(ErrorCode::kDomainError, "point " + std::to_string(p) + " outside open support");
  }
  std::array<double, 4> out{};
  switch (kind_) {
    case Kind::kGaussian: {
      const double z = (p - a_) / b_;
      out[0] = 0.5 * z * z + log_norm_;
      out[1] = z / b_;
      out[2] = 1.0 / (b_ * b_);
      break;
    }
    case Kind::kUniform:
      out[0] = log_norm_;
      break;
    case Kind::kQuartic: {
      const double e = a_;
      out[0] = 0.5 * p * p + e * p * p * p * p + log_norm_;
      out[1] = p + 4 * e * p * p * p;
      out[2] = 1 + 12 * e * p * p;
      out[3] = 24 * e * p;
      break;
    }
  }
  for (int k = order + 1; k < 4; ++k) out[k] = 0.0;
  return out;
}

Interval Potential1d::support() const {
  if (kind_ == Kind::kUniform) return {a_, b_};
  return {};
}

bool Potential1d::in_interior(double p) const {
  if (!std::isfinite(p)) return false;
  const Interval s = support();
  return p > s.lo && p < s.hi;
}

Interval Potential1d::window() const {
  switch (kind_) {
    case Kind::kGaussian: return {a_ - 12 * b_, a_ + 12 * b_};
    case Kind::kUniform: return {a_, b_};
    case Kind::kQuartic: return {-12.0, 12.0};
  }
  return {};
}

double Potential1d::center() const {
  switch (kind_) {
    case Kind::kGaussian: return a_;
    case Kind::kUniform: return 0.5 * (a_ + b_);
    case Kind::kQuartic: return 0.0;
  }
  return 0.0;
}

double Potential1d::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::kGaussian: return std::normal_distribution<double>(a_, b_)(rng);
    case Kind::kUniform: return std::uniform_real_distribution<double>(a_, b_)(rng);
    case Kind::kQuartic: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "sampling not supported for quartic potentials");
}

Potential Potential::product(std::vector<Potential1d> factors) {
  if (factors.empty()) throw Error(ErrorCode::kInvalidArgument, "empty product potential");
  Potential p;
  p.dim_ = static_cast<int>(factors.size());
  p.factors_ = std::move(factors);
  return p;
}

Potential Potential::uniform_ball(int dim, double radius) {
  if (dim < 1 || !(radius > 0)) throw Error(ErrorCode::kInvalidArgument, "bad ball");
  Potential p;
  p.dim_ = dim;
  p.ball_radius_ = radius;
  return p;
}

Jet Potential::jet(const Vec& p, int order) const {
  if (order < 0 || order > 3) throw Error(ErrorCode::kOrderUnsupported, "potential jets: order 0..3");
  if (p.size() != dim_) throw Error(ErrorCode::kInvalidArgument, "potential jet: dimension mismatch");
  if (!in_interior(p)) throw Error(ErrorCode::kDomainError, "point outside open support");
  Jet j = Jet::zero(p, order);
  if (is_ball()) {
    const double h = 0.5 * dim_;
    // log vol(B_R) = (d/2) log π + d log R − log Γ(d/2 + 1)
    j.value = h * std::log(std::numbers::pi) + dim_ * std::log(ball_radius_) - std::lgamma(h + 1);
    return j;
  }
  for (int i = 0; i < dim_; ++i) {
    const auto u = factors_[i].derivs(p(i), order);
    j.value += u[0];
    if (order >= 1) j.grad(i) = u[1];
    if (order >= 2) j.hess(i, i) = u[2];
    if (order >= 3) j.d3(i, i, i) = u[3];
  }
  return j;
}

bool Potential::in_interior(const Vec& p) const {
  if (p.size() != dim_ || !p.allFinite()) return false;
  if (is_ball()) return p.norm() < ball_radius_;
  for (int i = 0; i < dim_; ++i)
    if (!factors_[i].in_interior(p(i))) return false;
  return true;
}

SupportBox Potential::support() const {
  SupportBox s;
  if (is_ball()) {
    s.kind = SupportBox::Kind::kBall;
    s.radius = ball_radius_;
    s.diameter = 2 * ball_radius_;
    return s;
  }
  s.lo = Vec(dim_);
  s.hi = Vec(dim_);
  bool any_bounded = false;
  double sq = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const Interval iv = factors_[i].support();
    s.lo(i) = iv.lo;
    s.hi(i) = iv.hi;
    any_bounded = any_bounded || iv.bounded();
    sq += iv.length() * iv.length();
  }
  s.diameter = std::sqrt(sq);
  if (!any_bounded) {
    s.kind = SupportBox::Kind::kAllSpace;
  } else {
    s.kind = dim_ == 1 ? SupportBox::Kind::kInterval : SupportBox::Kind::kBox;
  }
  return s;
}

bool Potential::everywhere_smooth() const {
  if (is_ball()) return false;
  for (const auto& f : factors_)
    if (f.kind() == Potential1d::Kind::kUniform) return false;
  return true;
}

Vec Potential::sample(std::mt19937_64& rng) const {
  Vec x(dim_);
  if (is_ball()) {
    // Gaussian direction, radius R·U^{1/d}.
    std::normal_distribution<double> n01;
    for (int i = 0; i < dim_; ++i) x(i) = n01(rng);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return x * (ball_radius_ * std::pow(u, 1.0 / dim_) / x.norm());
  }
  for (int i = 0; i < dim_; ++i) x(i) = factors_[i].sample(rng);
  return x;
}

}  // namespace brenier
