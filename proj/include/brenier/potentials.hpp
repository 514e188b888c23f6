#pragma once

#include <array>
#include <limits>
#include <random>
#include <vector>

#include "json.hpp"

#include "brenier/jet.hpp"

namespace brenier {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool bounded() const { return lo > -kInf && hi < kInf; }
  double length() const { return hi - lo; }
};

/// Support of a measure, with its Euclidean diameter.
struct SupportBox {
  enum class Kind { kAllSpace, kInterval, kBall, kBox };
  Kind kind = Kind::kAllSpace;
  double diameter = kInf;
  Vec lo, hi;          // kInterval / kBox (entries may be infinite)
  double radius = 0;   // kBall, centred at the origin
};

/// A one-dimensional normalized potential U with density e^{-U}.
class Potential1d {
 public:
  enum class Kind { kGaussian, kUniform, kQuartic };

  static Potential1d gaussian(double mean, double sd);
  static Potential1d uniform(double a, double b);
  /// Density ∝ exp(−x²/2 − eps·x⁴), eps ≥ 0; normalized by quadrature.
  static Potential1d quartic(double eps);
  static Potential1d from_json(const nlohmann::json& j);

  Kind kind() const { return kind_; }
  nlohmann::json descriptor() const;

  /// U, U', U'', U''' at p (entries above `order` are zero).
  /// Throws DomainError unless p is in the open support.
  std::array<double, 4> derivs(double p, int order) const;

  Interval support() const;
  bool in_interior(double p) const;
  /// Integration window: the support, truncated where the density is
  /// below ~1e-30 for unbounded kinds.
  Interval window() const;
  /// A point splitting the mass roughly in half; used to pick the CDF tail.
  double center() const;
  double sample(std::mt19937_64& rng) const;
  bool samplable() const { return kind_ != Kind::kQuartic; }

 private:
  Potential1d(Kind kind, double a, double b);

  Kind kind_;
  double a_, b_;        // gaussian: mean, sd; uniform: endpoints; quartic: eps, unused
  double log_norm_ = 0; // additive constant making e^{-U} a probability density
};

/// d-dimensional potential: either a sum of 1D potentials over the
/// coordinates or the constant potential of the uniform ball.
class Potential {
 public:
  static Potential product(std::vector<Potential1d> factors);
  static Potential uniform_ball(int dim, double radius);

  int dim() const { return dim_; }
  bool is_ball() const { return ball_radius_ > 0; }
  const std::vector<Potential1d>& factors() const { return factors_; }

  /// Jet of order 0..3 at p; DomainError outside the open support.
  Jet jet(const Vec& p, int order) const;
  bool in_interior(const Vec& p) const;
  SupportBox support() const;
  /// True when the potential is finite and smooth on all of ℝᵈ.
  bool everywhere_smooth() const;
  Vec sample(std::mt19937_64& rng) const;

 private:
  int dim_ = 0;
  std::vector<Potential1d> factors_;
  double ball_radius_ = 0;
};

}  // namespace brenier
