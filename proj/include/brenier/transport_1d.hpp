#pragma once

#include <array>
#include <memory>

#include "json.hpp"

#include "brenier/jet.hpp"
#include "brenier/potentials.hpp"

namespace brenier {

/// Increasing transport map Φ' on the line pushing e^{-V} onto e^{-W}.
class Transport1d {
 public:
  virtual ~Transport1d() = default;

  /// Φ^{(k)}(x) for k = 1..order in slots 1..order; slot 0 is unused.
  virtual std::array<double, 6> derivs(double x, int order) const = 0;
  /// Φ(x), normalized so that Φ vanishes at the source center.
  virtual double value(double x) const = 0;
  virtual double log_second(double x) const;
  virtual bool in_smooth_region(double x) const;
  virtual nlohmann::json descriptor() const = 0;

  const Potential1d& source() const { return source_; }
  const Potential1d& target() const { return target_; }

 protected:
  Transport1d(Potential1d source, Potential1d target)
      : source_(std::move(source)), target_(std::move(target)) {}

 private:
  Potential1d source_;
  Potential1d target_;
};

/// Φ = σx²/2: standard Gaussian onto N(0, σ²).
std::shared_ptr<const Transport1d> make_quadratic_map(double sigma);
/// Φ' = D·N(x): standard Gaussian onto uniform [0, D].
std::shared_ptr<const Transport1d> make_gauss_to_uniform_map(double diameter);
/// Monotone rearrangement of general potentials via CDF inversion.
std::shared_ptr<const Transport1d> make_solved_map(Potential1d v, Potential1d w);

/// Φ''' .. Φ⁽⁵⁾ from Φ'' and the potentials by differentiating
/// log Φ'' = W(Φ') − V. `d` holds Φ' and Φ'' in slots 1, 2 on entry.
void transport_recursion(std::array<double, 6>& d, const std::array<double, 4>& v,
                         const std::array<double, 4>& w, int order);

/// Jet of the monotone transport potential between two 1D potentials.
Jet solve_1d(const Potential1d& v, const Potential1d& w, double x, int order);

}  // namespace brenier
