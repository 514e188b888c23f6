#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "brenier/jet.hpp"
#include "brenier/potentials.hpp"
#include "brenier/transport_1d.hpp"

namespace brenier {

enum class ScenarioKind {
  kIdentity,
  kGaussianScale,
  kGaussianToUniform1d,
  kProduct,
  kRadialGaussianToBall,
  kCustom1d,
};

std::string to_string(ScenarioKind kind);

/// A transport problem (μ = e^{-V}, ν = e^{-W}, Φ) with analytic jets.
/// Immutable; copies share state.
class Scenario {
 public:
  static Scenario identity(int dim);
  static Scenario gaussian_scale(std::vector<double> sigma);
  static Scenario gaussian_to_uniform_1d(double diameter);
  /// Direct product of separable scenarios (products are flattened).
  static Scenario product(const std::vector<Scenario>& factors);
  static Scenario radial_gaussian_to_ball(int dim, double diameter);
  static Scenario custom_1d(Potential1d v, Potential1d w);
  /// {"kind": ..., "dim": ..., "params": {...}}
  static Scenario from_json(const nlohmann::json& j);
  nlohmann::json descriptor() const;

  ScenarioKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int max_jet_order() const { return separable() ? 5 : 2; }
  double target_diameter() const { return target_.support().diameter; }
  bool separable() const { return kind_ != ScenarioKind::kRadialGaussianToBall; }
  const std::vector<std::shared_ptr<const Transport1d>>& factors() const { return factors_; }

  const Potential& source() const { return source_; }
  const Potential& target() const { return target_; }

  bool in_smooth_region(const Vec& x) const;
  /// ∇Φ(x).
  Vec transport(const Vec& x) const;
  /// log det D²Φ(x), evaluated from the structure of the map.
  double log_det_hessian(const Vec& x) const;
  /// Φ(x), normalized to vanish at the origin (or the source center).
  double phi_value(const Vec& x) const;
  /// Derivatives 1..order of Φ; the value slot is left at zero.
  Jet phi_derivatives(const Vec& x, int order) const;
  Vec sample_source(std::mt19937_64& rng) const { return source_.sample(rng); }

 private:
  Scenario() = default;
  void check_point(const Vec& x) const;

  ScenarioKind kind_ = ScenarioKind::kIdentity;
  int dim_ = 0;
  std::vector<std::shared_ptr<const Transport1d>> factors_;
  double radial_d_ = 0;  // diameter of the target ball
  Potential source_;
  Potential target_;
  nlohmann::json params_;
};

/// Names accepted by `scenario_from_name`.
std::vector<std::string> catalog_names();

enum class PotentialSide { kSourceV, kTargetW };

struct TargetComposites {
  int order = 0;
  Vec w1;     // W_i(∇Φ)
  Mat w2;     // W_ij(∇Φ)
  Tensor w3;  // W_ijk(∇Φ)
};

enum class CompositeMode { kDirect, kDerived };

Jet jets_phi(const Scenario& s, const Vec& x, int order);
Jet jets_potential(const Scenario& s, PotentialSide which, const Vec& p, int order);

/// W-derivatives at ∇Φ(x). Direct mode evaluates the jets of W; derived mode
/// differentiates log det D²Φ = W(∇Φ) − V using only Φ and V.
TargetComposites target_composites(const Scenario& s, const Vec& x, int order,
                                   CompositeMode mode = CompositeMode::kDirect);
/// Derived composites from jets alone; phi needs order + 2, v needs order.
TargetComposites derive_composites(const Jet& phi, const Jet& v, int order);

/// g^{jk}Φ_ijk + V_i − (D²Φ·w1)_i at x with direct composites. Radial
/// scenarios use the closed-form radial derivative of log det D²Φ.
Vec monge_ampere_gradient_residual(const Scenario& s, const Vec& x);

/// Jets of the Legendre dual Ψ at ∇Φ(x), orders 2..4.
Jet legendre_dual_jets(const Jet& phi);

/// V(x) − W(∇Φ(x)) + log det D²Φ(x).
double ma_residual(const Scenario& s, const Vec& x);
/// Same residual for an arbitrary jet (order ≥ 2) against the scenario's V and W.
double ma_residual(const Scenario& s, const Jet& phi);

}  // namespace brenier
