#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "brenier/scenario.hpp"

namespace brenier {

/// Piecewise-linear path; lengths are measured in the metric D²Φ.
struct Polyline {
  std::vector<Vec> nodes;

  /// Straight segment from x to y with `count` equally spaced nodes.
  static Polyline segment(const Vec& x, const Vec& y, int count = 2);
  /// Joins a path ending at p and a path starting at p.
  static Polyline concat(const Polyline& a, const Polyline& b);
};

/// Σ over segments of the 5-node Gauss rule for √⟨D²Φ(γ)γ̇, γ̇⟩.
double path_length(const Polyline& p, const Scenario& s);

struct GeodesicResult {
  double length = 0;
  Polyline path;
  double initial_length = 0;  // length of the starting polyline
  int accepted = 0;           // accepted node moves
};

/// Upper bound on d_M(x, y) by coordinate descent on the interior nodes of a
/// polyline. Moves are accepted only when they shorten the path, so the
/// result never exceeds the initial length (the straight polyline with
/// `nodes` nodes unless `init` is given).
GeodesicResult geodesic_upper(const Scenario& s, const Vec& x, const Vec& y, int nodes, int iters,
                              const Polyline* init = nullptr);

/// Exact d_M in one dimension: ∫ √Φ'' between x and y.
double distance_1d(const Scenario& s, double x, double y, double tol = 1e-10);

struct LemmaChain {
  double dm2 = 0;  // squared distance (exact in 1D, straight-path upper bound otherwise)
  double mid = 0;  // ⟨∇Φ(y) − ∇Φ(x), y − x⟩
  double rhs = 0;  // |x − y|·|∇Φ(x) − ∇Φ(y)|
  bool exact = false;
  bool pass = false;
  double slack() const { return std::min(mid - dm2, rhs - mid); }
};
LemmaChain lemma_contraction_check(const Scenario& s, const Vec& x, const Vec& y);

/// {x : ⟨x, u⟩ ≤ c}; u is normalized on use.
struct HalfSpace {
  Vec u;
  double c = 0;
};

struct ConcentrationReport {
  HalfSpace a;
  std::vector<double> h_grid;
  std::vector<double> empirical_mass;
  std::vector<double> paper_bound;
  int sample_count = 0;
  std::uint64_t seed = 0;
  double diameter = 0;
  bool pass = false;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Monte Carlo mass of {x : U(x, A) ≤ h} under μ, where U ≥ d_M(x, A) is the
/// exact 1D distance or the Lemma 5.1 bound at the projection of x onto ∂A.
/// Needs c ≥ 0 so that μ(A) ≥ ½ for the centered source.
ConcentrationReport concentration_profile(const Scenario& s, const HalfSpace& a, const std::vector<double>& h_grid,
                                          int samples, std::optional<std::uint64_t> seed);

/// −log inf_t [e^{−K_μ(h²/t)} + e^{−K_ν(t)}] over 64 log-spaced t in
/// [1e−3·scale, 1e3·scale] together with t = scale.
double km_combination(const std::function<double(double)>& k_mu, const std::function<double(double)>& k_nu,
                      double h, double scale);

struct BishopGromovProfile {
  Vec x0;
  int exponent = 0;  // 2d
  std::vector<double> r;
  std::vector<double> mass;     // μ(B_r(x0))
  std::vector<double> profile;  // μ(B_r)/r^{2d}
  std::vector<double> density;  // μ(B_r)/r^d, finite as r → 0
  double max_violation = 0;     // largest increase between consecutive profile values
  bool pass = false;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Exact balls for 1D scenarios (any x0) and the radial scenario (x0 = 0).
BishopGromovProfile bishop_gromov_profile(const Scenario& s, const Vec& x0, const std::vector<double>& r_grid,
                                          double tolerance = 1e-8);

enum class DiameterFamily { kRadial, kProduct };

struct DiameterReport {
  DiameterFamily family = DiameterFamily::kRadial;
  double diameter = 0;
  std::vector<int> dims;
  std::vector<double> estimates;  // 99.9th percentile of the Lemma 5.1 pair bound
  double d_exponent = 0;
  std::vector<double> d_values;  // D sweep at the first dimension
  std::vector<double> d_estimates;
  double diameter_exponent = 0;
  double exact_1d = 0;  // exact metric diameter of gaussian_to_uniform_1d(D)
  int samples = 0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Scenario used for dimension d: gaussian_to_uniform_1d for d = 1, otherwise
/// the radial map or the product of d interval maps with total diameter D.
Scenario diameter_scenario(DiameterFamily family, int d, double diameter);

DiameterReport diameter_experiment(const std::vector<int>& dims, double diameter, int samples,
                                   std::optional<std::uint64_t> seed,
                                   DiameterFamily family = DiameterFamily::kRadial,
                                   const std::vector<double>& d_values = {0.5, 1.0, 2.0, 4.0});

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct CompletenessReport {
  double inf_eig_g = 0;
  double epsilon = 0;          // √inf_eig_g: d_M ≥ ε·d on the grid's convex hull
  bool full_support = false;   // V and W finite on all of ℝᵈ
  double inf_eig_hess_v = 0;   // c in D²V ≥ c·Id
  double sup_norm_hess_w = 0;  // C = sup‖D²W‖ over the image of the grid
  double lemma_epsilon = 0;    // (c/C)^{1/4} when the hypotheses hold
  std::string verdict;         // "complete-on-region" or "not-established"

  nlohmann::json to_json() const;
};
CompletenessReport completeness_check(const Scenario& s, const std::vector<Vec>& grid);

}  // namespace brenier
