#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "brenier/diffusion.hpp"
#include "brenier/scenario.hpp"

namespace brenier {

/// Λ(x) = ‖D²Φ(x)‖, the top eigenvalue of the positive definite Hessian.
double lambda_field(const Scenario& s, const Vec& x);

struct LambdaJet {
  double value = 0;
  Vec grad;            // ∇Λ = (vᵀ∂_kD²Φ v)_k for the top unit eigenvector v
  double metric_sq = 0;  // ⟨∇_MΛ, ∇_MΛ⟩_M = ⟨(D²Φ)⁻¹∇Λ, ∇Λ⟩
  bool simple = true;  // false when the top eigenvalue gap is below 1e−8
};
LambdaJet lambda_jet(const Scenario& s, const Vec& x);

enum class MeasureSide { kMu, kNu };
enum class IntegrationMethod { kQuadrature, kMonteCarlo };

struct IntegrationParams {
  double truncation = 8.0;  // quadrature over the window ∩ [−T, T]ᵈ
  double abs_tol = 1e-10;
  int samples = 100000;
  std::optional<std::uint64_t> seed;
};

struct IntegralEstimate {
  double value = 0;
  double error = 0;           // quadrature error estimate or Monte Carlo standard error
  double truncated_mass = 0;  // measure outside the quadrature box
};

/// ∫ field d(side). Quadrature needs a separable measure; Monte Carlo needs a seed.
IntegralEstimate integrate(const std::function<double(const Vec&)>& field, const Scenario& s, MeasureSide side,
                           IntegrationMethod method, const IntegrationParams& params = {});

struct IntegralReport {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double slack = 0;
  double ratio = 0;  // inequality-specific ratio (fitted constant, Hölder ratio, ...)
  IntegrationMethod method = IntegrationMethod::kQuadrature;
  double tolerance = 0;
  std::optional<std::uint64_t> seed;
  bool pass = false;
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// Non-negative test function of Λ with its derivative.
struct LambdaWeight {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;

  static LambdaWeight power(int k);  // Λ^k
};

/// lhs = ∫v₊f(Λ)dμ, rhs = ∫w₋(∇Φ)Λ²f(Λ)dμ + ∫(f′(Λ) + f(Λ)/Λ)⟨∇_MΛ,∇_MΛ⟩_M dμ.
IntegralReport theorem61_check(const Scenario& s, const LambdaWeight& f, double tolerance = 1e-6);

/// 4∫⟨∇_M√Λ, ∇_M√Λ⟩_M dμ against ∫v₊dμ (= 1 for the standard Gaussian).
IntegralReport lm_check(const Scenario& s, double tolerance = 1e-6);

/// ∫Λdμ − (∫√Λdμ)², reported with its ratio to the target diameter D.
IntegralReport variance_estimate(const Scenario& s);

/// ∫Λᵖdγ ≤ C_p(∫Λ^{p/2}dγ)², C_p = a/(a − 1), a = 4(p + 1)/p².
IntegralReport reverse_holder(const Scenario& s, double p);
double reverse_holder_constant(double p);

/// ∫|∇V|²e^{−V} ≥ ∫Tr[D²Φ·D²W(∇Φ)·D²Φ]e^{−V}.
IntegralReport vw_check(const Scenario& s, double tolerance = 1e-8);

/// Rayleigh quotients ∫|∇_Mf|²dμ / Var_μ(f); lhs is the minimum, ratio the
/// minimum times D. Fields with vanishing variance are excluded.
IntegralReport poincare_rayleigh(const Scenario& s, const std::vector<TestField>& fields);

}  // namespace brenier
