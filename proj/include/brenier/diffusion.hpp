#pragma once

#include <string>

#include "brenier/geometry.hpp"
#include "brenier/potentials.hpp"
#include "brenier/scenario.hpp"

namespace brenier {

/// Scalar test field with exact jets to order 2.
class TestField {
 public:
  enum class Kind { kConstant, kLinear, kQuadratic, kSine, kBump };

  static TestField constant(int dim, double c);
  static TestField linear(Vec a);
  /// ½ xᵀAx + b·x
  static TestField quadratic(Mat a, Vec b);
  /// sin(a·x + phase)
  static TestField sine(Vec a, double phase = 0.0);
  /// Π_i (1 − t_i²)³ with t_i = (x_i − c_i)/r_i, zero outside the box.
  static TestField bump(Vec center, Vec radius);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(a_.size()); }
  std::string name() const;
  Jet jet(const Vec& x, int order = 2) const;
  double value(const Vec& x) const { return jet(x, 0).value; }
  /// Closed support box; all-space for the non-compact kinds.
  SupportBox support() const;

 private:
  Kind kind_ = Kind::kConstant;
  Vec a_;      // linear / sine direction, bump center, constant: size only
  Vec b_;      // quadratic linear part, bump radius
  Mat m_;      // quadratic matrix
  double c_ = 0.0;
};

/// Γ_Φ(f, h) = ⟨(D²Φ)⁻¹∇f, ∇h⟩.
double carre_du_champ(const Jet& f, const Jet& h, const MetricFrame& frame);
inline double carre_du_champ(const Jet& f, const MetricFrame& frame) { return carre_du_champ(f, f, frame); }

/// L_Φ f = Tr[D²f·(D²Φ)⁻¹] − ⟨∇f, W'(∇Φ)⟩.
double apply_l(const Jet& f, const MetricFrame& frame, const TargetComposites& comps);
/// The same operator written as Δ_M f − ⟨∇_M P, ∇_M f⟩_M.
double apply_l_geometric(const Jet& f, const MetricFrame& frame, const Vec& p_grad);

/// V_e + L_Φ Φ_e at x, which vanishes by the differentiated Monge–Ampère equation.
double ma_diffusion_check(const Scenario& s, const Vec& x, const Vec& e);

enum class Gamma2Route { kBochner, kDirectFd, kClosed1d };

/// Γ₂(f)(x). direct_fd differentiates the fields Γ_Φ(f) and L_Φ f with a
/// 5-point stencil of step `fd_step`; the other routes are exact.
double gamma2(const TestField& f, const Scenario& s, const Vec& x, Gamma2Route route,
              double fd_step = 1e-3);

struct IbpResult {
  double lhs = 0;    // ∫⟨(D²Φ)⁻¹∇f, ∇h⟩ dμ
  double rhs_f = 0;  // −∫ f L_Φ h dμ
  double rhs_h = 0;  // −∫ h L_Φ f dμ
};

struct QuadratureSpec {
  double truncation = 8.0;  // integrate over [−T, T]ᵈ
  double abs_tol = 1e-9;
};

/// Lemma 2.1 integrals over the common support of f and h.
IbpResult ibp_check(const TestField& f, const TestField& h, const Scenario& s,
                    const QuadratureSpec& spec = {});

}  // namespace brenier
