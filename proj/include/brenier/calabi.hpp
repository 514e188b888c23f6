#pragma once

#include <array>
#include <functional>
#include <string>

#include "brenier/geometry.hpp"
#include "brenier/scenario.hpp"

namespace brenier {

/// Fourth-order scalars at one point. Upper indices are raised with g⁻¹;
/// upper indices on W mean the plain composites W_{ab..}(∇Φ).
struct CalabiFrame {
  double s = 0;          // Φ^{abc}Φ_{abc}
  double term_i = 0;     // 3V_{ab}Φ^{aij}Φ^b_{ij} + 3W^{ab}Φ^{ij}_aΦ_{ijb}
  double term_ii = 0;    // −2V^{abc}Φ_{abc} + 2W^{abc}Φ_{abc}
  double term_iii = 0;   // purely Φ-dependent remainder
  double quartic = 0;    // Φ^{abc}Φ^{def}Φ_{aef}Φ_{dbc}
  double fourth_sq = 0;  // Φ^{abcd}Φ_{abcd}

  double total() const { return term_i + term_ii + term_iii; }
};

double third_contraction(const MetricFrame& frame, const Jet& phi);

/// Φ^{abc}Φ^{def}Φ_{aef}Φ_{dbc}; needs order 3.
double quartic_contraction(const MetricFrame& frame, const Jet& phi);

/// L_Φ(Φ^{abc}Φ_{abc}) split into I, II and III. Needs phi of order 4, v of
/// order 3 and composites of order 3.
CalabiFrame calabi_decomposition(const Jet& phi, const Jet& v, const TargetComposites& comps,
                                 const MetricFrame& frame);

/// Smallest eigenvalue of the form 2x² − 3xy − 3xz + 2yz + 3/2 y² + 3/2 z².
double quadratic_form_min_eig();
double quadratic_form(double x, double y, double z);

struct PositivityResult {
  double iii = 0;
  double lower = 0;  // c_q·(quartic + fourth_sq)
  bool pass = false;
};
PositivityResult calabi_positivity_check(const Jet& phi, const MetricFrame& frame);

struct CalabiInequality {
  double quartic = 0;
  double s_sq_over_d = 0;
  bool pass = false;
};
CalabiInequality calabi_inequality_check(const MetricFrame& frame, const Jet& phi, int d);

/// Φ-jets (derivatives 1..order) at an arbitrary point near x.
using PhiJetField = std::function<Jet(const Vec&, int)>;

/// L_Φ F at x for a scalar field F, with second derivatives from a 3-point
/// stencil at `step` and step/2 combined by one Richardson level.
double lphi_fd(const std::function<double(const Vec&)>& field, const MetricFrame& frame,
               const TargetComposites& comps, double step = 1e-2);

struct CalabiFdCheck {
  CalabiFrame frame;
  double fd = 0;        // L_ΦS by finite differences
  double residual = 0;  // I + II + III − fd
};
CalabiFdCheck calabi_fd_check(const Scenario& s, const Vec& x, double step = 1e-2);

enum class LphiIdentity { kD2Lower, kD2Upper, kD3Lower, kD3Upper };
std::string to_string(LphiIdentity which);

struct IdentityResidual {
  double lhs = 0;  // FD application of L_Φ to the component field
  double rhs = 0;  // closed form from the jets at x
  double residual() const { return lhs - rhs; }
};

/// Residual of one component of the L_Φ identities for g_{ij}, g^{ij}, Φ_{ijk}
/// and Φ^{ijk}. Only the first two indices are used for the rank-2 identities.
/// `v` needs order 3 and `comps` order 3 at the point of `frame`.
IdentityResidual lphi_identity(const PhiJetField& phi_at, const Jet& v, const TargetComposites& comps,
                               const Vec& x, LphiIdentity which, std::array<int, 3> idx,
                               double step = 1e-2);

/// Scenario form; throws OrderUnsupported unless the scenario has order-5 jets.
IdentityResidual lphi_identity(const Scenario& s, const Vec& x, LphiIdentity which, std::array<int, 3> idx,
                               double step = 1e-2);
double lphi_identity_check(const Scenario& s, const Vec& x, LphiIdentity which, std::array<int, 3> idx,
                           double step = 1e-2);

}  // namespace brenier
