#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "brenier/jet.hpp"
#include "brenier/scenario.hpp"

namespace brenier {

/// g = D²Φ, its inverse and the Christoffel symbols Γ^k_{ij} = ½g^{kl}Φ_{ijl},
/// stored as christoffel(k, i, j).
struct MetricFrame {
  Vec point;
  Mat g;
  Mat g_inv;
  Tensor christoffel;
  int dim() const { return static_cast<int>(point.size()); }
};

MetricFrame metric_frame(const Jet& phi);

/// R_{ijkl} = ¼g^{ms}(Φ_{mil}Φ_{sjk} − Φ_{mik}Φ_{sjl}).
Tensor riemann(const MetricFrame& frame, const Jet& phi);

/// ¼g^{jl}g^{ms}Φ_{mil}Φ_{sjk}: the first Ricci term, a non-negative form.
Mat ricci_first_term(const MetricFrame& frame, const Jet& phi);

enum class RicciRoute { kContraction, kCoordinate };

/// Ricci tensor. The coordinate route needs order-1 target composites.
Mat ricci(const MetricFrame& frame, const Jet& phi, const Jet& v, const TargetComposites* comps,
          RicciRoute route);

enum class HessianVariant { kCoordinate, kSymmetric };

/// Riemannian Hessian of f. The symmetric variant uses the jets of the
/// Legendre dual (order ≥ 3) at ∇Φ.
Mat hess_m(const Jet& f, const MetricFrame& frame, HessianVariant variant = HessianVariant::kCoordinate,
           const Jet* dual = nullptr);

/// Order-2 jet of P = ½(V + W∘∇Φ) built from the jets.
Jet weight_jet(const Jet& phi, const Jet& v, const TargetComposites& comps);

enum class BakryEmeryRoute { kCoordinate, kRicciPlusHessian };

Mat bakry_emery(const MetricFrame& frame, const Jet& phi, const Jet& v, const TargetComposites* comps,
                BakryEmeryRoute route = BakryEmeryRoute::kCoordinate);

struct WeightTensors {
  Vec p_grad;    // Euclidean gradient of P, the lowered form of ∇_M P
  Mat p_hess_m;  // D²_M P
  Mat be;        // Ric + D²_M P
};

WeightTensors weight_tensors(const MetricFrame& frame, const Jet& phi, const Jet& v,
                             const TargetComposites& comps);

/// R_{N,μ} = be − ∇P∇Pᵀ/(N − d); throws InvalidN unless N > d.
Mat modified_tensor(const Mat& be, const Vec& p_grad, double n);

/// All tensors of the scenario at one point. The value slot of `phi` is not
/// filled, since no tensor depends on it.
struct PointGeometry {
  Jet phi;
  Jet v;
  TargetComposites comps;
  MetricFrame frame;
  WeightTensors weights;
};
PointGeometry point_geometry(const Scenario& s, const Vec& x);

struct PointBounds {
  Vec point;
  double min_eig_be = 0;         // (a)
  double thm43_constant = 0;     // largest C allowed by the sufficient condition
  double thm43_slack = 0;        // (b) min-eig_g(be) − C
  double lower_form_slack = 0;   // be − (½D²V + ½gW''g) PSD
  double lemma91_slack = 0;      // (c) diagonal bound, min over i
  double lemma91_alt_slack = 0;  // same bound with W_ii read as W^{ii}
  double cauchy_slack = 0;       // (c) trace inequality, min over i
  double min_eig_modified = 0;   // (d) min-eig_g(R_N) − K
  bool pass = false;
};

struct GeometryReport {
  double k = 0;
  double n = 0;
  double tolerance = 0;
  std::vector<PointBounds> points;
  bool pass = true;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Checks Theorem 1.1 / 4.3, Lemma 9.1 and the CD(K, N) condition pointwise.
/// Mathematical violations are reported, never thrown.
GeometryReport verify_bounds(const Scenario& s, const std::vector<Vec>& points, double k, double n,
                             double tolerance = 1e-10);

}  // namespace brenier
