#include "brenier/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brenier/error.hpp"
#include "brenier/io.hpp"
#include "brenier/linalg.hpp"

namespace brenier {
namespace {

// Q(i, l, j, k) = Σ_{ms} Φ_{mil} g^{ms} Φ_{sjk}
Tensor quadratic_third(const MetricFrame& frame, const Jet& phi) {
  const int d = frame.dim();
  Tensor u(d, 3);  // u(s, i, l) = Σ_m g^{sm} Φ_{mil}
  for (int s = 0; s < d; ++s)
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l) {
        double sum = 0.0;
        for (int m = 0; m < d; ++m) sum += frame.g_inv(s, m) * phi.d3(m, i, l);
        u(s, i, l) = sum;
      }
  Tensor q(d, 4);
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double sum = 0.0;
          for (int s = 0; s < d; ++s) sum += u(s, i, l) * phi.d3(s, j, k);
          q(i, l, j, k) = sum;
        }
  return q;
}

// c_s = g^{jl}Φ_{sjl}
Vec trace_third(const MetricFrame& frame, const Jet& phi) {
  const int d = frame.dim();
  Vec c(d);
  for (int s = 0; s < d; ++s) c(s) = frame.g_inv.cwiseProduct(linalg::slice(phi.d3, s)).sum();
  return c;
}

void require_third(const Jet& phi) {
  if (phi.order < 3) throw Error(ErrorCode::kOrderUnsupported, "curvature needs Φ jets of order >= 3");
}

void require_composites(const TargetComposites* comps, int order) {
  if (comps == nullptr || comps->order < order) {
    throw Error(ErrorCode::kMissingComposites,
                "target composites of order " + std::to_string(order) + " are required");
  }
}

}  // namespace

MetricFrame metric_frame(const Jet& phi) {
  require_third(phi);
  const int d = phi.dim();
  MetricFrame f;
  f.point = phi.point;
  f.g = phi.hess;
  Eigen::LLT<Mat> llt(f.g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kSingularHessian, "D²Φ is not positive definite");
  f.g_inv = llt.solve(Mat::Identity(d, d));
  f.christoffel = Tensor(d, 3);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double sum = 0.0;
        for (int l = 0; l < d; ++l) sum += f.g_inv(k, l) * phi.d3(i, j, l);
        f.christoffel(k, i, j) = 0.5 * sum;
      }
  return f;
}

Tensor riemann(const MetricFrame& frame, const Jet& phi) {
  require_third(phi);
  const int d = frame.dim();
  const Tensor q = quadratic_third(frame, phi);
  Tensor r(d, 4);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) r(i, j, k, l) = 0.25 * (q(i, l, j, k) - q(i, k, j, l));
  return r;
}

Mat ricci_first_term(const MetricFrame& frame, const Jet& phi) {
  require_third(phi);
  const int d = frame.dim();
  const Tensor q = quadratic_third(frame, phi);
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      double sum = 0.0;
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) sum += frame.g_inv(j, l) * q(i, l, j, k);
      out(i, k) = 0.25 * sum;
    }
  return out;
}

Mat ricci(const MetricFrame& frame, const Jet& phi, const Jet& v, const TargetComposites* comps,
          RicciRoute route) {
  require_third(phi);
  const int d = frame.dim();
  if (route == RicciRoute::kContraction) {
    const Tensor r = riemann(frame, phi);
    Mat out = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) {
        double sum = 0.0;
        for (int j = 0; j < d; ++j)
          for (int l = 0; l < d; ++l) sum += frame.g_inv(j, l) * r(i, j, k, l);
        out(i, k) = sum;
      }
    return out;
  }
  require_composites(comps, 1);
  if (v.order < 1) throw Error(ErrorCode::kOrderUnsupported, "Ricci needs V jets of order >= 1");
  // (g w1 − ∇V)_s, then ¼ g^{ms}Φ_{mik}(...)_s
  const Vec t = frame.g * comps->w1 - v.grad;
  const Vec raised = frame.g_inv * t;
  return ricci_first_term(frame, phi) - 0.25 * linalg::contract_last(phi.d3, raised);
}

Mat hess_m(const Jet& f, const MetricFrame& frame, HessianVariant variant, const Jet* dual) {
  if (f.order < 2) throw Error(ErrorCode::kOrderUnsupported, "hess_m needs a jet of order >= 2");
  const int d = frame.dim();
  if (variant == HessianVariant::kCoordinate) {
    Mat out = f.hess;
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) out(i, k) -= frame.christoffel(j, i, k) * f.grad(j);
    return out;
  }
  if (dual == nullptr || dual->order < 3) {
    throw Error(ErrorCode::kRouteUnavailable, "symmetric Hessian needs dual jets of order >= 3");
  }
  // D²_y[f∘∇Ψ] = D²Ψ·D²f·D²Ψ + Σ_i f_i ∂_i D²Ψ
  Mat dual_hess = dual->hess * f.hess * dual->hess;
  for (int i = 0; i < d; ++i) dual_hess += f.grad(i) * linalg::slice(dual->d3, i);
  return 0.5 * (f.hess + frame.g * dual_hess * frame.g);
}

Jet weight_jet(const Jet& phi, const Jet& v, const TargetComposites& comps) {
  if (comps.order < 2 || v.order < 2 || phi.order < 3) {
    throw Error(ErrorCode::kMissingComposites, "P jets need composites of order 2 and Φ of order 3");
  }
  Jet p = Jet::zero(phi.point, 2);
  p.value = std::numeric_limits<double>::quiet_NaN();  // W(∇Φ) itself is not needed
  p.grad = 0.5 * (v.grad + phi.hess * comps.w1);
  p.hess = 0.5 * (v.hess + linalg::contract_last(phi.d3, comps.w1) + phi.hess * comps.w2 * phi.hess);
  return p;
}

WeightTensors weight_tensors(const MetricFrame& frame, const Jet& phi, const Jet& v,
                             const TargetComposites& comps) {
  const Jet p = weight_jet(phi, v, comps);
  WeightTensors w;
  w.p_grad = p.grad;
  w.p_hess_m = hess_m(p, frame);
  w.be = bakry_emery(frame, phi, v, &comps, BakryEmeryRoute::kCoordinate);
  return w;
}

Mat bakry_emery(const MetricFrame& frame, const Jet& phi, const Jet& v, const TargetComposites* comps,
                BakryEmeryRoute route) {
  require_composites(comps, 2);
  if (route == BakryEmeryRoute::kRicciPlusHessian) {
    return ricci(frame, phi, v, comps, RicciRoute::kContraction) + hess_m(weight_jet(phi, v, *comps), frame);
  }
  if (v.order < 2) throw Error(ErrorCode::kOrderUnsupported, "Bakry–Émery needs V jets of order >= 2");
  return ricci_first_term(frame, phi) + 0.5 * v.hess + 0.5 * frame.g * comps->w2 * frame.g;
}

Mat modified_tensor(const Mat& be, const Vec& p_grad, double n) {
  const int d = static_cast<int>(be.rows());
  if (!(n > d)) throw Error(ErrorCode::kInvalidN, "N must exceed the dimension");
  if (std::isinf(n)) return be;
  return be - p_grad * p_grad.transpose() / (n - d);
}

PointGeometry point_geometry(const Scenario& s, const Vec& x) {
  PointGeometry pg;
  pg.phi = s.phi_derivatives(x, 3);
  pg.v = s.source().jet(x, 2);
  pg.comps = target_composites(s, x, 2);
  pg.frame = metric_frame(pg.phi);
  pg.weights = weight_tensors(pg.frame, pg.phi, pg.v, pg.comps);
  return pg;
}

GeometryReport verify_bounds(const Scenario& s, const std::vector<Vec>& points, double k, double n,
                             double tolerance) {
  GeometryReport rep;
  rep.k = k;
  rep.n = n;
  rep.tolerance = tolerance;
  const int d = s.dim();
  for (const Vec& x : points) {
    const PointGeometry pg = point_geometry(s, x);
    const Mat& g = pg.frame.g;
    const Mat& be = pg.weights.be;
    const Mat gwg = g * pg.comps.w2 * g;
    PointBounds b;
    b.point = x;
    b.min_eig_be = linalg::min_eigenvalue(be);

    const Mat gh = linalg::spd_sqrt(g);
    const Mat gih = linalg::spd_inv_sqrt(g);
    b.thm43_constant = 0.5 * linalg::min_eigenvalue(gih * pg.v.hess * gih + gh * pg.comps.w2 * gh);
    b.thm43_slack = linalg::min_generalized_eigenvalue(be, g) - b.thm43_constant;
    b.lower_form_slack = linalg::min_eigenvalue(be - 0.5 * pg.v.hess - 0.5 * gwg);

    const Vec c = g * pg.comps.w1 - pg.v.grad;  // Tr(g⁻¹ D²Φ_{x_i})
    b.lemma91_slack = std::numeric_limits<double>::infinity();
    b.lemma91_alt_slack = std::numeric_limits<double>::infinity();
    b.cauchy_slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
      const Mat m = pg.frame.g_inv * linalg::slice(pg.phi.d3, i);
      const double extra = c(i) * c(i) / (4.0 * d);
      b.cauchy_slack = std::min(b.cauchy_slack, 0.25 * (m * m).trace() - extra);
      b.lemma91_slack = std::min(b.lemma91_slack, be(i, i) - 0.5 * (pg.v.hess(i, i) + gwg(i, i)) - extra);
      b.lemma91_alt_slack =
          std::min(b.lemma91_alt_slack, be(i, i) - 0.5 * (pg.v.hess(i, i) + pg.comps.w2(i, i)) - extra);
    }
    b.min_eig_modified =
        linalg::min_generalized_eigenvalue(modified_tensor(be, pg.weights.p_grad, n), g) - k;

    b.pass = b.min_eig_be >= -tolerance && b.thm43_slack >= -tolerance && b.lower_form_slack >= -tolerance &&
             b.lemma91_slack >= -tolerance && b.cauchy_slack >= -tolerance && b.min_eig_modified >= -tolerance;
    rep.pass = rep.pass && b.pass;
    rep.points.push_back(std::move(b));
  }
  return rep;
}

nlohmann::json GeometryReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& b : points) {
    pts.push_back({{"point", io::to_json(b.point)},
                   {"min_eig_be", b.min_eig_be},
                   {"thm43_constant", b.thm43_constant},
                   {"thm43_slack", b.thm43_slack},
                   {"lower_form_slack", b.lower_form_slack},
                   {"lemma91_slack", b.lemma91_slack},
                   {"lemma91_alt_reading_slack", b.lemma91_alt_slack},
                   {"cauchy_slack", b.cauchy_slack},
                   {"min_eig_modified", b.min_eig_modified},
                   {"pass", b.pass}});
  }
  return {{"K", k},
          {"N", n},
          {"tolerance", tolerance},
          {"lemma91_w_reading", "(g W'' g)_ii; alternative W''_ii reported as lemma91_alt_reading_slack"},
          {"points", pts},
          {"pass", pass}};
}

std::string GeometryReport::to_csv() const {
  std::string out = "point,min_eig_be,min_eig_modified,slack\n";
  for (const auto& b : points) {
    const double slack = std::min({b.thm43_slack, b.lower_form_slack, b.lemma91_slack, b.cauchy_slack});
    out += io::point_cell(b.point) + "," + io::fmt(b.min_eig_be) + "," + io::fmt(b.min_eig_modified) + "," +
           io::fmt(slack) + "\n";
  }
  return out;
}

}  // namespace brenier
