#include "brenier/calabi.hpp"

#include <cmath>

#include "brenier/error.hpp"
#include "brenier/finite_difference.hpp"
#include "brenier/linalg.hpp"

namespace brenier {
namespace {

// Applies m in the slots selected by `mask` (bit s for slot s).
Tensor raise(const Tensor& t, const Mat& m, unsigned mask) {
  Tensor cur = t;
  const int d = t.dim();
  for (int slot = 0; slot < t.rank(); ++slot) {
    if (!(mask & (1u << slot))) continue;
    Tensor next(d, t.rank());
    std::vector<int> src(t.rank());
    for_each_index(d, t.rank(), [&](std::span<const int> idx) {
      src.assign(idx.begin(), idx.end());
      double sum = 0.0;
      for (int q = 0; q < d; ++q) {
        src[slot] = q;
        sum += m(idx[slot], q) * cur.at(src);
      }
      next.at(idx) = sum;
    });
    cur = std::move(next);
  }
  return cur;
}

constexpr unsigned kAll3 = 0b111;

Mat inverse(const Mat& g) { return g.llt().solve(Mat::Identity(g.rows(), g.cols())); }

void require_order(const Jet& j, int order, const char* what) {
  if (j.order < order) {
    throw Error(ErrorCode::kOrderUnsupported, std::string(what) + " needs jets of order >= " + std::to_string(order));
  }
}

// Whitened tensors: components in a g-orthonormal frame, where upper and
// lower indices coincide.
struct Whitened {
  Tensor t3;
  Tensor t4;
};

Whitened whiten(const MetricFrame& frame, const Jet& phi) {
  const Mat h = linalg::spd_inv_sqrt(frame.g);
  Whitened w;
  w.t3 = linalg::transform(phi.d3, h);
  if (phi.order >= 4) w.t4 = linalg::transform(phi.d4, h);
  return w;
}

// B_{ad} = Σ_{ef} T_{aef}T_{def} in the whitened frame.
Mat gram(const Tensor& t) {
  const int d = t.dim();
  Mat b = Mat::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int c = 0; c < d; ++c) b(a, c) = linalg::slice(t, a).cwiseProduct(linalg::slice(t, c)).sum();
  return b;
}

double term_iii(const Whitened& w) {
  const Tensor& t = w.t3;
  const Tensor& f = w.t4;
  const int d = t.dim();
  const double quartic = gram(t).squaredNorm();
  double cyclic = 0.0;  // T_{abc}T_{dae}T_{ebf}T_{fcd}
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int dd = 0; dd < d; ++dd)
          for (int e = 0; e < d; ++e)
            for (int ff = 0; ff < d; ++ff) cyclic += t(a, b, c) * t(dd, a, e) * t(e, b, ff) * t(ff, c, dd);
  double mixed = 0.0;  // F_{abcd}T_{abe}T_{cde}
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int dd = 0; dd < d; ++dd) {
          double inner = 0.0;
          for (int e = 0; e < d; ++e) inner += t(a, b, e) * t(c, dd, e);
          mixed += f(a, b, c, dd) * inner;
        }
  return 3.0 * quartic + 2.0 * cyclic - 6.0 * mixed + 2.0 * linalg::dot(f, f);
}

}  // namespace

double third_contraction(const MetricFrame& frame, const Jet& phi) {
  require_order(phi, 3, "third_contraction");
  return linalg::dot(linalg::transform(phi.d3, frame.g_inv), phi.d3);
}

double quartic_contraction(const MetricFrame& frame, const Jet& phi) {
  require_order(phi, 3, "quartic_contraction");
  return gram(whiten(frame, phi).t3).squaredNorm();
}

CalabiFrame calabi_decomposition(const Jet& phi, const Jet& v, const TargetComposites& comps,
                                 const MetricFrame& frame) {
  require_order(phi, 4, "calabi_decomposition (phi)");
  require_order(v, 3, "calabi_decomposition (V)");
  if (comps.order < 3) throw Error(ErrorCode::kOrderUnsupported, "calabi_decomposition needs order-3 composites");
  const Mat h = linalg::spd_inv_sqrt(frame.g);
  const Mat root = linalg::spd_sqrt(frame.g);
  const Whitened w = whiten(frame, phi);
  const Mat b = gram(w.t3);

  CalabiFrame out;
  out.s = b.trace();
  out.quartic = b.squaredNorm();
  out.fourth_sq = linalg::dot(w.t4, w.t4);
  const Mat v2 = h * v.hess * h;
  const Mat w2 = root * comps.w2 * root;
  out.term_i = 3.0 * v2.cwiseProduct(b).sum() + 3.0 * w2.cwiseProduct(b).sum();
  out.term_ii = -2.0 * linalg::dot(linalg::transform(v.d3, h), w.t3) +
                2.0 * linalg::dot(linalg::transform(comps.w3, root), w.t3);
  out.term_iii = term_iii(w);
  return out;
}

double quadratic_form(double x, double y, double z) {
  return 2 * x * x - 3 * x * y - 3 * x * z + 2 * y * z + 1.5 * y * y + 1.5 * z * z;
}

double quadratic_form_min_eig() {
  Mat m(3, 3);
  m << 2.0, -1.5, -1.5, -1.5, 1.5, 1.0, -1.5, 1.0, 1.5;
  return linalg::min_eigenvalue(m);
}

PositivityResult calabi_positivity_check(const Jet& phi, const MetricFrame& frame) {
  require_order(phi, 4, "calabi_positivity_check");
  const Whitened w = whiten(frame, phi);
  PositivityResult r;
  r.iii = term_iii(w);
  r.lower = quadratic_form_min_eig() * (gram(w.t3).squaredNorm() + linalg::dot(w.t4, w.t4));
  r.pass = r.iii >= r.lower - 1e-9;
  return r;
}

CalabiInequality calabi_inequality_check(const MetricFrame& frame, const Jet& phi, int d) {
  require_order(phi, 3, "calabi_inequality_check");
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be positive");
  const Mat b = gram(whiten(frame, phi).t3);
  CalabiInequality r;
  r.quartic = b.squaredNorm();
  r.s_sq_over_d = b.trace() * b.trace() / d;
  r.pass = r.quartic >= r.s_sq_over_d - 1e-10;
  return r;
}

double lphi_fd(const std::function<double(const Vec&)>& field, const MetricFrame& frame,
               const TargetComposites& comps, double step) {
  const GradHess gh = richardson_grad_hess(field, frame.point, step);
  return frame.g_inv.cwiseProduct(gh.hess).sum() - comps.w1.dot(gh.grad);
}

CalabiFdCheck calabi_fd_check(const Scenario& s, const Vec& x, double step) {
  if (s.max_jet_order() < 5) {
    throw Error(ErrorCode::kOrderUnsupported, "scenario " + to_string(s.kind()) + " lacks order-5 jets");
  }
  const Jet phi = s.phi_derivatives(x, 4);
  const MetricFrame frame = metric_frame(phi);
  const TargetComposites comps = target_composites(s, x, 3);
  CalabiFdCheck out;
  out.frame = calabi_decomposition(phi, s.source().jet(x, 3), comps, frame);
  out.fd = lphi_fd(
      [&](const Vec& y) {
        const Jet p = s.phi_derivatives(y, 3);
        return third_contraction(metric_frame(p), p);
      },
      frame, comps, step);
  out.residual = out.frame.total() - out.fd;
  return out;
}

std::string to_string(LphiIdentity which) {
  switch (which) {
    case LphiIdentity::kD2Lower: return "d2_lower";
    case LphiIdentity::kD2Upper: return "d2_upper";
    case LphiIdentity::kD3Lower: return "d3_lower";
    case LphiIdentity::kD3Upper: return "d3_upper";
  }
  return "?";
}

IdentityResidual lphi_identity(const PhiJetField& phi_at, const Jet& v, const TargetComposites& comps,
                               const Vec& x, LphiIdentity which, std::array<int, 3> idx, double step) {
  require_order(v, 3, "lphi_identity (V)");
  if (comps.order < 3) throw Error(ErrorCode::kOrderUnsupported, "lphi_identity needs order-3 composites");
  const Jet phi = phi_at(x, 4);
  require_order(phi, 4, "lphi_identity (phi)");
  const int d = phi.dim();
  for (int k = 0; k < 3; ++k) {
    if (idx[k] < 0 || idx[k] >= d) throw Error(ErrorCode::kInvalidArgument, "index out of range");
  }
  const MetricFrame frame = metric_frame(phi);
  const Mat& g = frame.g;
  const Mat& a = frame.g_inv;
  const Tensor& t = phi.d3;
  const Tensor& f4 = phi.d4;
  const int i = idx[0], j = idx[1], k = idx[2];

  IdentityResidual r;
  std::function<double(const Vec&)> field;
  switch (which) {
    case LphiIdentity::kD2Lower: {
      field = [&](const Vec& y) { return phi_at(y, 2).hess(i, j); };
      const Tensor t01 = raise(t, a, 0b011);
      double q = 0.0;
      for (int p = 0; p < d; ++p)
        for (int s = 0; s < d; ++s) q += t01(p, s, i) * t(p, s, j);
      r.rhs = -v.hess(i, j) + (g * comps.w2 * g)(i, j) + q;
      break;
    }
    case LphiIdentity::kD2Upper: {
      field = [&](const Vec& y) { return inverse(phi_at(y, 2).hess)(i, j); };
      const Tensor tu = raise(t, a, kAll3);
      const Tensor t0 = raise(t, a, 0b001);
      double q = 0.0;
      for (int p = 0; p < d; ++p)
        for (int s = 0; s < d; ++s) q += tu(i, p, s) * t0(j, p, s);
      r.rhs = (a * v.hess * a)(i, j) - comps.w2(i, j) + q;
      break;
    }
    case LphiIdentity::kD3Lower: {
      field = [&](const Vec& y) { return phi_at(y, 3).d3(i, j, k); };
      const Tensor f01 = raise(f4, a, 0b0011);
      const Tensor m = raise(t, a, 0b001);  // Φ^a_{bi}
      const Tensor w3l = linalg::transform(comps.w3, g);
      const Mat wm = comps.w2 * g;  // W^s_i
      double quad = 0.0, cubic = 0.0, lin = 0.0;
      for (int p = 0; p < d; ++p)
        for (int s = 0; s < d; ++s) {
          quad += t(p, s, i) * f01(p, s, j, k) + t(p, s, j) * f01(p, s, i, k) + t(p, s, k) * f01(p, s, i, j);
          for (int c = 0; c < d; ++c) cubic += m(p, s, i) * m(s, c, j) * m(c, p, k);
        }
      for (int s = 0; s < d; ++s) lin += wm(s, i) * t(s, j, k) + wm(s, j) * t(s, i, k) + wm(s, k) * t(s, i, j);
      r.rhs = quad - 2.0 * cubic - v.d3(i, j, k) + w3l(i, j, k) + lin;
      break;
    }
    case LphiIdentity::kD3Upper: {
      field = [&](const Vec& y) {
        const Jet p = phi_at(y, 3);
        return linalg::transform(p.d3, inverse(p.hess))(i, j, k);
      };
      const Tensor tu = raise(t, a, kAll3);
      const Tensor f23 = raise(f4, a, 0b1100);
      const Tensor n = raise(t, a, 0b011);  // Φ^{ia}_b
      const Tensor m = raise(t, a, 0b001);  // Φ^a_{xy}
      const Tensor t12 = raise(t, a, 0b110);
      const Tensor v3u = raise(v.d3, a, kAll3);
      const Mat vu = a * v.hess * a;
      double quad = 0.0, cubic = 0.0, lin = 0.0, tail = 0.0;
      for (int p = 0; p < d; ++p)
        for (int s = 0; s < d; ++s) {
          quad += tu(p, s, i) * f23(p, s, j, k) + tu(p, s, j) * f23(p, s, i, k) + tu(p, s, k) * f23(p, s, i, j);
          for (int c = 0; c < d; ++c) {
            cubic += n(i, p, s) * n(j, s, c) * n(k, c, p);
            tail += m(p, s, c) * (tu(i, s, c) * n(j, k, p) + tu(j, s, c) * n(i, k, p) + tu(k, s, c) * n(i, j, p));
          }
        }
      for (int s = 0; s < d; ++s) lin += vu(i, s) * t12(s, j, k) + vu(s, j) * t12(s, i, k) + vu(s, k) * t12(s, i, j);
      r.rhs = -quad + 4.0 * cubic - v3u(i, j, k) + comps.w3(i, j, k) + lin + tail;
      break;
    }
  }
  r.lhs = lphi_fd(field, frame, comps, step);
  return r;
}

IdentityResidual lphi_identity(const Scenario& s, const Vec& x, LphiIdentity which, std::array<int, 3> idx,
                               double step) {
  if (s.max_jet_order() < 5) {
    throw Error(ErrorCode::kOrderUnsupported, "scenario " + to_string(s.kind()) + " lacks order-5 jets");
  }
  const PhiJetField phi_at = [&](const Vec& y, int order) { return s.phi_derivatives(y, order); };
  return lphi_identity(phi_at, s.source().jet(x, 3), target_composites(s, x, 3), x, which, idx, step);
}

double lphi_identity_check(const Scenario& s, const Vec& x, LphiIdentity which, std::array<int, 3> idx,
                           double step) {
  return lphi_identity(s, x, which, idx, step).residual();
}

}  // namespace brenier
