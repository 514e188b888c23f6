#include "brenier/diffusion.hpp"

#include <cmath>

#include "brenier/error.hpp"
#include "brenier/finite_difference.hpp"
#include "brenier/linalg.hpp"
#include "brenier/quadrature.hpp"

namespace brenier {

TestField TestField::constant(int dim, double c) {
  TestField f;
  f.kind_ = Kind::kConstant;
  f.a_ = Vec::Zero(dim);
  f.c_ = c;
  return f;
}

TestField TestField::linear(Vec a) {
  TestField f;
  f.kind_ = Kind::kLinear;
  f.a_ = std::move(a);
  return f;
}

TestField TestField::quadratic(Mat a, Vec b) {
  TestField f;
  f.kind_ = Kind::kQuadratic;
  f.a_ = Vec::Zero(b.size());
  f.m_ = 0.5 * (a + a.transpose());
  f.b_ = std::move(b);
  return f;
}

TestField TestField::sine(Vec a, double phase) {
  TestField f;
  f.kind_ = Kind::kSine;
  f.a_ = std::move(a);
  f.c_ = phase;
  return f;
}

TestField TestField::bump(Vec center, Vec radius) {
  if (center.size() != radius.size() || (radius.array() <= 0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "bump needs positive radii matching the center");
  }
  TestField f;
  f.kind_ = Kind::kBump;
  f.a_ = std::move(center);
  f.b_ = std::move(radius);
  return f;
}

std::string TestField::name() const {
  switch (kind_) {
    case Kind::kConstant: return "constant";
    case Kind::kLinear: return "linear";
    case Kind::kQuadratic: return "quadratic";
    case Kind::kSine: return "sine";
    case Kind::kBump: return "bump";
  }
  return "unknown";
}

Jet TestField::jet(const Vec& x, int order) const {
  if (order < 0 || order > 2) throw Error(ErrorCode::kOrderUnsupported, "test fields have jets to order 2");
  const int d = dim();
  Jet j = Jet::zero(x, order);
  switch (kind_) {
    case Kind::kConstant:
      j.value = c_;
      break;
    case Kind::kLinear:
      j.value = a_.dot(x);
      if (order >= 1) j.grad = a_;
      break;
    case Kind::kQuadratic:
      j.value = 0.5 * x.dot(m_ * x) + b_.dot(x);
      if (order >= 1) j.grad = m_ * x + b_;
      if (order >= 2) j.hess = m_;
      break;
    case Kind::kSine: {
      const double t = a_.dot(x) + c_;
      j.value = std::sin(t);
      if (order >= 1) j.grad = std::cos(t) * a_;
      if (order >= 2) j.hess = -std::sin(t) * a_ * a_.transpose();
      break;
    }
    case Kind::kBump: {
      // Factor values b, b', b'' per axis, then the product rule.
      Vec v(d), dv(d), ddv(d);
      for (int i = 0; i < d; ++i) {
        const double t = (x(i) - a_(i)) / b_(i);
        if (std::abs(t) >= 1.0) return j;  // all zero
        const double u = 1 - t * t;
        v(i) = u * u * u;
        dv(i) = -6 * t * u * u / b_(i);
        ddv(i) = (-6 * u * u + 24 * t * t * u) / (b_(i) * b_(i));
      }
      auto prod_except = [&](int skip1, int skip2) {
        double p = 1.0;
        for (int i = 0; i < d; ++i)
          if (i != skip1 && i != skip2) p *= v(i);
        return p;
      };
      j.value = prod_except(-1, -1);
      if (order >= 1)
        for (int i = 0; i < d; ++i) j.grad(i) = dv(i) * prod_except(i, -1);
      if (order >= 2)
        for (int i = 0; i < d; ++i)
          for (int k = 0; k < d; ++k)
            j.hess(i, k) = i == k ? ddv(i) * prod_except(i, -1) : dv(i) * dv(k) * prod_except(i, k);
      break;
    }
  }
  return j;
}

SupportBox TestField::support() const {
  SupportBox s;
  const int d = dim();
  if (kind_ != Kind::kBump) {
    s.kind = SupportBox::Kind::kAllSpace;
    s.lo = Vec::Constant(d, -kInf);
    s.hi = Vec::Constant(d, kInf);
    return s;
  }
  s.kind = d == 1 ? SupportBox::Kind::kInterval : SupportBox::Kind::kBox;
  s.lo = a_ - b_;
  s.hi = a_ + b_;
  s.diameter = 2 * b_.norm();
  return s;
}

double carre_du_champ(const Jet& f, const Jet& h, const MetricFrame& frame) {
  return f.grad.dot(frame.g_inv * h.grad);
}

double apply_l(const Jet& f, const MetricFrame& frame, const TargetComposites& comps) {
  if (f.order < 2) throw Error(ErrorCode::kOrderUnsupported, "L_Φ needs a jet of order >= 2");
  return f.hess.cwiseProduct(frame.g_inv).sum() - f.grad.dot(comps.w1);
}

double apply_l_geometric(const Jet& f, const MetricFrame& frame, const Vec& p_grad) {
  const Mat h = hess_m(f, frame);
  return h.cwiseProduct(frame.g_inv).sum() - p_grad.dot(frame.g_inv * f.grad);
}

double ma_diffusion_check(const Scenario& s, const Vec& x, const Vec& e) {
  const Jet phi = s.phi_derivatives(x, 3);
  const MetricFrame frame = metric_frame(phi);
  const auto comps = target_composites(s, x, 1);
  Jet phi_e = Jet::zero(x, 2);
  phi_e.value = phi.grad.dot(e);
  phi_e.grad = phi.hess * e;
  phi_e.hess = linalg::contract_last(phi.d3, e);
  return s.source().jet(x, 1).grad.dot(e) + apply_l(phi_e, frame, comps);
}

namespace {

struct LocalData {
  Jet phi;
  MetricFrame frame;
  TargetComposites comps;
};

LocalData local(const Scenario& s, const Vec& x, int comp_order) {
  LocalData l;
  l.phi = s.phi_derivatives(x, 3);
  l.frame = metric_frame(l.phi);
  l.comps = target_composites(s, x, comp_order);
  return l;
}

}  // namespace

double gamma2(const TestField& f, const Scenario& s, const Vec& x, Gamma2Route route, double fd_step) {
  switch (route) {
    case Gamma2Route::kBochner: {
      const auto pg = point_geometry(s, x);
      const Jet fj = f.jet(x, 2);
      const Mat h = hess_m(fj, pg.frame);
      const Mat& a = pg.frame.g_inv;
      const Vec grad_m = a * fj.grad;
      return (a * h * a * h).trace() + grad_m.dot(pg.weights.be * grad_m);
    }
    case Gamma2Route::kClosed1d: {
      if (s.dim() != 1) throw Error(ErrorCode::kRouteUnavailable, "closed_1d route needs d = 1");
      const auto l = local(s, x, 2);
      const Jet fj = f.jet(x, 2);
      const double g = l.phi.hess(0, 0), p3 = l.phi.d3(0, 0, 0);
      const double f1 = fj.grad(0), f2 = fj.hess(0, 0);
      const double v2 = s.source().jet(x, 2).hess(0, 0);
      return f2 * f2 / (g * g) - p3 / (g * g * g) * f1 * f2 +
             0.5 * f1 * f1 * (p3 * p3 / (g * g * g * g) + v2 / (g * g) + l.comps.w2(0, 0));
    }
    case Gamma2Route::kDirectFd: {
      auto gamma_field = [&](const Vec& p) {
        const auto l = local(s, p, 1);
        return carre_du_champ(f.jet(p, 2), l.frame);
      };
      auto l_field = [&](const Vec& p) {
        const auto l = local(s, p, 1);
        return apply_l(f.jet(p, 2), l.frame, l.comps);
      };
      const auto l = local(s, x, 1);
      const GradHess gam = fd5_grad_hess(gamma_field, x, fd_step);
      const GradHess lf = fd5_grad_hess(l_field, x, fd_step);
      Jet gj = Jet::zero(x, 2);
      gj.value = gamma_field(x);
      gj.grad = gam.grad;
      gj.hess = gam.hess;
      Jet lj = Jet::zero(x, 1);
      lj.grad = lf.grad;
      const double l_gamma = apply_l(gj, l.frame, l.comps);
      return 0.5 * (l_gamma - 2 * lj.grad.dot(l.frame.g_inv * f.jet(x, 1).grad));
    }
  }
  return 0.0;
}

IbpResult ibp_check(const TestField& f, const TestField& h, const Scenario& s, const QuadratureSpec& spec) {
  const int d = s.dim();
  if (f.dim() != d || h.dim() != d) throw Error(ErrorCode::kInvalidArgument, "field dimension mismatch");
  const SupportBox sf = f.support(), sh = h.support();
  Vec lo = Vec::Constant(d, -spec.truncation), hi = Vec::Constant(d, spec.truncation);
  for (int i = 0; i < d; ++i) {
    lo(i) = std::max({lo(i), sf.lo(i), sh.lo(i)});
    hi(i) = std::min({hi(i), sf.hi(i), sh.hi(i)});
    if (!(lo(i) < hi(i))) return {};
  }
  // Every integrand vanishes where either field does, so the box above holds
  // the whole mass. Each integral is against e^{-V}.
  auto weight = [&](const Vec& x) { return std::exp(-s.source().jet(x, 0).value); };
  const quad::Options opts{.abs_tol = spec.abs_tol};
  IbpResult r;
  r.lhs = quad::box(
              [&](const Vec& x) {
                const auto l = local(s, x, 1);
                return carre_du_champ(f.jet(x, 1), h.jet(x, 1), l.frame) * weight(x);
              },
              lo, hi, opts)
              .value;
  r.rhs_f = -quad::box(
                 [&](const Vec& x) {
                   const auto l = local(s, x, 1);
                   return f.value(x) * apply_l(h.jet(x, 2), l.frame, l.comps) * weight(x);
                 },
                 lo, hi, opts)
                 .value;
  r.rhs_h = -quad::box(
                 [&](const Vec& x) {
                   const auto l = local(s, x, 1);
                   return h.value(x) * apply_l(f.jet(x, 2), l.frame, l.comps) * weight(x);
                 },
                 lo, hi, opts)
                 .value;
  return r;
}

}  // namespace brenier
