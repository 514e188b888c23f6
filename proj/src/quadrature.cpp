#include "brenier/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "brenier/error.hpp"
#include "brenier/io.hpp"

namespace brenier::quad {
namespace {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// Kronrod 15-point rule with embedded 7-point Gauss rule. Boost stores the
// non-negative abscissae only; even-indexed Kronrod nodes are the Gauss ones.
Panel gk15(const std::function<double(double)>& f, double a, double b, int& evals) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  const double fc = f(c);
  double kron = wk[0] * fc;
  double gauss = wg[0] * fc;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double s = f(c - h * x[i]) + f(c + h * x[i]);
    kron += wk[i] * s;
    if (i % 2 == 0) gauss += wg[i / 2] * s;
  }
  evals += 15;
  kron *= h;
  gauss *= h;
  if (!std::isfinite(kron)) {
    throw Error(ErrorCode::kQuadratureFailure, "non-finite integrand");
  }
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace

Result adaptive(const std::function<double(double)>& f, double a, double b, const Options& opts) {
  Result res;
  if (a == b) return res;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::priority_queue<Panel> heap;
  heap.push(gk15(f, a, b, res.evaluations));
  double total = heap.top().value;
  double err = heap.top().error;
  int intervals = 1;
  while (err > opts.abs_tol) {
    if (intervals >= opts.max_intervals) {
      throw Error(ErrorCode::kQuadratureFailure,
                  "tolerance " + io::fmt(opts.abs_tol) + " not met, error estimate " +
                      io::fmt(err));
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      throw Error(ErrorCode::kQuadratureFailure, "interval below machine resolution");
    }
    Panel left = gk15(f, worst.a, mid, res.evaluations);
    Panel right = gk15(f, mid, worst.b, res.evaluations);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum from the panels to drop the running-update rounding.
  total = 0.0;
  err = 0.0;
  std::vector<Panel> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& p, const Panel& q) { return p.a < q.a; });
  for (const Panel& p : panels) {
    total += p.value;
    err += p.error;
  }
  res.value = sign * total;
  res.error = err;
  return res;
}

double gauss_legendre5(const std::function<double(double)>& f, double a, double b) {
  using G = boost::math::quadrature::gauss<double, 5>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double acc = w[0] * f(c);
  for (std::size_t i = 1; i < x.size(); ++i) acc += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
  return h * acc;
}

namespace {

Result box_rec(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi,
               Vec& point, int axis, const Options& opts) {
  const int d = static_cast<int>(lo.size());
  if (axis == d - 1) {
    return adaptive(
        [&](double t) {
          point(axis) = t;
          return f(point);
        },
        lo(axis), hi(axis), opts);
  }
  double width = 1.0;
  for (int k = axis; k < d; ++k) width *= std::max(hi(k) - lo(k), 1e-300);
  Options inner = opts;
  inner.abs_tol = opts.abs_tol / std::max(hi(axis) - lo(axis), 1.0);
  int evals = 0;
  double inner_err = 0.0;
  Result outer = adaptive(
      [&](double t) {
        point(axis) = t;
        Vec saved = point;
        Result r = box_rec(f, lo, hi, point, axis + 1, inner);
        point = saved;
        evals += r.evaluations;
        inner_err = std::max(inner_err, r.error);
        return r.value;
      },
      lo(axis), hi(axis), opts);
  outer.evaluations += evals;
  outer.error += inner_err * (hi(axis) - lo(axis));
  return outer;
}

}  // namespace

Result box(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi,
           const Options& opts) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "box: bad bounds");
  }
  Vec point = lo;
  return box_rec(f, lo, hi, point, 0, opts);
}

}  // namespace brenier::quad
