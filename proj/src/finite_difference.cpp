#include "brenier/finite_difference.hpp"

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "brenier/error.hpp"

namespace brenier {
namespace {

using Stencil = std::vector<std::pair<int, double>>;

// Central stencils for the k-th derivative, accuracy O(h²), unscaled by h^k.
const Stencil& central(int k) {
  static const std::array<Stencil, 6> table = {{
      {{0, 1.0}},
      {{-1, -0.5}, {1, 0.5}},
      {{-1, 1.0}, {0, -2.0}, {1, 1.0}},
      {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}},
      {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}},
      {{-3, -0.5}, {-2, 2.0}, {-1, -2.5}, {1, 2.5}, {2, -2.0}, {3, 0.5}},
  }};
  return table.at(k);
}

// Mixed partial ∂^α f where counts[i] is the multiplicity of axis i.
double mixed_partial(const ScalarField& f, const Vec& x, const std::vector<int>& counts,
                     double h) {
  const int d = static_cast<int>(x.size());
  std::vector<const Stencil*> st(d);
  int total = 0;
  for (int i = 0; i < d; ++i) {
    st[i] = &central(counts[i]);
    total += counts[i];
  }
  std::vector<std::size_t> pos(d, 0);
  double acc = 0.0;
  Vec p(d);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const auto& [off, c] = (*st[i])[pos[i]];
      p(i) = x(i) + off * h;
      w *= c;
    }
    acc += w * f(p);
    int axis = d - 1;
    while (axis >= 0 && ++pos[axis] == st[axis]->size()) pos[axis--] = 0;
    if (axis < 0) break;
  }
  return acc / std::pow(h, total);
}

void fill_order(const ScalarField& f, const Vec& x, double h, int order, Tensor& out) {
  const int d = static_cast<int>(x.size());
  for_each_index(d, order, [&](std::span<const int> idx) {
    for (std::size_t s = 1; s < idx.size(); ++s)
      if (idx[s] < idx[s - 1]) return;  // visit sorted multi-indices only
    std::vector<int> counts(d, 0);
    for (int i : idx) ++counts[i];
    out.set_symmetric(idx, mixed_partial(f, x, counts, h));
  });
}

}  // namespace

Jet fd_jet_oracle(const ScalarField& field, const Vec& x, int order, double step) {
  if (order < 1 || order > 5) throw Error(ErrorCode::kOrderUnsupported, "fd oracle order 1..5");
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "fd step must be positive");
  step = std::exp2(std::round(std::log2(step)));
  const int d = static_cast<int>(x.size());
  Jet j = Jet::zero(x, order);
  j.value = field(x);
  for (int i = 0; i < d; ++i) {
    std::vector<int> counts(d, 0);
    counts[i] = 1;
    j.grad(i) = mixed_partial(field, x, counts, step);
  }
  if (order >= 2) {
    Tensor h2(d, 2);
    fill_order(field, x, step, 2, h2);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) j.hess(a, b) = h2(a, b);
  }
  if (order >= 3) fill_order(field, x, step, 3, j.d3);
  if (order >= 4) fill_order(field, x, step, 4, j.d4);
  if (order >= 5) fill_order(field, x, step, 5, j.d5);
  return j;
}

GradHess fd5_grad_hess(const ScalarField& f, const Vec& x, double h) {
  const int d = static_cast<int>(x.size());
  static constexpr std::array<std::pair<int, double>, 4> d1 = {
      {{-2, 1.0 / 12}, {-1, -8.0 / 12}, {1, 8.0 / 12}, {2, -1.0 / 12}}};
  static constexpr std::array<std::pair<int, double>, 5> d2 = {
      {{-2, -1.0 / 12}, {-1, 16.0 / 12}, {0, -30.0 / 12}, {1, 16.0 / 12}, {2, -1.0 / 12}}};
  GradHess out{Vec::Zero(d), Mat::Zero(d, d)};
  for (int i = 0; i < d; ++i) {
    for (const auto& [o, c] : d1) {
      Vec p = x;
      p(i) += o * h;
      out.grad(i) += c * f(p);
    }
    out.grad(i) /= h;
    for (const auto& [o, c] : d2) {
      Vec p = x;
      p(i) += o * h;
      out.hess(i, i) += c * f(p);
    }
    out.hess(i, i) /= h * h;
    for (int j = 0; j < i; ++j) {
      double acc = 0.0;
      for (const auto& [oi, ci] : d1)
        for (const auto& [oj, cj] : d1) {
          Vec p = x;
          p(i) += oi * h;
          p(j) += oj * h;
          acc += ci * cj * f(p);
        }
      out.hess(i, j) = out.hess(j, i) = acc / (h * h);
    }
  }
  return out;
}

namespace {

GradHess central3(const ScalarField& f, const Vec& x, double h) {
  const int d = static_cast<int>(x.size());
  GradHess out{Vec::Zero(d), Mat::Zero(d, d)};
  const double f0 = f(x);
  for (int i = 0; i < d; ++i) {
    Vec p = x, m = x;
    p(i) += h;
    m(i) -= h;
    const double fp = f(p), fm = f(m);
    out.grad(i) = (fp - fm) / (2 * h);
    out.hess(i, i) = (fp - 2 * f0 + fm) / (h * h);
    for (int j = 0; j < i; ++j) {
      Vec pp = x, pm = x, mp = x, mm = x;
      pp(i) += h, pp(j) += h;
      pm(i) += h, pm(j) -= h;
      mp(i) -= h, mp(j) += h;
      mm(i) -= h, mm(j) -= h;
      out.hess(i, j) = out.hess(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
    }
  }
  return out;
}

}  // namespace

GradHess richardson_grad_hess(const ScalarField& f, const Vec& x, double h) {
  const GradHess coarse = central3(f, x, h);
  const GradHess fine = central3(f, x, 0.5 * h);
  return {(4.0 * fine.grad - coarse.grad) / 3.0, (4.0 * fine.hess - coarse.hess) / 3.0};
}

}  // namespace brenier
