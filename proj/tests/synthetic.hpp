#pragma once

// Non-separable test potential Φ(x) = ½|x|² + e^{a·x} with exact jets to
// order 5, and helpers for random symmetric jets.

#include <cmath>
#include <random>

#include "brenier/jet.hpp"
#include "brenier/tensor.hpp"

namespace synthetic {

using brenier::Jet;
using brenier::Mat;
using brenier::Tensor;
using brenier::Vec;

inline Jet exp_ridge_jet(const Vec& a, const Vec& x, int order = 5) {
  const int d = static_cast<int>(x.size());
  const double e = std::exp(a.dot(x));
  Jet j = Jet::zero(x, order);
  j.value = 0.5 * x.squaredNorm() + e;
  j.grad = x + e * a;
  if (order >= 2) j.hess = Mat::Identity(d, d) + e * a * a.transpose();
  auto fill = [&](Tensor& t, int rank) {
    brenier::for_each_index(d, rank, [&](std::span<const int> idx) {
      double p = e;
      for (int i : idx) p *= a(i);
      t.at(idx) = p;
    });
  };
  if (order >= 3) fill(j.d3, 3);
  if (order >= 4) fill(j.d4, 4);
  if (order >= 5) fill(j.d5, 5);
  return j;
}

/// Quartic source potential V(x) = ½|x|² + ¼Σ x_i⁴ with jets to order 3.
inline Jet quartic_v_jet(const Vec& x, int order = 3) {
  const int d = static_cast<int>(x.size());
  Jet j = Jet::zero(x, order);
  j.value = 0.5 * x.squaredNorm() + 0.25 * x.array().pow(4).sum();
  j.grad = x + x.array().pow(3).matrix();
  if (order >= 2) j.hess = Mat::Identity(d, d) + Mat(x.array().square().matrix().asDiagonal()) * 3.0;
  if (order >= 3)
    for (int i = 0; i < d; ++i) j.d3(i, i, i) = 6 * x(i);
  return j;
}

/// Random SPD matrix with condition number at most `cond`.
inline Mat random_spd(int d, std::mt19937_64& rng, double cond = 100.0) {
  std::normal_distribution<double> n01;
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) a(i, k) = n01(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  const Mat q = qr.householderQ();
  std::uniform_real_distribution<double> u(0.0, std::log(cond));
  Vec eig(d);
  for (int i = 0; i < d; ++i) eig(i) = std::exp(u(rng));
  if (d > 1) {
    eig(0) = 1.0;
    eig(1) = cond;
  }
  return q * eig.asDiagonal() * q.transpose();
}

/// Random fully symmetric tensor with entries in [−1, 1].
inline Tensor random_symmetric(int d, int rank, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(d, rank);
  brenier::for_each_index(d, rank, [&](std::span<const int> idx) {
    for (std::size_t s = 1; s < idx.size(); ++s)
      if (idx[s] < idx[s - 1]) return;
    t.set_symmetric(idx, u(rng));
  });
  return t;
}

/// V = W(∇Φ) − log det D²Φ for the exp-ridge Φ and W(y) = ½|y|², so that
/// (V, W, Φ) solve the Monge–Ampère equation; jets to order 3.
/// With u = a·x and e = e^u: V = ½|x|² + ue + ½|a|²e² − log(1 + |a|²e).
inline Jet exp_ridge_v_jet(const Vec& a, const Vec& x, int order = 3) {
  const int d = static_cast<int>(x.size());
  const double u = a.dot(x);
  const double e = std::exp(u);
  const double al = a.squaredNorm();
  const double sg = al * e / (1.0 + al * e);
  Jet j = Jet::zero(x, order);
  j.value = 0.5 * x.squaredNorm() + u * e + 0.5 * al * e * e - std::log1p(al * e);
  j.grad = x + (e * (u + 1) + al * e * e - sg) * a;
  if (order >= 2) j.hess = Mat::Identity(d, d) + (e * (u + 2) + 2 * al * e * e - sg * (1 - sg)) * a * a.transpose();
  if (order >= 3) {
    const double c = e * (u + 3) + 4 * al * e * e - sg * (1 - sg) * (1 - 2 * sg);
    brenier::for_each_index(d, 3, [&](std::span<const int> idx) { j.d3.at(idx) = c * a(idx[0]) * a(idx[1]) * a(idx[2]); });
  }
  return j;
}

/// Jet with random SPD hessian and random symmetric third and fourth
/// derivatives; the first derivative is zero.
inline Jet random_jet(int d, std::mt19937_64& rng, double cond = 100.0) {
  Jet j = Jet::zero(Vec::Zero(d), 4);
  j.hess = random_spd(d, rng, cond);
  j.d3 = random_symmetric(d, 3, rng);
  j.d4 = random_symmetric(d, 4, rng);
  return j;
}

}  // namespace synthetic
