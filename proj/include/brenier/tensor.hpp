#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace brenier {

/// Dense rank-k array over an index range 0..dim-1 in each slot, stored
/// row-major. Used for third and higher partial derivatives and for curvature
/// tensors; symmetry is a property of the contents, not of the container.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, int rank);

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  template <class... Idx>
  double& operator()(Idx... idx) {
    return data_[offset(std::array<int, sizeof...(Idx)>{static_cast<int>(idx)...})];
  }
  template <class... Idx>
  double operator()(Idx... idx) const {
    return data_[offset(std::array<int, sizeof...(Idx)>{static_cast<int>(idx)...})];
  }

  double& at(std::span<const int> idx) { return data_[offset(idx)]; }
  double at(std::span<const int> idx) const { return data_[offset(idx)]; }

  void fill(double v);
  double max_abs() const;

  /// Largest |T(σ(idx)) − T(idx)| over all indices and all transpositions of
  /// adjacent slots (which generate the full permutation group).
  double max_asymmetry() const;

  /// Writes `value` at every permutation of `idx`.
  void set_symmetric(std::span<const int> idx, double value);

  Tensor& operator+=(const Tensor& o);
  Tensor& operator-=(const Tensor& o);
  Tensor& operator*=(double s);

 private:
  template <std::size_t N>
  std::size_t offset(const std::array<int, N>& idx) const {
    assert(static_cast<int>(N) == rank_);
    std::size_t off = 0;
    for (int i : idx) off = off * dim_ + i;
    return off;
  }
  std::size_t offset(std::span<const int> idx) const;

  int dim_ = 0;
  int rank_ = 0;
  std::vector<double> data_;
};

Tensor operator-(Tensor a, const Tensor& b);
Tensor operator+(Tensor a, const Tensor& b);

/// Calls f(idx) for every multi-index of the given rank over 0..dim-1.
template <class F>
void for_each_index(int dim, int rank, F&& f) {
  std::vector<int> idx(rank, 0);
  if (dim == 0) return;
  while (true) {
    f(std::span<const int>(idx));
    int slot = rank - 1;
    while (slot >= 0 && ++idx[slot] == dim) idx[slot--] = 0;
    if (slot < 0) return;
  }
}

}  // namespace brenier
