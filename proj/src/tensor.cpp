#include "brenier/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brenier {

Tensor::Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
  if (dim < 0 || rank < 0) throw std::invalid_argument("Tensor: negative dim or rank");
  std::size_t n = 1;
  for (int r = 0; r < rank; ++r) n *= static_cast<std::size_t>(dim);
  data_.assign(n, 0.0);
}

std::size_t Tensor::offset(std::span<const int> idx) const {
  assert(static_cast<int>(idx.size()) == rank_);
  std::size_t off = 0;
  for (int i : idx) off = off * dim_ + i;
  return off;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Tensor::max_asymmetry() const {
  double worst = 0.0;
  std::vector<int> swapped(rank_);
  for_each_index(dim_, rank_, [&](std::span<const int> idx) {
    for (int s = 0; s + 1 < rank_; ++s) {
      std::copy(idx.begin(), idx.end(), swapped.begin());
      std::swap(swapped[s], swapped[s + 1]);
      worst = std::max(worst, std::abs(at(idx) - at(swapped)));
    }
  });
  return worst;
}

void Tensor::set_symmetric(std::span<const int> idx, double value) {
  std::vector<int> perm(idx.begin(), idx.end());
  std::sort(perm.begin(), perm.end());
  do {
    at(perm) = value;
  } while (std::next_permutation(perm.begin(), perm.end()));
}

Tensor& Tensor::operator+=(const Tensor& o) {
  if (o.dim_ != dim_ || o.rank_ != rank_) throw std::invalid_argument("Tensor: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
  if (o.dim_ != dim_ || o.rank_ != rank_) throw std::invalid_argument("Tensor: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator+(Tensor a, const Tensor& b) { return a += b; }

}  // namespace brenier
