#pragma once

#include <Eigen/Dense>

#include "brenier/tensor.hpp"

namespace brenier {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Value and partial derivatives of a scalar field at one point, up to
/// `order` (at most 5). Entries above `order` are left empty.
struct Jet {
  Vec point;
  int order = 0;
  double value = 0.0;
  Vec grad;   // order >= 1
  Mat hess;   // order >= 2
  Tensor d3;  // order >= 3
  Tensor d4;  // order >= 4
  Tensor d5;  // order == 5

  int dim() const { return static_cast<int>(point.size()); }

  /// Zero jet of the given order with all slots allocated.
  static Jet zero(const Vec& point, int order);

  /// Copy truncated to a lower order.
  Jet truncated(int new_order) const;

  /// Largest asymmetry over the hessian and higher tensors.
  double max_asymmetry() const;
};

}  // namespace brenier
