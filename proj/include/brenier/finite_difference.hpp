#pragma once

#include <functional>

#include "brenier/jet.hpp"

namespace brenier {

using ScalarField = std::function<double(const Vec&)>;

/// Central-difference jet of `field` at x up to `order` (1..5), built from
/// tensor products of second-order-accurate 1D stencils; error O(step²).
/// The step is snapped to the nearest power of two so stencil offsets are
/// exact; differences of linear fields are then exact.
/// An independent oracle for the analytic jets, never a production path.
Jet fd_jet_oracle(const ScalarField& field, const Vec& x, int order, double step);

struct GradHess {
  Vec grad;
  Mat hess;
};

/// Gradient and Hessian from the 5-point central stencil (error O(h⁴)).
GradHess fd5_grad_hess(const ScalarField& field, const Vec& x, double h);

/// Gradient and Hessian from 3-point central differences at h and h/2 with
/// one Richardson extrapolation level.
GradHess richardson_grad_hess(const ScalarField& field, const Vec& x, double h);

}  // namespace brenier
