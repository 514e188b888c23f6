#pragma once

#include <functional>

#include "brenier/jet.hpp"

namespace brenier::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int evaluations = 0;
};

struct Options {
  double abs_tol = 1e-12;
  int max_intervals = 4000;
};

/// Globally adaptive Gauss–Kronrod (7/15) with an absolute error target.
/// Throws Error{kQuadratureFailure} when the target is not met within
/// `max_intervals` subdivisions or the integrand is non-finite.
Result adaptive(const std::function<double(double)>& f, double a, double b,
                const Options& opts = {});

/// Fixed 5-node Gauss–Legendre rule on [a, b].
double gauss_legendre5(const std::function<double(double)>& f, double a, double b);

/// Nested adaptive integration over an axis-aligned box. The inner
/// integrals inherit the tolerance scaled by the outer widths.
Result box(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi,
           const Options& opts = {});

}  // namespace brenier::quad
