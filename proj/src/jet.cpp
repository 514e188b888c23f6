#include "brenier/jet.hpp"

#include <algorithm>
#include <stdexcept>

namespace brenier {

Jet Jet::zero(const Vec& point, int order) {
  if (order < 0 || order > 5) throw std::invalid_argument("Jet::zero: order out of range");
  const int d = static_cast<int>(point.size());
  Jet j;
  j.point = point;
  j.order = order;
  if (order >= 1) j.grad = Vec::Zero(d);
  if (order >= 2) j.hess = Mat::Zero(d, d);
  if (order >= 3) j.d3 = Tensor(d, 3);
  if (order >= 4) j.d4 = Tensor(d, 4);
  if (order >= 5) j.d5 = Tensor(d, 5);
  return j;
}

Jet Jet::truncated(int new_order) const {
  if (new_order > order) throw std::invalid_argument("Jet::truncated: cannot raise order");
  Jet j = *this;
  j.order = new_order;
  if (new_order < 1) j.grad.resize(0);
  if (new_order < 2) j.hess.resize(0, 0);
  if (new_order < 3) j.d3 = Tensor();
  if (new_order < 4) j.d4 = Tensor();
  if (new_order < 5) j.d5 = Tensor();
  return j;
}

double Jet::max_asymmetry() const {
  double worst = 0.0;
  if (order >= 2) worst = (hess - hess.transpose()).cwiseAbs().maxCoeff();
  if (order >= 3) worst = std::max(worst, d3.max_asymmetry());
  if (order >= 4) worst = std::max(worst, d4.max_asymmetry());
  if (order >= 5) worst = std::max(worst, d5.max_asymmetry());
  return worst;
}

}  // namespace brenier
