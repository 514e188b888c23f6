#include "brenier/linalg.hpp"

#include <stdexcept>
#include <vector>

#include "brenier/error.hpp"

namespace brenier::linalg {

Vec symmetric_eigenvalues(const Mat& a) {
  const Mat s = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Mat& a) { return symmetric_eigenvalues(a).minCoeff(); }
double max_eigenvalue(const Mat& a) { return symmetric_eigenvalues(a).maxCoeff(); }

double min_generalized_eigenvalue(const Mat& r, const Mat& g) {
  Eigen::LLT<Mat> llt(0.5 * (g + g.transpose()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularHessian, "metric is not positive definite");
  }
  const Mat l = llt.matrixL();
  const Mat linv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(g.rows(), g.cols()));
  return min_eigenvalue(linv * r * linv.transpose());
}

Mat spd_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  return es.operatorSqrt();
}

Mat spd_inv_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
  return es.operatorInverseSqrt();
}

Tensor transform(const Tensor& t, const Mat& m) {
  const int d = t.dim();
  if (m.rows() != d || m.cols() != d) throw std::invalid_argument("transform: shape mismatch");
  // Apply the map one slot at a time: O(rank · d^(rank+1)).
  Tensor cur = t;
  std::vector<int> src(t.rank());
  for (int slot = 0; slot < t.rank(); ++slot) {
    Tensor next(d, t.rank());
    for_each_index(d, t.rank(), [&](std::span<const int> idx) {
      std::copy(idx.begin(), idx.end(), src.begin());
      double acc = 0.0;
      for (int i = 0; i < d; ++i) {
        src[slot] = i;
        acc += m(idx[slot], i) * cur.at(src);
      }
      next.at(idx) = acc;
    });
    cur = std::move(next);
  }
  return cur;
}

Mat contract_last(const Tensor& t3, const Vec& v) {
  const int d = t3.dim();
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) out(i, j) += t3(i, j, k) * v(k);
  return out;
}

Tensor contract_last_rank4(const Tensor& t4, const Vec& v) {
  const int d = t4.dim();
  Tensor out(d, 3);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double acc = 0.0;
        for (int l = 0; l < d; ++l) acc += t4(i, j, k, l) * v(l);
        out(i, j, k) = acc;
      }
  return out;
}

double dot(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * b.data()[i];
  return acc;
}

Mat slice(const Tensor& t3, int k) {
  const int d = t3.dim();
  Mat out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = t3(k, i, j);
  return out;
}

}  // namespace brenier::linalg
