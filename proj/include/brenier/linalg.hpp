#pragma once

#include "brenier/jet.hpp"

namespace brenier::linalg {

/// Eigenvalues of ½(A + Aᵀ), ascending.
Vec symmetric_eigenvalues(const Mat& a);
double min_eigenvalue(const Mat& a);
double max_eigenvalue(const Mat& a);

/// Smallest λ with R − λ·G singular, i.e. min-eig of L⁻¹ R L⁻ᵀ for G = LLᵀ.
/// R ≥ C·G as quadratic forms iff the result is ≥ C.
double min_generalized_eigenvalue(const Mat& r, const Mat& g);

/// Symmetric square root and inverse square root of an SPD matrix.
Mat spd_sqrt(const Mat& a);
Mat spd_inv_sqrt(const Mat& a);

/// T'_{a b ...} = M_{a i} M_{b j} ... T_{i j ...}: the same linear map applied
/// in every slot.
Tensor transform(const Tensor& t, const Mat& m);

/// Contraction of the last slot with a vector: (T·v)_{i..} = T_{i..k} v_k.
Mat contract_last(const Tensor& t3, const Vec& v);
Tensor contract_last_rank4(const Tensor& t4, const Vec& v);

/// Frobenius inner product of same-shaped tensors.
double dot(const Tensor& a, const Tensor& b);

/// Slice T_{k··} of a rank-3 tensor as a matrix.
Mat slice(const Tensor& t3, int k);

}  // namespace brenier::linalg
