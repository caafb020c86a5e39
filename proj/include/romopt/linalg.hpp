#pragma once

#include "romopt/types.hpp"

namespace romopt {

/// Rank-r factorization a ≈ u · diag(sigma) · vᵀ with orthonormal u, v.
/// sigma_all keeps the full non-increasing singular spectrum so callers can
/// report energy curves without recomputing the decomposition.
struct TruncatedSvd {
    Matrix u;
    Vector sigma;
    Matrix v;
    Vector sigma_all;

    int rank() const { return static_cast<int>(sigma.size()); }
};

/// Eigenpairs sorted by descending |λ|, ties by descending real part, then
/// descending imaginary part.
struct EigResult {
    CVector values;
    CMatrix vectors;
};

/// Truncated SVD with deterministic sign convention: the largest-magnitude
/// entry of each u-column is positive (first occurrence wins on ties).
/// Tall matrices (rows ≥ 4·cols) go through the Gram matrix aᵀa, trading
/// accuracy on singular values near the noise floor for speed; if that path
/// would keep a singular value below 1e-10·σ₁ the full SVD is used instead.
TruncatedSvd truncated_svd(const Matrix& a, const RankPolicy& policy);

/// Dense nonsymmetric eigendecomposition. Eigenvector columns have unit
/// norm with the largest-magnitude entry rotated to the positive real axis.
EigResult eig_dense(const Matrix& a);

/// Returns y · x† via the SVD of x, dropping singular values at or below
/// rel_cutoff·σ₁. The pseudo-inverse is never formed densely.
Matrix pseudo_inverse_apply(const Matrix& x, const Matrix& y, double rel_cutoff = 1e-12);

/// Direct solve of a·x = b. Pivots below 1e-14·‖a‖_F raise
/// SingularMatrixError. assume_symmetric selects a symmetric-indefinite
/// factorization; the caller guarantees symmetry.
Matrix solve_linear(const Matrix& a, const Matrix& b, bool assume_symmetric = false);

}  // namespace romopt
