#include "romopt/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace romopt {

namespace {

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite()) {
        throw Error(std::string(what) + ": matrix has non-finite entries");
    }
}

int resolve_rank(const RankPolicy& policy, const Vector& sigma, int max_rank) {
    if (policy.kind == RankPolicy::Kind::Fixed) {
        if (policy.rank < 1 || policy.rank > max_rank) {
            throw Error("requested rank " + std::to_string(policy.rank) +
                        " outside [1, " + std::to_string(max_rank) + "]");
        }
        return policy.rank;
    }
    if (!(policy.energy_fraction > 0.0 && policy.energy_fraction <= 1.0)) {
        throw Error("energy fraction must lie in (0, 1]");
    }
    double total = sigma.squaredNorm();
    if (total == 0.0) {
        return 1;
    }
    double cum = 0.0;
    for (int r = 0; r < sigma.size(); ++r) {
        cum += sigma[r] * sigma[r];
        if (cum >= policy.energy_fraction * total) {
            return r + 1;
        }
    }
    return static_cast<int>(sigma.size());
}

/// Flips u/v column pairs so the largest-magnitude u entry is positive.
void fix_signs(Matrix& u, Matrix& v) {
    for (int c = 0; c < u.cols(); ++c) {
        int imax = 0;
        double vmax = 0.0;
        for (int i = 0; i < u.rows(); ++i) {
            double m = std::abs(u(i, c));
            if (m > vmax) {
                vmax = m;
                imax = i;
            }
        }
        if (u(imax, c) < 0.0) {
            u.col(c) = -u.col(c);
            v.col(c) = -v.col(c);
        }
    }
}

TruncatedSvd full_svd_path(const Matrix& a, const RankPolicy& policy) {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sigma_all = svd.singularValues();
    int r = resolve_rank(policy, sigma_all, static_cast<int>(sigma_all.size()));
    TruncatedSvd out;
    out.u = svd.matrixU().leftCols(r);
    out.v = svd.matrixV().leftCols(r);
    out.sigma = sigma_all.head(r);
    out.sigma_all = std::move(sigma_all);
    fix_signs(out.u, out.v);
    return out;
}

TruncatedSvd gram_path(const Matrix& a, const RankPolicy& policy) {
    const int m = static_cast<int>(a.cols());
    Matrix gram = a.transpose() * a;
    gram = 0.5 * (gram + gram.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    if (es.info() != Eigen::Success) {
        return full_svd_path(a, policy);
    }
    // Eigenvalues come back ascending; singular values want descending.
    Vector sigma_all(m);
    Matrix v(m, m);
    for (int i = 0; i < m; ++i) {
        sigma_all[i] = std::sqrt(std::max(es.eigenvalues()[m - 1 - i], 0.0));
        v.col(i) = es.eigenvectors().col(m - 1 - i);
    }
    int r = resolve_rank(policy, sigma_all, m);
    // Squaring the matrix halves the usable precision; below this floor
    // the full decomposition is both safer and still cheap.
    if (sigma_all[0] == 0.0 || sigma_all[r - 1] < 1e-10 * sigma_all[0]) {
        return full_svd_path(a, policy);
    }
    Matrix u = a * v.leftCols(r);
    for (int c = 0; c < r; ++c) {
        u.col(c) /= sigma_all[c];
    }
    // One re-orthonormalization pass removes the O(ε·σ₁/σᵣ) drift left by
    // the Gram eigenvectors.
    Eigen::HouseholderQR<Matrix> qr(u);
    Matrix q = qr.householderQ() * Matrix::Identity(u.rows(), r);
    Matrix rr = q.transpose() * u;
    for (int c = 0; c < r; ++c) {
        if (rr(c, c) < 0.0) {
            q.col(c) = -q.col(c);
        }
    }
    TruncatedSvd out;
    out.u = std::move(q);
    out.v = v.leftCols(r);
    out.sigma = sigma_all.head(r);
    out.sigma_all = std::move(sigma_all);
    fix_signs(out.u, out.v);
    return out;
}

}  // namespace

TruncatedSvd truncated_svd(const Matrix& a, const RankPolicy& policy) {
    require_finite(a, "truncated_svd");
    if (a.rows() == 0 || a.cols() == 0) {
        throw Error("truncated_svd: empty matrix");
    }
    if (a.rows() >= 4 * a.cols()) {
        return gram_path(a, policy);
    }
    return full_svd_path(a, policy);
}

EigResult eig_dense(const Matrix& a) {
    require_finite(a, "eig_dense");
    if (a.rows() != a.cols()) {
        throw Error("eig_dense: matrix must be square");
    }
    if (a.rows() == 0) {
        throw Error("eig_dense: empty matrix");
    }
    Eigen::EigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) {
        throw Error("eig_dense: eigenvalue iteration did not converge");
    }
    const int n = static_cast<int>(a.rows());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    CVector vals = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        double mi = std::abs(vals[i]);
        double mj = std::abs(vals[j]);
        if (mi != mj) return mi > mj;
        if (vals[i].real() != vals[j].real()) return vals[i].real() > vals[j].real();
        return vals[i].imag() > vals[j].imag();
    });
    EigResult out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (int c = 0; c < n; ++c) {
        out.values[c] = vals[order[c]];
        CVector vec = es.eigenvectors().col(order[c]);
        // Rotate the dominant entry to the positive real axis so the
        // factorization is reproducible, not just the spectrum.
        int imax = 0;
        double vmax = -1.0;
        for (int i = 0; i < n; ++i) {
            double m = std::abs(vec[i]);
            if (m > vmax + 1e-15) {
                vmax = m;
                imax = i;
            }
        }
        if (vmax > 0.0) {
            std::complex<double> phase = std::conj(vec[imax]) / vmax;
            vec *= phase;
        }
        out.vectors.col(c) = vec;
    }
    return out;
}

Matrix pseudo_inverse_apply(const Matrix& x, const Matrix& y, double rel_cutoff) {
    require_finite(x, "pseudo_inverse_apply");
    require_finite(y, "pseudo_inverse_apply");
    if (y.cols() != x.cols()) {
        throw Error("pseudo_inverse_apply: y has " + std::to_string(y.cols()) +
                    " columns, x has " + std::to_string(x.cols()));
    }
    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    int keep = 0;
    if (sigma.size() > 0 && sigma[0] > 0.0) {
        double cutoff = rel_cutoff * sigma[0];
        while (keep < sigma.size() && sigma[keep] > cutoff) {
            ++keep;
        }
    }
    if (keep == 0) {
        return Matrix::Zero(y.rows(), x.rows());
    }
    Matrix yv = y * svd.matrixV().leftCols(keep);
    for (int c = 0; c < keep; ++c) {
        yv.col(c) /= sigma[c];
    }
    return yv * svd.matrixU().leftCols(keep).transpose();
}

Matrix solve_linear(const Matrix& a, const Matrix& b, bool assume_symmetric) {
    require_finite(a, "solve_linear");
    require_finite(b, "solve_linear");
    if (a.rows() != a.cols()) {
        throw Error("solve_linear: matrix must be square");
    }
    if (a.rows() != b.rows()) {
        throw Error("solve_linear: right-hand side has " + std::to_string(b.rows()) +
                    " rows, matrix has " + std::to_string(a.rows()));
    }
    if (a.norm() == 0.0) {
        throw SingularMatrixError("solve_linear: matrix is zero");
    }
    const double pivot_floor = 1e-14 * a.norm();
    if (assume_symmetric) {
        Eigen::LDLT<Matrix> ldlt(a);
        if (ldlt.info() != Eigen::Success) {
            throw SingularMatrixError("solve_linear: symmetric factorization failed");
        }
        if (ldlt.vectorD().cwiseAbs().minCoeff() < pivot_floor) {
            throw SingularMatrixError("solve_linear: matrix is numerically singular");
        }
        return ldlt.solve(b);
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() < pivot_floor) {
        throw SingularMatrixError("solve_linear: matrix is numerically singular");
    }
    return lu.solve(b);
}

}  // namespace romopt
