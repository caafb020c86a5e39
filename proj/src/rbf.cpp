#include "romopt/rbf.hpp"

#include "romopt/io_util.hpp"
#include "romopt/linalg.hpp"

#include <cmath>

namespace romopt {

namespace {

Matrix normalize_rows(const Matrix& coords, const std::optional<Box>& box) {
    if (!box) {
        return coords;
    }
    if (box->dim() != coords.cols()) {
        throw Error("normalization box dimension " + std::to_string(box->dim()) +
                    " does not match coordinate dimension " + std::to_string(coords.cols()));
    }
    Matrix out = coords;
    for (int c = 0; c < out.cols(); ++c) {
        out.col(c) = (out.col(c).array() - box->lo[c]) / (box->hi[c] - box->lo[c]);
    }
    return out;
}

}  // namespace

double rbf_kernel_value(const RbfKernel& kernel, double r) {
    switch (kernel.family) {
        case RbfKernel::Family::Multiquadric: {
            double er = kernel.epsilon * r;
            return std::sqrt(1.0 + er * er);
        }
        case RbfKernel::Family::Gaussian: {
            double er = kernel.epsilon * r;
            return std::exp(-er * er);
        }
        case RbfKernel::Family::ThinPlate:
            return r > 0.0 ? r * r * std::log(r) : 0.0;
    }
    throw Error("unknown rbf kernel family");
}

RbfInterpolant rbf_fit(const Matrix& centers, const Matrix& values, RbfKernel kernel,
                       std::optional<double> lambda_reg, std::optional<Box> normalization) {
    const int n = static_cast<int>(centers.rows());
    if (n < 1) {
        throw Error("rbf_fit: need at least one center");
    }
    if (values.rows() != n) {
        throw Error("rbf_fit: " + std::to_string(values.rows()) + " value rows for " +
                    std::to_string(n) + " centers");
    }
    if (!centers.allFinite() || !values.allFinite()) {
        throw Error("rbf_fit: non-finite input");
    }
    if (lambda_reg && *lambda_reg < 0.0) {
        throw Error("rbf_fit: lambda_reg must be non-negative");
    }
    if (normalization) {
        normalization->validate();
    }
    Matrix coords = normalize_rows(centers, normalization);

    Matrix dist = Matrix::Zero(n, n);
    double dist_sum = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            double r = (coords.row(a) - coords.row(b)).norm();
            if (r == 0.0) {
                throw Error("rbf_fit: centers " + std::to_string(a) + " and " + std::to_string(b) +
                            " coincide");
            }
            dist(a, b) = r;
            dist(b, a) = r;
            dist_sum += r;
        }
    }
    if (kernel.epsilon <= 0.0) {
        kernel.epsilon = n > 1 ? (n * (n - 1) / 2) / dist_sum : 1.0;
    }

    Matrix k(n, n);
    const double diag = rbf_kernel_value(kernel, 0.0);
    for (int a = 0; a < n; ++a) {
        k(a, a) = diag;
        for (int b = a + 1; b < n; ++b) {
            double phi = rbf_kernel_value(kernel, dist(a, b));
            k(a, b) = phi;
            k(b, a) = phi;
        }
    }

    double lambda = lambda_reg ? *lambda_reg : 1e-12 * k.trace() / n;
    Matrix system = k + lambda * Matrix::Identity(n, n);

    RbfInterpolant s;
    s.centers = centers;
    s.kernel = kernel;
    s.lambda_reg = lambda;
    s.normalization = std::move(normalization);
    try {
        s.weights = solve_linear(system, values);
    } catch (const SingularMatrixError&) {
        throw SingularMatrixError(
            "rbf_fit: kernel system is numerically singular; set a positive lambda_reg or rely on "
            "the default ridge");
    }
    return s;
}

Vector rbf_eval(const RbfInterpolant& s, const Vector& query) {
    if (query.size() != s.input_dim()) {
        throw Error("rbf_eval: query has " + std::to_string(query.size()) +
                    " components, interpolant expects " + std::to_string(s.input_dim()));
    }
    if (!query.allFinite()) {
        throw Error("rbf_eval: non-finite query");
    }
    Matrix coords = normalize_rows(s.centers, s.normalization);
    Matrix q = normalize_rows(query.transpose(), s.normalization);
    Vector phi(s.center_count());
    for (int a = 0; a < s.center_count(); ++a) {
        phi[a] = rbf_kernel_value(s.kernel, (coords.row(a) - q.row(0)).norm());
    }
    return s.weights.transpose() * phi;
}

bool rbf_is_extrapolating(const RbfInterpolant& s, const Vector& query) {
    if (query.size() != s.input_dim()) {
        throw Error("rbf_is_extrapolating: dimension mismatch");
    }
    for (int c = 0; c < s.input_dim(); ++c) {
        double lo = s.centers.col(c).minCoeff();
        double hi = s.centers.col(c).maxCoeff();
        if (query[c] < lo || query[c] > hi) {
            return true;
        }
    }
    return false;
}

}  // namespace romopt
