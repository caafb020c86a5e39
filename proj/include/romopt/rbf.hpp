#pragma once

#include "romopt/types.hpp"

#include <optional>

namespace romopt {

/// Radial kernel. epsilon is the shape parameter; a non-positive value
/// means "resolve the scale-aware default at fit time" (1 over the mean
/// pairwise center distance). Thin-plate ignores epsilon.
struct RbfKernel {
    enum class Family { Multiquadric, Gaussian, ThinPlate };

    Family family = Family::Multiquadric;
    double epsilon = 0.0;

    static RbfKernel multiquadric(double eps = 0.0) { return {Family::Multiquadric, eps}; }
    static RbfKernel gaussian(double eps = 0.0) { return {Family::Gaussian, eps}; }
    static RbfKernel thin_plate() { return {Family::ThinPlate, 0.0}; }
};

/// φ(r) for the kernel. Multiquadric is √(1+(εr)²), so φ(0) = 1 exactly;
/// gaussian is exp(−(εr)²); thin-plate is r²·ln r with φ(0) = 0.
double rbf_kernel_value(const RbfKernel& kernel, double r);

/// Vector-valued interpolant s(x) = Σ_a w_a φ(‖x − c_a‖), with distances
/// taken in normalized coordinates when a normalization box is present.
/// kernel.epsilon and lambda_reg hold the values actually used.
struct RbfInterpolant {
    Matrix centers;
    Matrix weights;
    RbfKernel kernel;
    double lambda_reg = 0.0;
    std::optional<Box> normalization;

    int center_count() const { return static_cast<int>(centers.rows()); }
    int input_dim() const { return static_cast<int>(centers.cols()); }
    int output_dim() const { return static_cast<int>(weights.cols()); }
};

/// Solves (K + λ_reg·I)·w = values with K_ab = φ(‖c_a − c_b‖). λ_reg left
/// unset applies the default ridge 1e-12·trace(K)/N; an explicit 0 requests
/// exact interpolation and raises SingularMatrixError if the system is
/// numerically singular. When normalization is given, coordinates are
/// mapped affinely onto [0,1]^d before any distance is computed, and the
/// default epsilon is resolved on the normalized configuration.
RbfInterpolant rbf_fit(const Matrix& centers, const Matrix& values, RbfKernel kernel,
                       std::optional<double> lambda_reg = std::nullopt,
                       std::optional<Box> normalization = std::nullopt);

/// Evaluates the interpolant. Queries outside the centers' bounding box
/// extrapolate; see rbf_is_extrapolating.
Vector rbf_eval(const RbfInterpolant& s, const Vector& query);

/// True when the query leaves the axis-aligned bounding box of the
/// centers, the cheap stand-in for a convex-hull test that callers use to
/// flag extrapolated predictions.
bool rbf_is_extrapolating(const RbfInterpolant& s, const Vector& query);

}  // namespace romopt
