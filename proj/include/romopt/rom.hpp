#pragma once

#include "romopt/mesh.hpp"
#include "romopt/rbf.hpp"
#include "romopt/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace romopt {

/// Training database: one parameter row per sample, one state column per
/// sample, plus the field layout shared by all columns.
struct ParametricSnapshotSet {
    Matrix params;
    Matrix states;
    std::vector<LayoutEntry> layout;

    int sample_count() const { return static_cast<int>(params.rows()); }
    int param_dim() const { return static_cast<int>(params.cols()); }
    int state_dim() const { return static_cast<int>(states.rows()); }

    /// Throws on row/column mismatch, non-finite data, or duplicate
    /// parameter rows.
    void validate() const;
};

/// POD basis plus an RBF map from parameters to modal coefficients.
struct RomModel {
    Vector mean;
    Matrix basis;
    Vector singular_values;
    RbfInterpolant coeff_interpolant;
    std::vector<LayoutEntry> layout;
    bool centered = true;

    int rank() const { return static_cast<int>(singular_values.size()); }
    int dim() const { return static_cast<int>(basis.rows()); }
    int param_dim() const { return coeff_interpolant.input_dim(); }
};

struct RomBuildOptions {
    RankPolicy rank = RankPolicy::energy(0.999);
    RbfKernel kernel = RbfKernel::multiquadric();
    /// Unset: the rbf default ridge. Explicit 0: exact interpolation.
    std::optional<double> lambda_reg;
    /// Parameter box used to normalize coordinates inside the interpolant.
    std::optional<Box> param_box;
    /// Subtract the sample mean before the POD (on by default); off makes
    /// the basis span the raw snapshots.
    bool center = true;
};

/// Mean-center, factor the snapshot matrix, project each sample onto the
/// basis, and interpolate the resulting coefficients over parameter space.
RomModel build_rom(const ParametricSnapshotSet& set, const RomBuildOptions& options = {});

/// mean + basis · coefficients(μ).
Vector rom_predict(const RomModel& model, const Vector& mu);

/// True when μ leaves the training samples' bounding box, i.e. the
/// coefficient interpolation extrapolates.
bool rom_is_extrapolating(const RomModel& model, const Vector& mu);

/// Cumulative energy fractions cumsum(σᵢ²)/Σσᵢ² over the stored spectrum;
/// non-decreasing with last entry 1. A zero spectrum (degenerate constant
/// data) reports 1 everywhere.
Vector pod_energy(const RomModel& model);

/// Inputs that produced a model, for staleness checks downstream.
struct RomProvenance {
    std::string config_hash;
    std::vector<std::string> sample_hashes;
};

/// ROMOPTB1 container (see dmd.hpp): JSON header with dimensions, layout,
/// kernel, regularization, normalization box, and provenance; float64
/// blobs mean, basis, singular_values, centers, weights.
void save_rom_model(const RomModel& model, const std::filesystem::path& path,
                    const RomProvenance& provenance = {});
struct LoadedRom {
    RomModel model;
    RomProvenance provenance;
};
LoadedRom load_rom_model(const std::filesystem::path& path);

}  // namespace romopt
