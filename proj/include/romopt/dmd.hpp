#pragma once

#include "romopt/mesh.hpp"
#include "romopt/types.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace romopt {

/// Equispaced snapshot columns x₁..x_m, column k sampled at t0 + k·dt
/// (k from 0).
struct SnapshotSeries {
    Matrix states;
    double t0 = 0.0;
    double dt = 1.0;

    int dim() const { return static_cast<int>(states.rows()); }
    int count() const { return static_cast<int>(states.cols()); }

    /// Throws unless count ≥ 3, dt > 0, and all entries are finite.
    void validate() const;
};

/// Fitted linear evolution model: x(t) ≈ Re(Φ · diag(λ^((t−t0)/dt)) · b).
struct DmdModel {
    CMatrix modes;
    CVector eigenvalues;
    CVector amplitudes;
    double dt = 1.0;
    double t0 = 0.0;
    int snapshot_count = 0;
    /// max over training steps of ‖x̂_k − x_k‖ / ‖x_k‖.
    double training_residual = 0.0;

    int rank() const { return static_cast<int>(eigenvalues.size()); }
    int dim() const { return static_cast<int>(modes.rows()); }
    double end_time() const { return t0 + (snapshot_count - 1) * dt; }
    double window() const { return (snapshot_count - 1) * dt; }
};

/// Exact DMD: split the series into shifted matrices X|Y, project the
/// one-step operator onto the truncated left singular subspace of X,
/// take its eigendecomposition, and lift eigenvectors through Y·V·Σ⁻¹.
/// Amplitudes solve the least-squares match to the first snapshot.
DmdModel fit_dmd(const SnapshotSeries& series,
                 const RankPolicy& policy = RankPolicy::energy(0.9999));

/// Modal reconstruction at time t ≥ t0 (principal-branch λ powers for
/// non-integer steps); returns the real part.
Vector reconstruct(const DmdModel& model, double t);

/// True when t lies beyond the training window, i.e. the reconstruction
/// extrapolates.
bool dmd_is_extrapolating(const DmdModel& model, double t);

struct RegimeResult {
    Vector state;
    /// Mode indices excluded as unstable (or non-steady in steady_only).
    std::vector<int> excluded_modes;
};

/// Long-horizon forecast from the stable part of the spectrum
/// (|λ| ≤ 1 + eta). The default horizon is t0 + 10 × the training window;
/// an explicit horizon must not precede the window's end. steady_only
/// keeps just the modes with |λ − 1| ≤ eta instead.
RegimeResult regime_state(const DmdModel& model, std::optional<double> horizon = std::nullopt,
                          double eta = 1e-6, bool steady_only = false);

/// Container format shared by the model files in this project: the 8-byte
/// magic "ROMOPTB1", a little-endian u64 header length, a JSON header, and
/// raw little-endian float64 blobs in the order the header's "blobs" array
/// names them. A DMD header carries rank, dt, t0, snapshot_count, residual,
/// eigenvalues as [re, im] pairs, and blobs modes_re, modes_im (both n×r
/// column-major), amplitudes_re, amplitudes_im.
void save_dmd_model(const DmdModel& model, const std::filesystem::path& path);
DmdModel load_dmd_model(const std::filesystem::path& path);

/// On-disk snapshot series: a directory holding manifest.json
/// {t0, dt, count, vertex_count, fields: [{name, kind}]} plus one
/// step_%04d.csv per snapshot in the combined field-CSV format. Loading
/// flattens each step in manifest field order into one state column.
struct SeriesOnDisk {
    SnapshotSeries series;
    std::vector<LayoutEntry> layout;
    int vertex_count = 0;
};

void save_snapshot_series(const std::filesystem::path& dir, const TriMesh& mesh,
                          const std::vector<StateVector>& steps, double t0, double dt);
SeriesOnDisk load_snapshot_series(const std::filesystem::path& dir);

}  // namespace romopt
