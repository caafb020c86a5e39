#pragma once

#include "romopt/ffd.hpp"
#include "romopt/fom.hpp"
#include "romopt/rbf.hpp"
#include "romopt/rom.hpp"
#include "romopt/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace romopt {

/// Initial sampling plan: every box corner plus low-discrepancy interior
/// points. Corner c sets component k to hi when bit k of c is 1.
struct DoePlan {
    Box box;
    Matrix vertices;
    Matrix interior;
    std::uint64_t seed = 0;

    int dim() const { return box.dim(); }
    int size() const { return static_cast<int>(vertices.rows() + interior.rows()); }
    /// Corners first, then interior points, one row per sample.
    Matrix all_points() const;
    void validate() const;
};

/// Halton point (first `dim` prime bases) for a 1-based sequence index;
/// every coordinate lies strictly inside (0, 1).
Vector halton_point(std::uint64_t index, int dim);

/// 2^m corners plus `interior_count` Halton points mapped into the box,
/// starting the sequence at index seed + 1. `m` must match the box
/// dimension; plans larger than `cap` points are refused.
DoePlan make_doe(const Box& box, int m, int interior_count, std::uint64_t seed, int cap = 4096);

struct SurrogateSettings {
    int interior_count = 30;
    int budget = 200;
    double tol = 1e-3;
    /// Consecutive infills below the improvement threshold before stopping.
    int stall_iterations = 3;
    /// Polish starts: best evaluated points and extra random starts.
    int polish_best = 3;
    int polish_random = 3;
    RbfKernel kernel = RbfKernel::multiquadric();
    /// Unset: the rbf default ridge. Explicit 0: exact interpolation.
    std::optional<double> lambda_reg;
    std::uint64_t seed = 0;
    /// Extra parameter points appended to the initial DOE (deduplicated
    /// bitwise), e.g. the undeformed baseline.
    std::vector<Vector> extra_points;
};

enum class EvalKind { Doe, Infill };

/// One true-objective evaluation. Failed rows hold a non-finite value and
/// are excluded from the surrogate and from the returned minimum.
struct TraceRow {
    Vector mu;
    double value = 0.0;
    EvalKind kind = EvalKind::Doe;
    bool failed = false;
    double best_so_far = 0.0;
};

struct OptimizeResult {
    Vector best_mu;
    double best_value = 0.0;
    std::vector<TraceRow> trace;
    /// Infill evaluations performed.
    int iterations = 0;
    /// True when the stall rule stopped the loop (rather than the budget).
    bool converged = false;
    /// True when the DOE values were indistinguishable (relative spread
    /// below 1e-9); no infill happens in that case.
    bool flat_objective = false;
};

/// Fit-minimize-infill global minimization over the box: evaluate the DOE,
/// fit an RBF surrogate on all successful evaluations, polish its minimum
/// by multi-start coordinate descent, evaluate the true objective there,
/// and repeat until improvement stalls or the budget runs out. The result
/// is always the best *true* evaluation. Deterministic for a fixed seed.
OptimizeResult optimize_surrogate(const std::function<double(const Vector&)>& objective,
                                  const Box& box, const SurrogateSettings& settings = {});

struct RomOptimizationSettings {
    SurrogateSettings surrogate;
    Vec3 direction = Vec3(1.0, 0.0, 0.0);
};

struct OptimizationReport {
    Vector best_mu;
    double best_resistance = 0.0;
    double baseline_resistance = 0.0;
    /// 100 · (baseline − best) / |baseline|; positive when the optimum
    /// improves on the undeformed shape.
    double percent_reduction = 0.0;
    int iterations = 0;
    bool converged = false;
    bool flat_objective = false;
    std::vector<TraceRow> trace;
};

/// Objective: deform the base mesh at μ, predict the regime fields with the
/// ROM, and integrate the resistance along `direction`. The undeformed
/// baseline μ = 0 is injected into the DOE; deformed meshes are cached by
/// parameter hash. A flat objective short-circuits to the baseline.
OptimizationReport optimize_rom_resistance(const RomModel& rom, const FfdParameterization& param,
                                           const TriMesh& base_mesh, const FlowConditions& flow,
                                           const RomOptimizationSettings& settings = {});

}  // namespace romopt
