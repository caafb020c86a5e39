#pragma once

#include "romopt/doe_opt.hpp"
#include "romopt/dmd.hpp"
#include "romopt/ffd.hpp"
#include "romopt/fom.hpp"
#include "romopt/rom.hpp"
#include "romopt/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace romopt {

/// Parsed study configuration. The file is plain text with [section]
/// headers and `key = value` lines; '#' starts a comment, blank lines are
/// skipped, and unknown sections, unknown keys, or duplicate keys are
/// configuration errors. Relative paths resolve against the config file's
/// directory.
///
/// Sections and keys (defaults in parentheses):
///   [paths]      base_mesh, parameterization, workspace   (all required)
///   [solver]     id (synthetic-lti), t_start (50), t_end (60), snapshots (20)
///   [doe]        interior (30), seed (0)
///   [dmd]        rank (energy:0.9999), eta (1e-6), horizon (none),
///                steady_only (false)
///   [rom]        rank (energy:0.999), kernel (multiquadric), epsilon (0),
///                lambda (none), center (true)
///   [optimizer]  interior (30), budget (200), seed (0), tol (1e-3),
///                stall (3), polish_best (3), polish_random (3),
///                kernel (multiquadric), epsilon (0), lambda (none)
///   [flow]       speed (1.4), density (998.2), reference_area (1.7),
///                froude (0.2), direction (1 0 0)
///
/// `rank` values are `fixed:<r>` or `energy:<fraction>`; `epsilon` 0 keeps
/// the kernel's data-scaled default; `lambda`/`horizon` accept `none`.
struct StudyConfig {
    std::filesystem::path base_mesh;
    std::filesystem::path parameterization;
    std::filesystem::path workspace;

    std::string solver_id = "synthetic-lti";
    double t_start = 50.0;
    double t_end = 60.0;
    int snapshot_count = 20;

    int doe_interior = 30;
    std::uint64_t doe_seed = 0;

    RankPolicy dmd_rank = RankPolicy::energy(0.9999);
    double dmd_eta = 1e-6;
    std::optional<double> dmd_horizon;
    bool dmd_steady_only = false;

    RankPolicy rom_rank = RankPolicy::energy(0.999);
    RbfKernel rom_kernel = RbfKernel::multiquadric();
    std::optional<double> rom_lambda;
    bool rom_center = true;

    SurrogateSettings optimizer;
    FlowConditions flow;
    /// Resistance direction, normalized at load.
    Vec3 direction = Vec3(1.0, 0.0, 0.0);

    /// Numeric-range checks only; no filesystem access.
    void validate() const;
};

/// Parses, resolves paths, range-checks, and verifies that base_mesh and
/// parameterization exist. Throws ConfigError on any violation.
StudyConfig load_study_config(const std::filesystem::path& path);

/// Canonical text of every setting that shapes the offline database and the
/// model file (solver window, DOE, DMD, ROM, flow, plus content hashes of
/// the base mesh and parameterization files). The optimizer section is
/// excluded: it only affects the online phase.
std::string offline_config_signature(const StudyConfig& config);

/// fnv1a64 of the signature, the provenance stamp carried by rom.bin and
/// report.json.
std::string offline_config_hash(const StudyConfig& config);

/// Inclusive sample index range for partial offline runs, e.g. {0, 4}.
using SampleRange = std::pair<int, int>;

/// Writes doe.json (box, points, seed, empty enrichment list) into the
/// workspace, creating the directory. Re-running with the same settings
/// rewrites the identical bytes.
void cmd_sample(const StudyConfig& config);

/// Processes every registered sample (optionally restricted to `range`):
/// deform, run the solver, store the series, fit DMD, store the regime
/// state and its integrated resistance, then mark the sample done.
/// Completed samples are skipped, so interrupted runs resume; failures are
/// recorded in the sample's status file without stopping the rest. Returns
/// the number of failed samples. `jobs` worker threads process disjoint
/// samples concurrently.
int cmd_offline(const StudyConfig& config, std::optional<SampleRange> range = std::nullopt,
                int jobs = 1);

/// Assembles the regime states of all registered samples into a
/// ParametricSnapshotSet, builds the ROM, and writes rom.bin stamped with
/// the config hash and per-sample regime hashes. An incomplete database is
/// an error naming the missing samples.
void cmd_build_rom(const StudyConfig& config);

/// Optimizes the ROM-predicted resistance over the parameter box and writes
/// report.json plus the evaluation trace trace.csv. Refuses to run when the
/// current config hash differs from the one rom.bin was built with.
void cmd_optimize(const StudyConfig& config);

struct ValidationOutcome {
    Vector mu;
    double rom_resistance = 0.0;
    double fom_resistance = 0.0;
    /// |ROM − FOM| / |FOM|.
    double relative_error = 0.0;
    bool enriched = false;
    /// Index of the appended sample when enriched.
    int sample_index = -1;
};

/// Runs the full solver + DMD regime at μ, compares against the ROM
/// prediction, and writes validation.json. With `enrich` the new sample is
/// written like an offline sample and registered in doe.json, ready for a
/// rebuild. Validating an already-sampled μ with `enrich` is an error.
ValidationOutcome cmd_validate(const StudyConfig& config, const Vector& mu, bool enrich = false);

/// μ* recorded in report.json, for `validate --from-report`.
Vector report_best_mu(const StudyConfig& config);

/// Self-validation sweep over the workspace: doe.json against the config,
/// every registered sample's artifacts, rom.bin provenance, and report.json
/// stamps. Returns one human-readable problem per finding, empty when the
/// database is sound.
std::vector<std::string> cmd_check(const StudyConfig& config);

/// Writes spectrum.csv (mode, eigenvalue, magnitude, amplitude) into each
/// selected completed sample directory.
void cmd_spectrum(const StudyConfig& config, std::optional<SampleRange> range = std::nullopt);

/// Writes energy.csv (mode, sigma, energy fraction, cumulative) next to
/// rom.bin.
void cmd_energy(const StudyConfig& config);

struct DemoStudyOptions {
    int hull_level = 3;
    double half_width = 0.25;
    int doe_interior = 30;
    std::uint64_t doe_seed = 2024;
    std::uint64_t optimizer_seed = 7;
};

/// Writes a ready-to-run study into `dir`: hull.stl (synthetic hull),
/// bulb.json (a five-dof bow-bulb parameterization), and study.cfg wired
/// to them. Returns the config path.
std::filesystem::path scaffold_demo_study(const std::filesystem::path& dir,
                                          const DemoStudyOptions& options = {});

}  // namespace romopt
