#pragma once

#include "romopt/dmd.hpp"
#include "romopt/mesh.hpp"
#include "romopt/types.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace romopt {

/// Free-stream reference data. Only dynamic_pressure enters the synthetic
/// fields; the rest is carried as report metadata.
struct FlowConditions {
    double speed = 1.4;
    double density = 998.2;
    double reference_area = 1.7;
    double froude = 0.2;

    double dynamic_pressure() const { return 0.5 * density * speed * speed; }
    void validate() const;
};

/// One solver invocation: surface, parameter point, sampling window, and
/// which per-vertex fields to return.
struct FomRequest {
    TriMesh mesh;
    Vector mu;
    double t_start = 50.0;
    double t_end = 60.0;
    int count = 20;
    std::vector<std::string> fields = {"p", "tau"};

    explicit FomRequest(TriMesh mesh_, Vector mu_ = Vector())
        : mesh(std::move(mesh_)), mu(std::move(mu_)) {}

    double dt() const { return (t_end - t_start) / (count - 1); }
    void validate() const;
};

struct FomResult {
    SnapshotSeries series;
    std::vector<LayoutEntry> layout;
    std::string solver_id;
    FlowConditions flow;
};

/// Closed star-shaped test surface: an icosphere at the given subdivision
/// level mapped through
///   hull(u) = diag(2.5, 0.8, 0.6) · u · (1 + 0.25 · exp(−|u − e_x|² / 0.45²))
/// so an ellipsoid grows a bulb around the +x pole. Outward-wound faces,
/// 10·4^level + 2 vertices.
TriMesh synthetic_hull(int subdivisions);

/// Synthetic per-vertex fields with q = ½ρU², r = (x, y, z):
///   p_inf(r, mu)   = q (0.8 + 0.4x − 0.2z + 0.1y²) (1 + Σ_k (0.1 mu_k + 0.5 mu_k²))
///   tau_inf(r, mu) = q (1 + 0.25 Σ_k mu_k²) (−0.004 (1 + 0.3x²), 0.0015z, 0.001y)
/// and a three-term decaying transient with
///   gamma = (0.10, 0.13, 0.17), omega = (0.9, 1.7, 2.6),
///   f = (x, y², xz), h = (z + 0.5, xy, y),
///   alpha = (0.06, 0.04, 0.025), beta = (8e-4, 5e-4, 3e-4):
///   p(t)   = p_inf + q Σ_j alpha_j e^(−gamma_j t) (f_j cos omega_j t + h_j sin omega_j t)
///   tau(t) = tau_inf + q Σ_j beta_j e^(−gamma_j t) ((f_j, h_j, f_j/2) cos omega_j t
///                                                 + (h_j, 0.3 f_j, h_j) sin omega_j t)
/// States flatten the requested fields in order (vectors interleaved).
Vector synthetic_lti_state(const TriMesh& mesh, const Vector& mu, double t,
                           const std::vector<std::string>& fields,
                           const FlowConditions& flow = {});

/// The t → ∞ limit of synthetic_lti_state.
Vector synthetic_regime_state(const TriMesh& mesh, const Vector& mu,
                              const std::vector<std::string>& fields,
                              const FlowConditions& flow = {});

/// Samples the transient fields uniformly over [t_start, t_end].
FomResult synthetic_lti_fom(const FomRequest& request, const FlowConditions& flow = {});

/// Emits the regime fields at every sample time (identical columns).
FomResult synthetic_steady_fom(const FomRequest& request, const FlowConditions& flow = {});

/// Reads a snapshot-series directory (manifest + per-step CSVs) written by
/// save_snapshot_series or an external export, and checks it against the
/// given surface.
FomResult ingest_external(const std::filesystem::path& dir, const TriMesh& mesh,
                          const FlowConditions& flow = {});

/// Named solver dispatch. Read-only after setup, safe to share across
/// concurrent workers.
class SolverRegistry {
public:
    using Solver = std::function<FomResult(const FomRequest&)>;

    void add(std::string id, Solver solver);
    bool has(const std::string& id) const;
    std::vector<std::string> ids() const;
    FomResult run(const std::string& id, const FomRequest& request) const;

private:
    std::map<std::string, Solver> solvers_;
};

/// Registry with "synthetic-lti" and "synthetic-steady" registered against
/// the given flow conditions.
SolverRegistry default_solver_registry(const FlowConditions& flow = {});

/// Validates the request, then dispatches. Solver exceptions come back as
/// Error("solver '<id>' failed: ...").
FomResult run_fom(const SolverRegistry& registry, const std::string& id,
                  const FomRequest& request);

/// Surface force integral from per-vertex fields "p" (scalar, Pa) and "tau"
/// (vector3, Pa, wall traction on the fluid-facing side):
///   F = Σ_faces (−p̄_f n̂_f + tau̅_f) A_f
/// with face means of the three vertex values and outward normals from the
/// winding. Returns −F · direction, positive when the force opposes motion
/// along the unit vector `direction`.
double integrate_resistance(const TriMesh& mesh, const FlowConditions& flow,
                            const Vec3& direction);

/// R / (q · reference_area), the dimensionless counterpart.
double resistance_coefficient(double resistance, const FlowConditions& flow);

}  // namespace romopt
