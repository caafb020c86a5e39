#include "romopt/fom.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace romopt {

void FlowConditions::validate() const {
    if (!(speed > 0.0) || !(density > 0.0) || !(reference_area > 0.0)) {
        throw Error("flow conditions need positive speed, density, and reference area");
    }
}

void FomRequest::validate() const {
    if (!(t_start < t_end)) {
        throw Error("time window start must precede its end");
    }
    if (count < 3) {
        throw Error("time window needs at least 3 samples, got " + std::to_string(count));
    }
    if (fields.empty()) {
        throw Error("request names no fields");
    }
    if (mesh.vertex_count() == 0) {
        throw Error("request mesh has no vertices");
    }
}

namespace {

constexpr double kBulbAmp = 0.25;
constexpr double kBulbWidth = 0.45;

Vec3 hull_map(const Vec3& u) {
    const Vec3 pole(1.0, 0.0, 0.0);
    const double bump =
        1.0 + kBulbAmp * std::exp(-(u - pole).squaredNorm() / (kBulbWidth * kBulbWidth));
    return {2.5 * u.x() * bump, 0.8 * u.y() * bump, 0.6 * u.z() * bump};
}

}  // namespace

TriMesh synthetic_hull(int subdivisions) {
    if (subdivisions < 0 || subdivisions > 7) {
        throw Error("hull subdivision level must be in [0, 7], got " +
                    std::to_string(subdivisions));
    }
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : verts) {
        v.normalize();
    }
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoints;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoints.find(key);
            if (it != midpoints.end()) {
                return it->second;
            }
            Vec3 m = (verts[a] + verts[b]).normalized();
            verts.push_back(m);
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoints.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int m01 = midpoint(f[0], f[1]);
            const int m12 = midpoint(f[1], f[2]);
            const int m02 = midpoint(f[0], f[2]);
            next.push_back({f[0], m01, m02});
            next.push_back({f[1], m12, m01});
            next.push_back({f[2], m02, m12});
            next.push_back({m01, m12, m02});
        }
        faces = std::move(next);
    }
    for (auto& v : verts) {
        v = hull_map(v);
    }
    return TriMesh(std::move(verts), std::move(faces));
}

namespace {

constexpr double kGamma[3] = {0.10, 0.13, 0.17};
constexpr double kOmega[3] = {0.9, 1.7, 2.6};
constexpr double kAlphaP[3] = {0.06, 0.04, 0.025};
constexpr double kBetaTau[3] = {8e-4, 5e-4, 3e-4};

struct PointFields {
    double p;
    Vec3 tau;
};

double mu_quadratic(const Vector& mu) {
    double s = 1.0;
    for (int k = 0; k < mu.size(); ++k) {
        s += 0.1 * mu[k] + 0.5 * mu[k] * mu[k];
    }
    return s;
}

double mu_shear_scale(const Vector& mu) {
    return 1.0 + 0.25 * mu.squaredNorm();
}

PointFields regime_fields(const Vec3& r, const Vector& mu, double q) {
    PointFields out;
    out.p = q * (0.8 + 0.4 * r.x() - 0.2 * r.z() + 0.1 * r.y() * r.y()) * mu_quadratic(mu);
    out.tau = q * mu_shear_scale(mu) *
              Vec3(-0.004 * (1.0 + 0.3 * r.x() * r.x()), 0.0015 * r.z(), 0.001 * r.y());
    return out;
}

PointFields lti_fields(const Vec3& r, const Vector& mu, double t, double q) {
    PointFields out = regime_fields(r, mu, q);
    const double f[3] = {r.x(), r.y() * r.y(), r.x() * r.z()};
    const double h[3] = {r.z() + 0.5, r.x() * r.y(), r.y()};
    for (int j = 0; j < 3; ++j) {
        const double decay = std::exp(-kGamma[j] * t);
        const double c = decay * std::cos(kOmega[j] * t);
        const double s = decay * std::sin(kOmega[j] * t);
        out.p += q * kAlphaP[j] * (f[j] * c + h[j] * s);
        out.tau += q * kBetaTau[j] *
                   (c * Vec3(f[j], h[j], 0.5 * f[j]) + s * Vec3(h[j], 0.3 * f[j], h[j]));
    }
    return out;
}

std::vector<LayoutEntry> layout_for(const std::vector<std::string>& fields) {
    std::vector<LayoutEntry> layout;
    for (const auto& name : fields) {
        if (name == "p") {
            layout.push_back({"p", FieldKind::Scalar});
        } else if (name == "tau") {
            layout.push_back({"tau", FieldKind::Vector3});
        } else {
            throw Error("unknown field '" + name + "'; synthetic solvers provide p, tau");
        }
    }
    return layout;
}

// evaluate(r, mu) -> PointFields at one vertex; shared column assembly.
template <typename Eval>
Vector assemble_state(const TriMesh& mesh, const std::vector<LayoutEntry>& layout, Eval&& evaluate) {
    const int nv = mesh.vertex_count();
    long dim = 0;
    for (const auto& entry : layout) {
        dim += static_cast<long>(entry.kind == FieldKind::Scalar ? 1 : 3) * nv;
    }
    Vector state(dim);
    long offset = 0;
    for (const auto& entry : layout) {
        if (entry.kind == FieldKind::Scalar) {
            for (int v = 0; v < nv; ++v) {
                state[offset + v] = evaluate(mesh.vertices()[v]).p;
            }
            offset += nv;
        } else {
            for (int v = 0; v < nv; ++v) {
                const Vec3 tau = evaluate(mesh.vertices()[v]).tau;
                state[offset + 3 * v + 0] = tau.x();
                state[offset + 3 * v + 1] = tau.y();
                state[offset + 3 * v + 2] = tau.z();
            }
            offset += 3 * static_cast<long>(nv);
        }
    }
    return state;
}

}  // namespace

Vector synthetic_lti_state(const TriMesh& mesh, const Vector& mu, double t,
                           const std::vector<std::string>& fields, const FlowConditions& flow) {
    flow.validate();
    const double q = flow.dynamic_pressure();
    return assemble_state(mesh, layout_for(fields),
                          [&](const Vec3& r) { return lti_fields(r, mu, t, q); });
}

Vector synthetic_regime_state(const TriMesh& mesh, const Vector& mu,
                              const std::vector<std::string>& fields,
                              const FlowConditions& flow) {
    flow.validate();
    const double q = flow.dynamic_pressure();
    return assemble_state(mesh, layout_for(fields),
                          [&](const Vec3& r) { return regime_fields(r, mu, q); });
}

namespace {

FomResult sample_window(const FomRequest& request, const FlowConditions& flow,
                        const std::string& solver_id, bool steady) {
    request.validate();
    flow.validate();
    FomResult out;
    out.layout = layout_for(request.fields);
    out.solver_id = solver_id;
    out.flow = flow;
    out.series.t0 = request.t_start;
    out.series.dt = request.dt();

    const Vector first = steady
        ? synthetic_regime_state(request.mesh, request.mu, request.fields, flow)
        : synthetic_lti_state(request.mesh, request.mu, request.t_start, request.fields, flow);
    out.series.states.resize(first.size(), request.count);
    out.series.states.col(0) = first;
    for (int k = 1; k < request.count; ++k) {
        out.series.states.col(k) =
            steady ? first
                   : synthetic_lti_state(request.mesh, request.mu,
                                         request.t_start + k * out.series.dt, request.fields,
                                         flow);
    }
    return out;
}

}  // namespace

FomResult synthetic_lti_fom(const FomRequest& request, const FlowConditions& flow) {
    return sample_window(request, flow, "synthetic-lti", false);
}

FomResult synthetic_steady_fom(const FomRequest& request, const FlowConditions& flow) {
    return sample_window(request, flow, "synthetic-steady", true);
}

FomResult ingest_external(const std::filesystem::path& dir, const TriMesh& mesh,
                          const FlowConditions& flow) {
    SeriesOnDisk loaded = load_snapshot_series(dir);
    if (loaded.vertex_count != mesh.vertex_count()) {
        throw Error(dir.string() + ": series has " + std::to_string(loaded.vertex_count) +
                    " vertices per step but the mesh has " +
                    std::to_string(mesh.vertex_count()));
    }
    FomResult out;
    out.series = std::move(loaded.series);
    out.layout = std::move(loaded.layout);
    out.solver_id = "external";
    out.flow = flow;
    return out;
}

void SolverRegistry::add(std::string id, Solver solver) {
    if (id.empty() || !solver) {
        throw Error("solver registration needs an id and a callable");
    }
    solvers_[std::move(id)] = std::move(solver);
}

bool SolverRegistry::has(const std::string& id) const { return solvers_.count(id) > 0; }

std::vector<std::string> SolverRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, fn] : solvers_) {
        out.push_back(id);
    }
    return out;
}

FomResult SolverRegistry::run(const std::string& id, const FomRequest& request) const {
    auto it = solvers_.find(id);
    if (it == solvers_.end()) {
        std::string known;
        for (const auto& [key, fn] : solvers_) {
            known += known.empty() ? key : ", " + key;
        }
        throw Error("unknown solver '" + id + "'; registered: " + known);
    }
    request.validate();
    try {
        return it->second(request);
    } catch (const std::exception& e) {
        throw Error("solver '" + id + "' failed: " + e.what());
    }
}

SolverRegistry default_solver_registry(const FlowConditions& flow) {
    SolverRegistry registry;
    registry.add("synthetic-lti",
                 [flow](const FomRequest& r) { return synthetic_lti_fom(r, flow); });
    registry.add("synthetic-steady",
                 [flow](const FomRequest& r) { return synthetic_steady_fom(r, flow); });
    return registry;
}

FomResult run_fom(const SolverRegistry& registry, const std::string& id,
                  const FomRequest& request) {
    return registry.run(id, request);
}

double integrate_resistance(const TriMesh& mesh, const FlowConditions& flow,
                            const Vec3& direction) {
    flow.validate();
    if (std::abs(direction.norm() - 1.0) > 1e-9) {
        throw Error("resistance direction must be a unit vector");
    }
    for (const char* name : {"p", "tau"}) {
        if (!mesh.has_field(name)) {
            throw Error("mesh is missing field '" + std::string(name) + "'");
        }
    }
    const Field& p = mesh.field("p");
    const Field& tau = mesh.field("tau");
    if (p.kind != FieldKind::Scalar || tau.kind != FieldKind::Vector3) {
        throw Error("expected scalar 'p' and vector3 'tau' fields");
    }

    Vec3 force = Vec3::Zero();
    const auto& verts = mesh.vertices();
    for (int i = 0; i < mesh.face_count(); ++i) {
        const auto& f = mesh.faces()[i];
        const Vec3 e1 = verts[f[1]] - verts[f[0]];
        const Vec3 e2 = verts[f[2]] - verts[f[0]];
        const Vec3 cross = e1.cross(e2);
        const double area = 0.5 * cross.norm();
        if (area < 1e-16) {
            throw Error("face " + std::to_string(i) + " is degenerate (area " +
                        std::to_string(area) + ")");
        }
        const Vec3 normal = cross / (2.0 * area);
        const double p_mean = (p.values[f[0]] + p.values[f[1]] + p.values[f[2]]) / 3.0;
        Vec3 tau_mean = Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
            tau_mean += Vec3(tau.values[3 * f[c] + 0], tau.values[3 * f[c] + 1],
                             tau.values[3 * f[c] + 2]);
        }
        tau_mean /= 3.0;
        force += (-p_mean * normal + tau_mean) * area;
    }
    return -force.dot(direction);
}

double resistance_coefficient(double resistance, const FlowConditions& flow) {
    flow.validate();
    return resistance / (flow.dynamic_pressure() * flow.reference_area);
}

}  // namespace romopt
