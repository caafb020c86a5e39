#include "romopt/ffd.hpp"

#include "romopt/io_util.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <utility>

namespace romopt {

namespace {

Eigen::Matrix3d axes_matrix(const FfdLattice& lattice) {
    Eigen::Matrix3d a;
    for (int c = 0; c < 3; ++c) {
        a.col(c) = lattice.axes[c];
    }
    return a;
}

double axes_scale(const FfdLattice& lattice) {
    return lattice.axes[0].norm() * lattice.axes[1].norm() * lattice.axes[2].norm();
}

Eigen::Matrix3d checked_inverse(const FfdLattice& lattice) {
    Eigen::Matrix3d a = axes_matrix(lattice);
    double det = a.determinant();
    if (std::abs(det) <= 1e-12 * axes_scale(lattice)) {
        throw Error("lattice axes are numerically singular");
    }
    return a.inverse();
}

bool inside_unit_box(const Vec3& q) {
    return q[0] >= 0.0 && q[0] <= 1.0 && q[1] >= 0.0 && q[1] <= 1.0 && q[2] >= 0.0 && q[2] <= 1.0;
}

bool all_zero(const std::vector<Vec3>& displacements) {
    for (const auto& d : displacements) {
        if (d[0] != 0.0 || d[1] != 0.0 || d[2] != 0.0) {
            return false;
        }
    }
    return true;
}

/// Shared per-deformation state so a mesh pass inverts the axes once.
struct DeformContext {
    Eigen::Matrix3d a;
    Eigen::Matrix3d a_inv;
    bool identity;

    explicit DeformContext(const FfdLattice& lattice)
        : a(axes_matrix(lattice)),
          a_inv(checked_inverse(lattice)),
          identity(all_zero(lattice.displacements)) {}

    Vec3 apply(const FfdLattice& lattice, const Vec3& p) const {
        if (identity) {
            return p;
        }
        Vec3 q = a_inv * (p - lattice.origin);
        if (!inside_unit_box(q)) {
            return p;
        }
        const auto [l, m, n] = lattice.dims;
        Vector bs = bernstein_basis(l - 1, q[0]);
        Vector bt = bernstein_basis(m - 1, q[1]);
        Vector bu = bernstein_basis(n - 1, q[2]);
        Vec3 acc = Vec3::Zero();
        for (int i = 0; i < l; ++i) {
            for (int j = 0; j < m; ++j) {
                double wij = bs[i] * bt[j];
                for (int k = 0; k < n; ++k) {
                    Vec3 node(static_cast<double>(i) / (l - 1), static_cast<double>(j) / (m - 1),
                              static_cast<double>(k) / (n - 1));
                    acc += (wij * bu[k]) * (node + lattice.displacements[lattice.index_of(i, j, k)]);
                }
            }
        }
        return lattice.origin + a * acc;
    }
};

}  // namespace

void FfdLattice::validate() const {
    for (int c = 0; c < 3; ++c) {
        if (dims[c] < 2) {
            throw Error("lattice dims must each be at least 2");
        }
        if (!axes[c].allFinite() || !origin.allFinite()) {
            throw Error("lattice geometry has non-finite entries");
        }
    }
    (void)checked_inverse(*this);
    if (static_cast<int>(displacements.size()) != control_count()) {
        throw Error("lattice has " + std::to_string(displacements.size()) +
                    " displacements, expected " + std::to_string(control_count()));
    }
    for (const auto& d : displacements) {
        if (!d.allFinite()) {
            throw Error("lattice displacement has non-finite entries");
        }
    }
}

FfdLattice FfdLattice::make(Vec3 origin, std::array<Vec3, 3> axes, std::array<int, 3> dims) {
    FfdLattice lat;
    lat.origin = origin;
    lat.axes = axes;
    lat.dims = dims;
    lat.displacements.assign(static_cast<std::size_t>(lat.control_count()), Vec3::Zero());
    lat.validate();
    return lat;
}

void FfdParameterization::validate() const {
    lattice.validate();
    if (!all_zero(lattice.displacements)) {
        throw Error("reference lattice must have zero displacements");
    }
    if (dof_map.empty()) {
        throw Error("parameterization has no degrees of freedom");
    }
    std::set<std::pair<int, std::array<double, 3>>> seen;
    for (const auto& dof : dof_map) {
        if (dof.i < 0 || dof.i >= lattice.dims[0] || dof.j < 0 || dof.j >= lattice.dims[1] ||
            dof.k < 0 || dof.k >= lattice.dims[2]) {
            throw Error("dof control index (" + std::to_string(dof.i) + "," + std::to_string(dof.j) +
                        "," + std::to_string(dof.k) + ") outside lattice dims");
        }
        if (std::abs(dof.direction.norm() - 1.0) > 1e-9) {
            throw Error("dof direction must be a unit vector");
        }
        auto key = std::make_pair(lattice.index_of(dof.i, dof.j, dof.k),
                                  std::array<double, 3>{dof.direction[0], dof.direction[1],
                                                        dof.direction[2]});
        if (!seen.insert(key).second) {
            throw Error("repeated (control index, direction) pair in dof_map");
        }
    }
    bounds.validate();
    if (bounds.dim() != param_dim()) {
        throw Error("bounds dimension " + std::to_string(bounds.dim()) +
                    " does not match dof count " + std::to_string(param_dim()));
    }
}

Vector bernstein_basis(int degree, double t) {
    if (degree < 0) {
        throw Error("bernstein_basis: degree must be non-negative");
    }
    if (!(t >= 0.0 && t <= 1.0)) {
        throw Error("bernstein_basis: t = " + format_double(t) + " outside [0, 1]");
    }
    Vector b(degree + 1);
    double coef = 1.0;
    for (int i = 0; i <= degree; ++i) {
        if (i > 0) {
            coef *= static_cast<double>(degree - i + 1) / static_cast<double>(i);
        }
        b[i] = coef * std::pow(t, i) * std::pow(1.0 - t, degree - i);
    }
    return b;
}

Vec3 to_reference(const FfdLattice& lattice, const Vec3& p) {
    return checked_inverse(lattice) * (p - lattice.origin);
}

Vec3 from_reference(const FfdLattice& lattice, const Vec3& q) {
    return lattice.origin + axes_matrix(lattice) * q;
}

Vec3 deform_point(const FfdLattice& lattice, const Vec3& p) {
    lattice.validate();
    return DeformContext(lattice).apply(lattice, p);
}

FfdLattice apply_params(const FfdParameterization& param, const Vector& mu, bool strict_bounds) {
    if (mu.size() != param.param_dim()) {
        throw Error("parameter vector has " + std::to_string(mu.size()) + " entries, expected " +
                    std::to_string(param.param_dim()));
    }
    if (!mu.allFinite()) {
        throw Error("parameter vector has non-finite entries");
    }
    if (strict_bounds) {
        for (int c = 0; c < mu.size(); ++c) {
            if (mu[c] < param.bounds.lo[c] || mu[c] > param.bounds.hi[c]) {
                throw Error("parameter component " + std::to_string(c) + " = " +
                            format_double(mu[c]) + " outside bounds [" +
                            format_double(param.bounds.lo[c]) + ", " +
                            format_double(param.bounds.hi[c]) + "]");
            }
        }
    }
    FfdLattice lat = param.lattice;
    for (int c = 0; c < mu.size(); ++c) {
        const auto& dof = param.dof_map[c];
        lat.displacements[lat.index_of(dof.i, dof.j, dof.k)] += mu[c] * dof.direction;
    }
    return lat;
}

TriMesh deform_mesh(const FfdParameterization& param, const TriMesh& mesh, const Vector& mu,
                    bool strict_bounds) {
    param.validate();
    FfdLattice lat = apply_params(param, mu, strict_bounds);
    DeformContext ctx(lat);
    std::vector<Vec3> moved = mesh.vertices();
    for (auto& p : moved) {
        p = ctx.apply(lat, p);
    }
    return mesh.with_vertices(std::move(moved));
}

namespace {

using nlohmann::json;

Vec3 parse_vec3(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number()) {
        throw ParseError(what + " must be an array of 3 numbers");
    }
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ParseError(where + ": unknown key '" + key + "'");
        }
    }
}

}  // namespace

FfdParameterization load_ffd_json(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    const std::string where = path.string();
    if (!j.is_object()) {
        throw ParseError(where + ": top level must be an object");
    }
    reject_unknown_keys(j, {"origin", "axes", "dims", "dof_map", "bounds"}, where);
    for (const char* key : {"origin", "axes", "dims", "dof_map", "bounds"}) {
        if (!j.contains(key)) {
            throw ParseError(where + ": missing key '" + std::string(key) + "'");
        }
    }
    FfdParameterization param;
    param.lattice.origin = parse_vec3(j["origin"], where + ": origin");
    if (!j["axes"].is_array() || j["axes"].size() != 3) {
        throw ParseError(where + ": axes must be an array of 3 vectors");
    }
    for (int c = 0; c < 3; ++c) {
        param.lattice.axes[c] = parse_vec3(j["axes"][c], where + ": axes[" + std::to_string(c) + "]");
    }
    if (!j["dims"].is_array() || j["dims"].size() != 3) {
        throw ParseError(where + ": dims must be an array of 3 integers");
    }
    for (int c = 0; c < 3; ++c) {
        if (!j["dims"][c].is_number_integer()) {
            throw ParseError(where + ": dims must be integers");
        }
        param.lattice.dims[c] = j["dims"][c].get<int>();
    }
    if (!j["dof_map"].is_array() || j["dof_map"].empty()) {
        throw ParseError(where + ": dof_map must be a non-empty array");
    }
    for (const auto& entry : j["dof_map"]) {
        if (!entry.is_object()) {
            throw ParseError(where + ": dof_map entries must be objects");
        }
        reject_unknown_keys(entry, {"i", "j", "k", "dir"}, where + ": dof_map entry");
        for (const char* key : {"i", "j", "k", "dir"}) {
            if (!entry.contains(key)) {
                throw ParseError(where + ": dof_map entry missing '" + std::string(key) + "'");
            }
        }
        FfdDof dof;
        if (!entry["i"].is_number_integer() || !entry["j"].is_number_integer() ||
            !entry["k"].is_number_integer()) {
            throw ParseError(where + ": dof_map indices must be integers");
        }
        dof.i = entry["i"].get<int>();
        dof.j = entry["j"].get<int>();
        dof.k = entry["k"].get<int>();
        dof.direction = parse_vec3(entry["dir"], where + ": dof_map dir");
        param.dof_map.push_back(dof);
    }
    if (!j["bounds"].is_array() || j["bounds"].size() != param.dof_map.size()) {
        throw ParseError(where + ": bounds must have one [lo, hi] pair per dof");
    }
    const int m = static_cast<int>(param.dof_map.size());
    param.bounds.lo.resize(m);
    param.bounds.hi.resize(m);
    for (int c = 0; c < m; ++c) {
        const auto& pair = j["bounds"][c];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw ParseError(where + ": bounds[" + std::to_string(c) + "] must be [lo, hi]");
        }
        param.bounds.lo[c] = pair[0].get<double>();
        param.bounds.hi[c] = pair[1].get<double>();
    }
    param.lattice.displacements.assign(static_cast<std::size_t>(param.lattice.control_count()),
                                       Vec3::Zero());
    try {
        param.validate();
    } catch (const Error& e) {
        throw ParseError(where + ": " + e.what());
    }
    return param;
}

void save_ffd_json(const FfdParameterization& param, const std::filesystem::path& path) {
    param.validate();
    json j;
    j["origin"] = {param.lattice.origin[0], param.lattice.origin[1], param.lattice.origin[2]};
    j["axes"] = json::array();
    for (int c = 0; c < 3; ++c) {
        const Vec3& a = param.lattice.axes[c];
        j["axes"].push_back({a[0], a[1], a[2]});
    }
    j["dims"] = {param.lattice.dims[0], param.lattice.dims[1], param.lattice.dims[2]};
    j["dof_map"] = json::array();
    for (const auto& dof : param.dof_map) {
        json e;
        e["i"] = dof.i;
        e["j"] = dof.j;
        e["k"] = dof.k;
        e["dir"] = {dof.direction[0], dof.direction[1], dof.direction[2]};
        j["dof_map"].push_back(e);
    }
    j["bounds"] = json::array();
    for (int c = 0; c < param.bounds.dim(); ++c) {
        j["bounds"].push_back({param.bounds.lo[c], param.bounds.hi[c]});
    }
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace romopt
