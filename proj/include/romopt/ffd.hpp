#pragma once

#include "romopt/mesh.hpp"
#include "romopt/types.hpp"

#include <array>
#include <filesystem>
#include <vector>

namespace romopt {

/// Trivariate Bézier control lattice. The embedding box is spanned by three
/// linearly independent axis vectors anchored at origin; reference
/// coordinates (s,t,u) live in [0,1]³. Control point (i,j,k) sits at
/// (i/(l−1), j/(m−1), k/(n−1)) in reference space and carries a
/// lattice-local displacement, stored at index (i·m + j)·n + k.
struct FfdLattice {
    Vec3 origin = Vec3::Zero();
    std::array<Vec3, 3> axes = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    std::array<int, 3> dims = {2, 2, 2};
    std::vector<Vec3> displacements;

    int control_count() const { return dims[0] * dims[1] * dims[2]; }

    int index_of(int i, int j, int k) const { return (i * dims[1] + j) * dims[2] + k; }

    /// Throws on dims < 2, axes with |det| ≤ 1e-12·‖a₀‖‖a₁‖‖a₂‖, or a
    /// displacement array of the wrong length.
    void validate() const;

    static FfdLattice make(Vec3 origin, std::array<Vec3, 3> axes, std::array<int, 3> dims);
};

/// One optimization degree of freedom: a control point pushed along a unit
/// direction (in the lattice-local frame) by the parameter value.
struct FfdDof {
    int i = 0;
    int j = 0;
    int k = 0;
    Vec3 direction = Vec3::UnitZ();
};

/// Lattice plus the wiring from parameter vector μ to control-point
/// displacements, with the parameter box the study explores.
struct FfdParameterization {
    FfdLattice lattice;
    std::vector<FfdDof> dof_map;
    Box bounds;

    int param_dim() const { return static_cast<int>(dof_map.size()); }

    /// Validates the lattice, that its reference displacements are all
    /// zero, dof indices in range with unit directions, no repeated
    /// (index, direction) pair, and bounds of matching dimension.
    void validate() const;
};

/// Bernstein polynomials B_i(t) = C(d,i)·tⁱ·(1−t)^(d−i), i = 0..d.
/// Entries sum to 1. Throws if t is outside [0,1].
Vector bernstein_basis(int degree, double t);

/// Reference-box coordinates (s,t,u) = axes⁻¹·(p − origin).
Vec3 to_reference(const FfdLattice& lattice, const Vec3& p);

/// Physical coordinates origin + axes·(s,t,u).
Vec3 from_reference(const FfdLattice& lattice, const Vec3& q);

/// Bézier deformation of one point. Points whose reference image leaves
/// [0,1]³ are returned unchanged, bitwise; so is every point when the
/// lattice displacements are all exactly zero.
Vec3 deform_point(const FfdLattice& lattice, const Vec3& p);

/// Lattice with displacement μ_c·direction at each dof entry (summed when
/// entries share a control point) and zero elsewhere. strict_bounds
/// rejects μ components outside the parameter box.
FfdLattice apply_params(const FfdParameterization& param, const Vector& mu,
                        bool strict_bounds = false);

/// Vertex-wise deform_point; faces and fields carry over unchanged.
TriMesh deform_mesh(const FfdParameterization& param, const TriMesh& mesh, const Vector& mu,
                    bool strict_bounds = false);

/// JSON exchange format, keys: origin, axes (three arrays), dims,
/// dof_map ([{i,j,k,dir}]), bounds ([[lo,hi],...]). Unknown keys are
/// rejected so typos fail loudly.
FfdParameterization load_ffd_json(const std::filesystem::path& path);
void save_ffd_json(const FfdParameterization& param, const std::filesystem::path& path);

}  // namespace romopt
