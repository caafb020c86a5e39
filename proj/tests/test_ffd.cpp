#include "romopt/ffd.hpp"

#include "romopt/io_util.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace romopt;
using testutil::make_cube_mesh;
using testutil::ScratchDir;

namespace {

FfdParameterization make_param() {
    FfdParameterization param;
    param.lattice = FfdLattice::make(Vec3(0, 0, 0),
                                     {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)},
                                     {3, 3, 3});
    param.dof_map = {{1, 1, 1, Vec3::UnitZ()}, {1, 1, 2, Vec3::UnitX()}};
    param.bounds.lo = Vector::Constant(2, -0.5);
    param.bounds.hi = Vector::Constant(2, 0.5);
    return param;
}

FfdLattice skewed_lattice() {
    return FfdLattice::make(Vec3(0.5, -1.0, 2.0),
                            {Vec3(2.0, 0.1, 0.0), Vec3(-0.2, 1.5, 0.3), Vec3(0.0, 0.4, 1.2)},
                            {2, 2, 2});
}

long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("linear Bernstein weights split evenly at the midpoint") {
    Vector b = bernstein_basis(1, 0.5);
    CHECK(b[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Bernstein basis interpolates at the endpoints") {
    Vector b = bernstein_basis(2, 0.0);
    CHECK(b[0] == 1.0);
    CHECK(b[1] == 0.0);
    CHECK(b[2] == 0.0);
}

TEST_CASE("cubic Bernstein values match the binomial formula") {
    // Oracle: direct factorial binomials, independent of the recurrence
    // used by the implementation.
    Vector b = bernstein_basis(3, 0.3);
    for (int i = 0; i <= 3; ++i) {
        double coef = static_cast<double>(factorial(3) / (factorial(i) * factorial(3 - i)));
        double expected = coef * std::pow(0.3, i) * std::pow(0.7, 3 - i);
        CHECK(b[i] == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("Bernstein basis is a partition of unity") {
    SplitMix64 rng(500);
    for (int degree = 1; degree <= 10; ++degree) {
        for (int trial = 0; trial < 8; ++trial) {
            double t = rng.next_double();
            CHECK(std::abs(bernstein_basis(degree, t).sum() - 1.0) <= 1e-14);
        }
    }
}

TEST_CASE("Bernstein basis rejects arguments outside the unit interval") {
    CHECK_THROWS_AS(bernstein_basis(2, -0.01), Error);
    CHECK_THROWS_AS(bernstein_basis(2, 1.01), Error);
    CHECK_THROWS_AS(bernstein_basis(-1, 0.5), Error);
}

TEST_CASE("reference map sends the box corners to the unit corners") {
    FfdLattice lat = skewed_lattice();
    Vec3 q0 = to_reference(lat, lat.origin);
    CHECK(q0.norm() <= 1e-14);
    Vec3 far = lat.origin + lat.axes[0] + lat.axes[1] + lat.axes[2];
    Vec3 q1 = to_reference(lat, far);
    CHECK((q1 - Vec3(1, 1, 1)).norm() <= 1e-12);
}

TEST_CASE("reference map round trips random points") {
    FfdLattice lat = skewed_lattice();
    SplitMix64 rng(501);
    for (int trial = 0; trial < 20; ++trial) {
        Vec3 p(rng.next_in(-3, 3), rng.next_in(-3, 3), rng.next_in(-3, 3));
        Vec3 back = from_reference(lat, to_reference(lat, p));
        CHECK((back - p).norm() <= 1e-12 * (1.0 + p.norm()));
    }
}

TEST_CASE("reference map rejects singular axes") {
    FfdLattice lat;
    lat.axes = {Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 0, 1)};
    lat.displacements.assign(8, Vec3::Zero());
    CHECK_THROWS_AS(to_reference(lat, Vec3(0, 0, 0)), Error);
}

TEST_CASE("zero displacements make deformation the bitwise identity") {
    FfdLattice lat = skewed_lattice();
    SplitMix64 rng(502);
    for (int trial = 0; trial < 10; ++trial) {
        Vec3 p(rng.next_in(-2, 4), rng.next_in(-2, 4), rng.next_in(-2, 4));
        Vec3 moved = deform_point(lat, p);
        CHECK(moved[0] == p[0]);
        CHECK(moved[1] == p[1]);
        CHECK(moved[2] == p[2]);
    }
}

TEST_CASE("single displaced corner moves the box center by an eighth") {
    // Degree-1 weights at the center are 0.5 per direction, so the corner
    // contribution is 0.5³ = 0.125, mapped back through the axes.
    FfdLattice lat = skewed_lattice();
    Vec3 d(0.3, -0.2, 0.1);
    lat.displacements[lat.index_of(1, 1, 1)] = d;
    Vec3 p = from_reference(lat, Vec3(0.5, 0.5, 0.5));
    Vec3 moved = deform_point(lat, p);
    Eigen::Matrix3d a;
    a.col(0) = lat.axes[0];
    a.col(1) = lat.axes[1];
    a.col(2) = lat.axes[2];
    Vec3 expected = p + a * (0.125 * d);
    CHECK((moved - expected).norm() <= 1e-12);
}

TEST_CASE("points outside the lattice box never move") {
    FfdLattice lat = skewed_lattice();
    lat.displacements[lat.index_of(0, 0, 0)] = Vec3(0.5, 0.5, 0.5);
    Vec3 p = from_reference(lat, Vec3(1.5, 0.5, 0.5));
    Vec3 moved = deform_point(lat, p);
    CHECK(moved[0] == p[0]);
    CHECK(moved[1] == p[1]);
    CHECK(moved[2] == p[2]);
}

TEST_CASE("displacing every control point reproduces a rigid shift") {
    FfdLattice lat = skewed_lattice();
    Vec3 d(0.12, -0.34, 0.21);
    for (auto& disp : lat.displacements) {
        disp = d;
    }
    SplitMix64 rng(503);
    for (int trial = 0; trial < 15; ++trial) {
        Vec3 q(rng.next_double(), rng.next_double(), rng.next_double());
        Vec3 p = from_reference(lat, q);
        Vec3 moved = deform_point(lat, p);
        Vec3 shift = to_reference(lat, moved) - to_reference(lat, p);
        CHECK((shift - d).norm() <= 1e-12);
    }
}

TEST_CASE("parameter application wires displacements as documented") {
    FfdParameterization param = make_param();
    Vector zero = Vector::Zero(2);
    FfdLattice at_zero = apply_params(param, zero);
    for (const auto& disp : at_zero.displacements) {
        CHECK(disp.norm() == 0.0);
    }

    Vector mu(2);
    mu << 0.2, -0.1;
    FfdLattice lat = apply_params(param, mu);
    CHECK(lat.displacements[lat.index_of(1, 1, 1)] == Vec3(0, 0, 0.2));
    CHECK(lat.displacements[lat.index_of(1, 1, 2)] == Vec3(-0.1, 0, 0));
    int nonzero = 0;
    for (const auto& disp : lat.displacements) {
        if (disp.norm() != 0.0) ++nonzero;
    }
    CHECK(nonzero == 2);
}

TEST_CASE("parameter vector length and strict bounds are enforced") {
    FfdParameterization param = make_param();
    CHECK_THROWS_AS(apply_params(param, Vector::Zero(3)), Error);
    Vector outside(2);
    outside << 0.7, 0.0;
    CHECK_NOTHROW(apply_params(param, outside));
    CHECK_THROWS_AS(apply_params(param, outside, true), Error);
}

TEST_CASE("mesh deformation at zero parameters is bitwise identity") {
    FfdParameterization param = make_param();
    TriMesh cube = make_cube_mesh();
    TriMesh moved = deform_mesh(param, cube, Vector::Zero(2));
    for (int v = 0; v < cube.vertex_count(); ++v) {
        CHECK(moved.vertices()[v] == cube.vertices()[v]);
    }
}

TEST_CASE("mesh deformation moves embedded vertices and fixes outside ones") {
    FfdParameterization param = make_param();
    // Straddling mesh: one triangle inside the unit box, one far outside.
    std::vector<Vec3> verts = {{0.5, 0.5, 0.5}, {0.4, 0.6, 0.5}, {0.5, 0.4, 0.6},
                               {5, 5, 5},       {6, 5, 5},       {5, 6, 5}};
    TriMesh mesh(verts, {{0, 1, 2}, {3, 4, 5}});
    Vector mu(2);
    mu << 0.3, 0.0;
    TriMesh moved = deform_mesh(param, mesh, mu);
    for (int v = 0; v < 3; ++v) {
        CHECK((moved.vertices()[v] - verts[v]).norm() > 1e-4);
    }
    for (int v = 3; v < 6; ++v) {
        CHECK(moved.vertices()[v] == verts[v]);
    }
    // Faces and fields survive.
    CHECK(moved.faces() == mesh.faces());

    TriMesh again = deform_mesh(param, mesh, mu);
    for (int v = 0; v < 6; ++v) {
        CHECK(again.vertices()[v] == moved.vertices()[v]);
    }
}

TEST_CASE("parameterization JSON round trips exactly") {
    ScratchDir dir("ffd_json");
    FfdParameterization param = make_param();
    auto path = dir / "ffd.json";
    save_ffd_json(param, path);
    FfdParameterization loaded = load_ffd_json(path);
    CHECK(loaded.lattice.origin == param.lattice.origin);
    CHECK(loaded.lattice.dims == param.lattice.dims);
    REQUIRE(loaded.dof_map.size() == param.dof_map.size());
    for (std::size_t c = 0; c < param.dof_map.size(); ++c) {
        CHECK(loaded.dof_map[c].i == param.dof_map[c].i);
        CHECK(loaded.dof_map[c].direction == param.dof_map[c].direction);
    }
    CHECK(loaded.bounds.lo == param.bounds.lo);
    CHECK(loaded.bounds.hi == param.bounds.hi);
}

TEST_CASE("parameterization JSON rejects malformed input") {
    ScratchDir dir("ffd_json_bad");
    auto path = dir / "ffd.json";
    write_text_file(path, "{not json");
    CHECK_THROWS_AS(load_ffd_json(path), ParseError);
    write_text_file(path, R"({"origin":[0,0,0]})");
    CHECK_THROWS_AS(load_ffd_json(path), ParseError);
    write_text_file(path, R"({"origin":[0,0,0],"axes":[[1,0,0],[0,1,0],[0,0,1]],"dims":[2,2,2],
        "dof_map":[{"i":0,"j":0,"k":0,"dir":[0,0,2]}],"bounds":[[-1,1]]})");
    CHECK_THROWS_AS(load_ffd_json(path), ParseError);  // non-unit direction
    write_text_file(path, R"({"origin":[0,0,0],"axes":[[1,0,0],[0,1,0],[0,0,1]],"dims":[2,2,2],
        "dof_map":[{"i":0,"j":0,"k":0,"dir":[0,0,1]}],"bounds":[[-1,1]],"extra":1})");
    CHECK_THROWS_AS(load_ffd_json(path), ParseError);  // unknown key
}

TEST_CASE("dof validation catches out-of-range and repeated entries") {
    FfdParameterization param = make_param();
    param.dof_map.push_back({7, 0, 0, Vec3::UnitX()});
    param.bounds.lo = Vector::Constant(3, -0.5);
    param.bounds.hi = Vector::Constant(3, 0.5);
    CHECK_THROWS_AS(param.validate(), Error);

    param = make_param();
    param.dof_map.push_back(param.dof_map[0]);
    param.bounds.lo = Vector::Constant(3, -0.5);
    param.bounds.hi = Vector::Constant(3, 0.5);
    CHECK_THROWS_AS(param.validate(), Error);
}
