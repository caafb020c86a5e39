#include "romopt/mesh.hpp"

#include "romopt/io_util.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

using namespace romopt;
using testutil::make_cube_mesh;
using testutil::ScratchDir;

namespace {

Field scalar_field(const std::string& name, Vector values) {
    Field f;
    f.name = name;
    f.kind = FieldKind::Scalar;
    f.values = std::move(values);
    return f;
}

Field vector_field(const std::string& name, Vector values) {
    Field f;
    f.name = name;
    f.kind = FieldKind::Vector3;
    f.values = std::move(values);
    return f;
}

std::set<std::array<double, 3>> coordinate_set(const TriMesh& m) {
    std::set<std::array<double, 3>> out;
    for (const auto& v : m.vertices()) {
        out.insert({v[0], v[1], v[2]});
    }
    return out;
}

}  // namespace

TEST_CASE("mesh construction validates face indices and degeneracy") {
    std::vector<Vec3> verts = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    CHECK_NOTHROW(TriMesh(verts, {{0, 1, 2}}));
    CHECK_THROWS_AS(TriMesh(verts, {{0, 1, 3}}), Error);
    CHECK_THROWS_AS(TriMesh(verts, {{0, 1, -1}}), Error);
    CHECK_THROWS_AS(TriMesh(verts, {{0, 1, 1}}), Error);
}

TEST_CASE("ASCII cube round trip dedups to 8 vertices and 12 faces") {
    ScratchDir dir("mesh_ascii_cube");
    TriMesh cube = make_cube_mesh();
    auto path = dir / "cube.stl";
    save_stl(cube, path, StlFormat::Ascii);
    // The file stores 36 per-facet vertex records; loading collapses them.
    TriMesh loaded = load_stl(path);
    CHECK(loaded.vertex_count() == 8);
    CHECK(loaded.face_count() == 12);
    CHECK(coordinate_set(loaded) == coordinate_set(cube));
}

TEST_CASE("single-triangle ASCII STL loads as V=3 F=1") {
    ScratchDir dir("mesh_single_tri");
    const std::string stl =
        "solid tri\n"
        "  facet normal 0 0 1\n"
        "    outer loop\n"
        "      vertex 0 0 0\n"
        "      vertex 1 0 0\n"
        "      vertex 0 1 0\n"
        "    endloop\n"
        "  endfacet\n"
        "endsolid tri\n";
    auto path = dir / "tri.stl";
    write_text_file(path, stl);
    TriMesh m = load_stl(path);
    CHECK(m.vertex_count() == 3);
    CHECK(m.face_count() == 1);
}

TEST_CASE("truncated facet record is a parse error") {
    ScratchDir dir("mesh_truncated");
    const std::string stl =
        "solid tri\n"
        "  facet normal 0 0 1\n"
        "    outer loop\n"
        "      vertex 0 0 0\n"
        "      vertex 1 0 0\n";
    auto path = dir / "bad.stl";
    write_text_file(path, stl);
    CHECK_THROWS_AS(load_stl(path), ParseError);
}

TEST_CASE("empty solid is an error in both formats") {
    ScratchDir dir("mesh_empty");
    auto ascii = dir / "empty.stl";
    write_text_file(ascii, "solid nothing\nendsolid nothing\n");
    CHECK_THROWS_AS(load_stl(ascii), ParseError);

    std::string binary(80, '\0');
    binary += std::string(4, '\0');  // facet count 0
    auto bin = dir / "empty_bin.stl";
    write_binary_file(bin, binary.data(), binary.size());
    CHECK_THROWS_AS(load_stl(bin), ParseError);
}

TEST_CASE("binary round trip preserves coordinates bitwise") {
    ScratchDir dir("mesh_binary_rt");
    // Cube coordinates are exactly representable in float32, so the binary
    // format loses nothing here.
    TriMesh cube = make_cube_mesh();
    auto path = dir / "cube_bin.stl";
    save_stl(cube, path, StlFormat::Binary);
    TriMesh loaded = load_stl(path);
    REQUIRE(loaded.vertex_count() == 8);
    CHECK(coordinate_set(loaded) == coordinate_set(cube));
    // A second save of the loaded mesh reproduces the file byte for byte.
    auto path2 = dir / "cube_bin2.stl";
    save_stl(loaded, path2, StlFormat::Binary);
    CHECK(read_binary_file(path) == read_binary_file(path2));
}

TEST_CASE("ASCII round trip reproduces coordinates within text precision") {
    ScratchDir dir("mesh_ascii_rt");
    std::vector<Vec3> verts = {{0.1234567890123, -2.5, 3.75},
                               {1.0 / 3.0, 0.0, -0.125},
                               {9.999999e-7, 2.0, 1.0}};
    TriMesh m(verts, {{0, 1, 2}});
    auto path = dir / "tri.stl";
    save_stl(m, path, StlFormat::Ascii);
    TriMesh loaded = load_stl(path);
    REQUIRE(loaded.vertex_count() == 3);
    // Shortest round-trip formatting makes the text exact, well inside the
    // 1e-6 budget the format guarantees.
    for (const auto& v : verts) {
        bool found = false;
        for (const auto& w : loaded.vertices()) {
            if ((v - w).norm() <= 1e-6) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("saving a mesh with zero faces is refused") {
    ScratchDir dir("mesh_zero_faces");
    TriMesh m({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {});
    CHECK_THROWS_AS(save_stl(m, dir / "none.stl", StlFormat::Ascii), Error);
}

TEST_CASE("weld tolerance merges near-coincident vertices") {
    ScratchDir dir("mesh_weld");
    const std::string stl =
        "solid tri\n"
        "  facet normal 0 0 1\n"
        "    outer loop\n"
        "      vertex 0 0 0\n"
        "      vertex 1 0 0\n"
        "      vertex 0 1 0\n"
        "    endloop\n"
        "  endfacet\n"
        "  facet normal 0 0 1\n"
        "    outer loop\n"
        "      vertex 1.0000000001 0 0\n"
        "      vertex 2 0 0\n"
        "      vertex 0 1 0\n"
        "    endloop\n"
        "  endfacet\n"
        "endsolid tri\n";
    auto path = dir / "near.stl";
    write_text_file(path, stl);
    // Exact dedup keeps the two copies of the shared corner distinct.
    CHECK(load_stl(path).vertex_count() == 5);
    CHECK(load_stl(path, 1e-6).vertex_count() == 4);
}

TEST_CASE("flatten produces the documented lengths and ordering") {
    TriMesh m({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    Vector p(3);
    p << 1, 2, 3;
    Vector tau(9);
    tau << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    m = m.with_field(scalar_field("p", p)).with_field(vector_field("tau", tau));

    StateVector sp = flatten_fields(m, {"p"});
    CHECK(sp.data.size() == 3);

    StateVector both = flatten_fields(m, {"p", "tau"});
    REQUIRE(both.data.size() == 12);
    CHECK(both.data.head(3) == p);
    CHECK(both.data.tail(9) == tau);
    REQUIRE(both.layout.size() == 2);
    CHECK(both.layout[0].name == "p");
    CHECK(both.layout[1].kind == FieldKind::Vector3);

    CHECK_THROWS_WITH_AS(static_cast<void>(flatten_fields(m, {"q"})),
                         doctest::Contains("q"), Error);
}

TEST_CASE("unflatten inverts flatten bitwise") {
    TriMesh m({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    Vector p = testutil::random_vector(3, 400);
    Vector tau = testutil::random_vector(9, 401);
    m = m.with_field(scalar_field("p", p)).with_field(vector_field("tau", tau));
    StateVector s = flatten_fields(m, {"tau", "p"});
    TriMesh back = unflatten_fields(m, s);
    CHECK(back.field("p").values == p);
    CHECK(back.field("tau").values == tau);

    StateVector bad = s;
    bad.data.conservativeResize(11);
    CHECK_THROWS_AS(unflatten_fields(m, bad), Error);

    StateVector zero = s;
    zero.data.setZero();
    CHECK(unflatten_fields(m, zero).field("p").values.isZero(0.0));
}

TEST_CASE("flatten round trip holds for random meshes and fields") {
    SplitMix64 rng(402);
    for (int trial = 0; trial < 5; ++trial) {
        const int v = 4 + static_cast<int>(rng.next_u64() % 20);
        std::vector<Vec3> verts;
        for (int i = 0; i < v; ++i) {
            verts.push_back({rng.next_in(-1, 1), rng.next_in(-1, 1), rng.next_in(-1, 1)});
        }
        TriMesh m(verts, {{0, 1, 2}});
        m = m.with_field(scalar_field("a", testutil::random_vector(v, rng.next_u64())))
                .with_field(vector_field("b", testutil::random_vector(3 * v, rng.next_u64())));
        StateVector s = flatten_fields(m, {"a", "b"});
        TriMesh back = unflatten_fields(m, s);
        CHECK(back.field("a").values == m.field("a").values);
        CHECK(back.field("b").values == m.field("b").values);
        StateVector again = flatten_fields(back, {"a", "b"});
        CHECK(again.data == s.data);
    }
}

TEST_CASE("field CSV round trips scalars and vectors") {
    ScratchDir dir("mesh_csv");
    TriMesh m({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    Vector p = testutil::random_vector(3, 403);
    Vector tau = testutil::random_vector(9, 404);
    m = m.with_field(scalar_field("p", p)).with_field(vector_field("tau", tau));

    auto single = dir / "p.csv";
    save_field_csv(m, "p", single);
    Field fp = load_field_csv(single, 3);
    CHECK(fp.kind == FieldKind::Scalar);
    CHECK(fp.values == p);

    auto combined = dir / "both.csv";
    save_fields_csv(m, {"p", "tau"}, combined);
    auto fields = load_fields_csv(combined, 3);
    REQUIRE(fields.size() == 2);
    CHECK(fields[0].values == p);
    CHECK(fields[1].kind == FieldKind::Vector3);
    CHECK(fields[1].values == tau);
}

TEST_CASE("field CSV rejects malformed rows") {
    ScratchDir dir("mesh_csv_bad");
    auto path = dir / "bad.csv";
    write_text_file(path, "vertex_id,p\n0,1.0\n2,2.0\n");
    CHECK_THROWS_AS(load_fields_csv(path, 2), ParseError);
    write_text_file(path, "vertex_id,p\n0,1.0\n1,abc\n");
    CHECK_THROWS_AS(load_fields_csv(path, 2), ParseError);
    write_text_file(path, "id,p\n0,1.0\n");
    CHECK_THROWS_AS(load_fields_csv(path, 1), ParseError);
}

TEST_CASE("field validation rejects bad lengths and non-finite values") {
    TriMesh m({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
    Vector wrong(4);
    wrong.setZero();
    CHECK_THROWS_AS(m.with_field(scalar_field("p", wrong)), Error);
    Vector bad(3);
    bad << 1.0, std::nan(""), 0.0;
    CHECK_THROWS_AS(m.with_field(scalar_field("p", bad)), Error);
}
