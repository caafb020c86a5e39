#include "romopt/mesh.hpp"

#include "romopt/io_util.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <sstream>
#include <string_view>

namespace romopt {

namespace {

float read_f32_le(const std::uint8_t* p) {
    std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                      (static_cast<std::uint32_t>(p[2]) << 16) |
                      (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(u);
}

void append_f32_le(std::string& out, float value) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(value);
    out.push_back(static_cast<char>(u & 0xff));
    out.push_back(static_cast<char>((u >> 8) & 0xff));
    out.push_back(static_cast<char>((u >> 16) & 0xff));
    out.push_back(static_cast<char>((u >> 24) & 0xff));
}

void append_u32_le(std::string& out, std::uint32_t u) {
    out.push_back(static_cast<char>(u & 0xff));
    out.push_back(static_cast<char>((u >> 8) & 0xff));
    out.push_back(static_cast<char>((u >> 16) & 0xff));
    out.push_back(static_cast<char>((u >> 24) & 0xff));
}

std::uint32_t read_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

using RawTriangle = std::array<Vec3, 3>;

/// Deduplicates vertices in first-seen order. Exact matching compares the
/// raw coordinate bits; welding snaps to a grid of pitch weld_tolerance but
/// keeps the first-seen coordinates as the stored vertex.
TriMesh assemble_mesh(const std::vector<RawTriangle>& triangles, double weld_tolerance,
                      const std::string& origin) {
    if (triangles.empty()) {
        throw ParseError(origin + ": empty solid (no facets)");
    }
    std::map<std::array<std::uint64_t, 3>, int> seen;
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        std::array<int, 3> face{};
        for (int k = 0; k < 3; ++k) {
            const Vec3& p = triangles[t][k];
            std::array<std::uint64_t, 3> key{};
            if (weld_tolerance > 0.0) {
                for (int c = 0; c < 3; ++c) {
                    key[c] = static_cast<std::uint64_t>(
                        static_cast<std::int64_t>(std::llround(p[c] / weld_tolerance)));
                }
            } else {
                static_assert(sizeof(double) == sizeof(std::uint64_t));
                for (int c = 0; c < 3; ++c) {
                    std::memcpy(&key[c], &p[c], sizeof(double));
                }
            }
            auto [it, inserted] = seen.try_emplace(key, static_cast<int>(vertices.size()));
            if (inserted) {
                vertices.push_back(p);
            }
            face[k] = it->second;
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
            if (weld_tolerance > 0.0) {
                continue;  // collapsed by welding
            }
            throw ParseError(origin + ": facet " + std::to_string(t) +
                             " is degenerate (repeated vertex)");
        }
        faces.push_back(face);
    }
    if (faces.empty()) {
        throw ParseError(origin + ": all facets collapsed during welding");
    }
    return TriMesh(std::move(vertices), std::move(faces));
}

std::vector<RawTriangle> parse_binary(const std::vector<std::uint8_t>& bytes,
                                      const std::string& origin) {
    const std::uint32_t count = read_u32_le(bytes.data() + 80);
    if (count == 0) {
        throw ParseError(origin + ": empty solid (facet count 0 at byte 80)");
    }
    std::vector<RawTriangle> triangles;
    triangles.reserve(count);
    for (std::uint32_t t = 0; t < count; ++t) {
        const std::uint8_t* rec = bytes.data() + 84 + 50ull * t;
        RawTriangle tri;
        for (int k = 0; k < 3; ++k) {
            for (int c = 0; c < 3; ++c) {
                // Skip the 12-byte normal; vertices start at offset 12.
                tri[k][c] = static_cast<double>(read_f32_le(rec + 12 + 12 * k + 4 * c));
            }
        }
        triangles.push_back(tri);
    }
    return triangles;
}

struct AsciiCursor {
    std::istringstream in;
    std::string origin;
    int line_no = 0;
    std::vector<std::string> tokens;

    explicit AsciiCursor(const std::string& text, std::string origin_)
        : in(text), origin(std::move(origin_)) {}

    /// Advances to the next non-blank line and splits it on whitespace.
    bool next_line() {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            tokens.clear();
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) {
                tokens.push_back(tok);
            }
            if (!tokens.empty()) {
                return true;
            }
        }
        return false;
    }

    std::string where() const { return origin + ":" + std::to_string(line_no); }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(where() + ": " + msg); }
};

std::vector<RawTriangle> parse_ascii(const std::string& text, const std::string& origin) {
    AsciiCursor cur(text, origin);
    if (!cur.next_line() || cur.tokens[0] != "solid") {
        throw ParseError(origin + ":1: expected 'solid' header");
    }
    std::vector<RawTriangle> triangles;
    while (true) {
        if (!cur.next_line()) {
            throw ParseError(origin + ": unexpected end of file inside solid");
        }
        if (cur.tokens[0] == "endsolid") {
            break;
        }
        if (cur.tokens[0] != "facet" || cur.tokens.size() != 5 || cur.tokens[1] != "normal") {
            cur.fail("expected 'facet normal nx ny nz' or 'endsolid'");
        }
        // The facet normal is ignored; geometry defines orientation.
        if (!cur.next_line() || cur.tokens.size() != 2 || cur.tokens[0] != "outer" ||
            cur.tokens[1] != "loop") {
            cur.fail("expected 'outer loop'");
        }
        RawTriangle tri;
        for (int k = 0; k < 3; ++k) {
            if (!cur.next_line() || cur.tokens.size() != 4 || cur.tokens[0] != "vertex") {
                cur.fail("expected 'vertex x y z'");
            }
            for (int c = 0; c < 3; ++c) {
                tri[k][c] = parse_double(cur.tokens[1 + c], cur.where());
            }
        }
        if (!cur.next_line() || cur.tokens[0] != "endloop") {
            cur.fail("expected 'endloop'");
        }
        if (!cur.next_line() || cur.tokens[0] != "endfacet") {
            cur.fail("expected 'endfacet'");
        }
        triangles.push_back(tri);
    }
    if (cur.next_line()) {
        cur.fail("unexpected content after 'endsolid'");
    }
    if (triangles.empty()) {
        throw ParseError(origin + ": empty solid (no facets)");
    }
    return triangles;
}

Vec3 face_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 n = (b - a).cross(c - a);
    double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3(0.0, 0.0, 0.0);
}

}  // namespace

TriMesh load_stl(const std::filesystem::path& path, double weld_tolerance) {
    const auto bytes = read_binary_file(path);
    const std::string origin = path.string();
    // Binary detection by exact size: 80-byte header, facet count, then
    // 50 bytes per facet. ASCII files almost never hit this size exactly.
    if (bytes.size() >= 84) {
        const std::uint32_t count = read_u32_le(bytes.data() + 80);
        if (bytes.size() == 84 + 50ull * count) {
            return assemble_mesh(parse_binary(bytes, origin), weld_tolerance, origin);
        }
    }
    std::string text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text.compare(first, 5, "solid") == 0) {
        return assemble_mesh(parse_ascii(text, origin), weld_tolerance, origin);
    }
    if (bytes.size() >= 84) {
        throw ParseError(origin + ": file size " + std::to_string(bytes.size()) +
                         " does not match the facet count at byte 80, and no ASCII 'solid' header");
    }
    throw ParseError(origin + ": too short to be an STL file (" + std::to_string(bytes.size()) +
                     " bytes)");
}

void save_stl(const TriMesh& mesh, const std::filesystem::path& path, StlFormat format) {
    if (mesh.face_count() == 0) {
        throw Error("refusing to write an STL with 0 faces");
    }
    const auto& verts = mesh.vertices();
    if (format == StlFormat::Ascii) {
        std::ostringstream out;
        out << "solid surface\n";
        for (const auto& f : mesh.faces()) {
            Vec3 n = face_normal(verts[f[0]], verts[f[1]], verts[f[2]]);
            out << "  facet normal " << format_double(n[0]) << ' ' << format_double(n[1]) << ' '
                << format_double(n[2]) << '\n';
            out << "    outer loop\n";
            for (int k = 0; k < 3; ++k) {
                const Vec3& p = verts[f[k]];
                out << "      vertex " << format_double(p[0]) << ' ' << format_double(p[1]) << ' '
                    << format_double(p[2]) << '\n';
            }
            out << "    endloop\n";
            out << "  endfacet\n";
        }
        out << "endsolid surface\n";
        write_text_file(path, out.str());
        return;
    }
    std::string out;
    out.reserve(84 + 50ull * mesh.face_count());
    std::string header = "binary surface mesh";
    header.resize(80, '\0');
    out += header;
    append_u32_le(out, static_cast<std::uint32_t>(mesh.face_count()));
    for (const auto& f : mesh.faces()) {
        Vec3 n = face_normal(verts[f[0]], verts[f[1]], verts[f[2]]);
        for (int c = 0; c < 3; ++c) {
            append_f32_le(out, static_cast<float>(n[c]));
        }
        for (int k = 0; k < 3; ++k) {
            for (int c = 0; c < 3; ++c) {
                append_f32_le(out, static_cast<float>(verts[f[k]][c]));
            }
        }
        out.push_back('\0');
        out.push_back('\0');
    }
    write_binary_file(path, out.data(), out.size());
}

}  // namespace romopt
