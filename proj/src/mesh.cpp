#include "romopt/mesh.hpp"

#include "romopt/io_util.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace romopt {

namespace {

void validate_field(const Field& f, int vertex_count) {
    const long expected = static_cast<long>(f.component_count()) * vertex_count;
    if (f.values.size() != expected) {
        throw Error("field '" + f.name + "' has " + std::to_string(f.values.size()) +
                    " values, expected " + std::to_string(expected));
    }
    if (!f.values.allFinite()) {
        throw Error("field '" + f.name + "' has non-finite values");
    }
    if (f.name.empty()) {
        throw Error("field name must not be empty");
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
    const int v = vertex_count();
    for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
        const auto& f = faces_[fi];
        for (int k = 0; k < 3; ++k) {
            if (f[k] < 0 || f[k] >= v) {
                throw Error("face " + std::to_string(fi) + " references vertex " +
                            std::to_string(f[k]) + " outside [0, " + std::to_string(v) + ")");
            }
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
            throw Error("face " + std::to_string(fi) + " is degenerate");
        }
    }
}

bool TriMesh::has_field(const std::string& name) const {
    return fields_.count(name) > 0;
}

const Field& TriMesh::field(const std::string& name) const {
    auto it = fields_.find(name);
    if (it == fields_.end()) {
        throw Error("mesh has no field named '" + name + "'");
    }
    return it->second;
}

TriMesh TriMesh::with_field(Field f) const {
    validate_field(f, vertex_count());
    TriMesh out = *this;
    out.fields_[f.name] = std::move(f);
    return out;
}

TriMesh TriMesh::with_vertices(std::vector<Vec3> vertices) const {
    if (vertices.size() != vertices_.size()) {
        throw Error("replacement vertex list has " + std::to_string(vertices.size()) +
                    " entries, mesh has " + std::to_string(vertices_.size()));
    }
    TriMesh out = *this;
    out.vertices_ = std::move(vertices);
    return out;
}

TriMesh TriMesh::with_fields(std::map<std::string, Field> fields) const {
    TriMesh out = *this;
    out.fields_.clear();
    for (auto& [name, f] : fields) {
        if (name != f.name) {
            throw Error("field map key '" + name + "' does not match field name '" + f.name + "'");
        }
        validate_field(f, vertex_count());
        out.fields_[name] = std::move(f);
    }
    return out;
}

StateVector flatten_fields(const TriMesh& mesh, const std::vector<std::string>& names) {
    StateVector out;
    long total = 0;
    for (const auto& name : names) {
        const Field& f = mesh.field(name);
        total += f.values.size();
        out.layout.push_back({f.name, f.kind});
    }
    out.data.resize(total);
    long offset = 0;
    for (const auto& name : names) {
        const Field& f = mesh.field(name);
        out.data.segment(offset, f.values.size()) = f.values;
        offset += f.values.size();
    }
    return out;
}

TriMesh unflatten_fields(const TriMesh& mesh, const StateVector& state) {
    const int v = mesh.vertex_count();
    long total = 0;
    for (const auto& entry : state.layout) {
        total += static_cast<long>(entry.kind == FieldKind::Scalar ? 1 : 3) * v;
    }
    if (state.data.size() != total) {
        throw Error("state vector has " + std::to_string(state.data.size()) +
                    " entries, layout requires " + std::to_string(total));
    }
    std::map<std::string, Field> fields;
    long offset = 0;
    for (const auto& entry : state.layout) {
        Field f;
        f.name = entry.name;
        f.kind = entry.kind;
        const long len = static_cast<long>(entry.kind == FieldKind::Scalar ? 1 : 3) * v;
        f.values = state.data.segment(offset, len);
        offset += len;
        fields[f.name] = std::move(f);
    }
    return mesh.with_fields(std::move(fields));
}

void save_fields_csv(const TriMesh& mesh, const std::vector<std::string>& names,
                     const std::filesystem::path& path) {
    if (names.empty()) {
        throw Error("no fields selected for CSV export");
    }
    std::ostringstream out;
    out << "vertex_id";
    for (const auto& name : names) {
        const Field& f = mesh.field(name);
        if (f.kind == FieldKind::Scalar) {
            out << ',' << name;
        } else {
            out << ',' << name << "_x," << name << "_y," << name << "_z";
        }
    }
    out << '\n';
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        out << v;
        for (const auto& name : names) {
            const Field& f = mesh.field(name);
            if (f.kind == FieldKind::Scalar) {
                out << ',' << format_double(f.values[v]);
            } else {
                for (int c = 0; c < 3; ++c) {
                    out << ',' << format_double(f.values[3 * v + c]);
                }
            }
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

std::vector<Field> load_fields_csv(const std::filesystem::path& path, int expected_vertex_count) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(path.string() + ": empty field CSV");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    auto header = split_csv_line(line);
    if (header.empty() || header[0] != "vertex_id") {
        throw ParseError(path.string() + ":1: header must start with 'vertex_id'");
    }
    // Column groups: a bare name is a scalar; name_x,name_y,name_z in
    // sequence is one vector field.
    std::vector<Field> fields;
    std::size_t col = 1;
    while (col < header.size()) {
        const std::string& h = header[col];
        if (h.size() > 2 && h.substr(h.size() - 2) == "_x" && col + 2 < header.size()) {
            std::string base = h.substr(0, h.size() - 2);
            if (header[col + 1] == base + "_y" && header[col + 2] == base + "_z") {
                Field f;
                f.name = base;
                f.kind = FieldKind::Vector3;
                f.values.resize(3L * expected_vertex_count);
                fields.push_back(std::move(f));
                col += 3;
                continue;
            }
        }
        if (h.empty()) {
            throw ParseError(path.string() + ":1: empty column name");
        }
        Field f;
        f.name = h;
        f.kind = FieldKind::Scalar;
        f.values.resize(expected_vertex_count);
        fields.push_back(std::move(f));
        ++col;
    }
    if (fields.empty()) {
        throw ParseError(path.string() + ":1: no field columns");
    }
    std::size_t expected_cols = 1;
    for (const auto& f : fields) {
        expected_cols += static_cast<std::size_t>(f.component_count());
    }
    int row = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != expected_cols) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(expected_cols) + " columns, got " +
                             std::to_string(cells.size()));
        }
        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        long id = parse_long(cells[0], ctx);
        if (id != row) {
            throw ParseError(ctx + ": vertex_id " + std::to_string(id) + " out of order, expected " +
                             std::to_string(row));
        }
        if (row >= expected_vertex_count) {
            throw ParseError(ctx + ": more rows than the expected " +
                             std::to_string(expected_vertex_count) + " vertices");
        }
        std::size_t cell = 1;
        for (auto& f : fields) {
            for (int c = 0; c < f.component_count(); ++c) {
                double value = parse_double(cells[cell++], ctx);
                if (!std::isfinite(value)) {
                    throw ParseError(ctx + ": non-finite value in field '" + f.name +
                                     "' at vertex " + std::to_string(row));
                }
                f.values[static_cast<long>(f.component_count()) * row + c] = value;
            }
        }
        ++row;
    }
    if (row != expected_vertex_count) {
        throw ParseError(path.string() + ": has " + std::to_string(row) + " rows, expected " +
                         std::to_string(expected_vertex_count));
    }
    return fields;
}

void save_field_csv(const TriMesh& mesh, const std::string& name,
                    const std::filesystem::path& path) {
    save_fields_csv(mesh, {name}, path);
}

Field load_field_csv(const std::filesystem::path& path, int expected_vertex_count) {
    auto fields = load_fields_csv(path, expected_vertex_count);
    if (fields.size() != 1) {
        throw ParseError(path.string() + ": expected exactly one field, found " +
                         std::to_string(fields.size()));
    }
    return std::move(fields[0]);
}

}  // namespace romopt
