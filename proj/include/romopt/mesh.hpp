#pragma once

#include "romopt/types.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace romopt {

enum class FieldKind { Scalar, Vector3 };

/// Per-vertex quantity attached to a mesh. Scalar fields hold V values;
/// vector fields hold 3V values interleaved as x0,y0,z0,x1,...
struct Field {
    std::string name;
    FieldKind kind = FieldKind::Scalar;
    Vector values;

    int component_count() const { return kind == FieldKind::Scalar ? 1 : 3; }
};

struct LayoutEntry {
    std::string name;
    FieldKind kind = FieldKind::Scalar;
};

/// Flattened view of one or more fields, ordered by layout. Round-tripping
/// through flatten/unflatten is exact.
struct StateVector {
    Vector data;
    std::vector<LayoutEntry> layout;
};

/// Immutable triangulated surface. Every face references three distinct
/// vertex indices in range; mutation helpers return new meshes.
class TriMesh {
public:
    TriMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int face_count() const { return static_cast<int>(faces_.size()); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const std::map<std::string, Field>& fields() const { return fields_; }

    bool has_field(const std::string& name) const;
    const Field& field(const std::string& name) const;

    /// Copy with one field added or overwritten. Validates length and
    /// finiteness against this mesh's vertex count.
    TriMesh with_field(Field f) const;

    /// Copy with the same topology and fields but new vertex positions.
    TriMesh with_vertices(std::vector<Vec3> vertices) const;

    /// Copy with the field map replaced wholesale.
    TriMesh with_fields(std::map<std::string, Field> fields) const;

private:
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> faces_;
    std::map<std::string, Field> fields_;
};

enum class StlFormat { Ascii, Binary };

/// Reads an ASCII or binary STL file (auto-detected) into a mesh with
/// exactly deduplicated vertices. weld_tolerance > 0 snaps coordinates to
/// a grid of that pitch before deduplication and drops faces that collapse;
/// with the default exact matching a degenerate facet is a parse error.
TriMesh load_stl(const std::filesystem::path& path, double weld_tolerance = 0.0);

/// Writes vertices/faces (fields are not part of STL). ASCII output uses
/// shortest round-trip decimals; binary uses the standard float32 layout.
void save_stl(const TriMesh& mesh, const std::filesystem::path& path, StlFormat format);

/// Concatenates the named fields, in order, into one state vector.
StateVector flatten_fields(const TriMesh& mesh, const std::vector<std::string>& names);

/// Rebuilds fields from a state vector, replacing the mesh's field map with
/// exactly the layout's fields.
TriMesh unflatten_fields(const TriMesh& mesh, const StateVector& state);

/// CSV exchange format: header `vertex_id,<name>` for scalars or
/// `vertex_id,<name>_x,<name>_y,<name>_z` for vectors, one row per vertex
/// with vertex_id ascending from 0. The multi-field variants concatenate
/// the per-field column groups after the shared vertex_id column.
void save_fields_csv(const TriMesh& mesh, const std::vector<std::string>& names,
                     const std::filesystem::path& path);
std::vector<Field> load_fields_csv(const std::filesystem::path& path, int expected_vertex_count);

void save_field_csv(const TriMesh& mesh, const std::string& name,
                    const std::filesystem::path& path);
Field load_field_csv(const std::filesystem::path& path, int expected_vertex_count);

}  // namespace romopt
