#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace cutfem {

using Vec2 = Eigen::Vector2d;

struct BoundingBox {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 1.0;
    double ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool valid() const { return xmax > xmin && ymax > ymin; }
    bool contains(const Vec2 &x) const {
        return x[0] >= xmin && x[0] <= xmax && x[1] >= ymin && x[1] <= ymax;
    }
};

// Mesh edge. Interior faces have two incident triangles (tri0 < tri1),
// boundary faces have tri1 = -1.
struct Face {
    int v0 = -1;
    int v1 = -1;
    int tri0 = -1;
    int tri1 = -1;

    bool boundary() const { return tri1 < 0; }
};

// Quasi-uniform criss-cross triangulation of a bounding box. Immutable after
// construction; safe for concurrent reads.
struct BackgroundMesh {
    BoundingBox box;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;      // CCW vertex triples
    std::vector<Face> faces;
    std::vector<std::array<int, 3>> triangle_faces; // local edge i = (v_i, v_{i+1})
    std::vector<double> element_diameter;
    double h = 0.0;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }

    double triangle_area(int t) const;
    Vec2 triangle_centroid(int t) const;
    // Unit normal of a face, oriented from tri0 toward tri1 (outward for
    // boundary faces).
    Vec2 face_normal(int f) const;
    double face_length(int f) const;
};

// n x n grid of squares, each split by the diagonal from the lower-left to
// the upper-right corner. Row-major vertex and triangle numbering.
BackgroundMesh build_structured_mesh(const BoundingBox &box, int n);

// Plain-text dump, "v x y" and "t i j k" lines. Debug aid only.
void dump_mesh(const BackgroundMesh &mesh, std::ostream &os);

} // namespace cutfem
