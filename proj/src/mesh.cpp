#include "cutfem/mesh.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace cutfem {

double BackgroundMesh::triangle_area(int t) const {
    const auto &tri = triangles[t];
    const Vec2 &a = vertices[tri[0]];
    const Vec2 &b = vertices[tri[1]];
    const Vec2 &c = vertices[tri[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
}

Vec2 BackgroundMesh::triangle_centroid(int t) const {
    const auto &tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

Vec2 BackgroundMesh::face_normal(int f) const {
    const Face &face = faces[f];
    const Vec2 d = vertices[face.v1] - vertices[face.v0];
    Vec2 n(d[1], -d[0]);
    n.normalize();
    // Orient away from tri0.
    const Vec2 mid = 0.5 * (vertices[face.v0] + vertices[face.v1]);
    if (n.dot(mid - triangle_centroid(face.tri0)) < 0.0)
        n = -n;
    return n;
}

double BackgroundMesh::face_length(int f) const {
    const Face &face = faces[f];
    return (vertices[face.v1] - vertices[face.v0]).norm();
}

BackgroundMesh build_structured_mesh(const BoundingBox &box, int n) {
    if (!box.valid())
        throw std::invalid_argument("build_structured_mesh: bounding box must satisfy xmax > xmin and ymax > ymin");
    if (n < 1)
        throw std::invalid_argument("build_structured_mesh: subdivision count must be >= 1");

    BackgroundMesh mesh;
    mesh.box = box;

    const double dx = box.width() / n;
    const double dy = box.height() / n;

    mesh.vertices.reserve(static_cast<size_t>(n + 1) * (n + 1));
    for (int iy = 0; iy <= n; ++iy)
        for (int ix = 0; ix <= n; ++ix)
            mesh.vertices.emplace_back(box.xmin + ix * dx, box.ymin + iy * dy);

    auto vid = [n](int ix, int iy) { return iy * (n + 1) + ix; };

    mesh.triangles.reserve(2 * static_cast<size_t>(n) * n);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const int v00 = vid(ix, iy);
            const int v10 = vid(ix + 1, iy);
            const int v01 = vid(ix, iy + 1);
            const int v11 = vid(ix + 1, iy + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }

    // Faces keyed by sorted vertex pair; first-touch order is deterministic.
    std::map<std::pair<int, int>, int> face_of;
    mesh.triangle_faces.resize(mesh.triangles.size());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto &tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const int a = tri[e];
            const int b = tri[(e + 1) % 3];
            const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
            auto it = face_of.find(key);
            if (it == face_of.end()) {
                Face face;
                face.v0 = key.first;
                face.v1 = key.second;
                face.tri0 = t;
                const int id = mesh.face_count();
                mesh.faces.push_back(face);
                face_of.emplace(key, id);
                mesh.triangle_faces[t][e] = id;
            } else {
                Face &face = mesh.faces[it->second];
                if (face.tri1 >= 0)
                    throw std::logic_error("build_structured_mesh: face with more than two incident triangles");
                face.tri1 = t;
                mesh.triangle_faces[t][e] = it->second;
            }
        }
    }

    mesh.element_diameter.resize(mesh.triangles.size());
    double hmax = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto &tri = mesh.triangles[t];
        double d = 0.0;
        for (int e = 0; e < 3; ++e)
            d = std::max(d, (mesh.vertices[tri[e]] - mesh.vertices[tri[(e + 1) % 3]]).norm());
        mesh.element_diameter[t] = d;
        hmax = std::max(hmax, d);
    }
    mesh.h = hmax;
    return mesh;
}

void dump_mesh(const BackgroundMesh &mesh, std::ostream &os) {
    for (const Vec2 &v : mesh.vertices)
        os << "v " << v[0] << " " << v[1] << "\n";
    for (const auto &t : mesh.triangles)
        os << "t " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

} // namespace cutfem
