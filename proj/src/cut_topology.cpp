#include "cutfem/cut_topology.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "cutfem/fe_space.hpp"

namespace cutfem {

namespace {

double triangle_area(const std::array<Vec2, 3> &t) {
    return 0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]));
}

// Zero of the linear function with values va at a and vb at b.
Vec2 edge_zero(const Vec2 &a, const Vec2 &b, double va, double vb) {
    const double t = va / (va - vb);
    return a + t * (b - a);
}

// Constant gradient of the linear function with the given vertex values.
Vec2 p1_gradient(const Vec2 &x0, const Vec2 &x1, const Vec2 &x2, double v0, double v1, double v2) {
    Eigen::Matrix2d jac;
    jac.col(0) = x1 - x0;
    jac.col(1) = x2 - x0;
    return jac.inverse().transpose() * Vec2(v1 - v0, v2 - v0);
}

} // namespace

Classification classify_elements(const BackgroundMesh &mesh, const LevelSetCase &ls) {
    Classification cls;
    cls.nodal_values.resize(mesh.vertex_count());
    const double snap = 1e-12 * mesh.h;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        double value = eval_phi(ls, mesh.vertices[v]);
        if (std::abs(value) < snap)
            value = -snap;
        cls.nodal_values[v] = value;
    }
    cls.element_class.resize(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        int negatives = 0;
        for (int v : mesh.triangles[t])
            if (cls.nodal_values[v] < 0.0)
                ++negatives;
        cls.element_class[t] =
            negatives == 3 ? ElementClass::Inside : (negatives == 0 ? ElementClass::Outside : ElementClass::Cut);
    }
    return cls;
}

std::optional<InterfaceSegment> reconstruct_interface_segment(const BackgroundMesh &mesh, int element,
                                                              const std::vector<double> &nodal_values) {
    const auto &tri = mesh.triangles[element];
    InterfaceSegment seg;
    seg.element = element;

    int found = 0;
    for (int e = 0; e < 3; ++e) {
        const int a = tri[e];
        const int b = tri[(e + 1) % 3];
        const double va = nodal_values[a];
        const double vb = nodal_values[b];
        if (va * vb >= 0.0)
            continue;
        const Vec2 p = edge_zero(mesh.vertices[a], mesh.vertices[b], va, vb);
        if (found == 0) {
            seg.a = p;
            seg.face_a = mesh.triangle_faces[element][e];
        } else {
            seg.b = p;
            seg.face_b = mesh.triangle_faces[element][e];
        }
        ++found;
    }
    if (found != 2)
        throw std::logic_error("reconstruct_interface_segment: element is not cut");

    seg.length = (seg.b - seg.a).norm();
    if (seg.length < 1e-14 * mesh.h)
        return std::nullopt;

    const Vec2 g = p1_gradient(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]],
                               nodal_values[tri[0]], nodal_values[tri[1]], nodal_values[tri[2]]);
    seg.normal = g.normalized();
    return seg;
}

std::vector<std::array<Vec2, 3>> subtriangulate_cut_element(const BackgroundMesh &mesh, int element,
                                                            const std::vector<double> &nodal_values) {
    const auto &tri = mesh.triangles[element];
    const Vec2 x[3] = {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
    const double v[3] = {nodal_values[tri[0]], nodal_values[tri[1]], nodal_values[tri[2]]};

    int negatives = 0;
    for (double value : v)
        if (value < 0.0)
            ++negatives;
    if (negatives == 0 || negatives == 3)
        throw std::logic_error("subtriangulate_cut_element: element is not cut");

    std::vector<std::array<Vec2, 3>> parts;
    if (negatives == 1) {
        int i = 0;
        while (v[i] >= 0.0)
            ++i;
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        const Vec2 qj = edge_zero(x[i], x[j], v[i], v[j]);
        const Vec2 qk = edge_zero(x[k], x[i], v[k], v[i]);
        parts.push_back({x[i], qj, qk});
    } else {
        int j = 0;
        while (v[j] < 0.0)
            ++j;
        const int n1 = (j + 1) % 3;
        const int n2 = (j + 2) % 3;
        const Vec2 qa = edge_zero(x[j], x[n1], v[j], v[n1]); // on edge j -> n1
        const Vec2 qb = edge_zero(x[n2], x[j], v[n2], v[j]); // on edge n2 -> j
        // CCW quadrilateral (x[n1], x[n2], qb, qa); shorter diagonal split.
        if ((x[n1] - qb).norm() <= (x[n2] - qa).norm()) {
            parts.push_back({x[n1], x[n2], qb});
            parts.push_back({x[n1], qb, qa});
        } else {
            parts.push_back({x[n1], x[n2], qa});
            parts.push_back({x[n2], qb, qa});
        }
    }
    for (const auto &part : parts)
        if (triangle_area(part) <= 0.0)
            throw std::logic_error("subtriangulate_cut_element: non-positive sub-triangle");
    return parts;
}

std::vector<int> collect_ghost_faces(const BackgroundMesh &mesh, const std::vector<ElementClass> &element_class) {
    std::vector<int> ghost;
    for (int f = 0; f < mesh.face_count(); ++f) {
        const Face &face = mesh.faces[f];
        if (face.boundary())
            continue;
        const ElementClass c0 = element_class[face.tri0];
        const ElementClass c1 = element_class[face.tri1];
        if (c0 == ElementClass::Outside || c1 == ElementClass::Outside)
            continue;
        if (c0 == ElementClass::Cut || c1 == ElementClass::Cut)
            ghost.push_back(f);
    }
    return ghost;
}

namespace {

struct Chain {
    std::vector<int> elements;    // cut elements in traversal order
    std::vector<int> link_faces;  // face between elements[i] and elements[i+1] (cyclic)
};

std::vector<Chain> trace_chains(const BackgroundMesh &mesh, const CutTopology &topo) {
    std::vector<char> visited(mesh.triangle_count(), 0);
    std::vector<Chain> chains;
    for (int start : topo.cut_elements) {
        if (visited[start])
            continue;
        Chain chain;
        chain.elements.push_back(start);
        visited[start] = 1;
        int current = start;
        int exit_face = topo.segments[topo.element_segment[start]].face_a;
        while (true) {
            const Face &face = mesh.faces[exit_face];
            if (face.boundary())
                throw std::runtime_error("build_patches: interface leaves the background box (open chain)");
            const int next = face.tri0 == current ? face.tri1 : face.tri0;
            if (next == start) {
                chain.link_faces.push_back(exit_face);
                break;
            }
            if (topo.element_segment[next] < 0)
                throw std::runtime_error("build_patches: interface chain broken at a reclassified element");
            chain.link_faces.push_back(exit_face);
            chain.elements.push_back(next);
            visited[next] = 1;
            const InterfaceSegment &seg = topo.segments[topo.element_segment[next]];
            if (seg.face_a == exit_face)
                exit_face = seg.face_b;
            else if (seg.face_b == exit_face)
                exit_face = seg.face_a;
            else
                throw std::logic_error("build_patches: chain face not shared by the next segment");
            current = next;
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

} // namespace

std::vector<Patch> build_patches(const BackgroundMesh &mesh, const CutTopology &topo, int target_core_size) {
    if (target_core_size < 1)
        throw std::invalid_argument("build_patches: core size must be positive");

    // Vertex -> active elements incidence for the neighbour closure.
    std::vector<std::vector<int>> vertex_elements(mesh.vertex_count());
    for (int t : topo.active_elements)
        for (int v : mesh.triangles[t])
            vertex_elements[v].push_back(t);

    std::vector<Patch> patches;
    for (const Chain &chain : trace_chains(mesh, topo)) {
        const int n = static_cast<int>(chain.elements.size());
        if (n < 3)
            throw std::runtime_error("build_patches: interface under-resolved (chain of fewer than 3 cut elements)");
        const int n_patches = std::max(n / target_core_size, 1);
        for (int p = 0; p < n_patches; ++p) {
            const int lo = p * target_core_size;
            const int hi = (p == n_patches - 1) ? n : (p + 1) * target_core_size;

            Patch patch;
            for (int i = lo; i < hi; ++i)
                patch.core.push_back(chain.elements[i]);

            std::vector<int> extended = patch.core;
            for (int t : patch.core)
                for (int v : mesh.triangles[t])
                    for (int nb : vertex_elements[v])
                        extended.push_back(nb);
            std::sort(extended.begin(), extended.end());
            extended.erase(std::unique(extended.begin(), extended.end()), extended.end());
            patch.extended = std::move(extended);

            for (int t : patch.core) {
                const int sid = topo.element_segment[t];
                patch.segment_ids.push_back(sid);
                patch.gamma_length += topo.segments[sid].length;
            }

            // Consecutive run of chain elements inside P_j around the core.
            auto in_patch = [&](int t) {
                return std::binary_search(patch.extended.begin(), patch.extended.end(), t);
            };
            int run_lo = lo;
            int run_hi = hi - 1;
            int steps = 0;
            while (steps < n && in_patch(chain.elements[((run_lo - 1) % n + n) % n]) && run_hi - run_lo + 1 < n) {
                --run_lo;
                ++steps;
            }
            steps = 0;
            while (steps < n && in_patch(chain.elements[(run_hi + 1) % n]) && run_hi - run_lo + 1 < n) {
                ++run_hi;
                ++steps;
            }

            // Faces through which Gamma_h exits the patch; none when the run
            // wraps the whole chain.
            std::vector<int> end_face_vertices;
            if (run_hi - run_lo + 1 < n) {
                const int f_before = chain.link_faces[((run_lo - 1) % n + n) % n];
                const int f_after = chain.link_faces[run_hi % n];
                for (int f : {f_before, f_after}) {
                    end_face_vertices.push_back(mesh.faces[f].v0);
                    end_face_vertices.push_back(mesh.faces[f].v1);
                }
                std::sort(end_face_vertices.begin(), end_face_vertices.end());
            }

            for (int i = run_lo; i <= run_hi; ++i) {
                const int t = chain.elements[((i % n) + n) % n];
                bool touches_end = false;
                for (int v : mesh.triangles[t])
                    if (std::binary_search(end_face_vertices.begin(), end_face_vertices.end(), v))
                        touches_end = true;
                if (touches_end)
                    continue;
                for (int v : mesh.triangles[t])
                    patch.interior_vertices.push_back(v);
            }
            std::sort(patch.interior_vertices.begin(), patch.interior_vertices.end());
            patch.interior_vertices.erase(std::unique(patch.interior_vertices.begin(), patch.interior_vertices.end()),
                                          patch.interior_vertices.end());

            patches.push_back(std::move(patch));
        }
    }
    return patches;
}

double patch_xi(const Patch &patch, const CutTopology &topo, const BackgroundMesh &mesh) {
    double accumulated = 0.0;
    for (int sid : patch.segment_ids) {
        const InterfaceSegment &seg = topo.segments[sid];
        const auto &tri = mesh.triangles[seg.element];
        double bump[3];
        for (int i = 0; i < 3; ++i) {
            const bool interior =
                std::binary_search(patch.interior_vertices.begin(), patch.interior_vertices.end(), tri[i]);
            bump[i] = interior ? -topo.nodal_values[tri[i]] : 0.0;
        }
        const Vec2 grad = p1_gradient(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]], bump[0],
                                      bump[1], bump[2]);
        // The bump rises toward the interior, so measure against the inward
        // normal to obtain the positive quantity.
        accumulated += -grad.dot(seg.normal) * seg.length;
    }
    return accumulated / patch.gamma_length;
}

double min_patch_xi(const CutTopology &topo, const BackgroundMesh &mesh) {
    if (topo.patches.empty())
        return std::numeric_limits<double>::quiet_NaN();
    double minimum = std::numeric_limits<double>::infinity();
    for (const Patch &patch : topo.patches)
        minimum = std::min(minimum, patch_xi(patch, topo, mesh));
    return minimum;
}

GeometryDiagnostics geometry_diagnostics(const BackgroundMesh &mesh, const CutTopology &topo, const LevelSetCase &ls,
                                         const RayRootConfig &cfg) {
    GeometryDiagnostics diag;
    for (int t : topo.active_elements)
        if (topo.element_class[t] == ElementClass::Inside)
            diag.area_omega_h += mesh.triangle_area(t);
    for (const auto &parts : topo.cut_parts)
        for (const auto &part : parts)
            diag.area_omega_h += triangle_area(part);

    const SegmentQuadrature rule = segment_quadrature(5); // 3 Gauss points
    for (const InterfaceSegment &seg : topo.segments) {
        diag.length_gamma_h += seg.length;
        for (double t : rule.points) {
            const Vec2 x = seg.a + t * (seg.b - seg.a);
            const double root = find_zero_along(ls, x, seg.normal, cfg);
            diag.delta_h = std::max(diag.delta_h, std::abs(root));
        }
    }
    return diag;
}

CutTopology build_cut_topology(const BackgroundMesh &mesh, const LevelSetCase &ls, int patch_core_size) {
    CutTopology topo;
    Classification cls = classify_elements(mesh, ls);
    topo.element_class = std::move(cls.element_class);
    topo.nodal_values = std::move(cls.nodal_values);

    topo.element_segment.assign(mesh.triangle_count(), -1);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (topo.element_class[t] != ElementClass::Cut)
            continue;
        auto seg = reconstruct_interface_segment(mesh, t, topo.nodal_values);
        if (!seg) {
            int negatives = 0;
            for (int v : mesh.triangles[t])
                if (topo.nodal_values[v] < 0.0)
                    ++negatives;
            topo.element_class[t] = negatives >= 2 ? ElementClass::Inside : ElementClass::Outside;
            std::cerr << "cut_topology: degenerate interface segment in element " << t
                      << ", reclassified by majority sign\n";
            continue;
        }
        topo.element_segment[t] = static_cast<int>(topo.segments.size());
        topo.segments.push_back(*seg);
        topo.cut_elements.push_back(t);
    }

    topo.element_active.assign(mesh.triangle_count(), 0);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (topo.element_class[t] != ElementClass::Outside) {
            topo.element_active[t] = 1;
            topo.active_elements.push_back(t);
        }
    }

    topo.cut_parts.reserve(topo.segments.size());
    for (int t : topo.cut_elements)
        topo.cut_parts.push_back(subtriangulate_cut_element(mesh, t, topo.nodal_values));

    topo.ghost_faces = collect_ghost_faces(mesh, topo.element_class);

    for (const InterfaceSegment &seg : topo.segments)
        if (mesh.faces[seg.face_a].boundary() || mesh.faces[seg.face_b].boundary())
            topo.open_interface = true;
    if (!topo.open_interface && !topo.cut_elements.empty())
        topo.patches = build_patches(mesh, topo, patch_core_size);

    // Box-boundary faces of active elements, clipped to the inside part.
    for (int f = 0; f < mesh.face_count(); ++f) {
        const Face &face = mesh.faces[f];
        if (!face.boundary() || !topo.element_active[face.tri0])
            continue;
        const double va = topo.nodal_values[face.v0];
        const double vb = topo.nodal_values[face.v1];
        if (va >= 0.0 && vb >= 0.0)
            continue;
        InterfaceSegment seg;
        seg.element = face.tri0;
        seg.face_a = f;
        seg.face_b = f;
        const Vec2 xa = mesh.vertices[face.v0];
        const Vec2 xb = mesh.vertices[face.v1];
        seg.a = va < 0.0 ? xa : edge_zero(xa, xb, va, vb);
        seg.b = vb < 0.0 ? xb : edge_zero(xa, xb, va, vb);
        seg.length = (seg.b - seg.a).norm();
        if (seg.length < 1e-14 * mesh.h)
            continue;
        seg.normal = mesh.face_normal(f);
        topo.truncation_segments.push_back(seg);
    }
    return topo;
}

} // namespace cutfem
