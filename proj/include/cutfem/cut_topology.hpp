#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cutfem/level_set.hpp"
#include "cutfem/mesh.hpp"

namespace cutfem {

enum class ElementClass : char { Inside, Outside, Cut };

struct Classification {
    std::vector<ElementClass> element_class;
    std::vector<double> nodal_values; // snapped vertex values of I_h phi
};

// Straight interface segment inside one cut element, endpoints on the two
// sign-change edges, normal constant and pointing toward phi > 0.
struct InterfaceSegment {
    int element = -1;
    Vec2 a, b;
    int face_a = -1;
    int face_b = -1;
    Vec2 normal = Vec2::Zero();
    double length = 0.0;
};

// Group of consecutive cut elements used for the boundary inf-sup diagnostic.
struct Patch {
    std::vector<int> core;              // cut elements in chain order
    std::vector<int> extended;          // core plus active vertex-neighbours, sorted
    std::vector<int> segment_ids;       // Gamma_j
    std::vector<int> interior_vertices; // I_j, sorted
    double gamma_length = 0.0;
};

struct CutTopology {
    std::vector<ElementClass> element_class;
    std::vector<double> nodal_values;
    std::vector<char> element_active;
    std::vector<int> active_elements;
    std::vector<int> cut_elements;           // ascending, after degeneracy reclassification
    std::vector<InterfaceSegment> segments;  // one per cut element
    std::vector<int> element_segment;        // triangle -> segment index, -1 if uncut
    std::vector<std::vector<std::array<Vec2, 3>>> cut_parts; // per segment: K cap {I_h phi <= 0}
    std::vector<int> ghost_faces;            // ascending face ids
    std::vector<Patch> patches;
    bool open_interface = false; // Gamma_h leaves the box; patches unavailable

    // Active-element faces on the box boundary, clipped to Omega_h. Empty for
    // closed interfaces with enough margin; an open interface leaves the
    // domain truncated there and these segments carry the Dirichlet data
    // (the projection distance vanishes on them).
    std::vector<InterfaceSegment> truncation_segments;
};

struct GeometryDiagnostics {
    double area_omega_h = 0.0;
    double length_gamma_h = 0.0;
    double delta_h = 0.0;
};

// Vertex values with |v| < 1e-12*h snapped to -1e-12*h (inside), then
// classified by sign pattern.
Classification classify_elements(const BackgroundMesh &mesh, const LevelSetCase &ls);

// Segment of the linear interpolant's zero line in a cut element; nullopt
// when shorter than 1e-14*h (grazing cut).
std::optional<InterfaceSegment> reconstruct_interface_segment(const BackgroundMesh &mesh, int element,
                                                              const std::vector<double> &nodal_values);

// One or two positively oriented triangles covering K cap {I_h phi <= 0};
// quadrilaterals are split along the shorter diagonal.
std::vector<std::array<Vec2, 3>> subtriangulate_cut_element(const BackgroundMesh &mesh, int element,
                                                            const std::vector<double> &nodal_values);

// Interior faces with both incident elements active and at least one cut.
std::vector<int> collect_ghost_faces(const BackgroundMesh &mesh, const std::vector<ElementClass> &element_class);

// Partition of the cut-element chains into patches of target_core_size
// consecutive elements (remainder merged into the last patch of a chain).
// Throws when a chain is open (interface leaves the box).
std::vector<Patch> build_patches(const BackgroundMesh &mesh, const CutTopology &topo, int target_core_size);

// Mean slope of the patch bump function along the inward interface normal;
// bounded away from zero on resolved geometries.
double patch_xi(const Patch &patch, const CutTopology &topo, const BackgroundMesh &mesh);

// Smallest patch_xi over all patches; NaN when patches are unavailable.
double min_patch_xi(const CutTopology &topo, const BackgroundMesh &mesh);

GeometryDiagnostics geometry_diagnostics(const BackgroundMesh &mesh, const CutTopology &topo, const LevelSetCase &ls,
                                         const RayRootConfig &cfg);

// Full pipeline: classify, reconstruct (reclassifying grazing cuts),
// sub-triangulate, collect ghost faces, build patches. Open interfaces leave
// the patch list empty and set open_interface.
CutTopology build_cut_topology(const BackgroundMesh &mesh, const LevelSetCase &ls, int patch_core_size = 4);

} // namespace cutfem
