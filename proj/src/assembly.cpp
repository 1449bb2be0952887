#include "cutfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cutfem {

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

void validate(const DiscreteSpace &space, const AssemblyConfig &cfg) {
    if (cfg.degree != space.degree)
        throw std::invalid_argument("assembly: config degree does not match the space");
    if (cfg.taylor_order < 0 || cfg.taylor_order > space.degree)
        throw std::invalid_argument("assembly: Taylor order must satisfy 0 <= k <= p");
    if (cfg.gamma_ghost < 0.0)
        throw std::invalid_argument("assembly: ghost parameter must be nonnegative");
}

} // namespace

double taylor_series_value(std::span<const double> derivatives, int start_order, double rho) {
    double sum = 0.0;
    for (size_t i = 0; i < derivatives.size(); ++i) {
        const int order = start_order + static_cast<int>(i);
        sum += derivatives[i] * std::pow(rho, order) / factorial(order);
    }
    return sum;
}

NitscheOperator assemble_nitsche_operator(const BackgroundMesh &mesh, const CutTopology &topo,
                                          const DiscreteSpace &space, const LevelSetCase &ls, const ScalarField &f,
                                          const ScalarField &g, const AssemblyConfig &cfg) {
    validate(space, cfg);
    const int p = space.degree;
    const int k = cfg.taylor_order;
    const QuadratureRule vol_rule = triangle_quadrature(cfg.volume_exactness >= 0 ? cfg.volume_exactness : 2 * p);
    const SegmentQuadrature bnd_rule =
        segment_quadrature(cfg.boundary_exactness >= 0 ? cfg.boundary_exactness : 2 * p + 2);

    const ReferenceElement &ref = space.reference;
    const int nloc = ref.node_count();

    // Reference tables for the volume rule, reused on all full elements.
    std::vector<Eigen::VectorXd> ref_values(vol_rule.points.size());
    std::vector<Eigen::MatrixXd> ref_grads(vol_rule.points.size());
    for (size_t q = 0; q < vol_rule.points.size(); ++q) {
        ref_values[q] = ref.values(vol_rule.points[q]);
        ref_grads[q] = ref.gradients(vol_rule.points[q]);
    }

    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.dof_count);

    Eigen::MatrixXd local(nloc, nloc);
    Eigen::VectorXd local_rhs(nloc);

    for (int t : space.active_elements) {
        const ElementMap map(mesh, t);
        const auto &dofs = space.element_dofs[t];
        local.setZero();
        local_rhs.setZero();

        const int sid = topo.element_segment[t];
        if (sid < 0) {
            for (size_t q = 0; q < vol_rule.points.size(); ++q) {
                const double w = vol_rule.weights[q] * std::abs(map.det);
                const Vec2 x = map.to_physical(vol_rule.points[q]);
                const Eigen::MatrixXd gphys = ref_grads[q] * map.jac_inv; // row i = physical gradient
                local.noalias() += w * gphys * gphys.transpose();
                local_rhs.noalias() += (w * f(x)) * ref_values[q];
            }
        } else {
            for (const auto &part : topo.cut_parts[sid]) {
                const ElementMap sub(part[0], part[1], part[2]);
                for (size_t q = 0; q < vol_rule.points.size(); ++q) {
                    const double w = vol_rule.weights[q] * std::abs(sub.det);
                    const Vec2 x = sub.to_physical(vol_rule.points[q]);
                    const Vec2 xi = map.to_reference(x);
                    const Eigen::VectorXd vals = ref.values(xi);
                    const Eigen::MatrixXd gphys = ref.gradients(xi) * map.jac_inv;
                    local.noalias() += w * gphys * gphys.transpose();
                    local_rhs.noalias() += (w * f(x)) * vals;
                }
            }

            // Penalty-free Nitsche terms on the interface segment.
            const InterfaceSegment &seg = topo.segments[sid];
            const Vec2 nh = seg.normal;
            const Vec2 ref_dir = map.pull_direction(nh);
            for (size_t q = 0; q < bnd_rule.points.size(); ++q) {
                const double w = bnd_rule.weights[q] * seg.length;
                const Vec2 x = seg.a + bnd_rule.points[q] * (seg.b - seg.a);
                const Vec2 xi = map.to_reference(x);
                const Eigen::VectorXd vals = ref.values(xi);
                const Eigen::VectorXd gn = ref.gradients(xi) * (map.jac_inv * nh);

                // One root solve per quadrature point, shared by the Taylor
                // block and the projected boundary data.
                const double rho = find_zero_along(ls, x, nh, cfg.root);
                Eigen::VectorXd taylor = Eigen::VectorXd::Zero(nloc);
                if (k >= 1) {
                    std::vector<Eigen::VectorXd> dirs(k);
                    for (int l = 1; l <= k; ++l)
                        dirs[l - 1] = ref.directional(xi, ref_dir, l);
                    std::vector<double> derivs(k);
                    for (int j = 0; j < nloc; ++j) {
                        for (int l = 1; l <= k; ++l)
                            derivs[l - 1] = dirs[l - 1][j];
                        taylor[j] = taylor_series_value(derivs, 1, rho);
                    }
                }
                const double gval = g(x + rho * nh);

                for (int i = 0; i < nloc; ++i) {
                    for (int j = 0; j < nloc; ++j)
                        local(i, j) += w * (-gn[j] * vals[i] + gn[i] * vals[j] + gn[i] * taylor[j]);
                    local_rhs[i] += w * gn[i] * gval;
                }
            }
        }

        for (int i = 0; i < nloc; ++i) {
            rhs[dofs[i]] += local_rhs[i];
            for (int j = 0; j < nloc; ++j)
                triplets.emplace_back(dofs[i], dofs[j], local(i, j));
        }
    }

    // Dirichlet terms on truncated box-boundary parts of Omega_h; these lie
    // on the exact boundary, so the projection distance is zero.
    for (const InterfaceSegment &seg : topo.truncation_segments) {
        const ElementMap map(mesh, seg.element);
        const auto &dofs = space.element_dofs[seg.element];
        const Vec2 nh = seg.normal;
        for (size_t q = 0; q < bnd_rule.points.size(); ++q) {
            const double w = bnd_rule.weights[q] * seg.length;
            const Vec2 x = seg.a + bnd_rule.points[q] * (seg.b - seg.a);
            const Vec2 xi = map.to_reference(x);
            const Eigen::VectorXd vals = ref.values(xi);
            const Eigen::VectorXd gn = ref.gradients(xi) * (map.jac_inv * nh);
            const double gval = g(x);
            for (int i = 0; i < nloc; ++i) {
                for (int j = 0; j < nloc; ++j)
                    triplets.emplace_back(dofs[i], dofs[j], w * (-gn[j] * vals[i] + gn[i] * vals[j]));
                rhs[dofs[i]] += w * gn[i] * gval;
            }
        }
    }

    NitscheOperator op;
    op.matrix.resize(space.dof_count, space.dof_count);
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.rhs = std::move(rhs);
    return op;
}

SparseMatrix assemble_ghost_penalty(const BackgroundMesh &mesh, const CutTopology &topo, const DiscreteSpace &space,
                                    const AssemblyConfig &cfg) {
    validate(space, cfg);
    const int p = space.degree;
    const ReferenceElement &ref = space.reference;
    const SegmentQuadrature rule = segment_quadrature(2 * p);
    const double h = mesh.h;

    std::vector<Eigen::Triplet<double>> triplets;

    for (int fid : topo.ghost_faces) {
        const Face &face = mesh.faces[fid];
        const int lo = face.tri0;
        const int hi = face.tri1;
        const Vec2 nf = mesh.face_normal(fid);
        const Vec2 va = mesh.vertices[face.v0];
        const Vec2 vb = mesh.vertices[face.v1];
        const double len = (vb - va).norm();

        const ElementMap map_lo(mesh, lo);
        const ElementMap map_hi(mesh, hi);
        const Vec2 dir_lo = map_lo.pull_direction(nf);
        const Vec2 dir_hi = map_hi.pull_direction(nf);

        // Union of the two elements' dofs; shared dofs jump too for l >= 1.
        std::vector<int> union_dofs = space.element_dofs[lo];
        union_dofs.insert(union_dofs.end(), space.element_dofs[hi].begin(), space.element_dofs[hi].end());
        std::sort(union_dofs.begin(), union_dofs.end());
        union_dofs.erase(std::unique(union_dofs.begin(), union_dofs.end()), union_dofs.end());
        const int nu = static_cast<int>(union_dofs.size());

        auto local_index = [&](int element, int gdof) {
            const auto &dofs = space.element_dofs[element];
            for (size_t i = 0; i < dofs.size(); ++i)
                if (dofs[i] == gdof)
                    return static_cast<int>(i);
            return -1;
        };
        std::vector<int> in_lo(nu), in_hi(nu);
        for (int a = 0; a < nu; ++a) {
            in_lo[a] = local_index(lo, union_dofs[a]);
            in_hi[a] = local_index(hi, union_dofs[a]);
        }

        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nu, nu);
        Eigen::VectorXd jump(nu);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const double w = rule.weights[q] * len;
            const Vec2 x = va + rule.points[q] * (vb - va);
            const Vec2 xi_lo = map_lo.to_reference(x);
            const Vec2 xi_hi = map_hi.to_reference(x);
            for (int l = 1; l <= p; ++l) {
                const Eigen::VectorXd d_lo = ref.directional(xi_lo, dir_lo, l);
                const Eigen::VectorXd d_hi = ref.directional(xi_hi, dir_hi, l);
                for (int a = 0; a < nu; ++a) {
                    const double from_lo = in_lo[a] >= 0 ? d_lo[in_lo[a]] : 0.0;
                    const double from_hi = in_hi[a] >= 0 ? d_hi[in_hi[a]] : 0.0;
                    jump[a] = from_lo - from_hi;
                }
                const double scale = cfg.gamma_ghost * std::pow(h, 2 * l - 1) * w;
                for (int a = 0; a < nu; ++a) {
                    acc(a, a) += scale * (jump[a] * jump[a]);
                    for (int b = a + 1; b < nu; ++b) {
                        const double value = scale * (jump[a] * jump[b]);
                        acc(a, b) += value;
                        acc(b, a) += value;
                    }
                }
            }
        }
        for (int a = 0; a < nu; ++a)
            for (int b = 0; b < nu; ++b)
                triplets.emplace_back(union_dofs[a], union_dofs[b], acc(a, b));
    }

    SparseMatrix ghost(space.dof_count, space.dof_count);
    ghost.setFromTriplets(triplets.begin(), triplets.end());
    return ghost;
}

AssembledSystem assemble_system(const BackgroundMesh &mesh, const CutTopology &topo, const DiscreteSpace &space,
                                const LevelSetCase &ls, const ScalarField &f, const ScalarField &g,
                                const AssemblyConfig &cfg) {
    NitscheOperator op = assemble_nitsche_operator(mesh, topo, space, ls, f, g, cfg);
    AssembledSystem system;
    system.dof_count = space.dof_count;
    if (cfg.gamma_ghost > 0.0 && !topo.ghost_faces.empty())
        system.matrix = op.matrix + assemble_ghost_penalty(mesh, topo, space, cfg);
    else
        system.matrix = std::move(op.matrix);
    system.rhs = std::move(op.rhs);
    return system;
}

} // namespace cutfem
