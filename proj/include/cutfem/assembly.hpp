#pragma once

#include <functional>
#include <span>

#include <Eigen/Sparse>

#include "cutfem/cut_topology.hpp"
#include "cutfem/fe_space.hpp"
#include "cutfem/level_set.hpp"

namespace cutfem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ScalarField = std::function<double(const Vec2 &)>;

struct AssemblyConfig {
    int degree = 2;            // p
    int taylor_order = 1;      // k, 0 <= k <= p
    double gamma_ghost = 0.1;
    int volume_exactness = -1;   // < 0 picks 2p
    int boundary_exactness = -1; // < 0 picks 2p+2
    RayRootConfig root;
};

struct AssembledSystem {
    SparseMatrix matrix; // row-compressed; Nitsche operator plus ghost penalty
    Eigen::VectorXd rhs;
    int dof_count = 0;
};

// Truncated normal Taylor sum: derivatives[i] holds the derivative of order
// start_order + i; returns sum_i derivatives[i] * rho^(start_order+i) / (start_order+i)!.
double taylor_series_value(std::span<const double> derivatives, int start_order, double rho);

struct NitscheOperator {
    SparseMatrix matrix; // volume + boundary terms, no ghost penalty
    Eigen::VectorXd rhs;
};

// Volume term over Omega_h (full elements and cut parts), the skew boundary
// terms on Gamma_h with the trial-side Taylor correction, and the load with
// boundary data composed with the discrete projection onto Gamma.
NitscheOperator assemble_nitsche_operator(const BackgroundMesh &mesh, const CutTopology &topo,
                                          const DiscreteSpace &space, const LevelSetCase &ls, const ScalarField &f,
                                          const ScalarField &g, const AssemblyConfig &cfg);

// Face jump penalty over the ghost faces, orders 1..p scaled by h^(2l-1);
// symmetric positive semidefinite.
SparseMatrix assemble_ghost_penalty(const BackgroundMesh &mesh, const CutTopology &topo, const DiscreteSpace &space,
                                    const AssemblyConfig &cfg);

// Complete system matrix and load.
AssembledSystem assemble_system(const BackgroundMesh &mesh, const CutTopology &topo, const DiscreteSpace &space,
                                const LevelSetCase &ls, const ScalarField &f, const ScalarField &g,
                                const AssemblyConfig &cfg);

} // namespace cutfem
