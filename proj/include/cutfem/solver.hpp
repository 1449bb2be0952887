#pragma once

#include <Eigen/Dense>

#include "cutfem/assembly.hpp"

namespace cutfem {

struct SolveReport {
    Eigen::VectorXd solution;
    double relative_residual = 0.0; // from an independent post-solve product
    long factor_nonzeros = 0;
    int refinement_steps = 0;
};

// Sparse LU with partial pivoting plus iterative refinement. Throws on
// structural or numerical singularity, forwarding the factorization's
// diagnostic (pivot column).
SolveReport solve_linear_system(const AssembledSystem &system);

} // namespace cutfem
