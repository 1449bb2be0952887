#include "cutfem/solver.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseLU>

namespace cutfem {

SolveReport solve_linear_system(const AssembledSystem &system) {
    if (system.dof_count < 1 || system.matrix.rows() != system.matrix.cols() ||
        system.matrix.rows() != system.dof_count || system.rhs.size() != system.dof_count)
        throw std::invalid_argument("solve_linear_system: system is not square or is empty");

    const Eigen::SparseMatrix<double> matrix(system.matrix); // column-major for the factorization
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(matrix);
    lu.factorize(matrix);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error(std::string("solve_linear_system: factorization failed: ") + lu.lastErrorMessage());

    SolveReport report;
    report.solution = lu.solve(system.rhs);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("solve_linear_system: back substitution failed");
    report.factor_nonzeros = static_cast<long>(lu.nnzL() + lu.nnzU());

    const double rhs_norm = system.rhs.norm() > 0.0 ? system.rhs.norm() : 1.0;
    auto relative_residual = [&](const Eigen::VectorXd &x) {
        return (system.matrix * x - system.rhs).norm() / rhs_norm;
    };

    report.relative_residual = relative_residual(report.solution);
    for (int step = 0; step < 2 && report.relative_residual > 1e-13; ++step) {
        const Eigen::VectorXd correction = lu.solve(system.rhs - system.matrix * report.solution);
        const Eigen::VectorXd refined = report.solution + correction;
        const double refined_residual = relative_residual(refined);
        if (refined_residual >= report.relative_residual)
            break;
        report.solution = refined;
        report.relative_residual = refined_residual;
        ++report.refinement_steps;
    }
    if (!std::isfinite(report.relative_residual))
        throw std::runtime_error("solve_linear_system: non-finite residual, matrix is numerically singular");
    return report;
}

} // namespace cutfem
