#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cutfem/assembly.hpp"
#include "cutfem/cut_topology.hpp"
#include "cutfem/fe_space.hpp"
#include "cutfem/level_set.hpp"
#include "cutfem/mesh.hpp"

namespace cutfem {

// Analytic reference solution with matching source and Dirichlet data; the
// fields are entire functions, standing in for the extension beyond Omega.
struct ManufacturedCase {
    std::string id;
    LevelSetCase level_set;
    BoundingBox box;
    std::function<double(const Vec2 &)> u;
    std::function<Vec2(const Vec2 &)> grad_u;
    std::function<double(const Vec2 &)> f;
    std::function<double(const Vec2 &)> g;
};

// halfplane|circle|annulus|flower. The halfplane pairs with u = x^degree so
// the discrete space reproduces it exactly; the others follow the published
// reference solutions and ignore the degree.
ManufacturedCase manufactured_case(const std::string &case_id, int degree);

struct ErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double triple = 0.0;
};

// Errors of u - u_h over Omega_h with cut-aware quadrature of exactness
// 2p+2. The ghost part of the triple norm applies the assembled penalty to
// the coefficient deviation from the interpolant (discrete surrogate).
ErrorNorms compute_errors(const BackgroundMesh &mesh, const CutTopology &topo, const DiscreteSpace &space,
                          const Eigen::VectorXd &coeffs, const ManufacturedCase &mcase, const SparseMatrix &ghost);

struct RunRecord {
    std::string case_id;
    int p = 0;
    int k = 0;
    double gamma_g = 0.0;
    int n = 0;
    double h = 0.0;
    int dofs = 0;
    double l2_error = 0.0;
    double h1_semi_error = 0.0;
    double triple_error = 0.0;
    double area_omega_h = 0.0;
    double length_gamma_h = 0.0;
    double delta_h = 0.0;
    double min_xi = 0.0; // NaN when the interface is open and patches are unavailable
    double residual = 0.0;
    double wall_time = 0.0; // seconds
};

struct RunOptions {
    double gamma_g = 0.1;
    int patch_core_size = 4;
};

// Full pipeline: mesh, topology, space, assembly, solve, errors, diagnostics.
RunRecord run_case(const std::string &case_id, int p, int k, int n, const RunOptions &opts = {});

struct ConvergenceTable {
    std::string case_id;
    int p = 0;
    int k = 0;
    std::vector<RunRecord> runs; // n = n0 * 2^j
    double rate_l2 = 0.0;
    double rate_h1 = 0.0;
    double rate_triple = 0.0;
};

// Least-squares slope of log(error) against log(h); needs >= 3 levels.
double least_squares_rate(const std::vector<double> &hs, const std::vector<double> &errors);

std::vector<ConvergenceTable> convergence_study(const std::string &case_id, const std::vector<int> &ps,
                                                const std::vector<int> &ks, int n0, int levels,
                                                const RunOptions &opts = {});

// CSV with the fixed column set
// case,p,k,gamma_g,n,h,dofs,l2_error,h1_semi_error,triple_error,delta_h,min_xi,residual
void write_csv(std::ostream &os, const std::vector<RunRecord> &records);

// One JSON object mirroring the record fields in snake_case.
std::string run_record_json(const RunRecord &record);

} // namespace cutfem
