#include "cutfem/harness.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "cutfem/solver.hpp"

namespace cutfem {

namespace {

constexpr double kPi = std::numbers::pi;

ManufacturedCase circle_case() {
    ManufacturedCase mc;
    mc.id = "circle";
    mc.level_set = LevelSetCase::from_name("circle");
    mc.box = {-1.3, -1.3, 1.3, 1.3};
    mc.u = [](const Vec2 &x) { return std::cos(kPi * x.squaredNorm() / 2.0); };
    mc.grad_u = [](const Vec2 &x) {
        return Vec2(-kPi * std::sin(kPi * x.squaredNorm() / 2.0) * x);
    };
    mc.f = [](const Vec2 &x) {
        const double r2 = x.squaredNorm();
        return kPi * kPi * r2 * std::cos(kPi * r2 / 2.0) + 2.0 * kPi * std::sin(kPi * r2 / 2.0);
    };
    mc.g = mc.u;
    return mc;
}

ManufacturedCase annulus_case() {
    ManufacturedCase mc;
    mc.id = "annulus";
    mc.level_set = LevelSetCase::from_name("annulus");
    mc.box = {-1.0, -1.0, 1.0, 1.0};
    mc.u = [](const Vec2 &x) {
        const double r = x.norm();
        return 20.0 * (0.75 - r) * (r - 0.25);
    };
    mc.grad_u = [](const Vec2 &x) {
        const double r = x.norm();
        assert(r > 0.05 && "annulus gradient evaluated too close to the origin");
        return Vec2(20.0 * (1.0 - 2.0 * r) / r * x);
    };
    mc.f = [](const Vec2 &x) {
        const double r = x.norm();
        assert(r > 0.05 && "annulus source evaluated too close to the origin");
        return 20.0 * (4.0 - 1.0 / r);
    };
    mc.g = mc.u;
    return mc;
}

ManufacturedCase flower_case() {
    ManufacturedCase mc;
    mc.id = "flower";
    mc.level_set = LevelSetCase::from_name("flower");
    mc.box = {-1.3, -1.3, 1.3, 1.3};
    mc.u = [](const Vec2 &x) { return std::cos(kPi * x[0] / 2.0) * std::cos(kPi * x[1] / 2.0); };
    mc.grad_u = [](const Vec2 &x) {
        return Vec2(-kPi / 2.0 * std::sin(kPi * x[0] / 2.0) * std::cos(kPi * x[1] / 2.0),
                    -kPi / 2.0 * std::cos(kPi * x[0] / 2.0) * std::sin(kPi * x[1] / 2.0));
    };
    mc.f = [](const Vec2 &x) {
        return kPi * kPi / 2.0 * std::cos(kPi * x[0] / 2.0) * std::cos(kPi * x[1] / 2.0);
    };
    mc.g = mc.u;
    return mc;
}

ManufacturedCase halfplane_case(int degree) {
    ManufacturedCase mc;
    mc.id = "halfplane";
    mc.level_set = LevelSetCase::from_name("halfplane");
    mc.box = {-1.3, -1.3, 1.3, 1.3};
    switch (degree) {
    case 1:
        mc.u = [](const Vec2 &x) { return x[0]; };
        mc.grad_u = [](const Vec2 &) { return Vec2(1.0, 0.0); };
        mc.f = [](const Vec2 &) { return 0.0; };
        break;
    case 2:
        mc.u = [](const Vec2 &x) { return x[0] * x[0]; };
        mc.grad_u = [](const Vec2 &x) { return Vec2(2.0 * x[0], 0.0); };
        mc.f = [](const Vec2 &) { return -2.0; };
        break;
    case 3:
        mc.u = [](const Vec2 &x) { return x[0] * x[0] * x[0]; };
        mc.grad_u = [](const Vec2 &x) { return Vec2(3.0 * x[0] * x[0], 0.0); };
        mc.f = [](const Vec2 &x) { return -6.0 * x[0]; };
        break;
    default:
        throw std::invalid_argument("manufactured_case: halfplane degree must be 1, 2 or 3");
    }
    mc.g = mc.u;
    return mc;
}

} // namespace

ManufacturedCase manufactured_case(const std::string &case_id, int degree) {
    if (case_id == "circle")
        return circle_case();
    if (case_id == "annulus")
        return annulus_case();
    if (case_id == "flower")
        return flower_case();
    if (case_id == "halfplane")
        return halfplane_case(degree);
    throw std::invalid_argument("manufactured_case: unknown case " + case_id);
}

ErrorNorms compute_errors(const BackgroundMesh &mesh, const CutTopology &topo, const DiscreteSpace &space,
                          const Eigen::VectorXd &coeffs, const ManufacturedCase &mcase, const SparseMatrix &ghost) {
    if (coeffs.size() != space.dof_count)
        throw std::invalid_argument("compute_errors: coefficient vector does not match the space");

    const int p = space.degree;
    const QuadratureRule vol_rule = triangle_quadrature(std::min(2 * p + 2, 10));
    const SegmentQuadrature bnd_rule = segment_quadrature(std::min(2 * p + 2, 10));
    const ReferenceElement &ref = space.reference;

    double l2_sq = 0.0;
    double h1_sq = 0.0;
    double bnd_sq = 0.0;

    auto accumulate = [&](int t, const ElementMap &map, const Vec2 &x, double w) {
        const Vec2 xi = map.to_reference(x);
        const Eigen::VectorXd vals = ref.values(xi);
        const Eigen::MatrixXd gphys = ref.gradients(xi) * map.jac_inv;
        const auto &dofs = space.element_dofs[t];
        double uh = 0.0;
        Vec2 guh = Vec2::Zero();
        for (size_t i = 0; i < dofs.size(); ++i) {
            const double c = coeffs[dofs[i]];
            uh += c * vals[i];
            guh += c * Vec2(gphys(i, 0), gphys(i, 1));
        }
        const double e = mcase.u(x) - uh;
        const Vec2 ge = mcase.grad_u(x) - guh;
        l2_sq += w * e * e;
        h1_sq += w * ge.squaredNorm();
    };

    for (int t : space.active_elements) {
        const ElementMap map(mesh, t);
        const int sid = topo.element_segment[t];
        if (sid < 0) {
            for (size_t q = 0; q < vol_rule.points.size(); ++q)
                accumulate(t, map, map.to_physical(vol_rule.points[q]), vol_rule.weights[q] * std::abs(map.det));
        } else {
            for (const auto &part : topo.cut_parts[sid]) {
                const ElementMap sub(part[0], part[1], part[2]);
                for (size_t q = 0; q < vol_rule.points.size(); ++q)
                    accumulate(t, map, sub.to_physical(vol_rule.points[q]), vol_rule.weights[q] * std::abs(sub.det));
            }
            const InterfaceSegment &seg = topo.segments[sid];
            const auto &dofs = space.element_dofs[t];
            for (size_t q = 0; q < bnd_rule.points.size(); ++q) {
                const double w = bnd_rule.weights[q] * seg.length;
                const Vec2 x = seg.a + bnd_rule.points[q] * (seg.b - seg.a);
                const Eigen::VectorXd vals = ref.values(map.to_reference(x));
                double uh = 0.0;
                for (size_t i = 0; i < dofs.size(); ++i)
                    uh += coeffs[dofs[i]] * vals[i];
                const double e = mcase.u(x) - uh;
                bnd_sq += w * e * e;
            }
        }
    }

    const Eigen::VectorXd deviation = coeffs - lagrange_interpolate(space, mcase.u);
    const double ghost_sq = ghost.rows() == space.dof_count ? deviation.dot(ghost * deviation) : 0.0;

    ErrorNorms norms;
    norms.l2 = std::sqrt(l2_sq);
    norms.h1_semi = std::sqrt(h1_sq);
    norms.triple = std::sqrt(h1_sq + bnd_sq / mesh.h + std::max(ghost_sq, 0.0));
    return norms;
}

RunRecord run_case(const std::string &case_id, int p, int k, int n, const RunOptions &opts) {
    if (p < 1 || p > 3)
        throw std::invalid_argument("run_case: p must be 1, 2 or 3");
    if (k < 0 || k > 2)
        throw std::invalid_argument("run_case: k must be 0, 1 or 2");
    if (n < 8)
        throw std::invalid_argument("run_case: n must be at least 8");

    const auto start = std::chrono::steady_clock::now();
    auto stage = [&](const char *name, auto &&fn) {
        try {
            return fn();
        } catch (const std::exception &e) {
            throw std::runtime_error("run_case[" + std::string(name) + "]: " + e.what());
        }
    };

    const ManufacturedCase mcase = manufactured_case(case_id, p);
    const BackgroundMesh mesh = stage("mesh", [&] { return build_structured_mesh(mcase.box, n); });
    const CutTopology topo =
        stage("topology", [&] { return build_cut_topology(mesh, mcase.level_set, opts.patch_core_size); });
    const DiscreteSpace space = stage("space", [&] { return build_dof_map(mesh, topo.element_active, p); });

    AssemblyConfig cfg;
    cfg.degree = p;
    cfg.taylor_order = k;
    cfg.gamma_ghost = opts.gamma_g;
    cfg.root.initial_bracket = mesh.h * mesh.h;

    const NitscheOperator op = stage("assemble", [&] {
        return assemble_nitsche_operator(mesh, topo, space, mcase.level_set, mcase.f, mcase.g, cfg);
    });
    const SparseMatrix ghost = stage("ghost", [&] { return assemble_ghost_penalty(mesh, topo, space, cfg); });

    AssembledSystem system;
    system.dof_count = space.dof_count;
    system.matrix = op.matrix + ghost;
    system.rhs = op.rhs;

    const SolveReport report = stage("solve", [&] { return solve_linear_system(system); });
    const ErrorNorms norms =
        stage("errors", [&] { return compute_errors(mesh, topo, space, report.solution, mcase, ghost); });
    const GeometryDiagnostics diag =
        stage("diagnostics", [&] { return geometry_diagnostics(mesh, topo, mcase.level_set, cfg.root); });

    RunRecord record;
    record.case_id = case_id;
    record.p = p;
    record.k = k;
    record.gamma_g = opts.gamma_g;
    record.n = n;
    record.h = mesh.h;
    record.dofs = space.dof_count;
    record.l2_error = norms.l2;
    record.h1_semi_error = norms.h1_semi;
    record.triple_error = norms.triple;
    record.area_omega_h = diag.area_omega_h;
    record.length_gamma_h = diag.length_gamma_h;
    record.delta_h = diag.delta_h;
    record.min_xi = min_patch_xi(topo, mesh);
    record.residual = report.relative_residual;
    record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

double least_squares_rate(const std::vector<double> &hs, const std::vector<double> &errors) {
    if (hs.size() != errors.size() || hs.size() < 3)
        throw std::invalid_argument("least_squares_rate: need at least 3 levels");
    const size_t m = hs.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double x = std::log(hs[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<ConvergenceTable> convergence_study(const std::string &case_id, const std::vector<int> &ps,
                                                const std::vector<int> &ks, int n0, int levels,
                                                const RunOptions &opts) {
    if (levels < 3)
        throw std::invalid_argument("convergence_study: need at least 3 levels");
    std::vector<ConvergenceTable> tables;
    for (int p : ps) {
        for (int k : ks) {
            ConvergenceTable table;
            table.case_id = case_id;
            table.p = p;
            table.k = k;
            std::vector<double> hs, l2, h1, triple;
            for (int level = 0; level < levels; ++level) {
                const int n = n0 << level;
                table.runs.push_back(run_case(case_id, p, k, n, opts));
                const RunRecord &r = table.runs.back();
                hs.push_back(r.h);
                l2.push_back(r.l2_error);
                h1.push_back(r.h1_semi_error);
                triple.push_back(r.triple_error);
            }
            table.rate_l2 = least_squares_rate(hs, l2);
            table.rate_h1 = least_squares_rate(hs, h1);
            table.rate_triple = least_squares_rate(hs, triple);
            tables.push_back(std::move(table));
        }
    }
    return tables;
}

namespace {

std::string real_field(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

} // namespace

void write_csv(std::ostream &os, const std::vector<RunRecord> &records) {
    os << "case,p,k,gamma_g,n,h,dofs,l2_error,h1_semi_error,triple_error,delta_h,min_xi,residual\n";
    for (const RunRecord &r : records) {
        os << r.case_id << ',' << r.p << ',' << r.k << ',' << real_field(r.gamma_g) << ',' << r.n << ','
           << real_field(r.h) << ',' << r.dofs << ',' << real_field(r.l2_error) << ','
           << real_field(r.h1_semi_error) << ',' << real_field(r.triple_error) << ',' << real_field(r.delta_h) << ','
           << real_field(r.min_xi) << ',' << real_field(r.residual) << '\n';
    }
}

std::string run_record_json(const RunRecord &r) {
    nlohmann::json j;
    j["case"] = r.case_id;
    j["p"] = r.p;
    j["k"] = r.k;
    j["gamma_g"] = r.gamma_g;
    j["n"] = r.n;
    j["h"] = r.h;
    j["dofs"] = r.dofs;
    j["l2_error"] = r.l2_error;
    j["h1_semi_error"] = r.h1_semi_error;
    j["triple_error"] = r.triple_error;
    j["area_omega_h"] = r.area_omega_h;
    j["length_gamma_h"] = r.length_gamma_h;
    j["delta_h"] = r.delta_h;
    j["min_xi"] = r.min_xi;
    j["residual"] = r.residual;
    j["wall_time"] = r.wall_time;
    return j.dump(2);
}

} // namespace cutfem
