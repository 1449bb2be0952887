#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cutfem/cut_topology.hpp"
#include "cutfem/fe_space.hpp"
#include "cutfem/harness.hpp"

using namespace cutfem;

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

// Exact moment of x^a y^b over the reference triangle.
double monomial_moment(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

} // namespace

TEST_CASE("Lagrange basis: Kronecker property and partition of unity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int p : {1, 2, 3}) {
        const ReferenceElement ref(p);
        CHECK(ref.node_count() == (p + 1) * (p + 2) / 2);
        for (int i = 0; i < ref.node_count(); ++i) {
            const Eigen::VectorXd v = ref.values(ref.nodes()[i]);
            for (int j = 0; j < ref.node_count(); ++j)
                CHECK(std::abs(v[j] - (i == j ? 1.0 : 0.0)) < 1e-12);
        }
        for (int trial = 0; trial < 20; ++trial) {
            Vec2 xi(uni(rng), uni(rng));
            if (xi[0] + xi[1] > 1.0)
                xi = Vec2(1.0 - xi[0], 1.0 - xi[1]);
            CHECK(ref.values(xi).sum() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(ReferenceElement(4), std::invalid_argument);
}

TEST_CASE("triangle quadrature: weights and monomial exactness oracle") {
    for (int d = 0; d <= 10; ++d) {
        const QuadratureRule rule = triangle_quadrature(d);
        double sum = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
        for (int a = 0; a + 0 <= d; ++a) {
            for (int b = 0; a + b <= d; ++b) {
                double integral = 0.0;
                for (size_t q = 0; q < rule.points.size(); ++q)
                    integral +=
                        rule.weights[q] * std::pow(rule.points[q][0], a) * std::pow(rule.points[q][1], b);
                CHECK(std::abs(integral - monomial_moment(a, b)) < 1e-14);
            }
        }
    }
    CHECK_THROWS_AS(triangle_quadrature(11), std::invalid_argument);
}

TEST_CASE("triangle rules carry the full symmetry") {
    const QuadratureRule rule = triangle_quadrature(6);
    // Invariance under the vertex swap (x,y) -> (y,x): every point has a
    // mirror partner with the same weight.
    for (size_t i = 0; i < rule.points.size(); ++i) {
        bool found = false;
        for (size_t j = 0; j < rule.points.size(); ++j)
            if ((rule.points[j] - Vec2(rule.points[i][1], rule.points[i][0])).norm() < 1e-12 &&
                std::abs(rule.weights[j] - rule.weights[i]) < 1e-14)
                found = true;
        CHECK(found);
    }
}

TEST_CASE("segment quadrature") {
    const SegmentQuadrature rule = segment_quadrature(5);
    double sum = 0.0;
    double fifth = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
        CHECK(rule.weights[q] > 0.0);
        sum += rule.weights[q];
        fifth += rule.weights[q] * std::pow(rule.points[q], 5);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(fifth - 1.0 / 6.0) < 1e-14);
    CHECK_THROWS_AS(segment_quadrature(11), std::invalid_argument);
}

TEST_CASE("directional derivatives match finite differences") {
    const BackgroundMesh mesh = build_structured_mesh({0, 0, 1, 1}, 2);
    const ElementMap map(mesh, 3);
    const ReferenceElement ref(3);
    const Vec2 d = Vec2(0.6, -0.8); // unit
    const Vec2 ref_dir = map.pull_direction(d);

    const Vec2 x = map.to_physical({0.25, 0.3});
    const double step = 1e-4;
    for (int i = 0; i < ref.node_count(); ++i) {
        auto basis = [&](const Vec2 &p) { return ref.values(map.to_reference(p))[i]; };
        const double fd2 = (basis(x + step * d) - 2.0 * basis(x) + basis(x - step * d)) / (step * step);
        const double exact = ref.directional(map.to_reference(x), ref_dir, 2)[i];
        if (std::abs(exact) > 1e-10)
            CHECK(std::abs(fd2 - exact) / std::abs(exact) < 1e-6);
        else
            CHECK(std::abs(fd2) < 1e-5);
    }

    // Orders beyond the polynomial degree vanish identically.
    for (int p : {1, 2, 3}) {
        const ReferenceElement rp(p);
        const Eigen::VectorXd high = rp.directional({0.3, 0.3}, ref_dir, p + 1);
        CHECK(high.norm() == 0.0);
    }
}

TEST_CASE("physical gradients match finite differences at random points") {
    const BackgroundMesh mesh = build_structured_mesh({-1.0, -0.5, 2.0, 1.5}, 3);
    const ReferenceElement ref(2);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(0.05, 0.9);
    for (int t : {0, 5, 11}) {
        const ElementMap map(mesh, t);
        for (int trial = 0; trial < 5; ++trial) {
            Vec2 xi(uni(rng), uni(rng));
            if (xi[0] + xi[1] > 0.95)
                xi *= 0.4;
            const Vec2 x = map.to_physical(xi);
            const Eigen::MatrixXd gphys = ref.gradients(xi) * map.jac_inv;
            const double step = 1e-6;
            for (int i = 0; i < ref.node_count(); ++i) {
                for (int c = 0; c < 2; ++c) {
                    Vec2 xp = x, xm = x;
                    xp[c] += step;
                    xm[c] -= step;
                    const double fd = (ref.values(map.to_reference(xp))[i] - ref.values(map.to_reference(xm))[i]) /
                                      (2.0 * step);
                    CHECK(std::abs(fd - gphys(i, c)) < 1e-6 * std::max(1.0, std::abs(gphys(i, c))));
                }
            }
        }
    }
}

TEST_CASE("dof map counts on the fully active n=2 box") {
    const BackgroundMesh mesh = build_structured_mesh({0, 0, 1, 1}, 2);
    const std::vector<char> all(mesh.triangle_count(), 1);
    CHECK(build_dof_map(mesh, all, 1).dof_count == 9);
    CHECK(build_dof_map(mesh, all, 2).dof_count == 9 + 16);
    CHECK(build_dof_map(mesh, all, 3).dof_count == 9 + 2 * 16 + 8);
    CHECK_THROWS_AS(build_dof_map(mesh, std::vector<char>(mesh.triangle_count(), 0), 1), std::invalid_argument);
}

TEST_CASE("element dof references agree with the dof coordinates") {
    const BackgroundMesh mesh = build_structured_mesh({-1.3, -1.3, 1.3, 1.3}, 8);
    const CutTopology topo = build_cut_topology(mesh, LevelSetCase::from_name("circle"));
    for (int p : {1, 2, 3}) {
        const DiscreteSpace space = build_dof_map(mesh, topo.element_active, p);
        for (int t : space.active_elements) {
            const ElementMap map(mesh, t);
            const auto &dofs = space.element_dofs[t];
            REQUIRE(static_cast<int>(dofs.size()) == space.reference.node_count());
            for (size_t i = 0; i < dofs.size(); ++i) {
                const Vec2 expected = map.to_physical(space.reference.nodes()[i]);
                CHECK((space.dof_coords[dofs[i]] - expected).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("interpolation: constants and global polynomials") {
    const BackgroundMesh mesh = build_structured_mesh({0, 0, 1, 1}, 3);
    const std::vector<char> all(mesh.triangle_count(), 1);
    const DiscreteSpace space = build_dof_map(mesh, all, 2);

    const Eigen::VectorXd threes = lagrange_interpolate(space, [](const Vec2 &) { return 3.0; });
    for (int i = 0; i < space.dof_count; ++i)
        CHECK(threes[i] == 3.0);

    // A global quadratic is reproduced at arbitrary evaluation points.
    auto poly = [](const Vec2 &x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1] + x[1] * x[1]; };
    const Eigen::VectorXd coeffs = lagrange_interpolate(space, poly);
    const QuadratureRule rule = triangle_quadrature(4);
    for (int t : space.active_elements) {
        const ElementMap map(mesh, t);
        for (const Vec2 &xi : rule.points) {
            const Eigen::VectorXd vals = space.reference.values(xi);
            double uh = 0.0;
            for (size_t i = 0; i < space.element_dofs[t].size(); ++i)
                uh += coeffs[space.element_dofs[t][i]] * vals[i];
            CHECK(uh == doctest::Approx(poly(map.to_physical(xi))).epsilon(1e-12));
        }
    }
}

TEST_CASE("interpolation error decays at third order for p=2") {
    const ManufacturedCase mcase = manufactured_case("circle", 2);
    auto interp_error = [&](int n) {
        const BackgroundMesh mesh = build_structured_mesh(mcase.box, n);
        const CutTopology topo = build_cut_topology(mesh, mcase.level_set);
        const DiscreteSpace space = build_dof_map(mesh, topo.element_active, 2);
        const Eigen::VectorXd coeffs = lagrange_interpolate(space, mcase.u);
        return compute_errors(mesh, topo, space, coeffs, mcase, SparseMatrix()).l2;
    };
    const double e16 = interp_error(16);
    const double e32 = interp_error(32);
    CHECK(e16 / e32 >= 6.0);
    CHECK(e16 / e32 <= 10.0);
}
