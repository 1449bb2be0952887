#pragma once

#include <string>
#include <string_view>

#include "cutfem/mesh.hpp"

namespace cutfem {

enum class LevelSetKind { halfplane, circle, annulus, flower };

// Analytic level sets of the test geometries; phi < 0 inside the physical
// domain, phi > 0 outside.
struct LevelSetCase {
    LevelSetKind kind = LevelSetKind::circle;

    double halfplane_offset = 0.63; // phi = x - c
    double circle_radius = 1.0;     // phi = R - radius

    double annulus_r_inner = 0.25; // phi = (R - r_outer)(R - r_inner)
    double annulus_r_outer = 0.75;

    // phi = (R^2 - r_theta)(R^2 - r_inner^2), r_theta = r0 + amp*sin(omega*theta),
    // theta = arctan(x/y) with theta = 0 on the y = 0 axis. Note the first
    // factor compares R^2 against r_theta itself, as the formula is stated.
    double flower_r0 = 0.5;
    double flower_amp = 0.1;
    double flower_omega = 8.0;
    double flower_r_inner = 1.0 / 6.0;

    static LevelSetCase from_name(std::string_view name);
    std::string name() const;
};

// 1D root search along a ray, used to realize the discrete projection
// p_h(x, s) = x + s*n_h and the signed distance from Gamma_h to Gamma.
struct RayRootConfig {
    double smax = 0.25;            // search cap, inside the feature size of all cases
    double tol = 1e-12;            // absolute tolerance on phi
    int max_iter = 200;
    double initial_bracket = 1e-3; // half-width of the first bracket; callers set h^2 scale
};

double eval_phi(const LevelSetCase &ls, const Vec2 &x);

// Analytic gradient where a closed form exists, central finite differences
// for the flower. Throws at the circle/annulus gradient singularity (origin).
Vec2 grad_phi(const LevelSetCase &ls, const Vec2 &x);

// Smallest-magnitude root s of phi(x + s*d) in [-smax, smax], found by
// symmetric bracket expansion, then bisection with safeguarded Newton steps.
// Returns 0 immediately when |phi(x)| <= tol. Throws when no sign change is
// found within the cap.
double find_zero_along(const LevelSetCase &ls, const Vec2 &x, const Vec2 &d, const RayRootConfig &cfg);

} // namespace cutfem
