#include "cutfem/level_set.hpp"

#include <cmath>
#include <stdexcept>

namespace cutfem {

namespace {

double flower_theta(const Vec2 &x) {
    // As stated: theta = arctan(x/y), with theta = 0 on y = 0. For omega = 8
    // this convention agrees with the limit from either side.
    if (x[1] == 0.0)
        return 0.0;
    return std::atan(x[0] / x[1]);
}

} // namespace

LevelSetCase LevelSetCase::from_name(std::string_view name) {
    LevelSetCase ls;
    if (name == "halfplane")
        ls.kind = LevelSetKind::halfplane;
    else if (name == "circle")
        ls.kind = LevelSetKind::circle;
    else if (name == "annulus")
        ls.kind = LevelSetKind::annulus;
    else if (name == "flower")
        ls.kind = LevelSetKind::flower;
    else
        throw std::invalid_argument("unknown level set case: " + std::string(name) +
                                    " (expected halfplane|circle|annulus|flower)");
    return ls;
}

std::string LevelSetCase::name() const {
    switch (kind) {
    case LevelSetKind::halfplane: return "halfplane";
    case LevelSetKind::circle: return "circle";
    case LevelSetKind::annulus: return "annulus";
    case LevelSetKind::flower: return "flower";
    }
    return "unknown";
}

double eval_phi(const LevelSetCase &ls, const Vec2 &x) {
    switch (ls.kind) {
    case LevelSetKind::halfplane:
        return x[0] - ls.halfplane_offset;
    case LevelSetKind::circle:
        return x.norm() - ls.circle_radius;
    case LevelSetKind::annulus: {
        const double r = x.norm();
        return (r - ls.annulus_r_outer) * (r - ls.annulus_r_inner);
    }
    case LevelSetKind::flower: {
        const double r2 = x.squaredNorm();
        const double r_theta = ls.flower_r0 + ls.flower_amp * std::sin(ls.flower_omega * flower_theta(x));
        return (r2 - r_theta) * (r2 - ls.flower_r_inner * ls.flower_r_inner);
    }
    }
    throw std::logic_error("eval_phi: unhandled case");
}

Vec2 grad_phi(const LevelSetCase &ls, const Vec2 &x) {
    switch (ls.kind) {
    case LevelSetKind::halfplane:
        return Vec2(1.0, 0.0);
    case LevelSetKind::circle: {
        const double r = x.norm();
        if (r == 0.0)
            throw std::domain_error("grad_phi: circle level set gradient is singular at the origin");
        return x / r;
    }
    case LevelSetKind::annulus: {
        const double r = x.norm();
        if (r == 0.0)
            throw std::domain_error("grad_phi: annulus level set gradient is singular at the origin");
        return (2.0 * r - ls.annulus_r_inner - ls.annulus_r_outer) * (x / r);
    }
    case LevelSetKind::flower: {
        const double step = 1e-6 * std::max(1.0, x.norm());
        Vec2 g;
        for (int c = 0; c < 2; ++c) {
            Vec2 xp = x, xm = x;
            xp[c] += step;
            xm[c] -= step;
            g[c] = (eval_phi(ls, xp) - eval_phi(ls, xm)) / (2.0 * step);
        }
        return g;
    }
    }
    throw std::logic_error("grad_phi: unhandled case");
}

namespace {

// Bisection with safeguarded Newton steps on g(s) = phi(x + s*d), bracket
// [a, b] with a sign change. The directional derivative is taken by a small
// central difference along the ray.
double refine_root(const LevelSetCase &ls, const Vec2 &x, const Vec2 &d, double a, double ga, double b, double gb,
                   const RayRootConfig &cfg) {
    auto g = [&](double s) { return eval_phi(ls, x + s * d); };

    if (std::abs(ga) <= cfg.tol)
        return a;
    if (std::abs(gb) <= cfg.tol)
        return b;

    double s = 0.5 * (a + b);
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const double gs = g(s);
        if (std::abs(gs) <= cfg.tol)
            return s;
        if ((gs > 0.0) == (ga > 0.0)) {
            a = s;
            ga = gs;
        } else {
            b = s;
            gb = gs;
        }
        const double eps = 1e-7;
        const double dg = (g(s + eps) - g(s - eps)) / (2.0 * eps);
        double next = 0.5 * (a + b);
        if (dg != 0.0) {
            const double newton = s - gs / dg;
            if (newton > a && newton < b)
                next = newton;
        }
        s = next;
        if (b - a < 1e-17)
            return s;
    }
    throw std::runtime_error("find_zero_along: root refinement did not converge");
}

} // namespace

double find_zero_along(const LevelSetCase &ls, const Vec2 &x, const Vec2 &d, const RayRootConfig &cfg) {
    if (std::abs(d.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("find_zero_along: direction must be a unit vector");

    const double g0 = eval_phi(ls, x);
    if (std::abs(g0) <= cfg.tol)
        return 0.0;

    auto g = [&](double s) { return eval_phi(ls, x + s * d); };

    const bool positive0 = g0 > 0.0;
    double s_prev = 0.0;
    double s = std::min(std::max(cfg.initial_bracket, cfg.tol), cfg.smax);

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const double gp = g(s);
        const double gm = g(-s);
        const bool hit_plus = (gp > 0.0) != positive0 || std::abs(gp) <= cfg.tol;
        const bool hit_minus = (gm > 0.0) != positive0 || std::abs(gm) <= cfg.tol;

        if (hit_plus && hit_minus) {
            const double rp = refine_root(ls, x, d, s_prev, g(s_prev), s, gp, cfg);
            const double rm = refine_root(ls, x, d, -s, gm, -s_prev, g(-s_prev), cfg);
            return std::abs(rp) <= std::abs(rm) ? rp : rm;
        }
        if (hit_plus)
            return refine_root(ls, x, d, s_prev, g(s_prev), s, gp, cfg);
        if (hit_minus)
            return refine_root(ls, x, d, -s, gm, -s_prev, g(-s_prev), cfg);

        if (s >= cfg.smax)
            break;
        s_prev = s;
        s = std::min(2.0 * s, cfg.smax);
    }
    throw std::runtime_error("find_zero_along: no boundary intersection along ray within the search cap");
}

} // namespace cutfem
