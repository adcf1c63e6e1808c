#ifndef SANTALO_COUNTEREXAMPLE_HPP
#define SANTALO_COUNTEREXAMPLE_HPP

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "santalo/body.hpp"
#include "santalo/body_metrics.hpp"
#include "santalo/quadrature1d.hpp"
#include "santalo/sphere.hpp"
#include "santalo/vec.hpp"

/*
 * A family of flattening cones showing that the volume product taken about
 * the Steiner point (rather than the Santalo point) is unbounded.  Kc is the
 * planar member, Lc its rotation-symmetric analogue in dimension n >= 3; both
 * have closed forms for volume, Steiner point, and the translated polar
 * volume, so the whole numerical pipeline can be checked end to end while the
 * product is driven to infinity as c -> 0.
 */

namespace santalo {

/* Triangle with vertices (c, 0) and (0, +-1/c); unit area for every c. */
inline Body kc_body(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("kc_body: c must be positive");
    std::vector<Vec> verts = {{c, 0.0}, {0.0, 1.0 / c}, {0.0, -1.0 / c}};
    Body k = make_polytope(2, verts);
    k.label = "Kc(c=" + std::to_string(c) + ")";
    return k;
}

/* First coordinate of the Steiner point of Kc. */
inline double kc_steiner_abscissa(double c) {
    return c / std::numbers::pi * std::atan(c * c);
}

/* First coordinate of the Santalo point of Kc. */
inline double kc_santalo_abscissa(double c) { return c / 3.0; }

/* |(Kc - t e1)^o| for 0 < t < c. */
inline double kc_polar_translated_volume(double c, double t) {
    if (!(t > 0.0 && t < c))
        throw std::domain_error("kc_polar_translated_volume: need 0 < t < c");
    return c * c * c / (t * (c - t) * (c - t));
}

/* |Kc| |(Kc - s(Kc))^o| in closed form; diverges like pi / c^2 as c -> 0. */
inline double kc_volume_product(double c) {
    const double a = std::atan(c * c);
    const double r = a / std::numbers::pi;
    return std::numbers::pi / (a * (1.0 - r) * (1.0 - r));
}

/*
 * Lc: convex hull of the point c e1 and the disk (1/c) B^{n-1} in the
 * hyperplane x1 = 0.  Rotationally symmetric about e1; the origin sits on
 * the flat base facet, so the radial function vanishes on the lower
 * hemisphere and polar volumes are finite only after translating into the
 * interior.
 */
inline Body lc_body(double c, int n) {
    if (!(c > 0.0)) throw std::invalid_argument("lc_body: c must be positive");
    if (n < 3) throw std::invalid_argument("lc_body: dimension must be at least 3 (use kc_body)");
    Body k;
    k.dim = n;
    k.label = "Lc(c=" + std::to_string(c) + ",n=" + std::to_string(n) + ")";
    k.support = [c](std::span<const double> u) {
        double perp2 = 0.0;
        for (std::size_t j = 1; j < u.size(); ++j) perp2 += u[j] * u[j];
        return std::max(c * u[0], std::sqrt(perp2) / c);
    };
    k.radial = [c](std::span<const double> u) {
        const double zeta = u[0];
        if (zeta < 0.0) return 0.0;
        double perp2 = 0.0;
        for (std::size_t j = 1; j < u.size(); ++j) perp2 += u[j] * u[j];
        // exit through the slanted face viewed in the (axis, radius) plane
        return c / (c * c * std::sqrt(perp2) + zeta);
    };
    k.origin_interior = false;
    k.symmetric = false;
    k.smooth = false;
    return k;
}

/* |Lc| = |B^{n-1}| / (n c^{n-2}). */
inline double lc_volume(double c, int n) {
    return unit_ball_volume(n - 1) / (n * std::pow(c, n - 2));
}

/* |(Lc - t e1)^o| = (|B^{n-1}| / n) c^{2n-1} / (t (c-t)^n) for 0 < t < c. */
inline double lc_polar_translated_volume(double c, double t, int n) {
    if (!(t > 0.0 && t < c))
        throw std::domain_error("lc_polar_translated_volume: need 0 < t < c");
    return unit_ball_volume(n - 1) / n * std::pow(c, 2 * n - 1) / (t * std::pow(c - t, n));
}

/*
 * g(c) with s(Lc) = c g(c) e1.  Splitting the defining sphere integral at the
 * latitude where the two support branches meet (zeta* = 1/sqrt(1 + c^4)),
 * the disk branch integrates in closed form and the cone branch leaves the
 * latitude moment below.  In dimension 3 that moment is elementary too.
 */
inline double lc_steiner_g(double c, int n) {
    const double zs = 1.0 / std::sqrt(1.0 + c * c * c * c);
    const double disk_term =
        std::pow(c, 2 * n - 2) / (n * std::pow(1.0 + c * c * c * c, 0.5 * n));
    double cone_moment;
    if (n == 3) {
        cone_moment = (1.0 - zs * zs * zs) / 3.0;
    } else {
        cone_moment = adaptive_simpson(
            [n](double z) { return z * z * std::pow(1.0 - z * z, 0.5 * (n - 3)); }, zs, 1.0,
            1e-12);
    }
    return unit_sphere_area(n - 1) / unit_ball_volume(n) * (cone_moment - disk_term);
}

/* First coordinate of the Steiner point of Lc. */
inline double lc_steiner_abscissa(double c, int n) { return c * lc_steiner_g(c, n); }

/*
 * |Lc| |(Lc - s(Lc))^o| in closed form.  Substituting t = c g into the two
 * volume formulas cancels every power of c, leaving a function of g alone;
 * since g -> 0 as c -> 0 the product diverges.
 */
inline double lc_volume_product(double c, int n) {
    const double g = lc_steiner_g(c, n);
    const double bn1 = unit_ball_volume(n - 1) / n;
    return bn1 * bn1 / (g * std::pow(1.0 - g, n));
}

struct DivergenceRow {
    int n = 0;
    double c = 0.0;
    double closed_form = 0.0;
    double pipeline = 0.0;
    double ratio = 0.0;
};

struct DivergenceOptions {
    int resolution = 96;  // sphere rule used by the numerical pipeline (n >= 3)
    std::uint64_t seed = 0;
};

namespace detail {

/*
 * Polar volume of a body that is rotationally symmetric about e1, by adaptive
 * integration over the latitude.  After a small translate t e1 the polar
 * integrand of Lc develops a boundary layer of angular width ~ c t at the
 * south pole (the support there is just t), which fixed-resolution product
 * rules miss entirely; adaptive bisection chases it down.
 */
inline double axial_polar_volume(const Body& k, int n) {
    auto profile = [&k, n](double z) {
        Vec u(static_cast<std::size_t>(n), 0.0);
        u[0] = z;
        u[1] = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double h = k.support(u);
        const double latitude_weight = n == 3 ? 1.0 : std::pow(1.0 - z * z, 0.5 * (n - 3));
        return std::pow(h, -n) * latitude_weight;
    };
    // several initial panels so the first-level error estimate cannot be
    // fooled by symmetric or locally flat profiles
    const int panels = 8;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = -1.0 + 2.0 * p / panels;
        const double b = -1.0 + 2.0 * (p + 1) / panels;
        total += adaptive_simpson(profile, a, b, 1e-10 / panels);
    }
    return unit_sphere_area(n - 1) / n * total;
}

}  // namespace detail

/*
 * Volume product about the Steiner point for each c, closed form next to the
 * numerical pipeline (quadrature Steiner point + translated polar volume; the
 * polar step switches to an axially adapted rule for the rotationally
 * symmetric family in n >= 3).  Values below 1e-3 are refused: the product
 * grows like c^{-2(n-1)} and the translated body becomes too thin to resolve.
 */
inline std::vector<DivergenceRow> divergence_sweep(int n, std::span<const double> cs,
                                                   const DivergenceOptions& opt = {}) {
    if (n < 2) throw std::invalid_argument("divergence_sweep: dimension must be at least 2");
    for (double c : cs)
        if (c < 1e-3) throw std::invalid_argument("divergence_sweep: c below 1e-3 is not resolvable");
    const SphereQuadrature quad = build_quadrature(n, opt.resolution);
    std::vector<DivergenceRow> rows;
    rows.reserve(cs.size());
    for (double c : cs) {
        DivergenceRow row;
        row.n = n;
        row.c = c;
        const Body k = n == 2 ? kc_body(c) : lc_body(c, n);
        row.closed_form = n == 2 ? kc_volume_product(c) : lc_volume_product(c, n);
        const Vec s = steiner_point(k, quad);
        const Body shifted = translate(k, negated(s));
        const double polar =
            n == 2 ? polar_volume(shifted, quad) : detail::axial_polar_volume(shifted, n);
        row.pipeline = volume(k, quad) * polar;
        row.ratio = row.pipeline / row.closed_form;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace santalo

#endif
