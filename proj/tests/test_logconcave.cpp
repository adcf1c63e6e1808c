#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "santalo/body.hpp"
#include "santalo/body_metrics.hpp"
#include "santalo/logconcave.hpp"
#include "santalo/sphere.hpp"
#include "santalo/vec.hpp"
#include "santalo/zonal.hpp"

using namespace santalo;
using Catch::Approx;

namespace {

Body diamond() {
    std::vector<Vec> verts = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    return make_polytope(2, verts);
}

}  // namespace

TEST_CASE("gaussian integrals and mass") {
    LogConcaveFn g = standard_gaussian(2);
    REQUIRE(integral(g) == Approx(2.0 * std::numbers::pi).epsilon(1e-7));

    // first absolute moment of the planar standard gaussian; the conical
    // kink at the origin limits the product Simpson rule to ~1e-5 relative
    auto nrm = [](std::span<const double> x) { return norm(x); };
    REQUIRE(gaussian_integral(nrm, 2) == Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(5e-5));

    REQUIRE(gaussian_mean_width(g) == Approx(1.0).epsilon(1e-7));
}

TEST_CASE("centroid tracks the gaussian center") {
    LogConcaveFn f = gaussian_fn(2, 1.0, {0.7, -0.3}, {1.0, 1.0}, 8.0, 161);
    const Vec c = centroid(f);
    REQUIRE(c[0] == Approx(0.7).margin(1e-8));
    REQUIRE(c[1] == Approx(-0.3).margin(1e-8));
}

TEST_CASE("exponential of a gauge integrates to n factorial times the volume") {
    // unit disk: the integral is 2 pi Gamma(2) = 2 pi = 2! |B^2|
    GridFunction phi = make_grid_cube(2, 14.0, 201, [](std::span<const double> x) { return norm(x); });
    LogConcaveFn f = logconcave_from_grid(std::move(phi), "exp_gauge_disk");
    REQUIRE(integral(f) == Approx(2.0 * std::numbers::pi).epsilon(2e-3));
}

TEST_CASE("norm power family has the closed-form mass") {
    LogConcaveFn f = norm_power_fn(ball(2), 3.0, 6.0, 193);
    const double expected = 2.0 * std::numbers::pi * std::pow(3.0, -1.0 / 3.0) * std::tgamma(2.0 / 3.0);
    REQUIRE(integral(f) == Approx(expected).epsilon(2e-3));
    // support function of the exponent: (1/q) ||z||^q with q = 3/2
    Vec z = {0.6, -0.8};
    REQUIRE(f.support_exact(z) == Approx(std::pow(1.0, 1.5) / 1.5).margin(1e-12));
}

TEST_CASE("polar of the cube indicator integrates the l1 exponential") {
    LogConcaveFn f = indicator_fn(cube(2), 4.0, 129);
    // the jump sits on nodes, so the mass overshoots by 2h/3 per edge
    REQUIRE(integral(f) == Approx(4.0).epsilon(5e-2));
    REQUIRE(polar_integral(f) == Approx(4.0).epsilon(2e-3));
}

TEST_CASE("anisotropic gaussian polar pair attains the product equality") {
    LogConcaveFn f = gaussian_fn(2, 1.0, {0.0, 0.0}, {0.5, 2.0}, 8.0, 161);
    // the 0.5 axis leaves ~5 nodes per standard deviation
    REQUIRE(integral(f) == Approx(2.0 * std::numbers::pi).epsilon(1e-4));

    LogConcaveFn p = polar_fn(f);
    // the polar is the gaussian with reciprocal axes
    const Vec x = {1.0, 0.25};
    const double expected = std::exp(-0.5 * (0.25 * 1.0 + 4.0 * 0.25 * 0.25));
    REQUIRE(p.value(x) == Approx(expected).epsilon(1e-9));

    const double product = integral(f) * polar_integral(f);
    const double bound = std::pow(2.0 * std::numbers::pi, 2.0);
    REQUIRE(product == Approx(bound).epsilon(1e-3));
}

TEST_CASE("polar involution through the grid path") {
    LogConcaveFn f = gaussian_fn(2, 1.0, {0.0, 0.0}, {0.8, 1.3}, 8.0, 161);
    LogConcaveFn p = polar_fn(f);
    // strip the closed forms so the second polar exercises conjugation
    LogConcaveFn p_grid = logconcave_from_grid(p.phi, "polar_grid");
    LogConcaveFn back = polar_fn(p_grid);
    for (double r : {0.0, 0.5, 1.3}) {
        const Vec x = {r, -0.5 * r};
        REQUIRE(back.value(x) == Approx(f.value(x)).margin(2e-2));
    }
}

TEST_CASE("scalar multiplication rescales bodies and support functions") {
    LogConcaveFn f = indicator_fn(cube(2), 4.0, 129);
    LogConcaveFn g = scalar_mult(2.0, f);
    const Vec inside = {1.7, -1.9};
    const Vec outside = {2.3, 0.0};
    REQUIRE(g.value(inside) == Approx(1.0));
    REQUIRE(g.value(outside) == Approx(0.0));
    const Vec z = {0.3, 0.4};
    REQUIRE(g.support_exact(z) == Approx(2.0 * f.support_exact(z)).margin(1e-12));
    REQUIRE(integral(g) == Approx(16.0).epsilon(5e-2));

    // (a.f) star (b.f) = (a+b).f on gaussians, through the grid pipeline
    LogConcaveFn gauss = standard_gaussian(2, 6.0, 129);
    LogConcaveFn s = asplund_sum(gauss, scalar_mult(2.0, gauss));
    for (double r : {0.0, 1.0, 2.5}) {
        const Vec x = {r, 0.5 * r};
        const double expected = std::exp(-norm2(x) / 6.0);
        REQUIRE(s.value(x) == Approx(expected).margin(2e-2));
    }
}

TEST_CASE("asplund sum of indicators is the indicator of the minkowski sum") {
    LogConcaveFn f = indicator_fn(cube(2), 2.0, 129);
    LogConcaveFn g = indicator_fn(diamond(), 2.0, 129);
    LogConcaveFn s = asplund_sum(f, g);

    const Vec inside = {1.5, 0.0};
    REQUIRE(s.value(inside) == Approx(1.0).margin(1e-9));
    const Vec outside = {1.9, 1.9};
    REQUIRE(s.value(outside) <= 0.5);

    // support functions add exactly
    SphereQuadrature q = build_quadrature(2, 16);
    const Body sum_body = minkowski_sum(cube(2), diamond());
    for (std::size_t i = 0; i < q.size(); ++i) {
        std::span<const double> u = q.node(i);
        REQUIRE(s.support_exact(u) == Approx(sum_body.support(u)).margin(1e-12));
    }
}

TEST_CASE("support of a sum through the pure grid path") {
    LogConcaveFn a = standard_gaussian(2, 6.0, 129);
    LogConcaveFn b = gaussian_fn(2, 1.0, {0.5, 0.0}, {1.0, 1.0}, 6.0, 129);
    // strip closed forms from one factor: the sum falls back to conjugating
    // its epi-sum exponent grid
    LogConcaveFn b_grid = logconcave_from_grid(b.phi, "grid_factor");
    LogConcaveFn s = asplund_sum(a, b_grid);
    REQUIRE(!s.support_exact);
    auto h = support_eval(s);
    for (double r : {0.4, 1.0, 1.8}) {
        const Vec z = {r, -r};
        const double expected = 0.5 * norm2(z) + (0.5 * norm2(z) + 0.5 * z[0]);
        REQUIRE(h(z) == Approx(expected).margin(3e-2));
    }
}

TEST_CASE("translation shifts support functions linearly") {
    LogConcaveFn f = standard_gaussian(2, 8.0, 161);
    const Vec y = {0.8, -0.2};
    LogConcaveFn g = translate_fn(f, y);
    REQUIRE(integral(g) == Approx(integral(f)).epsilon(1e-10));
    const Vec z = {0.5, 1.0};
    REQUIRE(g.support_exact(z) == Approx(f.support_exact(z) + dot(z, y)).margin(1e-12));
    const Vec c = centroid(g);
    REQUIRE(c[0] == Approx(0.8).margin(1e-8));
    REQUIRE(c[1] == Approx(-0.2).margin(1e-8));
}

TEST_CASE("reflection negates the argument") {
    LogConcaveFn f = gaussian_fn(2, 1.0, {0.6, 0.1}, {1.0, 1.0}, 8.0, 161);
    LogConcaveFn r = reflect_fn(f);
    const Vec x = {1.0, 0.5};
    const Vec mx = {-1.0, -0.5};
    REQUIRE(r.value(x) == Approx(f.value(mx)).margin(1e-12));
    REQUIRE(r.support_exact(x) == Approx(f.support_exact(mx)).margin(1e-12));
}

TEST_CASE("mass capture radius certifies linear growth") {
    auto nrm = [](std::span<const double> x) { return norm(x); };
    const double r = mass_capture_radius(nrm, 2);
    REQUIRE(r > 25.0);
    REQUIRE(r < 35.0);
    auto flat = [](std::span<const double>) { return 1.0; };
    REQUIRE_THROWS_AS(mass_capture_radius(flat, 2), std::domain_error);
}

TEST_CASE("uniform-measure image of an indicator is the half-mean-width ball") {
    LogConcaveFn f = indicator_fn(cube(2), 4.0, 129);
    AsplundEndo psi = asplund_endo(sigma_measure(2), 2);
    LogConcaveFn img = apply_asplund(psi, f);

    const double half_width_img = 4.0 / std::numbers::pi;  // half mean width of the square
    const Vec e1 = {1.0, 0.0};
    const Vec diag = {std::sqrt(0.5), std::sqrt(0.5)};
    REQUIRE(img.support_exact(e1) == Approx(half_width_img).margin(5e-3));
    REQUIRE(img.support_exact(diag) == Approx(half_width_img).margin(5e-3));

    const Vec deep_inside = {0.7, 0.0};
    const Vec far_outside = {2.5, 0.0};
    REQUIRE(img.value(deep_inside) >= 0.9);
    REQUIRE(img.value(far_outside) <= 0.02);
}

TEST_CASE("two-point symmetrization agrees with the explicit half-sum oracle") {
    LogConcaveFn f = gaussian_fn(2, 1.0, {0.7, -0.4}, {1.0, 1.0}, 8.0, 129);
    AsplundEndo psi = asplund_endo(nu_measure(), 2);
    LogConcaveFn img = apply_asplund(psi, f);

    LogConcaveFn oracle = asplund_sum(scalar_mult(0.5, f), scalar_mult(0.5, reflect_fn(f)));
    for (double r : {0.3, 1.0, 2.0}) {
        const Vec z = {r, 0.7 * r};
        REQUIRE(img.support_exact(z) == Approx(oracle.support_exact(z)).margin(1e-10));
        // the even part of the shifted gaussian support is the standard one
        REQUIRE(img.support_exact(z) == Approx(0.5 * norm2(z)).margin(1e-10));
    }
    // the image is the standard gaussian again: the translation is wiped out
    for (double r : {0.0, 0.8, 1.6}) {
        const Vec x = {r, -r};
        REQUIRE(img.value(x) == Approx(std::exp(-norm2(x) / 2.0)).margin(1e-2));
    }
}

TEST_CASE("rotation-invariant functions are fixed points") {
    LogConcaveFn f = standard_gaussian(2, 8.0, 129);
    AsplundEndo psi = asplund_endo(equator_measure(), 2);
    LogConcaveFn img = apply_asplund(psi, f);
    for (double r : {0.2, 1.0, 3.0}) {
        const Vec z = {r, 0.4 * r};
        REQUIRE(img.support_exact(z) == Approx(0.5 * norm2(z)).margin(1e-10));
    }
}

TEST_CASE("asplund endomorphisms preserve pointwise order") {
    LogConcaveFn small = gaussian_fn(2, 1.0, {0.0, 0.0}, {1.0, 1.0}, 8.0, 129);
    LogConcaveFn big = gaussian_fn(2, 2.0, {0.0, 0.0}, {1.0, 1.0}, 8.0, 129);
    AsplundEndo psi = asplund_endo(nu_measure(), 2);
    LogConcaveFn a = apply_asplund(psi, small);
    LogConcaveFn b = apply_asplund(psi, big);
    for (double r : {0.0, 0.5, 1.5}) {
        const Vec x = {r, r};
        REQUIRE(a.value(x) <= b.value(x) + 1e-9);
    }
}

TEST_CASE("asplund application rejects unusable measures") {
    LogConcaveFn f = standard_gaussian(2, 6.0, 65);
    const ZonalMeasure off_center = from_atoms({{0.5, 1.0}});
    REQUIRE_THROWS_AS(apply_asplund(asplund_endo(off_center, 2), f), std::invalid_argument);

    const ZonalMeasure signed_m =
        from_density(2, [](double t) { return 2.0 * t * t - 1.0; }, true);
    REQUIRE_THROWS_AS(apply_asplund(asplund_endo(signed_m, 2), f), std::invalid_argument);
}
