#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "santalo/body.hpp"
#include "santalo/body_metrics.hpp"
#include "santalo/counterexample.hpp"
#include "santalo/quadrature1d.hpp"
#include "santalo/sphere.hpp"

using namespace santalo;
using Catch::Approx;

TEST_CASE("flat triangle geometry matches its closed forms") {
    const SphereQuadrature quad = build_quadrature(2, 256);
    for (double c : {1.0, 0.5, 0.2}) {
        const Body k = kc_body(c);
        REQUIRE(volume(k, quad) == Approx(1.0).epsilon(1e-12));

        const Vec s = steiner_point(k, quad);
        REQUIRE(s[0] == Approx(kc_steiner_abscissa(c)).epsilon(1e-12));
        REQUIRE(s[1] == Approx(0.0).margin(1e-13));

        // polar volume of the shifted body against the closed form
        const double t = 0.4 * c;
        const Body shifted = translate(k, {-t, 0.0});
        REQUIRE(polar_volume(shifted, quad) ==
                Approx(kc_polar_translated_volume(c, t)).epsilon(1e-8));
    }
}

TEST_CASE("flat triangle volume product identities") {
    for (double c : {1.0, 0.5, 0.2, 0.1}) {
        // product about the steiner point equals the closed form algebraically
        const double direct = kc_polar_translated_volume(c, kc_steiner_abscissa(c));
        REQUIRE(kc_volume_product(c) == Approx(direct).epsilon(1e-12));
        // product about the minimizing point is flat in c
        REQUIRE(kc_polar_translated_volume(c, kc_santalo_abscissa(c)) ==
                Approx(27.0 / 4.0).epsilon(1e-12));
    }
    REQUIRE(kc_volume_product(1.0) == Approx(64.0 / 9.0).epsilon(1e-12));

    // the product blows up as the triangle flattens
    double prev = 0.0;
    for (double c : {1.0, 0.5, 0.2, 0.1}) {
        const double p = kc_volume_product(c);
        REQUIRE(p > prev);
        prev = p;
    }
    REQUIRE(kc_volume_product(0.1) > std::numbers::pi * std::numbers::pi);
    REQUIRE(kc_volume_product(0.1) == Approx(316.1793267211794).epsilon(1e-12));
}

TEST_CASE("flat cone volume matches radial quadrature and a 1d oracle") {
    const SphereQuadrature quad = build_quadrature(3, 96);
    for (double c : {1.0, 0.5}) {
        const Body k = lc_body(c, 3);
        const double closed = lc_volume(c, 3);
        REQUIRE(closed == Approx(std::numbers::pi / (3.0 * c)).epsilon(1e-12));
        REQUIRE(volume(k, quad) == Approx(closed).epsilon(1e-3));

        // independent oracle: integrate the cube of the radial profile over latitudes
        auto cube_of_radial = [c](double z) {
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double rho = c / (c * c * s + z);
            return rho * rho * rho;
        };
        const double oracle =
            (2.0 * std::numbers::pi / 3.0) * adaptive_simpson(cube_of_radial, 0.0, 1.0, 1e-12);
        REQUIRE(closed == Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("flat cone polar volume closed form against a latitude integral") {
    for (double c : {1.0, 0.5}) {
        const double t = 0.3 * c;
        auto inverse_cubed_width = [c, t](double z) {
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double h = std::max(c * z, s / c) - t * z;
            return 1.0 / (h * h * h);
        };
        const double oracle =
            (2.0 * std::numbers::pi / 3.0) * adaptive_simpson(inverse_cubed_width, -1.0, 1.0, 1e-12);
        REQUIRE(lc_polar_translated_volume(c, t, 3) == Approx(oracle).epsilon(1e-9));

        const SphereQuadrature quad = build_quadrature(3, 192);
        const Body shifted = translate(lc_body(c, 3), {-t, 0.0, 0.0});
        REQUIRE(polar_volume(shifted, quad) ==
                Approx(lc_polar_translated_volume(c, t, 3)).epsilon(1e-3));
    }
}

TEST_CASE("flat cone steiner abscissa closed form") {
    // frozen reference values for the dimension-3 shape factor
    REQUIRE(lc_steiner_g(0.5, 3) == Approx(0.014928749927334).epsilon(1e-12));
    REQUIRE(lc_steiner_g(1.0, 3) == Approx(0.146446609406726).epsilon(1e-12));

    // closed form for n = 3 is reproduced by the generic integral branch at n = 4, 5
    for (int n : {4, 5}) {
        const double g = lc_steiner_g(0.8, n);
        REQUIRE(g > 0.0);
        REQUIRE(g < 0.5);
    }

    // quadrature steiner point agrees with the closed form
    const SphereQuadrature quad = build_quadrature(3, 256);
    for (double c : {0.5, 1.0}) {
        const Vec s = steiner_point(lc_body(c, 3), quad);
        REQUIRE(s[0] == Approx(lc_steiner_abscissa(c, 3)).margin(1e-4));
        REQUIRE(std::abs(s[1]) < 1e-10);
        REQUIRE(std::abs(s[2]) < 1e-10);
    }

    // same agreement for the generic integral branch in dimension 4
    const SphereQuadrature quad4 = build_quadrature(4, 64);
    const Vec s4 = steiner_point(lc_body(0.8, 4), quad4);
    REQUIRE(s4[0] == Approx(lc_steiner_abscissa(0.8, 4)).margin(2e-3));
}

TEST_CASE("flat cone volume product identity") {
    for (double c : {1.0, 0.5}) {
        const double g = lc_steiner_g(c, 3);
        const double direct = lc_volume(c, 3) * lc_polar_translated_volume(c, c * g, 3);
        REQUIRE(lc_volume_product(c, 3) == Approx(direct).epsilon(1e-12));
    }
    // flattening makes the steiner-centered product blow up
    REQUIRE(lc_volume_product(0.1, 3) > lc_volume_product(0.5, 3));
    REQUIRE(lc_volume_product(0.1, 3) > 40.0);
}

TEST_CASE("divergence sweep pipeline tracks the closed forms") {
    DivergenceOptions opt;
    opt.resolution = 96;

    const auto rows2 = divergence_sweep(2, std::vector<double>{1.0, 0.5, 0.2}, opt);
    REQUIRE(rows2.size() == 3);
    double prev = 0.0;
    for (const auto& row : rows2) {
        REQUIRE(row.n == 2);
        REQUIRE(row.ratio == Approx(1.0).epsilon(1e-6));
        REQUIRE(row.closed_form > prev);
        prev = row.closed_form;
    }

    const auto rows3 = divergence_sweep(3, std::vector<double>{1.0, 0.5}, opt);
    for (const auto& row : rows3) {
        REQUIRE(row.n == 3);
        REQUIRE(row.ratio == Approx(1.0).epsilon(1e-2));
    }
}

TEST_CASE("degenerate parameters are rejected") {
    REQUIRE_THROWS_AS(kc_body(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(lc_body(0.5, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(kc_polar_translated_volume(0.5, 0.6), std::domain_error);
    REQUIRE_THROWS_AS(kc_polar_translated_volume(0.5, 0.0), std::domain_error);
    DivergenceOptions opt;
    REQUIRE_THROWS_AS(divergence_sweep(2, std::vector<double>{0.5, 1e-4}, opt),
                      std::invalid_argument);
}
