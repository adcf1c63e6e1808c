#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "santalo/quadrature1d.hpp"
#include "santalo/sphere.hpp"
#include "santalo/vec.hpp"

using namespace santalo;
using Catch::Approx;

TEST_CASE("gauss_legendre integrates polynomials exactly") {
    const Rule1D r = gauss_legendre(8);
    for (int k = 0; k <= 15; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], k);
        const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
        REQUIRE(acc == Approx(exact).margin(1e-13));
    }
}

TEST_CASE("gauss_legendre_ab rescales the interval") {
    const Rule1D r = gauss_legendre_ab(6, 0.0, 2.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * r.nodes[i] * r.nodes[i];
    REQUIRE(acc == Approx(8.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("adaptive_simpson reaches requested tolerance") {
    const double v = adaptive_simpson([](double x) { return std::exp(-x * x); }, -6.0, 6.0, 1e-12);
    REQUIRE(v == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
    const double peak = adaptive_simpson([](double x) { return 1.0 / (1e-6 + x * x); }, -1.0, 1.0, 1e-9);
    const double exact = 2.0 / 1e-3 * std::atan(1.0 / 1e-3);
    REQUIRE(peak == Approx(exact).epsilon(1e-7));
}

TEST_CASE("simpson_coefficients integrate cubics exactly for even and odd node counts") {
    for (int nodes : {4, 5, 8, 9, 64, 255}) {
        const double h = 2.0 / (nodes - 1);
        const Vec w = simpson_coefficients(nodes, h);
        REQUIRE(static_cast<int>(w.size()) == nodes);
        double acc = 0.0, lin = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double x = -1.0 + i * h;
            acc += w[static_cast<std::size_t>(i)] * (x * x * x - 2.0 * x * x + 1.0);
            lin += w[static_cast<std::size_t>(i)];
        }
        REQUIRE(lin == Approx(2.0).epsilon(1e-13));
        REQUIRE(acc == Approx(-4.0 / 3.0 + 2.0).margin(1e-12));
    }
}

TEST_CASE("ball and sphere constants") {
    REQUIRE(unit_ball_volume(2) == Approx(std::numbers::pi));
    REQUIRE(unit_ball_volume(3) == Approx(4.0 * std::numbers::pi / 3.0));
    REQUIRE(unit_sphere_area(3) == Approx(4.0 * std::numbers::pi));
    REQUIRE(unit_sphere_area(4) == Approx(2.0 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("sphere quadrature total mass and moments") {
    for (int n : {2, 3, 4, 5}) {
        const SphereQuadrature q = build_quadrature(n, n <= 3 ? 48 : 16);
        double mass = 0.0;
        Vec first(static_cast<std::size_t>(n), 0.0);
        Mat second(n);
        for (std::size_t i = 0; i < q.size(); ++i) {
            auto u = q.node(i);
            REQUIRE(norm(u) == Approx(1.0).epsilon(1e-12));
            mass += q.weights[i];
            for (int a = 0; a < n; ++a) {
                first[static_cast<std::size_t>(a)] += q.weights[i] * u[static_cast<std::size_t>(a)];
                for (int b = 0; b < n; ++b)
                    second(a, b) += q.weights[i] * u[static_cast<std::size_t>(a)] * u[static_cast<std::size_t>(b)];
            }
        }
        REQUIRE(mass == Approx(unit_sphere_area(n)).epsilon(1e-10));
        for (int a = 0; a < n; ++a) {
            REQUIRE(std::abs(first[static_cast<std::size_t>(a)]) < 1e-10);
            for (int b = 0; b < n; ++b) {
                const double expect = (a == b) ? unit_sphere_area(n) / n : 0.0;
                REQUIRE(second(a, b) == Approx(expect).margin(1e-9));
            }
        }
    }
}

TEST_CASE("first absolute moment matches the closed form") {
    // the pole-axis kink is exact for n = 3 (mirrored latitude rule); the
    // equally spaced circle rule converges at second order on |cos|
    struct Case {
        int n;
        int res;
        double tol;
    };
    for (const Case c : {Case{2, 2048, 1e-6}, Case{3, 48, 1e-10}, Case{4, 32, 5e-3}}) {
        const SphereQuadrature q = build_quadrature(c.n, c.res);
        double acc = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) acc += q.weights[i] * std::abs(q.node(i)[0]);
        REQUIRE(acc == Approx(2.0 * unit_ball_volume(c.n - 1)).epsilon(c.tol));
    }
}

TEST_CASE("dim-3 rule averages the cube support to half its mean width") {
    const SphereQuadrature q = build_quadrature(3, 512);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        auto u = q.node(i);
        acc += q.weights[i] * (std::abs(u[0]) + std::abs(u[1]) + std::abs(u[2]));
    }
    REQUIRE(acc / unit_sphere_area(3) == Approx(1.5).epsilon(1e-5));
}

TEST_CASE("monte carlo rule is available for dim 6 with correct normalization") {
    QuadratureOptions opts;
    opts.monte_carlo = true;
    opts.seed = 7;
    opts.sample_count = 20000;
    const SphereQuadrature q = build_quadrature(6, 8, opts);
    double mass = 0.0, sq = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        mass += q.weights[i];
        lin += q.weights[i] * q.node(i)[0];
        sq += q.weights[i] * q.node(i)[0] * q.node(i)[0];
    }
    REQUIRE(mass == Approx(unit_sphere_area(6)).epsilon(1e-12));
    REQUIRE(std::abs(lin) < 1e-12);  // antithetic pairs cancel odd moments exactly
    REQUIRE(sq == Approx(unit_sphere_area(6) / 6).epsilon(0.05));
}

TEST_CASE("rotation_to maps the pole onto the target") {
    const Vec targets[] = {
        {0.0, 0.0, 1.0},
        {1.0, 0.0, 0.0},
        {-1.0, 0.0, 0.0},
        {0.6, -0.8, 0.0},
        {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), -1.0 / std::sqrt(3.0)},
    };
    for (const Vec& t : targets) {
        const Mat r = rotation_to(t);
        Vec e1(3, 0.0);
        e1[0] = 1.0;
        const Vec img = r.apply(e1);
        for (int i = 0; i < 3; ++i)
            REQUIRE(img[static_cast<std::size_t>(i)] == Approx(t[static_cast<std::size_t>(i)]).margin(1e-12));
        REQUIRE(max_abs_offdiag_gram_defect(r) < 1e-12);
        REQUIRE(det(r) == Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("subsphere nodes are unit and orthogonal to the axis") {
    for (int n : {2, 3, 5}) {
        Vec u(static_cast<std::size_t>(n), 0.0);
        u[0] = 0.36;
        u[static_cast<std::size_t>(n - 1)] = std::sqrt(1.0 - 0.36 * 0.36);
        const auto nodes = subsphere_nodes(u, 32);
        REQUIRE(!nodes.empty());
        Vec mean(static_cast<std::size_t>(n), 0.0);
        for (const Vec& v : nodes) {
            REQUIRE(norm(v) == Approx(1.0).epsilon(1e-12));
            REQUIRE(std::abs(dot(v, u)) < 1e-12);
            mean = add(mean, v);
        }
        if (n != 2)
            for (double c : mean) REQUIRE(std::abs(c) / static_cast<double>(nodes.size()) < 1e-12);
    }
}
