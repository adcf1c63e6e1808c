#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "santalo/grid_function.hpp"
#include "santalo/legendre.hpp"
#include "santalo/vec.hpp"

using namespace santalo;
using Catch::Approx;

namespace {

/* Random convex function: positive-definite quadratic plus a max of affine
   pieces.  Sampled exactly, so grid convexity must hold to slack zero. */
GridFunction random_convex_grid(std::mt19937_64& rng, int dim, int nodes) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> q(static_cast<std::size_t>(dim * dim));
    for (double& v : q) v = 0.5 * u(rng);
    std::vector<Vec> planes;
    std::vector<double> offsets;
    for (int k = 0; k < 3; ++k) {
        Vec a(static_cast<std::size_t>(dim));
        for (double& v : a) v = u(rng);
        planes.push_back(a);
        offsets.push_back(u(rng));
    }
    auto fn = [dim, q, planes, offsets](std::span<const double> x) {
        double quad = 0.0;
        for (int i = 0; i < dim; ++i) {
            double row = 0.2 * x[static_cast<std::size_t>(i)];
            for (int j = 0; j < dim; ++j)
                row += q[static_cast<std::size_t>(i * dim + j)] * x[static_cast<std::size_t>(j)];
            // sum of squares of A x keeps the quadratic part convex
            quad += row * row;
        }
        double aff = -1e300;
        for (std::size_t k = 0; k < planes.size(); ++k)
            aff = std::max(aff, dot(planes[k], x) + offsets[k]);
        return 0.5 * quad + aff;
    };
    return make_grid_cube(dim, 3.0, nodes, fn);
}

}  // namespace

TEST_CASE("grid layout, interpolation and reflection") {
    auto fn = [](std::span<const double> x) { return x[0] + 10.0 * x[1]; };
    const GridFunction g = make_grid(2, std::vector<double>{-1.0, 0.0}, std::vector<double>{1.0, 2.0},
                                     std::vector<int>{5, 9}, fn);
    REQUIRE(g.size() == 45);
    REQUIRE(g.step(0) == Approx(0.5));
    REQUIRE(g.step(1) == Approx(0.25));
    REQUIRE(g.at(2, 4) == Approx(0.0 + 10.0 * 1.0));
    const Vec p = {0.3, 1.1};
    REQUIRE(g.interpolate(p) == Approx(0.3 + 11.0).margin(1e-12));
    const Vec outside = {1.5, 1.0};
    REQUIRE(std::isinf(g.interpolate(outside)));

    const GridFunction r = reflected(g);
    REQUIRE(r.lo[0] == Approx(-1.0));
    REQUIRE(r.lo[1] == Approx(-2.0));
    const Vec q = {0.5, -1.25};
    REQUIRE(r.interpolate(q) == Approx(-0.5 + 10.0 * 1.25).margin(1e-12));
}

TEST_CASE("make_grid rejects malformed input") {
    auto zero = [](std::span<const double>) { return 0.0; };
    REQUIRE_THROWS_AS(make_grid(4, std::vector<double>{0, 0, 0, 0}, std::vector<double>{1, 1, 1, 1},
                                std::vector<int>{4, 4, 4, 4}, zero),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(make_grid(1, std::vector<double>{0.0}, std::vector<double>{1.0},
                                std::vector<int>{1}, zero),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(make_grid(1, std::vector<double>{1.0}, std::vector<double>{0.0},
                                std::vector<int>{4}, zero),
                      std::invalid_argument);
    auto minus_inf = [](std::span<const double>) { return -kPlusInf; };
    REQUIRE_THROWS_AS(make_grid_cube(1, 1.0, 4, minus_inf), std::invalid_argument);
}

TEST_CASE("grid_sum propagates infinity") {
    auto f0 = [](std::span<const double> x) { return x[0] < 0.0 ? kPlusInf : 1.0; };
    auto f1 = [](std::span<const double>) { return 2.0; };
    const GridFunction a = make_grid_cube(1, 1.0, 5, f0);
    const GridFunction b = make_grid_cube(1, 1.0, 5, f1);
    const GridFunction s = grid_sum(a, b);
    REQUIRE(std::isinf(s.at(0)));
    REQUIRE(s.at(4) == Approx(3.0));
}

TEST_CASE("conjugate of the square norm half is itself") {
    for (int dim : {1, 2}) {
        auto fn = [](std::span<const double> x) { return 0.5 * norm2(x); };
        const GridFunction phi = make_grid_cube(dim, 6.0, 129, fn);
        const GridFunction conj = legendre(phi);
        // sample well inside the dual box where the sup is attained interior
        for (int i = 0; i < conj.counts[0]; ++i) {
            const int j = dim > 1 ? conj.counts[1] / 3 : 0;
            Vec y(static_cast<std::size_t>(dim));
            y[0] = conj.node_coord(0, i);
            if (dim > 1) y[1] = conj.node_coord(1, j);
            if (norm(y) > 4.0) continue;
            // discrete sup misses the true maximizer by at most half a step
            // per axis: error <= dim * step^2 / 8
            REQUIRE(conj.at(i, j) == Approx(0.5 * norm2(y)).margin(3e-3));
        }
    }
}

TEST_CASE("conjugate of a cube indicator is the l1 norm, exactly") {
    auto fn = [](std::span<const double> x) {
        return (std::abs(x[0]) <= 1.0 + 1e-12 && std::abs(x[1]) <= 1.0 + 1e-12) ? 0.0 : kPlusInf;
    };
    // half-width 2 with 129 nodes puts the faces x = +-1 exactly on nodes
    const GridFunction phi = make_grid_cube(2, 2.0, 129, fn);
    std::array<double, 3> dlo{-3.0, -3.0, 0.0}, dhi{3.0, 3.0, 0.0};
    std::array<int, 3> dc{61, 61, 1};
    const GridFunction conj = legendre_onto(phi, dlo, dhi, dc);
    for (int i = 0; i < dc[0]; ++i)
        for (int j = 0; j < dc[1]; ++j) {
            const double y0 = conj.node_coord(0, i), y1 = conj.node_coord(1, j);
            REQUIRE(conj.at(i, j) == Approx(std::abs(y0) + std::abs(y1)).margin(1e-12));
        }
}

TEST_CASE("conjugate of cubed norm over three on the unit disk") {
    auto fn = [](std::span<const double> x) {
        const double r = norm(x);
        return r * r * r / 3.0;
    };
    const GridFunction phi = make_grid_cube(2, 2.0, 193, fn);
    std::array<double, 3> dlo{-1.0, -1.0, 0.0}, dhi{1.0, 1.0, 0.0};
    std::array<int, 3> dc{41, 41, 1};
    const GridFunction conj = legendre_onto(phi, dlo, dhi, dc);
    for (int i = 0; i < dc[0]; ++i)
        for (int j = 0; j < dc[1]; ++j) {
            Vec y = {conj.node_coord(0, i), conj.node_coord(1, j)};
            if (norm(y) > 1.0) continue;
            const double expected = 2.0 / 3.0 * std::pow(norm(y), 1.5);
            REQUIRE(conj.at(i, j) == Approx(expected).margin(1e-3));
        }
}

TEST_CASE("biconjugation reproduces random convex functions within the slack budget") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        const int dim = rep % 2 == 0 ? 1 : 2;
        const GridFunction phi = random_convex_grid(rng, dim, dim == 1 ? 257 : 65);
        const GridFunction conj = legendre(phi);
        const GridFunction back = legendre_onto(conj, phi.lo, phi.hi, phi.counts);
        const double tol = grid_slack(phi);
        for (std::size_t k = 0; k < phi.values.size(); ++k) {
            REQUIRE(back.values[k] <= phi.values[k] + 1e-9);  // biconjugate never exceeds
            REQUIRE(back.values[k] >= phi.values[k] - tol);
        }
    }
}

TEST_CASE("conjugation reverses pointwise order") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const GridFunction phi = random_convex_grid(rng, 2, 33);
    GridFunction psi = phi;
    for (double& v : psi.values) v += u(rng);
    std::array<double, 3> dlo{0, 0, 0}, dhi{0, 0, 0};
    default_dual_box(phi, dlo, dhi);
    const auto lo = std::span<const double>(dlo.data(), 2);
    const auto hi = std::span<const double>(dhi.data(), 2);
    const auto nc = std::span<const int>(phi.counts.data(), 2);
    const GridFunction cphi = legendre(phi, lo, hi, nc);
    const GridFunction cpsi = legendre(psi, lo, hi, nc);
    for (std::size_t k = 0; k < cphi.values.size(); ++k)
        REQUIRE(cphi.values[k] >= cpsi.values[k] - 1e-12);
}

TEST_CASE("epi-sum of interval indicators is the indicator of the sum interval") {
    auto ind = [](double a, double b) {
        return [a, b](std::span<const double> x) {
            return (x[0] >= a - 1e-12 && x[0] <= b + 1e-12) ? 0.0 : kPlusInf;
        };
    };
    const GridFunction f =
        make_grid(1, std::vector<double>{-1.0}, std::vector<double>{1.0}, std::vector<int>{33},
                  ind(-1.0, 0.5));
    const GridFunction g =
        make_grid(1, std::vector<double>{-1.0}, std::vector<double>{1.0}, std::vector<int>{33},
                  ind(-0.25, 1.0));
    const GridFunction s = inf_convolution(f, g);
    for (int i = 0; i < s.counts[0]; ++i) {
        const double z = s.node_coord(0, i);
        if (z >= -1.25 - 1e-9 && z <= 1.5 + 1e-9) {
            REQUIRE(std::abs(s.at(i)) <= 1e-10);
        } else {
            const double dist = std::max(-1.25 - z, z - 1.5);
            REQUIRE(s.at(i) >= 0.25 * dist);
        }
    }
}

TEST_CASE("epi-sum of two half square norms is the quarter square norm") {
    auto fn = [](std::span<const double> x) { return 0.5 * norm2(x); };
    const GridFunction phi = make_grid_cube(1, 4.0, 129, fn);
    const GridFunction s = inf_convolution(phi, phi);
    for (int i = 0; i < s.counts[0]; ++i) {
        const double z = s.node_coord(0, i);
        if (std::abs(z) > 6.0) continue;
        REQUIRE(s.at(i) == Approx(0.25 * z * z).margin(5e-3));
    }
}

TEST_CASE("epi-sum matches the exhaustive pairwise oracle on aligned lattices") {
    // same step on both factors: the piecewise-linear epi-sum is attained on
    // the sum lattice, so a full O(N^2) pair scan gives the node-data optimum
    std::mt19937_64 rng(17);
    const GridFunction f = random_convex_grid(rng, 1, 65);
    const GridFunction g = random_convex_grid(rng, 1, 65);
    const GridFunction s = inf_convolution(f, g);
    REQUIRE(s.counts[0] == 65);

    // Fenchel-Young makes the conjugate path a certified lower bound of the
    // pair minimum; it can undershoot by at most one dual step of slope error
    std::array<double, 3> flo{0, 0, 0}, fhi{0, 0, 0}, glo{0, 0, 0}, ghi{0, 0, 0};
    default_dual_box(f, flo, fhi);
    default_dual_box(g, glo, ghi);
    const double dual_step = (std::max(fhi[0], ghi[0]) - std::min(flo[0], glo[0])) / 64.0;

    for (int i = 1; i + 1 < s.counts[0]; ++i) {
        const double z = s.node_coord(0, i);
        double best = kPlusInf;
        for (int a = 0; a < f.counts[0]; ++a)
            for (int b = 0; b < g.counts[0]; ++b) {
                if (std::abs(f.node_coord(0, a) + g.node_coord(0, b) - z) > 1e-9) continue;
                best = std::min(best, f.at(a) + g.at(b));
            }
        const double undershoot = dual_step * (std::abs(z) + 6.0);
        REQUIRE(s.at(i) <= best + 1e-9);
        REQUIRE(s.at(i) >= best - undershoot);
    }
}

TEST_CASE("conjugation turns epi-sums into sums") {
    std::mt19937_64 rng(23);
    const GridFunction f = random_convex_grid(rng, 1, 129);
    const GridFunction g = random_convex_grid(rng, 1, 129);
    const GridFunction s = inf_convolution(f, g);
    std::array<double, 3> flo{0, 0, 0}, fhi{0, 0, 0}, glo{0, 0, 0}, ghi{0, 0, 0};
    default_dual_box(f, flo, fhi);
    default_dual_box(g, glo, ghi);
    // the epi-sum's slopes live in the intersection of the factor ranges
    std::array<double, 3> dlo{std::max(flo[0], glo[0]), 0, 0};
    std::array<double, 3> dhi{std::min(fhi[0], ghi[0]), 0, 0};
    REQUIRE(dlo[0] < dhi[0]);
    std::array<int, 3> dc{129, 1, 1};
    const GridFunction cs = legendre_onto(s, dlo, dhi, dc);
    const GridFunction cf = legendre_onto(f, dlo, dhi, dc);
    const GridFunction cg = legendre_onto(g, dlo, dhi, dc);
    const double tol = grid_slack(s) + 1e-6;
    for (std::size_t k = 0; k < cs.values.size(); ++k)
        REQUIRE(cs.values[k] == Approx(cf.values[k] + cg.values[k]).margin(tol));
}

TEST_CASE("moreau envelope reproduces the analytic smoothing of the absolute value") {
    auto fn = [](std::span<const double> x) { return std::abs(x[0]); };
    const GridFunction phi = make_grid_cube(1, 4.0, 257, fn);
    const double t = 0.5;
    const GridFunction env = moreau(phi, t);
    for (int i = 0; i < env.counts[0]; ++i) {
        const double x = env.node_coord(0, i);
        if (std::abs(x) > 3.0) continue;  // near the box edge the envelope feels truncation
        const double expected = std::abs(x) <= t ? x * x / (2.0 * t) : std::abs(x) - 0.5 * t;
        // the kink of the dual integrand sits between dual nodes; the sup
        // can undershoot by one dual step times the local slope
        REQUIRE(env.at(i) == Approx(expected).margin(2e-2));
    }
}

TEST_CASE("moreau envelope lower-bounds the input and decreases in t") {
    std::mt19937_64 rng(41);
    const GridFunction phi = random_convex_grid(rng, 2, 33);
    const GridFunction e1 = moreau(phi, 0.5);
    const GridFunction e2 = moreau(phi, 1.5);
    for (std::size_t k = 0; k < phi.values.size(); ++k) {
        REQUIRE(e1.values[k] <= phi.values[k] + 1e-9);
        REQUIRE(e2.values[k] <= e1.values[k] + 1e-9);
    }
    REQUIRE_THROWS_AS(moreau(phi, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(moreau(phi, -1.0), std::invalid_argument);
}

TEST_CASE("coercivity certificates") {
    auto norm_fn = [](std::span<const double> x) { return norm(x); };
    const GridFunction g1 = make_grid_cube(2, 5.0, 41, norm_fn);
    const auto fit1 = coercivity_margin(g1);
    REQUIRE(fit1.has_value());
    REQUIRE(fit1->gamma == Approx(1.0).margin(1e-9));
    REQUIRE(fit1->beta == Approx(0.0).margin(1e-9));

    auto sq = [](std::span<const double> x) { return 0.5 * norm2(x); };
    const GridFunction g2 = make_grid_cube(2, 5.0, 41, sq);
    const auto fit2 = coercivity_margin(g2);
    REQUIRE(fit2.has_value());
    REQUIRE(fit2->gamma == Approx(2.5).margin(1e-9));

    auto flat = [](std::span<const double>) { return 0.0; };
    const GridFunction g3 = make_grid_cube(2, 5.0, 9, flat);
    REQUIRE(!coercivity_margin(g3).has_value());

    auto tilt = [](std::span<const double> x) { return x[0]; };
    const GridFunction g4 = make_grid_cube(2, 5.0, 9, tilt);
    REQUIRE(!coercivity_margin(g4).has_value());
}

TEST_CASE("grid convexity checker") {
    auto sq = [](std::span<const double> x) { return 0.5 * norm2(x); };
    REQUIRE(is_convex_grid(make_grid_cube(2, 3.0, 21, sq)));

    auto saddle = [](std::span<const double> x) { return x[0] * x[0] - x[1] * x[1]; };
    REQUIRE(!is_convex_grid(make_grid_cube(2, 3.0, 21, saddle)));

    auto cube_ind = [](std::span<const double> x) {
        return (std::abs(x[0]) <= 1.0 + 1e-12 && std::abs(x[1]) <= 1.0 + 1e-12) ? 0.0 : kPlusInf;
    };
    REQUIRE(is_convex_grid(make_grid_cube(2, 2.0, 17, cube_ind)));

    GridFunction islands = make_grid_cube(1, 2.0, 5, [](std::span<const double>) { return 0.0; });
    islands.values = {0.0, kPlusInf, 0.0, kPlusInf, 0.0};
    REQUIRE(!is_convex_grid(islands));
}

TEST_CASE("grid csv round trip") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    GridFunction g = make_grid(2, std::vector<double>{-1.5, 0.25}, std::vector<double>{2.5, 3.0},
                               std::vector<int>{7, 5},
                               [&](std::span<const double>) { return u(rng); });
    g.at(3, 2) = kPlusInf;
    const std::string path = "round_trip_grid.csv";
    write_grid_csv(path, g);
    const GridFunction r = read_grid_csv(path);
    std::remove(path.c_str());
    REQUIRE(r.dim == g.dim);
    for (int a = 0; a < 2; ++a) {
        REQUIRE(r.lo[static_cast<std::size_t>(a)] == Approx(g.lo[static_cast<std::size_t>(a)]));
        REQUIRE(r.hi[static_cast<std::size_t>(a)] == Approx(g.hi[static_cast<std::size_t>(a)]));
        REQUIRE(r.counts[static_cast<std::size_t>(a)] == g.counts[static_cast<std::size_t>(a)]);
    }
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        if (std::isinf(g.values[k]))
            REQUIRE(std::isinf(r.values[k]));
        else
            REQUIRE(r.values[k] == Approx(g.values[k]).margin(1e-15));
    }
}

TEST_CASE("dual box covers the attained slope range") {
    auto sq = [](std::span<const double> x) { return 0.5 * x[0] * x[0]; };
    const GridFunction phi = make_grid_cube(1, 4.0, 65, sq);
    std::array<double, 3> dlo{0, 0, 0}, dhi{0, 0, 0};
    default_dual_box(phi, dlo, dhi);
    REQUIRE(dlo[0] < -3.9);
    REQUIRE(dhi[0] > 3.9);
    REQUIRE(dhi[0] < 5.0);

    auto flat = [](std::span<const double>) { return 7.0; };
    const GridFunction c = make_grid_cube(1, 4.0, 65, flat);
    default_dual_box(c, dlo, dhi);
    REQUIRE(dhi[0] - dlo[0] >= 2.0);  // degenerate range widens to a real window
}
