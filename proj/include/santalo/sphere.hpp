#ifndef SANTALO_SPHERE_HPP
#define SANTALO_SPHERE_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "santalo/quadrature1d.hpp"
#include "santalo/vec.hpp"

namespace santalo {

/* Volume of the unit ball in R^n. */
inline double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/* Surface area of the unit sphere in R^n, i.e. n times the ball volume. */
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

inline void require_unit(std::span<const double> u, double tol = 1e-9) {
    if (std::abs(norm(u) - 1.0) > tol)
        throw std::invalid_argument("expected a unit vector, |u| deviates by more than tolerance");
}

/*
 * Surface-measure quadrature on the unit sphere: sum of weights equals the
 * sphere area.  Probability-measure integrals divide by unit_sphere_area(dim)
 * at the call site.
 */
struct SphereQuadrature {
    int dim = 0;
    int resolution = 0;           // 0 for Monte Carlo rules
    std::vector<double> nodes;    // flat, size() * dim
    std::vector<double> weights;  // surface-measure weights

    std::size_t size() const { return weights.size(); }

    std::span<const double> node(std::size_t i) const {
        return {nodes.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

namespace detail {

/*
 * Latitude rule on [-1, 1] against the measure (1 - t^2)^((n-3)/2) dt.
 * For n = 3 the measure is flat and a Gauss-Legendre rule mirrored across 0
 * is used; the mirroring makes |t| and every even piecewise-polynomial of t
 * integrate exactly, which the moment checks rely on.  For n >= 4 the
 * substitution t = cos(theta) gives the smooth weight sin(theta)^{n-2}.
 */
inline Rule1D latitude_rule(int n, int m) {
    Rule1D r;
    if (n == 3) {
        const int half = (m + 1) / 2;
        Rule1D g = gauss_legendre_ab(half, 0.0, 1.0);
        for (int i = 0; i < half; ++i) {
            r.nodes.push_back(-g.nodes[static_cast<std::size_t>(half - 1 - i)]);
            r.weights.push_back(g.weights[static_cast<std::size_t>(half - 1 - i)]);
        }
        for (int i = 0; i < half; ++i) {
            r.nodes.push_back(g.nodes[static_cast<std::size_t>(i)]);
            r.weights.push_back(g.weights[static_cast<std::size_t>(i)]);
        }
    } else {
        Rule1D g = gauss_legendre_ab(m, 0.0, std::numbers::pi);
        for (int i = 0; i < m; ++i) {
            const double th = g.nodes[static_cast<std::size_t>(i)];
            r.nodes.push_back(std::cos(th));
            r.weights.push_back(g.weights[static_cast<std::size_t>(i)] *
                                std::pow(std::sin(th), n - 2));
        }
    }
    return r;
}

inline SphereQuadrature circle_quadrature(int m) {
    SphereQuadrature q;
    q.dim = 2;
    const int count = 2 * m;
    const double w = 2.0 * std::numbers::pi / count;
    q.nodes.reserve(static_cast<std::size_t>(count) * 2);
    q.weights.assign(static_cast<std::size_t>(count), w);
    for (int k = 0; k < count; ++k) {
        const double phi = (k + 0.5) * w;
        q.nodes.push_back(std::cos(phi));
        q.nodes.push_back(std::sin(phi));
    }
    return q;
}

}  // namespace detail

struct QuadratureOptions {
    bool monte_carlo = false;  // permitted only for dim >= 6
    std::uint64_t seed = 1;
    int sample_count = 100000;
};

/*
 * Builds the sphere rule.  dim = 2: 2 * resolution equally spaced nodes.
 * dim = 3: product of a mirrored Gauss-Legendre latitude rule (resolution
 * nodes, pole axis e_1) with 2 * resolution azimuth nodes.  dim >= 4:
 * latitude rule times the recursive rule one dimension down, embedded in the
 * coordinates orthogonal to e_1.  Monte Carlo sampling (antithetic pairs,
 * equal weights) is available for dim >= 6 behind the options flag.
 */
inline SphereQuadrature build_quadrature(int dim, int resolution, QuadratureOptions opts = {}) {
    if (dim < 2) throw std::invalid_argument("build_quadrature: dim < 2");
    if (resolution < 4) throw std::invalid_argument("build_quadrature: resolution < 4");
    if (opts.monte_carlo) {
        if (dim < 6)
            throw std::invalid_argument("build_quadrature: monte_carlo requires dim >= 6");
        SphereQuadrature q;
        q.dim = dim;
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const int pairs = (opts.sample_count + 1) / 2;
        const double w = unit_sphere_area(dim) / (2.0 * pairs);
        for (int i = 0; i < pairs; ++i) {
            Vec u(static_cast<std::size_t>(dim));
            double n2 = 0.0;
            do {
                for (double& x : u) x = gauss(rng);
                n2 = norm2(u);
            } while (n2 < 1e-12);
            scale_inplace(u, 1.0 / std::sqrt(n2));
            for (double x : u) q.nodes.push_back(x);
            q.weights.push_back(w);
            for (double x : u) q.nodes.push_back(-x);
            q.weights.push_back(w);
        }
        return q;
    }
    if (dim == 2) {
        SphereQuadrature q = detail::circle_quadrature(resolution);
        q.resolution = resolution;
        return q;
    }

    const SphereQuadrature inner =
        (dim == 3) ? detail::circle_quadrature(resolution) : build_quadrature(dim - 1, resolution);
    const Rule1D lat = detail::latitude_rule(dim, resolution);
    SphereQuadrature q;
    q.dim = dim;
    q.resolution = resolution;
    q.nodes.reserve(lat.nodes.size() * inner.size() * static_cast<std::size_t>(dim));
    q.weights.reserve(lat.nodes.size() * inner.size());
    for (std::size_t i = 0; i < lat.nodes.size(); ++i) {
        const double t = lat.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        for (std::size_t j = 0; j < inner.size(); ++j) {
            q.nodes.push_back(t);
            std::span<const double> v = inner.node(j);
            for (int k = 0; k < dim - 1; ++k) q.nodes.push_back(s * v[static_cast<std::size_t>(k)]);
            q.weights.push_back(lat.weights[i] * inner.weights[j]);
        }
    }
    return q;
}

/*
 * Deterministic rotation taking e_1 to u: the plane rotation in span(e_1, u)
 * that fixes the orthogonal complement.  Proper orthogonal by construction.
 */
inline Mat rotation_to(std::span<const double> u) {
    const int n = static_cast<int>(u.size());
    if (n < 2) throw std::invalid_argument("rotation_to: dim < 2");
    require_unit(u);
    const double c = u[0];
    Mat r = Mat::identity(n);
    Vec w = to_vec(u);
    w[0] -= c;  // component of u orthogonal to e_1
    const double s = norm(w);
    if (s < 1e-14) {
        if (c > 0.0) return r;
        r(0, 0) = -1.0;  // u = -e_1: rotate by pi in the (e_1, e_2) plane
        r(1, 1) = -1.0;
        return r;
    }
    scale_inplace(w, 1.0 / s);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double e_i = (i == 0) ? 1.0 : 0.0;
            const double e_j = (j == 0) ? 1.0 : 0.0;
            const double wi = w[static_cast<std::size_t>(i)];
            const double wj = w[static_cast<std::size_t>(j)];
            r(i, j) += (c - 1.0) * (e_i * e_j + wi * wj) + s * (wi * e_j - e_i * wj);
        }
    return r;
}

/*
 * Equal-weight nodes approximating the rotation-invariant probability
 * measure on the subsphere orthogonal to u.  Exact for dim 2 (two points)
 * and dim 3 (equally spaced circle); seeded antithetic sampling for
 * dim >= 4.  Every node v satisfies |v . u| <= 1e-12 and |v| = 1.
 */
inline std::vector<Vec> subsphere_nodes(std::span<const double> u, int m,
                                        std::uint64_t seed = 12345) {
    const int n = static_cast<int>(u.size());
    require_unit(u);
    std::vector<Vec> out;
    if (n == 2) {
        Vec v{-u[1], u[0]};
        out.push_back(v);
        out.push_back(negated(v));
        return out;
    }
    if (n == 3) {
        if (m < 1) throw std::invalid_argument("subsphere_nodes: m < 1");
        const Mat r = rotation_to(u);
        Vec b1(3), b2(3);
        for (int i = 0; i < 3; ++i) {
            b1[static_cast<std::size_t>(i)] = r(i, 1);
            b2[static_cast<std::size_t>(i)] = r(i, 2);
        }
        out.reserve(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            const double a = 2.0 * std::numbers::pi * (k + 0.5) / m;
            Vec v(3);
            for (int i = 0; i < 3; ++i)
                v[static_cast<std::size_t>(i)] = std::cos(a) * b1[static_cast<std::size_t>(i)] +
                                                 std::sin(a) * b2[static_cast<std::size_t>(i)];
            out.push_back(std::move(v));
        }
        return out;
    }
    if (m < 2) throw std::invalid_argument("subsphere_nodes: m < 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int pairs = (m + 1) / 2;
    for (int k = 0; k < pairs; ++k) {
        Vec v(static_cast<std::size_t>(n));
        double n2 = 0.0;
        do {
            for (double& x : v) x = gauss(rng);
            const double p = dot(v, u);
            for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] -= p * u[static_cast<std::size_t>(i)];
            const double p2 = dot(v, u);  // second pass keeps |v.u| at roundoff level
            for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] -= p2 * u[static_cast<std::size_t>(i)];
            n2 = norm2(v);
        } while (n2 < 1e-12);
        scale_inplace(v, 1.0 / std::sqrt(n2));
        out.push_back(v);
        out.push_back(negated(v));
    }
    return out;
}

}  // namespace santalo

#endif
