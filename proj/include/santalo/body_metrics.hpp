#ifndef SANTALO_BODY_METRICS_HPP
#define SANTALO_BODY_METRICS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "santalo/body.hpp"
#include "santalo/quadrature1d.hpp"
#include "santalo/sphere.hpp"
#include "santalo/vec.hpp"
#include "santalo/zonal.hpp"

namespace santalo {

namespace detail {

/*
 * rho_K(u) = min { h(K, w) : u . w = 1 }: the radial function as a convex
 * minimization in the affine chart orthogonal to u.  A coarse sweep over the
 * rule nodes seeds the chart center and search radius; the minimum is then
 * located by nested golden-section over the chart coordinates.  Partial
 * minimization of a convex function is convex, so every nesting level is
 * unimodal and the search cannot stall, even on piecewise-linear supports.
 */
inline double radial_by_minimization(const SupportFn& h, std::span<const double> u,
                                     const SphereQuadrature& quad) {
    const int n = static_cast<int>(u.size());
    double best = std::numeric_limits<double>::infinity();
    double h_min = std::numeric_limits<double>::infinity();
    Vec w0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        std::span<const double> v = quad.node(i);
        h_min = std::min(h_min, h(v));
        const double d = dot(u, v);
        if (d < 0.05) continue;
        const double val = h(v) / d;
        if (val < best) {
            best = val;
            w0 = scaled(v, 1.0 / d);
        }
    }
    if (!std::isfinite(best)) throw std::runtime_error("radial_by_minimization: no usable node");
    if (h_min <= 0.0)
        throw std::domain_error("radial_by_minimization: origin must be interior to the body");

    // any w with h(w) <= h(w0) lies in a ball of radius h(w0)/inradius, and
    // the node minimum of h overestimates the inradius only slightly
    const double radius = norm(w0) + 2.0 * best / h_min;
    const Mat frame = rotation_to(normalized(u));
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    const int chart_dim = n - 1;
    Vec y(static_cast<std::size_t>(chart_dim), 0.0);
    Vec point(static_cast<std::size_t>(n));

    std::function<double(int)> min_level = [&](int level) -> double {
        if (level == chart_dim) {
            for (int i = 0; i < n; ++i) {
                double p = w0[static_cast<std::size_t>(i)];
                for (int j = 0; j < chart_dim; ++j)
                    p += y[static_cast<std::size_t>(j)] * frame(i, j + 1);
                point[static_cast<std::size_t>(i)] = p;
            }
            return h(point);
        }
        double a = -radius, b = radius;
        auto at = [&](double alpha) {
            y[static_cast<std::size_t>(level)] = alpha;
            return min_level(level + 1);
        };
        double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
        double f1 = at(x1), f2 = at(x2);
        for (int it = 0; it < 48; ++it) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - golden * (b - a);
                f1 = at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + golden * (b - a);
                f2 = at(x2);
            }
        }
        return at(0.5 * (a + b));
    };

    return std::min(best, min_level(0));
}

}  // namespace detail

/*
 * Boundary distance along u.  Exact closed-form radial evaluators are used
 * when the body carries one; otherwise the value is a coarse minimum over
 * rule directions refined below 1e-6 relative error by line searches.
 */
inline double gauge_radial(const Body& k, std::span<const double> u, const SphereQuadrature& quad) {
    Vec dir = normalized(u);
    if (k.radial) return k.radial(dir);
    return detail::radial_by_minimization(k.support, dir, quad);
}

namespace detail {

/*
 * Exact Steiner point of a convex polygon.  The support function restricted
 * to the normal arc of vertex v is u -> v . u, so the defining sphere
 * integral splits into per-vertex arcs with elementary antiderivatives.
 * Vertices are assumed counterclockwise (make_polytope guarantees this).
 */
inline Vec steiner_point_polygon(const std::vector<Vec>& verts) {
    const std::size_t m = verts.size();
    Vec s(2, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const Vec& prev = verts[(i + m - 1) % m];
        const Vec& v = verts[i];
        const Vec& next = verts[(i + 1) % m];
        // outward normals of the edges meeting at v bound its normal arc
        const double a = std::atan2(prev[0] - v[0], v[1] - prev[1]);
        double b = std::atan2(v[0] - next[0], next[1] - v[1]);
        while (b < a) b += 2.0 * std::numbers::pi;
        const double len = b - a;
        const double c2 = 0.25 * (std::sin(2.0 * b) - std::sin(2.0 * a));
        const double s2 = 0.25 * (std::cos(2.0 * a) - std::cos(2.0 * b));
        // integral of (v . u) u over the arc, u = (cos t, sin t)
        s[0] += v[0] * (0.5 * len + c2) + v[1] * s2;
        s[1] += v[0] * s2 + v[1] * (0.5 * len - c2);
    }
    scale_inplace(s, 1.0 / unit_ball_volume(2));
    return s;
}

}  // namespace detail

/*
 * Steiner point: the support-weighted first moment over the sphere.
 * Polygons take an exact arc-wise path; everything else is quadrature.
 */
inline Vec steiner_point(const Body& k, const SphereQuadrature& quad) {
    if (k.dim == 2 && k.vertices && k.vertices->size() >= 3)
        return detail::steiner_point_polygon(*k.vertices);
    const int n = k.dim;
    Vec s(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < quad.size(); ++i) {
        std::span<const double> u = quad.node(i);
        const double hw = k.support(u) * quad.weights[i];
        for (int d = 0; d < n; ++d) s[static_cast<std::size_t>(d)] += hw * u[static_cast<std::size_t>(d)];
    }
    scale_inplace(s, 1.0 / unit_ball_volume(n));
    return s;
}

/* Mean width: twice the average support over the sphere. */
inline double mean_width(const Body& k, const SphereQuadrature& quad) {
    double acc = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) acc += k.support(quad.node(i)) * quad.weights[i];
    return 2.0 * acc / unit_sphere_area(k.dim);
}

/*
 * Volume.  Dispatch: exact value if recorded, shoelace for 2-D vertex
 * bodies, radial quadrature about the origin when an exact radial evaluator
 * exists, otherwise radial quadrature (1/n) sum rho^n recentered at the
 * Steiner point with rho from the support-based minimization.
 */
inline double volume(const Body& k, const SphereQuadrature& quad) {
    if (k.exact_volume) return *k.exact_volume;
    if (k.dim == 2 && k.vertices) return polygon_area(convex_hull_2d(*k.vertices));
    const int n = k.dim;
    if (k.radial) {
        double acc = 0.0;
        for (std::size_t i = 0; i < quad.size(); ++i)
            acc += quad.weights[i] * std::pow(k.radial(quad.node(i)), n);
        return acc / n;
    }
    const Vec z = steiner_point(k, quad);
    const SupportFn base = k.support;
    SupportFn shifted = [base, z](std::span<const double> u) { return base(u) - dot(z, u); };
    double acc = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const double rho = detail::radial_by_minimization(shifted, quad.node(i), quad);
        acc += quad.weights[i] * std::pow(rho, n);
    }
    return acc / n;
}

/*
 * Volume of the polar body, (1/n) integral of h^{-n} over the sphere.
 * Requires the origin well inside: any node with h below 1e-6 times the
 * largest sample is an error, not a value.  For dim 2 an adaptive angular
 * integration is used because near-degenerate bodies concentrate h^{-2}
 * in spikes far narrower than any fixed rule.
 */
inline double polar_volume(const Body& k, const SphereQuadrature& quad, bool adaptive_2d = true) {
    const int n = k.dim;
    // for 2-D vertex bodies interiority is known exactly; a boundary origin
    // makes the integral diverge without any sample necessarily seeing it
    if (n == 2 && k.vertices && !k.origin_interior)
        throw std::domain_error("polar_volume: origin not interior to the body");
    if (n == 2 && adaptive_2d) {
        auto h_of = [&](double theta) {
            const double c = std::cos(theta), s = std::sin(theta);
            const double uu[2] = {c, s};
            return k.support(std::span<const double>(uu, 2));
        };
        double hmax = 0.0, hmin = std::numeric_limits<double>::infinity();
        const int probes = 512;
        for (int i = 0; i < probes; ++i) {
            const double h = h_of(2.0 * std::numbers::pi * (i + 0.5) / probes);
            hmax = std::max(hmax, h);
            hmin = std::min(hmin, h);
        }
        if (!(hmin > 1e-6 * hmax))
            throw std::domain_error("polar_volume: support too close to zero for a polar volume");
        // an irrational phase and many initial panels keep the bisection
        // points off the symmetry axes of regular bodies, whose periodic
        // integrands can otherwise fool the error estimate at the first level
        const double phase = 0.137562305930756;
        auto f = [&](double theta) { return std::pow(h_of(theta + phase), -2.0); };
        const double coarse = std::pow(hmin, -2.0) * 2.0 * std::numbers::pi;
        const int panels = 16;
        double total = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double a = 2.0 * std::numbers::pi * p / panels;
            const double b = 2.0 * std::numbers::pi * (p + 1) / panels;
            total += adaptive_simpson(f, a, b, 1e-9 * coarse / panels, 52);
        }
        return 0.5 * total;
    }
    double hmax = 0.0;
    Vec h(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) {
        h[i] = k.support(quad.node(i));
        hmax = std::max(hmax, h[i]);
    }
    const double floor_h = 1e-6 * hmax;
    double acc = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        if (h[i] <= floor_h)
            throw std::domain_error("polar_volume: support too close to zero for a polar volume");
        acc += quad.weights[i] * std::pow(h[i], -n);
    }
    return acc / n;
}

struct SantaloOptions {
    int max_iter = 100;
    double grad_tol = 1e-9;
};

/*
 * Santalo point: the minimizer of z -> |(K - z)^polar|, found by damped
 * Newton from the Steiner point.  Gradient and Hessian are the first and
 * second moment sums of (h - z.u)^{-(n+1)} and (n+1)(h - z.u)^{-(n+2)};
 * backtracking keeps every translated support sample positive.  At the
 * optimum the polar body of K - z has centroid o.
 */
inline Vec santalo_point(const Body& k, const SphereQuadrature& quad, SantaloOptions opts = {}) {
    const int n = k.dim;
    const std::size_t m = quad.size();
    Vec h(m);
    double hmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        h[i] = k.support(quad.node(i));
        hmax = std::max(hmax, h[i]);
    }
    const double floor_h = 1e-9 * hmax;
    Vec z = steiner_point(k, quad);

    auto margins = [&](const Vec& zz, Vec& out) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            out[i] = h[i] - dot(zz, quad.node(i));
            worst = std::min(worst, out[i]);
        }
        return worst;
    };
    auto objective = [&](const Vec& mg) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += quad.weights[i] * std::pow(mg[i], -n);
        return acc / n;
    };

    Vec mg(m), mg_trial(m);
    if (margins(z, mg) <= floor_h)
        throw std::domain_error("santalo_point: Steiner point too close to the boundary");
    double f = objective(mg);

    for (int it = 0; it < opts.max_iter; ++it) {
        Vec grad(static_cast<std::size_t>(n), 0.0);
        Mat hess(n);
        double scale = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double p1 = quad.weights[i] * std::pow(mg[i], -(n + 1));
            const double p2 = (n + 1.0) * quad.weights[i] * std::pow(mg[i], -(n + 2));
            scale += p1;
            std::span<const double> u = quad.node(i);
            for (int a = 0; a < n; ++a) {
                grad[static_cast<std::size_t>(a)] += p1 * u[static_cast<std::size_t>(a)];
                for (int b = 0; b < n; ++b)
                    hess(a, b) += p2 * u[static_cast<std::size_t>(a)] * u[static_cast<std::size_t>(b)];
            }
        }
        if (norm(grad) <= opts.grad_tol * scale) break;
        Vec step = solve_linear(hess, grad);
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            Vec z_trial = z;
            for (int a = 0; a < n; ++a) z_trial[static_cast<std::size_t>(a)] -= alpha * step[static_cast<std::size_t>(a)];
            if (margins(z_trial, mg_trial) > floor_h) {
                const double f_trial = objective(mg_trial);
                if (f_trial <= f) {
                    z = std::move(z_trial);
                    mg = mg_trial;
                    f = f_trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }
    return z;
}

/* Zonoid with support h(u) = sum of w |u . v| over the given segments. */
inline Body zonoid(int dim, std::vector<std::pair<Vec, double>> segments) {
    for (const auto& [v, w] : segments) {
        if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("zonoid: bad direction");
        if (w < 0.0) throw std::invalid_argument("zonoid: negative weight");
    }
    Body k;
    k.dim = dim;
    auto segs = std::make_shared<std::vector<std::pair<Vec, double>>>(std::move(segments));
    k.support = [segs](std::span<const double> u) {
        double s = 0.0;
        for (const auto& [v, w] : *segs) s += w * std::abs(dot(v, u));
        return s;
    };
    k.symmetric = true;
    k.label = "zonoid";
    return k;
}

/*
 * Zonoid generated by an even zonal measure: h(u) = integral of |u . v|.
 * The latitude disintegration around the pole makes this a 1-D sum of
 * subsphere means; odd measures are rejected.
 */
inline Body zonoid(const ZonalMeasure& mu, int n, int sub_res = 128) {
    const std::vector<ZonalLatitude> lats = zonal_latitudes(mu, n);
    double odd = 0.0, scale = 0.0;
    for (const ZonalLatitude& l : lats) {
        odd += l.w * l.t;
        scale += std::abs(l.w);
    }
    for (const ZonalLatitude& l : lats)
        if (l.w < -1e-12 * std::max(1.0, scale))
            throw std::invalid_argument("zonoid: measure must be non-negative");
    if (std::abs(odd) > 1e-9 * std::max(1.0, scale))
        throw std::invalid_argument("zonoid: measure must be even in the latitude");

    Vec pole = basis_vector(n, 0);
    std::vector<std::vector<Vec>> rings;
    rings.reserve(lats.size());
    const std::vector<Vec> equator_nodes = subsphere_nodes(pole, sub_res);
    Body k;
    k.dim = n;
    auto lat_copy = std::make_shared<std::vector<ZonalLatitude>>(lats);
    auto ring = std::make_shared<std::vector<Vec>>(equator_nodes);
    k.support = [lat_copy, ring, n](std::span<const double> u) {
        double acc = 0.0;
        for (const ZonalLatitude& l : *lat_copy) {
            if (l.w == 0.0) continue;
            double mean;
            if (l.t >= 1.0 - 1e-13 || l.t <= -1.0 + 1e-13) {
                mean = std::abs(u[0]);
            } else {
                const double s = std::sqrt(1.0 - l.t * l.t);
                double m = 0.0;
                for (const Vec& y : *ring) {
                    double d = l.t * u[0];
                    for (int i = 1; i < n; ++i)
                        d += s * y[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
                    m += std::abs(d);
                }
                mean = m / static_cast<double>(ring->size());
            }
            acc += l.w * mean;
        }
        return acc;
    };
    k.symmetric = true;
    k.label = "zonoid(" + mu.label + ")";
    return k;
}

/* Exact polar polygon of a 2-D vertex body with the origin interior. */
inline Body polar_polygon(const Body& k) {
    if (k.dim != 2 || !k.vertices) throw std::invalid_argument("polar_polygon: need 2-D vertices");
    const std::vector<Vec> hull = convex_hull_2d(*k.vertices);
    std::vector<Vec> polar;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec& p = hull[i];
        const Vec& q = hull[(i + 1) % hull.size()];
        const double nx = q[1] - p[1], ny = p[0] - q[0];
        const double h = nx * p[0] + ny * p[1];
        if (h <= 0.0) throw std::domain_error("polar_polygon: origin not interior");
        polar.push_back(Vec{nx / h, ny / h});
    }
    return make_polytope(2, std::move(polar), k.label + "_polar");
}

/* Polar body via gauge-support duality: h(K^polar, u) = |u| / rho_K(u). */
inline Body polar_body(const Body& k, const SphereQuadrature& quad) {
    Body p;
    p.dim = k.dim;
    auto base = std::make_shared<Body>(k);
    auto quad_copy = std::make_shared<SphereQuadrature>(quad);
    p.support = [base, quad_copy](std::span<const double> u) {
        return norm(u) / gauge_radial(*base, u, *quad_copy);
    };
    p.symmetric = k.symmetric;
    p.origin_interior = k.origin_interior;
    p.label = k.label + "_polar";
    return p;
}

}  // namespace santalo

#endif
