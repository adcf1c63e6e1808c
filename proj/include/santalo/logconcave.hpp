#ifndef SANTALO_LOGCONCAVE_HPP
#define SANTALO_LOGCONCAVE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "santalo/body.hpp"
#include "santalo/grid_function.hpp"
#include "santalo/legendre.hpp"
#include "santalo/quadrature1d.hpp"
#include "santalo/sphere.hpp"
#include "santalo/vec.hpp"
#include "santalo/zonal.hpp"

namespace santalo {

/*
 * Upper semi-continuous log-concave function f = e^(-phi) with phi proper
 * convex and coercive.  The grid is always present; optional closed-form
 * evaluators for phi and for the support function h(f,.) = L(phi) let the
 * calculus skip grid interpolation wherever an exact value exists.  The
 * support evaluator may also be a trusted numerical pipeline (for images of
 * endomorphisms) - either way it is the preferred h source.
 */
struct LogConcaveFn {
    int dim = 0;
    GridFunction phi;
    std::function<double(std::span<const double>)> phi_exact;
    std::function<double(std::span<const double>)> support_exact;
    std::optional<GridFunction> support_grid;
    std::string label;

    double value(std::span<const double> x) const {
        const double p = phi_exact ? phi_exact(x) : phi.interpolate(x);
        return std::isinf(p) ? 0.0 : std::exp(-p);
    }
};

inline LogConcaveFn logconcave_from_grid(GridFunction phi, std::string label = "grid") {
    if (!phi.proper()) throw std::invalid_argument("logconcave_from_grid: improper exponent");
    LogConcaveFn f;
    f.dim = phi.dim;
    f.phi = std::move(phi);
    f.label = std::move(label);
    return f;
}

/* ---- families ------------------------------------------------------------ */

/* f = 1 on K, 0 off K; exponent 0 / +inf.  h(f,.) is the support function. */
inline LogConcaveFn indicator_fn(const Body& k, double half_width, int nodes_per_axis) {
    auto body = std::make_shared<Body>(k);
    auto phi_exact = [body](std::span<const double> x) {
        return body_contains(*body, x) ? 0.0 : kPlusInf;
    };
    LogConcaveFn f;
    f.dim = k.dim;
    f.phi = make_grid_cube(k.dim, half_width, nodes_per_axis, phi_exact);
    f.phi_exact = phi_exact;
    f.support_exact = [body](std::span<const double> x) { return body->support(x); };
    f.label = "indicator(" + k.label + ")";
    return f;
}

/* f = e^(-(1/p)||x||_K^p); the support function is (1/q) h(K,.)^q conjugate. */
inline LogConcaveFn norm_power_fn(const Body& k, double p, double half_width, int nodes_per_axis) {
    if (!(p > 1.0)) throw std::invalid_argument("norm_power_fn: p must exceed 1");
    auto body = std::make_shared<Body>(k);
    const double q = p / (p - 1.0);
    auto phi_exact = [body, p](std::span<const double> x) {
        const double g = body_gauge(*body, x);
        return std::isinf(g) ? kPlusInf : std::pow(g, p) / p;
    };
    LogConcaveFn f;
    f.dim = k.dim;
    f.phi = make_grid_cube(k.dim, half_width, nodes_per_axis, phi_exact);
    f.phi_exact = phi_exact;
    f.support_exact = [body, q](std::span<const double> x) {
        return std::pow(body->support(x), q) / q;
    };
    f.label = "norm_power(" + k.label + ",p=" + std::to_string(p) + ")";
    return f;
}

/* f = a e^(-0.5 sum ((x_i - y_i)/e_i)^2) with diagonal shape axes e. */
inline LogConcaveFn gaussian_fn(int dim, double a, Vec center, Vec axes, double half_width,
                                int nodes_per_axis) {
    if (!(a > 0.0)) throw std::invalid_argument("gaussian_fn: amplitude must be positive");
    if (static_cast<int>(center.size()) != dim || static_cast<int>(axes.size()) != dim)
        throw std::invalid_argument("gaussian_fn: parameter dimension mismatch");
    for (double e : axes)
        if (!(e > 0.0)) throw std::invalid_argument("gaussian_fn: axes must be positive");
    auto y = std::make_shared<Vec>(std::move(center));
    auto e = std::make_shared<Vec>(std::move(axes));
    const double la = std::log(a);
    auto phi_exact = [y, e, la](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = (x[i] - (*y)[i]) / (*e)[i];
            s += d * d;
        }
        return 0.5 * s - la;
    };
    LogConcaveFn f;
    f.dim = dim;
    f.phi = make_grid_cube(dim, half_width, nodes_per_axis, phi_exact);
    f.phi_exact = phi_exact;
    f.support_exact = [y, e, la](std::span<const double> z) {
        double s = 0.0, c = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double d = (*e)[i] * z[i];
            s += d * d;
            c += z[i] * (*y)[i];
        }
        return 0.5 * s + c + la;
    };
    f.label = "gaussian";
    return f;
}

inline LogConcaveFn standard_gaussian(int dim, double half_width = 8.0, int nodes_per_axis = 257) {
    return gaussian_fn(dim, 1.0, Vec(static_cast<std::size_t>(dim), 0.0),
                       Vec(static_cast<std::size_t>(dim), 1.0), half_width, nodes_per_axis);
}

/* ---- calculus ------------------------------------------------------------ */

/* Trusted support-function evaluator: closed form when known, otherwise a
   one-time conjugation of the exponent grid plus interpolation. */
inline std::function<double(std::span<const double>)> support_eval(LogConcaveFn& f) {
    if (f.support_exact) return f.support_exact;
    if (!f.support_grid) f.support_grid = legendre(f.phi);
    auto grid = std::make_shared<GridFunction>(*f.support_grid);
    return [grid](std::span<const double> x) { return grid->interpolate(x); };
}

/* (lambda . f)(x) = f(x/lambda)^lambda: the exponent maps to lambda phi(./lambda),
   which on the grid is a pure box rescale with identical values scaled. */
inline LogConcaveFn scalar_mult(double lambda, const LogConcaveFn& f) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scalar_mult: factor must be positive");
    LogConcaveFn out;
    out.dim = f.dim;
    out.phi = f.phi;
    for (int a = 0; a < f.dim; ++a) {
        out.phi.lo[static_cast<std::size_t>(a)] *= lambda;
        out.phi.hi[static_cast<std::size_t>(a)] *= lambda;
    }
    for (double& v : out.phi.values) v *= lambda;
    if (f.phi_exact) {
        auto base = f.phi_exact;
        const int n = f.dim;
        out.phi_exact = [base, lambda, n](std::span<const double> x) {
            Vec s(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] / lambda;
            const double v = base(s);
            return std::isinf(v) ? kPlusInf : lambda * v;
        };
    }
    if (f.support_exact) {
        auto base = f.support_exact;
        out.support_exact = [base, lambda](std::span<const double> z) {
            const double v = base(z);
            return std::isinf(v) ? kPlusInf : lambda * v;
        };
    }
    if (f.support_grid) {
        out.support_grid = *f.support_grid;
        for (double& v : out.support_grid->values)
            if (!std::isinf(v)) v *= lambda;
    }
    out.label = std::to_string(lambda) + "." + f.label;
    return out;
}

/* Reflection f(-x); exact on the symmetric grids used throughout. */
inline LogConcaveFn reflect_fn(const LogConcaveFn& f) {
    LogConcaveFn out;
    out.dim = f.dim;
    out.phi = reflected(f.phi);
    if (f.phi_exact) {
        auto base = f.phi_exact;
        const int n = f.dim;
        out.phi_exact = [base, n](std::span<const double> x) {
            Vec s(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = -x[static_cast<std::size_t>(i)];
            return base(s);
        };
    }
    if (f.support_exact) {
        auto base = f.support_exact;
        const int n = f.dim;
        out.support_exact = [base, n](std::span<const double> z) {
            Vec s(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = -z[static_cast<std::size_t>(i)];
            return base(s);
        };
    }
    out.label = f.label + "~";
    return out;
}

inline LogConcaveFn translate_fn(const LogConcaveFn& f, Vec y) {
    LogConcaveFn out;
    out.dim = f.dim;
    out.phi = f.phi;
    for (int a = 0; a < f.dim; ++a) {
        out.phi.lo[static_cast<std::size_t>(a)] += y[static_cast<std::size_t>(a)];
        out.phi.hi[static_cast<std::size_t>(a)] += y[static_cast<std::size_t>(a)];
    }
    auto shift = std::make_shared<Vec>(std::move(y));
    if (f.phi_exact) {
        auto base = f.phi_exact;
        const int n = f.dim;
        out.phi_exact = [base, shift, n](std::span<const double> x) {
            Vec s(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                s[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - (*shift)[static_cast<std::size_t>(i)];
            return base(s);
        };
    }
    if (f.support_exact) {
        auto base = f.support_exact;
        out.support_exact = [base, shift](std::span<const double> z) {
            const double v = base(z);
            return std::isinf(v) ? kPlusInf : v + dot(*shift, z);
        };
    }
    out.label = f.label + "_shifted";
    return out;
}

/* Asplund (sup-convolution) sum: exponents combine by infimal convolution,
   support functions add. */
inline LogConcaveFn asplund_sum(const LogConcaveFn& f, const LogConcaveFn& g) {
    if (f.dim != g.dim) throw std::invalid_argument("asplund_sum: dimension mismatch");
    LogConcaveFn out;
    out.dim = f.dim;
    out.phi = inf_convolution(f.phi, g.phi);
    if (f.support_exact && g.support_exact) {
        auto a = f.support_exact, b = g.support_exact;
        out.support_exact = [a, b](std::span<const double> z) {
            const double va = a(z), vb = b(z);
            return (std::isinf(va) || std::isinf(vb)) ? kPlusInf : va + vb;
        };
    }
    out.label = f.label + "*" + g.label;
    return out;
}

/* ---- integrals ------------------------------------------------------------ */

namespace detail {

inline std::vector<double> axis_simpson(const GridFunction& g, int axis) {
    return simpson_coefficients(g.counts[static_cast<std::size_t>(axis)], g.step(axis));
}

}  // namespace detail

/* Tensor Simpson integral of e^(-phi) over the grid box. */
inline double integral(const LogConcaveFn& f) {
    const GridFunction& g = f.phi;
    std::vector<double> w0 = detail::axis_simpson(g, 0);
    std::vector<double> w1 = g.dim > 1 ? detail::axis_simpson(g, 1) : std::vector<double>{1.0};
    std::vector<double> w2 = g.dim > 2 ? detail::axis_simpson(g, 2) : std::vector<double>{1.0};
    double acc = 0.0;
    std::size_t k = 0;
    for (int i0 = 0; i0 < g.counts[0]; ++i0)
        for (int i1 = 0; i1 < g.counts[1]; ++i1)
            for (int i2 = 0; i2 < g.counts[2]; ++i2) {
                const double p = g.values[k++];
                if (std::isinf(p)) continue;
                acc += w0[static_cast<std::size_t>(i0)] * w1[static_cast<std::size_t>(i1)] *
                       w2[static_cast<std::size_t>(i2)] * std::exp(-p);
            }
    return acc;
}

inline Vec centroid(const LogConcaveFn& f) {
    const GridFunction& g = f.phi;
    std::vector<double> w0 = detail::axis_simpson(g, 0);
    std::vector<double> w1 = g.dim > 1 ? detail::axis_simpson(g, 1) : std::vector<double>{1.0};
    std::vector<double> w2 = g.dim > 2 ? detail::axis_simpson(g, 2) : std::vector<double>{1.0};
    double mass = 0.0;
    Vec first(static_cast<std::size_t>(g.dim), 0.0);
    std::size_t k = 0;
    for (int i0 = 0; i0 < g.counts[0]; ++i0)
        for (int i1 = 0; i1 < g.counts[1]; ++i1)
            for (int i2 = 0; i2 < g.counts[2]; ++i2) {
                const double p = g.values[k++];
                if (std::isinf(p)) continue;
                const double w = w0[static_cast<std::size_t>(i0)] * w1[static_cast<std::size_t>(i1)] *
                                 w2[static_cast<std::size_t>(i2)] * std::exp(-p);
                mass += w;
                const int idx[3] = {i0, i1, i2};
                for (int a = 0; a < g.dim; ++a)
                    first[static_cast<std::size_t>(a)] += w * g.node_coord(a, idx[a]);
            }
    if (!(mass > 0.0)) throw std::domain_error("centroid: zero mass");
    for (double& v : first) v /= mass;
    return first;
}

/*
 * Integral of fn against the standard Gaussian measure on a truncated cube;
 * the default half-width 8 leaves well under 1e-12 of mass outside.  +inf
 * samples signal divergence.
 */
inline double gaussian_integral(const std::function<double(std::span<const double>)>& fn, int dim,
                                double half_width = 8.0, int nodes_per_axis = 161) {
    const std::vector<double> w = simpson_coefficients(nodes_per_axis, 2.0 * half_width / (nodes_per_axis - 1));
    const double norm_const = std::pow(2.0 * std::numbers::pi, -0.5 * dim);
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    Vec x(static_cast<std::size_t>(dim));
    double acc = 0.0;
    const auto node = [&](int i) { return -half_width + 2.0 * half_width * i / (nodes_per_axis - 1); };
    while (true) {
        double weight = norm_const;
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double xa = node(idx[static_cast<std::size_t>(a)]);
            x[static_cast<std::size_t>(a)] = xa;
            weight *= w[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
            r2 += xa * xa;
        }
        const double v = fn(x);
        if (std::isinf(v)) {
            if (weight * std::exp(-0.5 * r2) > 1e-14)
                throw std::domain_error("gaussian_integral: integrand is +inf on significant mass");
        } else {
            acc += weight * std::exp(-0.5 * r2) * v;
        }
        int a = dim - 1;
        while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == nodes_per_axis) {
            idx[static_cast<std::size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    return acc;
}

/* (2/n) integral of h(f,.) against the standard Gaussian measure. */
inline double gaussian_mean_width(LogConcaveFn& f, double half_width = 8.0, int nodes_per_axis = 161) {
    auto h = support_eval(f);
    return 2.0 / f.dim * gaussian_integral(h, f.dim, half_width, nodes_per_axis);
}

/* ---- polarity -------------------------------------------------------------- */

/*
 * Box capturing essentially all of the mass of e^(-phi) when phi grows like
 * gamma ||x|| + beta: solves gamma R + beta = target_exponent, iterating the
 * coercivity fit once on the refined box.
 */
inline double mass_capture_radius(const std::function<double(std::span<const double>)>& phi, int dim,
                                  double target_exponent = 30.0) {
    double radius = 4.0;
    for (int iter = 0; iter < 3; ++iter) {
        GridFunction probe = make_grid_cube(dim, radius, 17, phi);
        const auto fit = coercivity_margin(probe);
        if (!fit) throw std::domain_error("mass_capture_radius: exponent is not coercive at this scale");
        const double next = std::clamp((target_exponent - fit->beta) / fit->gamma, 2.0, 500.0);
        if (std::abs(next - radius) < 0.05 * radius) return next;
        radius = next;
    }
    return radius;
}

/*
 * Polar function f -> e^(-L(-log f)): the new exponent is the support
 * function of f.  Its grid is re-sampled on a box sized by the coercivity of
 * h so the polar's mass is captured, independent of f's own box.
 */
inline LogConcaveFn polar_fn(LogConcaveFn& f, int nodes_per_axis = 0) {
    if (nodes_per_axis == 0) nodes_per_axis = f.phi.counts[0];
    auto h = support_eval(f);
    const double radius = mass_capture_radius(h, f.dim);
    LogConcaveFn out;
    out.dim = f.dim;
    out.phi = make_grid_cube(f.dim, radius, nodes_per_axis, h);
    out.phi_exact = h;
    if (f.phi_exact) out.support_exact = f.phi_exact;  // h(f polar) = phi when phi is convex
    out.label = f.label + "_polar";
    return out;
}

/* Convenience: mass of the polar body of f, the right side of the product
   inequalities. */
inline double polar_integral(LogConcaveFn& f, int nodes_per_axis = 0) {
    LogConcaveFn p = polar_fn(f, nodes_per_axis);
    return integral(p);
}

/* ---- Asplund endomorphisms -------------------------------------------------- */

struct AsplundEndo {
    ZonalMeasure mu;
    int dim = 0;
    std::string label;
    int sub_res = 64;
};

inline AsplundEndo asplund_endo(const ZonalMeasure& mu, int dim, int sub_res = 64) {
    AsplundEndo e;
    e.mu = mu;
    e.dim = dim;
    e.label = "psi_" + (mu.label.empty() ? std::string("mu") : mu.label);
    e.sub_res = sub_res;
    return e;
}

/*
 * Image under the endomorphism generated by mu: the support function of the
 * image is the zonal convolution of h(f,.), evaluated on demand; the image
 * exponent is one conjugation away.  The support evaluator handles the
 * origin by an inward probe-sphere minimum, and the returned function keeps
 * that evaluator as its trusted h source so downstream polars and Gaussian
 * integrals never pay a second interpolation error.
 */
inline LogConcaveFn apply_asplund(const AsplundEndo& psi, LogConcaveFn& f) {
    if (psi.dim != f.dim) throw std::invalid_argument("apply_asplund: dimension mismatch");
    if (zonal_has_negative_part(psi.mu, psi.dim))
        throw std::invalid_argument("apply_asplund: measure must be non-negative");
    const double bary = zonal_barycenter(psi.mu, psi.dim);
    if (std::abs(bary) > 1e-8 * std::max(1.0, zonal_abs_mass(psi.mu, psi.dim)))
        throw std::invalid_argument("apply_asplund: measure barycenter must vanish");

    auto h = support_eval(f);
    auto conv = std::make_shared<ZonalConvolver>(psi.mu, psi.dim, psi.sub_res);
    const int n = psi.dim;
    double extent = 0.0;
    for (int a = 0; a < f.phi.dim; ++a)
        extent = std::max(extent, std::max(std::abs(f.phi.lo[static_cast<std::size_t>(a)]),
                                           std::abs(f.phi.hi[static_cast<std::size_t>(a)])));
    const double probe_radius = 1e-4 * std::max(extent, 1.0);
    auto probe = std::make_shared<SphereQuadrature>(build_quadrature(n, 6));
    auto hm = [conv, h, probe, probe_radius, n](std::span<const double> x) -> double {
        if (norm(x) > 0.5 * probe_radius) return (*conv)(h, x);
        double best = std::numeric_limits<double>::infinity();
        Vec p(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < probe->size(); ++i) {
            std::span<const double> dir = probe->node(i);
            for (int k = 0; k < n; ++k)
                p[static_cast<std::size_t>(k)] = probe_radius * dir[static_cast<std::size_t>(k)];
            best = std::min(best, (*conv)(h, p));
        }
        return best;
    };

    // Sample the convolved support on the dual slope box widened to cover
    // f's own box: the conjugate then resolves the image exponent's growth
    // even when the slope range degenerates (set indicators).
    std::array<double, 3> dlo{0, 0, 0}, dhi{0, 0, 0};
    default_dual_box(f.phi, dlo, dhi);
    for (int a = 0; a < f.dim; ++a) {
        dlo[static_cast<std::size_t>(a)] =
            std::min(dlo[static_cast<std::size_t>(a)], f.phi.lo[static_cast<std::size_t>(a)]);
        dhi[static_cast<std::size_t>(a)] =
            std::max(dhi[static_cast<std::size_t>(a)], f.phi.hi[static_cast<std::size_t>(a)]);
    }
    GridFunction hm_grid = make_grid(
        f.dim, std::span<const double>(dlo.data(), static_cast<std::size_t>(f.dim)),
        std::span<const double>(dhi.data(), static_cast<std::size_t>(f.dim)),
        std::span<const int>(f.phi.counts.data(), static_cast<std::size_t>(f.dim)), hm);

    LogConcaveFn out;
    out.dim = f.dim;
    out.phi = legendre_onto(hm_grid, f.phi.lo, f.phi.hi, f.phi.counts);
    out.support_exact = hm;
    out.support_grid = std::move(hm_grid);
    out.label = psi.label + "(" + f.label + ")";
    return out;
}

}  // namespace santalo

#endif
