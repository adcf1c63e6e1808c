#ifndef SANTALO_ZONAL_HPP
#define SANTALO_ZONAL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "santalo/sphere.hpp"
#include "santalo/vec.hpp"

namespace santalo {

/*
 * Measures on the sphere that are invariant under rotations fixing the pole
 * e_1.  Such a measure disintegrates over latitudes: an atom (t, w) stands
 * for w times the invariant probability measure on the parallel subsphere
 * {u . e_1 = t} (a point mass at the pole when |t| = 1), and the optional
 * density d(t) is integrated against the latitude measure
 * |S^{n-2}| (1 - t^2)^{(n-3)/2} dt on (-1, 1).  With that normalization the
 * constant density 1/|S^{n-1}| is the uniform probability measure.
 */
struct ZonalAtom {
    double t = 0.0;
    double w = 0.0;
};

struct ZonalMeasure {
    int dim = 0;  // 0 when the measure is dimension-free (atoms only)
    std::vector<ZonalAtom> atoms;
    std::function<double(double)> density;  // may be empty
    bool signed_ok = false;
    int density_res = 96;  // latitude nodes used to discretize the density
    std::string label;
};

/* One resolved latitude of a zonal measure: weight w sitting at latitude t. */
struct ZonalLatitude {
    double t = 0.0;
    double w = 0.0;
    bool from_density = false;
    double density_value = 0.0;  // d(t) for density latitudes
};

namespace detail {

/* Gauss rule in theta for the latitude measure; smooth weight for every n >= 2. */
inline Rule1D density_theta_rule(int n, int m) {
    Rule1D g = gauss_legendre_ab(m, 0.0, std::numbers::pi);
    Rule1D r;
    const double subsphere_area = unit_sphere_area(n - 1);  // |S^{n-2}|, = 2 when n = 2
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double th = g.nodes[i];
        r.nodes.push_back(std::cos(th));
        r.weights.push_back(g.weights[i] * std::pow(std::sin(th), n - 2) * subsphere_area);
    }
    return r;
}

}  // namespace detail

/* Resolves atoms plus discretized density into a flat latitude list. */
inline std::vector<ZonalLatitude> zonal_latitudes(const ZonalMeasure& mu, int n) {
    if (n < 2) throw std::invalid_argument("zonal_latitudes: dim < 2");
    if (mu.dim != 0 && mu.dim != n)
        throw std::invalid_argument("zonal_latitudes: measure fixed to a different dimension");
    std::vector<ZonalLatitude> out;
    for (const ZonalAtom& a : mu.atoms) {
        if (a.t < -1.0 - 1e-12 || a.t > 1.0 + 1e-12)
            throw std::invalid_argument("zonal_latitudes: atom latitude outside [-1, 1]");
        out.push_back({std::clamp(a.t, -1.0, 1.0), a.w, false, 0.0});
    }
    if (mu.density) {
        const Rule1D rule = detail::density_theta_rule(n, mu.density_res);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double d = mu.density(rule.nodes[i]);
            out.push_back({rule.nodes[i], rule.weights[i] * d, true, d});
        }
    }
    return out;
}

inline double zonal_mass(const ZonalMeasure& mu, int n) {
    double m = 0.0;
    for (const ZonalLatitude& l : zonal_latitudes(mu, n)) m += l.w;
    return m;
}

inline double zonal_abs_mass(const ZonalMeasure& mu, int n) {
    double m = 0.0;
    for (const ZonalLatitude& l : zonal_latitudes(mu, n)) m += std::abs(l.w);
    return m;
}

/* e_1 component of the barycenter; the other components vanish by symmetry. */
inline double zonal_barycenter(const ZonalMeasure& mu, int n) {
    double b = 0.0;
    for (const ZonalLatitude& l : zonal_latitudes(mu, n)) b += l.w * l.t;
    return b;
}

inline bool zonal_has_negative_part(const ZonalMeasure& mu, int n, double tol = 1e-12) {
    for (const ZonalLatitude& l : zonal_latitudes(mu, n))
        if (l.w < -tol) return true;
    return false;
}

/* ---- named measures ---------------------------------------------------- */

/* Uniform probability measure. */
inline ZonalMeasure sigma_measure(int n) {
    ZonalMeasure mu;
    mu.dim = n;
    const double c = 1.0 / unit_sphere_area(n);
    mu.density = [c](double) { return c; };
    mu.label = "sigma";
    return mu;
}

/* Half point masses at both poles; generates the central symmetral. */
inline ZonalMeasure nu_measure() {
    ZonalMeasure mu;
    mu.atoms = {{1.0, 0.5}, {-1.0, 0.5}};
    mu.label = "nu";
    return mu;
}

/* Invariant probability measure on the equatorial subsphere. */
inline ZonalMeasure equator_measure() {
    ZonalMeasure mu;
    mu.atoms = {{0.0, 1.0}};
    mu.label = "equator";
    return mu;
}

/*
 * Signed generating measure of the Steiner-point recentering map
 * K -> K - s(K): a unit atom at the pole minus n (e_1 . u) dsigma(u).
 */
inline ZonalMeasure j_generating_measure(int n) {
    ZonalMeasure mu;
    mu.dim = n;
    mu.atoms = {{1.0, 1.0}};
    const double c = static_cast<double>(n) / unit_sphere_area(n);
    mu.density = [c](double t) { return -c * t; };
    mu.signed_ok = true;
    mu.label = "j";
    return mu;
}

inline ZonalMeasure from_atoms(std::vector<ZonalAtom> atoms, bool signed_ok = false) {
    for (const ZonalAtom& a : atoms) {
        if (a.t < -1.0 || a.t > 1.0) throw std::invalid_argument("from_atoms: |t| > 1");
        if (!signed_ok && a.w < 0.0)
            throw std::invalid_argument("from_atoms: negative atom weight needs signed_ok");
    }
    ZonalMeasure mu;
    mu.atoms = std::move(atoms);
    mu.signed_ok = signed_ok;
    return mu;
}

inline ZonalMeasure from_density(int n, std::function<double(double)> d, bool signed_ok = false) {
    ZonalMeasure mu;
    mu.dim = n;
    mu.density = std::move(d);
    mu.signed_ok = signed_ok;
    return mu;
}

inline ZonalMeasure scaled(ZonalMeasure mu, double factor) {
    for (ZonalAtom& a : mu.atoms) a.w *= factor;
    if (mu.density) {
        auto base = mu.density;
        mu.density = [base, factor](double t) { return factor * base(t); };
    }
    if (factor < 0.0) mu.signed_ok = true;
    return mu;
}

/* ---- weak monotonicity ------------------------------------------------- */

struct WeakMonotonicityResult {
    bool ok = false;
    double lambda = 0.0;  // witness: mu + lambda (e_1 . u) du is non-negative
};

/*
 * A zonal measure is non-negative up to addition of a linear measure iff all
 * atoms are non-negative (a linear measure is absolutely continuous and
 * cannot repair an atom) and some lambda makes d(t) + lambda t >= 0 at every
 * density node.  Each node constrains lambda to a half line, so the feasible
 * set is an interval computed exactly; a scan over a lambda grid would miss
 * measures whose feasible set is a single point, such as the Steiner-point
 * measure where lambda = n / |S^{n-1}| is forced.
 */
inline WeakMonotonicityResult is_weakly_monotone(const ZonalMeasure& mu, int n) {
    const std::vector<ZonalLatitude> lats = zonal_latitudes(mu, n);
    double scale = 1.0;
    for (const ZonalLatitude& l : lats)
        scale = std::max({scale, std::abs(l.w), std::abs(l.density_value)});
    const double tol = 1e-9 * scale;

    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (const ZonalLatitude& l : lats) {
        if (!l.from_density) {
            if (l.w < -tol) feasible = false;
            continue;
        }
        const double d = l.density_value;
        if (std::abs(l.t) < 1e-12) {
            if (d < -tol) feasible = false;
        } else if (l.t > 0.0) {
            lo = std::max(lo, (-d - tol) / l.t);
        } else {
            hi = std::min(hi, (-d - tol) / l.t);
        }
    }
    WeakMonotonicityResult res;
    res.ok = feasible && lo <= hi;
    if (res.ok) {
        if (lo <= 0.0 && 0.0 <= hi)
            res.lambda = 0.0;
        else if (std::isfinite(lo) && std::isfinite(hi))
            res.lambda = 0.5 * (lo + hi);
        else
            res.lambda = std::isfinite(lo) ? lo : hi;
    }
    return res;
}

/* ---- convolution ------------------------------------------------------- */

using RadialFn = std::function<double(std::span<const double>)>;

namespace detail {

/* Unit tangent frame and trig table shared by every evaluation point. */
struct SubsphereFrame {
    int n = 0;
    int count = 0;
    std::vector<double> table;  // n = 3: cos/sin pairs; n >= 4: reserved
};

inline SubsphereFrame make_subsphere_frame(int n, int sub_res) {
    SubsphereFrame f;
    f.n = n;
    if (n == 2) {
        f.count = 2;
    } else if (n == 3) {
        f.count = std::max(4, sub_res);
        f.table.reserve(2 * static_cast<std::size_t>(f.count));
        for (int k = 0; k < f.count; ++k) {
            const double a = 2.0 * std::numbers::pi * (k + 0.5) / f.count;
            f.table.push_back(std::cos(a));
            f.table.push_back(std::sin(a));
        }
    } else {
        f.count = std::max(8, sub_res);
    }
    return f;
}

/*
 * Mean of phi over the sphere {t x + s |x| v : v unit, v orthogonal to x}.
 * For t = +-1 this is phi(+-x).  Infinite samples propagate to +infinity.
 */
inline double latitude_mean(const RadialFn& phi, std::span<const double> x, double r, double t,
                            const SubsphereFrame& frame, const Mat* basis,
                            const std::vector<Vec>* generic_nodes, Vec& scratch) {
    const int n = frame.n;
    if (t >= 1.0 - 1e-13) return phi(x);
    if (t <= -1.0 + 1e-13) {
        for (int i = 0; i < n; ++i) scratch[static_cast<std::size_t>(i)] = -x[static_cast<std::size_t>(i)];
        return phi(std::span<const double>(scratch.data(), static_cast<std::size_t>(n)));
    }
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t)) * r;
    double acc = 0.0;
    if (n == 2) {
        const double vx = -x[1] / r, vy = x[0] / r;
        for (int sign = -1; sign <= 1; sign += 2) {
            scratch[0] = t * x[0] + sign * s * vx;
            scratch[1] = t * x[1] + sign * s * vy;
            const double val = phi(std::span<const double>(scratch.data(), 2));
            if (!std::isfinite(val)) return std::numeric_limits<double>::infinity();
            acc += val;
        }
        return acc / 2.0;
    }
    if (n == 3) {
        const Mat& b = *basis;
        const double x0 = t * x[0], x1 = t * x[1], x2 = t * x[2];
        for (int k = 0; k < frame.count; ++k) {
            const double ca = frame.table[2 * static_cast<std::size_t>(k)];
            const double sa = frame.table[2 * static_cast<std::size_t>(k) + 1];
            scratch[0] = x0 + s * (ca * b(0, 1) + sa * b(0, 2));
            scratch[1] = x1 + s * (ca * b(1, 1) + sa * b(1, 2));
            scratch[2] = x2 + s * (ca * b(2, 1) + sa * b(2, 2));
            const double val = phi(std::span<const double>(scratch.data(), 3));
            if (!std::isfinite(val)) return std::numeric_limits<double>::infinity();
            acc += val;
        }
        return acc / frame.count;
    }
    const std::vector<Vec>& nodes = *generic_nodes;
    for (const Vec& v : nodes) {
        for (int i = 0; i < n; ++i)
            scratch[static_cast<std::size_t>(i)] =
                t * x[static_cast<std::size_t>(i)] + s * v[static_cast<std::size_t>(i)];
        const double val = phi(std::span<const double>(scratch.data(), static_cast<std::size_t>(n)));
        if (!std::isfinite(val)) return std::numeric_limits<double>::infinity();
        acc += val;
    }
    return acc / static_cast<double>(nodes.size());
}

}  // namespace detail

/*
 * Zonal convolution of a function with mu, evaluated at x != o:
 * sum over latitudes of w times the subsphere mean of phi around x.  When
 * phi is a support function restricted to unit vectors this is the support
 * convolution h * mu; for general convex phi it is the endomorphism-defining
 * integral, whose value only samples phi on the sphere of radius |x|.
 */
class ZonalConvolver {
public:
    ZonalConvolver(const ZonalMeasure& mu, int n, int sub_res = 64)
        : n_(n),
          lats_(zonal_latitudes(mu, n)),
          frame_(detail::make_subsphere_frame(n, sub_res)),
          negative_part_(zonal_has_negative_part(mu, n)) {}

    int dim() const { return n_; }
    bool has_negative_part() const { return negative_part_; }

    double operator()(const RadialFn& phi, std::span<const double> x) const {
        const double r = norm(x);
        if (r < 1e-300) throw std::invalid_argument("ZonalConvolver: x = o needs a probe radius");
        Vec scratch(static_cast<std::size_t>(n_));
        std::optional<Mat> basis;
        std::vector<Vec> generic;
        const Mat* basis_ptr = nullptr;
        const std::vector<Vec>* generic_ptr = nullptr;
        if (n_ == 3) {
            Vec u = scaled(x, 1.0 / r);
            basis = rotation_to(u);
            basis_ptr = &*basis;
        } else if (n_ >= 4) {
            Vec u = scaled(x, 1.0 / r);
            generic = subsphere_nodes(u, frame_.count);
            generic_ptr = &generic;
        }
        double acc = 0.0;
        for (const ZonalLatitude& l : lats_) {
            if (l.w == 0.0) continue;
            const double m =
                detail::latitude_mean(phi, x, r, l.t, frame_, basis_ptr, generic_ptr, scratch);
            if (!std::isfinite(m)) {
                if (l.w > 0.0) return std::numeric_limits<double>::infinity();
                throw std::domain_error("ZonalConvolver: infinite sample on a negative latitude");
            }
            acc += l.w * m;
        }
        return acc;
    }

private:
    int n_;
    std::vector<ZonalLatitude> lats_;
    detail::SubsphereFrame frame_;
    bool negative_part_;
};

/* Support-function convolution (h * mu)(u) at a single unit direction. */
inline double convolve_support_at(const RadialFn& h, const ZonalMeasure& mu,
                                  std::span<const double> u, int sub_res = 64) {
    require_unit(u);
    ZonalConvolver conv(mu, static_cast<int>(u.size()), sub_res);
    return conv(h, u);
}

/* Samples (h * mu) at every node of a sphere rule. */
inline Vec convolve_support_samples(const RadialFn& h, const ZonalMeasure& mu,
                                    const SphereQuadrature& quad, int sub_res = 64) {
    ZonalConvolver conv(mu, quad.dim, sub_res);
    Vec out(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) out[i] = conv(h, quad.node(i));
    return out;
}

/*
 * Convolution of a convex function with a non-negative zonal measure.
 * The value at the origin is approximated from within by the minimum over a
 * probe sphere of radius probe_radius; callers pass 1e-4 times the inradius
 * of their working domain.
 */
inline double convolve_convex_at(const RadialFn& phi, const ZonalMeasure& mu,
                                 std::span<const double> x, double probe_radius,
                                 int sub_res = 64) {
    const int n = static_cast<int>(x.size());
    ZonalConvolver conv(mu, n, sub_res);
    if (conv.has_negative_part() && !mu.signed_ok)
        throw std::invalid_argument("convolve_convex_at: measure has a negative part");
    if (conv.has_negative_part())
        throw std::invalid_argument(
            "convolve_convex_at: convex-function convolution requires a non-negative measure");
    if (norm(x) > 0.5 * probe_radius) return conv(phi, x);
    if (probe_radius <= 0.0)
        throw std::invalid_argument("convolve_convex_at: probe radius must be positive");
    const SphereQuadrature probe = build_quadrature(n, 6);
    double best = std::numeric_limits<double>::infinity();
    Vec p(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < probe.size(); ++i) {
        std::span<const double> dir = probe.node(i);
        for (int k = 0; k < n; ++k)
            p[static_cast<std::size_t>(k)] = probe_radius * dir[static_cast<std::size_t>(k)];
        best = std::min(best, conv(phi, p));
    }
    return best;
}

}  // namespace santalo

#endif
