#ifndef SANTALO_ENDOMORPHISM_HPP
#define SANTALO_ENDOMORPHISM_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "santalo/body.hpp"
#include "santalo/body_metrics.hpp"
#include "santalo/sphere.hpp"
#include "santalo/vec.hpp"
#include "santalo/zonal.hpp"

namespace santalo {

/*
 * A body-valued map h(K,.) -> h(K,.) * mu given by spherical convolution
 * with a zonal measure.  The measure must be centered (barycenter at the
 * pole component zero) or the map fails translation invariance.  An
 * optional exact evaluator short-circuits the convolution when the image
 * has a closed form; the convolution path stays available as an oracle.
 */
struct MinkowskiEndo {
    ZonalMeasure mu;
    int dim = 0;
    std::string label;
    int sub_res = 64;
    std::function<Body(const Body&)> exact;
};

inline void require_centered(const ZonalMeasure& mu, int n, double tol = 1e-8) {
    const double b = zonal_barycenter(mu, n);
    if (std::abs(b) > tol * std::max(1.0, zonal_abs_mass(mu, n)))
        throw std::invalid_argument("endomorphism: measure barycenter must vanish");
}

/*
 * Uniform measure: the image is always the ball of radius w(K)/2, so the
 * exact path just measures the mean width; the convolution path remains the
 * oracle for that closed form.
 */
inline MinkowskiEndo sigma_endo(int n, int width_res = 256) {
    MinkowskiEndo e;
    e.mu = sigma_measure(n);
    e.dim = n;
    e.label = "sigma";
    e.exact = [n, width_res](const Body& k) {
        const SphereQuadrature q = build_quadrature(n, n == 2 ? 8192 : width_res);
        return ball(n, 0.5 * mean_width(k, q));
    };
    return e;
}

/* Central symmetral: generating measure is the two-point measure nu. */
inline MinkowskiEndo delta_endo(int n) {
    MinkowskiEndo e;
    e.mu = nu_measure();
    e.dim = n;
    e.label = "delta";
    return e;
}

inline MinkowskiEndo equator_endo(int n) {
    MinkowskiEndo e;
    e.mu = equator_measure();
    e.dim = n;
    e.label = "equator";
    return e;
}

/*
 * Mean-width-of-projections map: the image support at u averages h over
 * the great subsphere orthogonal to u, i.e. convolution with the equator
 * probability measure.  Normalized so the unit ball is fixed; only
 * meaningful for n >= 3 where the equator subsphere is connected.
 */
inline MinkowskiEndo pi1_endo(int n) {
    if (n < 3) throw std::invalid_argument("pi1_endo: requires dimension at least 3");
    MinkowskiEndo e = equator_endo(n);
    e.label = "pi1";
    return e;
}

/*
 * Steiner-point recentering K -> K - s(K).  Its generating measure has a
 * negative density part, so the exact path (translate by minus the Steiner
 * point) is the default and the signed convolution is kept as an oracle.
 */
inline MinkowskiEndo j_endo(int n, int steiner_res = 64) {
    MinkowskiEndo e;
    e.mu = j_generating_measure(n);
    e.dim = n;
    e.label = "J";
    e.exact = [n, steiner_res](const Body& k) {
        const SphereQuadrature q = build_quadrature(n, n == 2 ? 16384 : steiner_res);
        Vec s = steiner_point(k, q);
        return translate(k, negated(s));
    };
    return e;
}

inline MinkowskiEndo scaled_endo(const MinkowskiEndo& e, double factor) {
    MinkowskiEndo out = e;
    out.mu = scaled(e.mu, factor);
    out.exact = nullptr;
    out.label = std::to_string(factor) + "*" + e.label;
    return out;
}

/* Scales the measure to unit mass so the unit ball becomes a fixed point. */
inline MinkowskiEndo normalize(const MinkowskiEndo& e) {
    const double mass = zonal_mass(e.mu, e.dim);
    if (std::abs(mass) < 1e-14) throw std::invalid_argument("normalize: measure has zero mass");
    if (std::abs(mass - 1.0) < 1e-10) return e;
    MinkowskiEndo out = scaled_endo(e, 1.0 / mass);
    out.label = e.label + "_normalized";
    return out;
}

/*
 * Random-triple subadditivity check, used to reject signed measures whose
 * convolution output fails to be a support function at sampling accuracy.
 */
inline void spot_check_sublinear(const SupportFn& h, int n, int triples = 1000,
                                 std::uint64_t seed = 2026, double tol = 1e-6) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec u(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n));
    for (int t = 0; t < triples; ++t) {
        for (int i = 0; i < n; ++i) {
            u[static_cast<std::size_t>(i)] = gauss(rng);
            v[static_cast<std::size_t>(i)] = gauss(rng);
            s[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i)];
        }
        if (norm(u) < 1e-6 || norm(v) < 1e-6) continue;
        const double hu = h(u), hv = h(v), hs = h(s);
        const double scale = std::abs(hu) + std::abs(hv) + std::abs(hs) + 1.0;
        if (hs > hu + hv + tol * scale)
            throw std::runtime_error("apply_endo: convolved support fails subadditivity");
    }
}

/*
 * Image body under the endomorphism.  Non-negative measures give support
 * functions automatically; signed measures are accepted only after the
 * subadditivity spot check, whose tolerance must absorb the discretization
 * noise of the convolution rule (pass a looser sublinear_tol when the
 * signed path is used at moderate sub_res).  Set prefer_exact = false to
 * force the convolution path (oracle mode).
 */
inline Body apply_endo(const MinkowskiEndo& e, const Body& k, bool prefer_exact = true,
                       double sublinear_tol = 1e-6) {
    if (k.dim != e.dim) throw std::invalid_argument("apply_endo: dimension mismatch");
    require_centered(e.mu, e.dim);
    if (e.exact && prefer_exact) {
        Body out = e.exact(k);
        out.label = e.label + "(" + k.label + ")";
        return out;
    }
    auto conv = std::make_shared<ZonalConvolver>(e.mu, e.dim, e.sub_res);
    const SupportFn h = k.support;
    Body out;
    out.dim = k.dim;
    out.support = [conv, h](std::span<const double> u) { return (*conv)(h, u); };
    out.label = e.label + "(" + k.label + ")";
    if (zonal_has_negative_part(e.mu, e.dim))
        spot_check_sublinear(out.support, e.dim, 1000, 2026, sublinear_tol);
    return out;
}

/* Volume of the polar of the image body. */
inline double polar_endo_volume(const MinkowskiEndo& e, const Body& k, const SphereQuadrature& quad,
                                bool prefer_exact = true) {
    const Body image = apply_endo(e, k, prefer_exact);
    return polar_volume(image, quad);
}

/* Parses endo spec strings: sigma, delta, pi1, J, equator, <factor>*<name>. */
inline MinkowskiEndo make_named_endo(const std::string& name, int n) {
    const auto star = name.find('*');
    if (star != std::string::npos) {
        const double factor = std::stod(name.substr(0, star));
        return scaled_endo(make_named_endo(name.substr(star + 1), n), factor);
    }
    if (name == "sigma") return sigma_endo(n);
    if (name == "delta" || name == "nu") return delta_endo(n);
    if (name == "pi1") return pi1_endo(n);
    if (name == "equator") return equator_endo(n);
    if (name == "J" || name == "j") return j_endo(n);
    throw std::invalid_argument("unknown endomorphism name: " + name);
}

}  // namespace santalo

#endif
