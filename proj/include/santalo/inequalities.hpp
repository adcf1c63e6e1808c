#ifndef SANTALO_INEQUALITIES_HPP
#define SANTALO_INEQUALITIES_HPP

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "santalo/body.hpp"
#include "santalo/quadrature1d.hpp"
#include "santalo/body_metrics.hpp"
#include "santalo/endomorphism.hpp"
#include "santalo/grid_function.hpp"
#include "santalo/logconcave.hpp"
#include "santalo/report.hpp"
#include "santalo/sphere.hpp"
#include "santalo/zonal.hpp"

namespace santalo {

enum class CheckId {
    BS,
    URYSOHN,
    DIFFBODY,
    PI1,
    THM1,
    THM2_LEFT,
    THM2_RIGHT,
    FBS_EVEN,
    FBS_GENERAL,
    THM4,
    CHAIN_LEFT,
    CHAIN_RIGHT,
    FUNC_URYSOHN,
    SHANNON_URYSOHN,
};

inline const char* check_id_name(CheckId id) {
    switch (id) {
        case CheckId::BS: return "bs";
        case CheckId::URYSOHN: return "urysohn";
        case CheckId::DIFFBODY: return "diffbody";
        case CheckId::PI1: return "pi1";
        case CheckId::THM1: return "thm1";
        case CheckId::THM2_LEFT: return "thm2_left";
        case CheckId::THM2_RIGHT: return "thm2_right";
        case CheckId::FBS_EVEN: return "fbs_even";
        case CheckId::FBS_GENERAL: return "fbs_general";
        case CheckId::THM4: return "thm4";
        case CheckId::CHAIN_LEFT: return "chain_left";
        case CheckId::CHAIN_RIGHT: return "chain_right";
        case CheckId::FUNC_URYSOHN: return "func_urysohn";
        case CheckId::SHANNON_URYSOHN: return "shannon_urysohn";
    }
    return "unknown";
}

inline CheckId parse_check_id(const std::string& s) {
    for (CheckId id : {CheckId::BS, CheckId::URYSOHN, CheckId::DIFFBODY, CheckId::PI1, CheckId::THM1,
                       CheckId::THM2_LEFT, CheckId::THM2_RIGHT, CheckId::FBS_EVEN,
                       CheckId::FBS_GENERAL, CheckId::THM4, CheckId::CHAIN_LEFT, CheckId::CHAIN_RIGHT,
                       CheckId::FUNC_URYSOHN, CheckId::SHANNON_URYSOHN})
        if (s == check_id_name(id)) return id;
    throw std::invalid_argument("unknown check id: " + s);
}

namespace detail {

inline long elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
}

/* Volume of the polar taken about the Santalo point. */
inline double santalo_polar_volume(const Body& k, const SphereQuadrature& quad) {
    const Vec s = santalo_point(k, quad);
    return polar_volume(translate(k, negated(s)), quad);
}


/* The even-form product requires an even function on an origin-symmetric box. */
inline void require_even_grid(const GridFunction& g, const char* what) {
    for (int a = 0; a < g.dim; ++a)
        if (std::abs(g.lo[a] + g.hi[a]) > 1e-12 * std::max(1.0, std::abs(g.hi[a])))
            throw std::invalid_argument(std::string(what) + ": grid box must be origin-symmetric");
    double scale = 1.0;
    for (double v : g.values)
        if (!std::isinf(v)) scale = std::max(scale, std::abs(v));
    for (int i0 = 0; i0 < g.counts[0]; ++i0)
        for (int i1 = 0; i1 < g.counts[1]; ++i1)
            for (int i2 = 0; i2 < g.counts[2]; ++i2) {
                const double v = g.at(i0, i1, i2);
                const double m = g.at(g.counts[0] - 1 - i0, g.dim > 1 ? g.counts[1] - 1 - i1 : 0,
                                      g.dim > 2 ? g.counts[2] - 1 - i2 : 0);
                const bool vi = std::isinf(v), mi = std::isinf(m);
                if (vi != mi || (!vi && std::abs(v - m) > 1e-9 * scale))
                    throw std::invalid_argument(std::string(what) +
                                                ": function must be even for this check");
            }
}

}  // namespace detail

struct GeometricOptions {
    double tol_rel = 1e-3;
    int volume_resolution = 0;  // 0: reuse the supplied rule for volumes
    std::uint64_t seed = 0;
};

/*
 * Evaluates the geometric inequality `id` on the body, reporting both sides
 * and the signed slack.  Endomorphism-dependent ids require phi; a missing
 * or non-normalized phi is a configuration error, reported by exception
 * rather than as a failing inequality.
 */
inline InequalityReport check_geometric(CheckId id, const Body& k,
                                        const std::optional<MinkowskiEndo>& phi,
                                        const SphereQuadrature& quad,
                                        const GeometricOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = k.dim;
    const double bn = unit_ball_volume(n);
    InequalityReport r;
    r.id = check_id_name(id);
    r.n = n;
    r.subject = k.label;
    r.grid = "sphere_res=" + std::to_string(quad.resolution);
    r.seed = opt.seed;

    auto needs_endo = [&]() -> const MinkowskiEndo& {
        if (!phi) throw std::invalid_argument("check_geometric: this id requires an endomorphism");
        const double mass = zonal_mass(phi->mu, n);
        if (std::abs(mass - 1.0) > 1e-6)
            throw std::invalid_argument("check_geometric: endomorphism must be normalized");
        return *phi;
    };
    // the product bound and the polar volume chain both require a monotone
    // map, i.e. a non-negative generating measure; the steiner-recentering
    // map (signed measure) is the standard example breaking both, so it is a
    // configuration error here rather than a reportable failure
    auto needs_nonnegative_endo = [&]() -> const MinkowskiEndo& {
        const MinkowskiEndo& e = needs_endo();
        if (zonal_has_negative_part(e.mu, n))
            throw std::invalid_argument(
                "check_geometric: this id requires a non-negative generating measure");
        return e;
    };
    const SphereQuadrature vol_quad =
        opt.volume_resolution > 0 ? build_quadrature(n, opt.volume_resolution) : quad;

    switch (id) {
        case CheckId::BS: {
            r.lhs = volume(k, vol_quad) * detail::santalo_polar_volume(k, quad);
            r.rhs = bn * bn;
            r.params = "volume_product";
            break;
        }
        case CheckId::URYSOHN: {
            r.lhs = volume(k, vol_quad);
            const double w = mean_width(k, quad);
            r.rhs = std::pow(0.5 * w, n) * bn;
            r.params = "w=" + std::to_string(w);
            break;
        }
        case CheckId::DIFFBODY: {
            const Body sym = central_symmetral(k);
            r.lhs = volume(k, vol_quad) * polar_volume(sym, quad);
            r.rhs = bn * bn;
            r.params = "difference_body_polar";
            break;
        }
        case CheckId::PI1: {
            if (n < 3) throw std::invalid_argument("check_geometric: pi1 needs dimension >= 3");
            const Body img = apply_endo(pi1_endo(n), k);
            r.lhs = volume(k, vol_quad) * polar_volume(img, quad);
            r.rhs = bn * bn;
            r.params = "pi1_polar";
            break;
        }
        case CheckId::THM1: {
            const MinkowskiEndo& e = needs_nonnegative_endo();
            const Body img = apply_endo(e, k);
            r.lhs = volume(k, vol_quad) * polar_volume(img, quad);
            r.rhs = bn * bn;
            r.params = "endo=" + e.label;
            break;
        }
        case CheckId::THM2_LEFT: {
            const MinkowskiEndo& e = needs_nonnegative_endo();
            const double w = mean_width(k, quad);
            r.lhs = bn * std::pow(0.5 * w, -n);
            r.rhs = polar_endo_volume(e, k, quad);
            r.params = "endo=" + e.label;
            break;
        }
        case CheckId::THM2_RIGHT: {
            const MinkowskiEndo& e = needs_nonnegative_endo();
            r.lhs = polar_endo_volume(e, k, quad);
            r.rhs = detail::santalo_polar_volume(k, quad);
            r.params = "endo=" + e.label;
            break;
        }
        default:
            throw std::invalid_argument("check_geometric: not a geometric check id");
    }
    r = finish_report(std::move(r), r.rhs - r.lhs, r.rhs, opt.tol_rel);
    r.millis = detail::elapsed_ms(t0);
    return r;
}

struct FunctionalOptions {
    double tol_rel = 0.0;  // 0: dimension default (1e-2 in n=2, 5e-2 in n=3)
    std::uint64_t seed = 0;
    int polar_nodes = 0;        // 0: reuse the function's own per-axis count
    double gauss_box = 8.0;     // truncation for Gaussian-measure integrals
    int gauss_nodes = 161;
};

inline double functional_default_tol(int n) { return n >= 3 ? 5e-2 : 1e-2; }

/*
 * Functional inequalities.  All product inequalities are stated as
 * lhs <= rhs with rhs the constant side; the Urysohn-type bounds are stated
 * as lhs >= rhs, and margin is the slack either way.
 */
inline InequalityReport check_functional(CheckId id, LogConcaveFn& f,
                                         const std::optional<ZonalMeasure>& mu,
                                         const FunctionalOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = f.dim;
    const double tol = opt.tol_rel > 0.0 ? opt.tol_rel : functional_default_tol(n);
    const double two_pi_n = std::pow(2.0 * std::numbers::pi, n);
    InequalityReport r;
    r.id = check_id_name(id);
    r.n = n;
    r.subject = f.label;
    r.grid = std::to_string(f.phi.counts[0]) + "^" + std::to_string(n);
    r.seed = opt.seed;

    auto needs_mu = [&]() -> const ZonalMeasure& {
        if (!mu) throw std::invalid_argument("check_functional: this id requires a zonal measure");
        if (std::abs(zonal_mass(*mu, n) - 1.0) > 1e-6)
            throw std::invalid_argument("check_functional: measure must be a probability measure");
        if (zonal_has_negative_part(*mu, n))
            throw std::invalid_argument("check_functional: measure must be non-negative");
        return *mu;
    };

    bool lower_bound_form = false;
    switch (id) {
        case CheckId::FBS_EVEN: {
            detail::require_even_grid(f.phi, "fbs_even");
            r.lhs = integral(f) * polar_integral(f, opt.polar_nodes);
            r.rhs = two_pi_n;
            r.params = "even_product";
            break;
        }
        case CheckId::FBS_GENERAL: {
            const Vec c = centroid(f);
            LogConcaveFn centered = translate_fn(f, negated(c));
            r.lhs = integral(f) * polar_integral(centered, opt.polar_nodes);
            r.rhs = two_pi_n;
            r.params = "centroid_shift=" + std::to_string(norm(c));
            break;
        }
        case CheckId::THM4: {
            const ZonalMeasure& m = needs_mu();
            LogConcaveFn img = apply_asplund(asplund_endo(m, n), f);
            r.lhs = integral(f) * polar_integral(img, opt.polar_nodes);
            r.rhs = two_pi_n;
            r.params = "mu=" + m.label;
            break;
        }
        case CheckId::CHAIN_LEFT: {
            const ZonalMeasure& m = needs_mu();
            LogConcaveFn sigma_img = apply_asplund(asplund_endo(sigma_measure(n), n), f);
            LogConcaveFn mu_img = apply_asplund(asplund_endo(m, n), f);
            r.lhs = polar_integral(sigma_img, opt.polar_nodes);
            r.rhs = polar_integral(mu_img, opt.polar_nodes);
            r.params = "mu=" + m.label;
            break;
        }
        case CheckId::CHAIN_RIGHT: {
            const ZonalMeasure& m = needs_mu();
            LogConcaveFn mu_img = apply_asplund(asplund_endo(m, n), f);
            r.lhs = polar_integral(mu_img, opt.polar_nodes);
            r.rhs = polar_integral(f, opt.polar_nodes);
            r.params = "mu=" + m.label;
            break;
        }
        case CheckId::FUNC_URYSOHN: {
            lower_bound_form = true;
            const double mass = integral(f);
            const double target = std::pow(2.0 * std::numbers::pi, 0.5 * n);
            const double factor = target / mass;
            LogConcaveFn scaled_f = f;
            // value rescale: f -> factor * f shifts the exponent by -log(factor)
            for (double& v : scaled_f.phi.values)
                if (!std::isinf(v)) v -= std::log(factor);
            if (scaled_f.phi_exact) {
                auto base = f.phi_exact;
                const double shift = std::log(factor);
                scaled_f.phi_exact = [base, shift](std::span<const double> x) {
                    const double v = base(x);
                    return std::isinf(v) ? kPlusInf : v - shift;
                };
            }
            if (scaled_f.support_exact) {
                auto base = f.support_exact;
                const double shift = std::log(factor);
                scaled_f.support_exact = [base, shift](std::span<const double> z) {
                    const double v = base(z);
                    return std::isinf(v) ? kPlusInf : v + shift;
                };
            }
            scaled_f.support_grid.reset();
            r.lhs = gaussian_mean_width(scaled_f, opt.gauss_box, opt.gauss_nodes);
            r.rhs = 1.0;
            r.params = "mass_factor=" + std::to_string(factor);
            break;
        }
        case CheckId::SHANNON_URYSOHN: {
            lower_bound_form = true;
            const ZonalMeasure& m = needs_mu();
            LogConcaveFn img = apply_asplund(asplund_endo(m, n), f);
            const double polar_mass = polar_integral(img, opt.polar_nodes);
            r.lhs = gaussian_mean_width(f, opt.gauss_box, opt.gauss_nodes);
            r.rhs = 1.0 - 2.0 / n * std::log(std::pow(2.0 * std::numbers::pi, -0.5 * n) * polar_mass);
            r.params = "mu=" + m.label;
            break;
        }
        default:
            throw std::invalid_argument("check_functional: not a functional check id");
    }
    const double slack = lower_bound_form ? r.lhs - r.rhs : r.rhs - r.lhs;
    const double scale = lower_bound_form ? std::max(std::abs(r.rhs), 1.0) : r.rhs;
    r = finish_report(std::move(r), slack, scale, tol);
    r.millis = detail::elapsed_ms(t0);
    return r;
}

/*
 * Entropy-form gap: integral of g log(g/h) plus log of the mass of h, which
 * the logarithmic-form bound states is nonnegative, with equality exactly
 * when h is a positive multiple of g.  Both functions are sampled on the
 * same grid; g must be a probability density on it.
 */
inline double shannon_gap(const GridFunction& g, const GridFunction& h) {
    require_same_layout(g, h, "shannon_gap");
    std::vector<double> w0 = simpson_coefficients(g.counts[0], g.step(0));
    std::vector<double> w1 = g.dim > 1 ? simpson_coefficients(g.counts[1], g.step(1))
                                       : std::vector<double>{1.0};
    std::vector<double> w2 = g.dim > 2 ? simpson_coefficients(g.counts[2], g.step(2))
                                       : std::vector<double>{1.0};
    double gm = 0.0, hm = 0.0, cross = 0.0;
    std::size_t k = 0;
    for (int i0 = 0; i0 < g.counts[0]; ++i0)
        for (int i1 = 0; i1 < g.counts[1]; ++i1)
            for (int i2 = 0; i2 < g.counts[2]; ++i2, ++k) {
                const double w = w0[static_cast<std::size_t>(i0)] * w1[static_cast<std::size_t>(i1)] *
                                 w2[static_cast<std::size_t>(i2)];
                const double gv = g.values[k], hv = h.values[k];
                if (gv < 0.0 || hv < 0.0) throw std::domain_error("shannon_gap: negative density");
                gm += w * gv;
                hm += w * hv;
                if (gv > 0.0) {
                    if (hv <= 0.0) throw std::domain_error("shannon_gap: h vanishes where g > 0");
                    cross += w * gv * std::log(gv / hv);
                }
            }
    if (std::abs(gm - 1.0) > 1e-6)
        throw std::invalid_argument("shannon_gap: g must integrate to 1");
    if (!(hm > 0.0)) throw std::domain_error("shannon_gap: h has zero mass");
    return cross + std::log(hm);
}

/* Margins for a parametrized family, in parameter order. */
inline std::vector<InequalityReport> equality_margin_scan(
    const std::function<InequalityReport(double)>& runner, std::span<const double> params) {
    std::vector<InequalityReport> out;
    out.reserve(params.size());
    for (double p : params) out.push_back(runner(p));
    return out;
}

}  // namespace santalo

#endif
