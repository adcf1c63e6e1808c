#ifndef SANTALO_LEGENDRE_HPP
#define SANTALO_LEGENDRE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "santalo/grid_function.hpp"
#include "santalo/vec.hpp"

namespace santalo {

namespace detail {

/*
 * Discrete line conjugate: out[k] = max_j (x[k] * y[j] - g[j]) over finite
 * g[j], or -inf when the whole line is +inf.  Only vertices of the lower
 * convex hull of {(y_j, g_j)} can attain the max, and the argmax index is
 * nondecreasing in x, so a hull build plus a two-pointer sweep is exact in
 * linear time.  Correct for arbitrary (not necessarily convex) g.
 */
inline void conjugate_line(std::span<const double> y, std::span<const double> g,
                           std::span<const double> x, std::span<double> out,
                           std::vector<std::size_t>& hull) {
    hull.clear();
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (std::isinf(g[j])) continue;
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            // drop b if it lies on or above the chord a -> j
            const double lhs = (y[b] - y[a]) * (g[j] - g[a]);
            const double rhs = (y[j] - y[a]) * (g[b] - g[a]);
            if (rhs >= lhs) hull.pop_back();
            else break;
        }
        hull.push_back(j);
    }
    if (hull.empty()) {
        for (double& v : out) v = -kPlusInf;
        return;
    }
    std::size_t p = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        while (p + 1 < hull.size() &&
               x[k] * y[hull[p + 1]] - g[hull[p + 1]] >= x[k] * y[hull[p]] - g[hull[p]])
            ++p;
        out[k] = x[k] * y[hull[p]] - g[hull[p]];
    }
}

}  // namespace detail

/*
 * Dual box for the conjugate: the attainable slope range per axis, read off
 * one-sided differences between finite neighbours, widened by 10%.  A
 * degenerate range (flat function, e.g. a set indicator) falls back to a
 * unit-wide window so the conjugate still carries usable geometry.
 */
inline void default_dual_box(const GridFunction& g, std::array<double, 3>& dlo,
                             std::array<double, 3>& dhi) {
    const int strides[3] = {g.counts[1] * g.counts[2], g.counts[2], 1};
    for (int a = 0; a < g.dim; ++a) {
        double smin = kPlusInf, smax = -kPlusInf;
        const double h = g.step(a);
        for (int i0 = 0; i0 < g.counts[0]; ++i0)
            for (int i1 = 0; i1 < g.counts[1]; ++i1)
                for (int i2 = 0; i2 < g.counts[2]; ++i2) {
                    const int idx[3] = {i0, i1, i2};
                    if (idx[a] + 1 >= g.counts[static_cast<std::size_t>(a)]) continue;
                    const std::size_t k = g.flat_index(i0, i1, i2);
                    const double v0 = g.values[k];
                    const double v1 = g.values[k + static_cast<std::size_t>(strides[a])];
                    if (!std::isfinite(v0) || !std::isfinite(v1)) continue;
                    const double s = (v1 - v0) / h;
                    smin = std::min(smin, s);
                    smax = std::max(smax, s);
                }
        if (!std::isfinite(smin)) {
            smin = -1.0;
            smax = 1.0;
        }
        double pad = 0.05 * (smax - smin);
        if (smax - smin < 1e-9) pad = 1.0;  // flat slope range: widen to a real window
        dlo[static_cast<std::size_t>(a)] = smin - pad;
        dhi[static_cast<std::size_t>(a)] = smax + pad;
    }
}

/*
 * Legendre conjugate sup_y (x . y - phi(y)) over the grid nodes, factored
 * into per-axis line conjugations (each later pass conjugates the negated
 * previous pass, which telescopes to the joint supremum).  Output values are
 * finite everywhere for proper input.
 */
inline GridFunction legendre(const GridFunction& phi, std::span<const double> dual_lo,
                             std::span<const double> dual_hi, std::span<const int> dual_counts) {
    if (!phi.proper()) throw std::invalid_argument("legendre: input has no finite values");
    GridFunction out;
    out.dim = phi.dim;
    std::array<int, 3> cur_counts = phi.counts;
    std::array<double, 3> cur_lo = phi.lo, cur_hi = phi.hi;
    std::vector<double> buf = phi.values;

    std::vector<double> y_nodes, x_nodes, line_in, line_out;
    std::vector<std::size_t> hull;

    for (int axis = 0; axis < phi.dim; ++axis) {
        const int ny = cur_counts[static_cast<std::size_t>(axis)];
        const int nx = dual_counts[static_cast<std::size_t>(axis)];
        if (nx < 2) throw std::invalid_argument("legendre: dual axis needs at least 2 nodes");
        y_nodes.resize(static_cast<std::size_t>(ny));
        const double ystep = ny > 1 ? (cur_hi[static_cast<std::size_t>(axis)] -
                                       cur_lo[static_cast<std::size_t>(axis)]) /
                                          (ny - 1)
                                    : 0.0;
        for (int j = 0; j < ny; ++j)
            y_nodes[static_cast<std::size_t>(j)] = cur_lo[static_cast<std::size_t>(axis)] + j * ystep;
        x_nodes.resize(static_cast<std::size_t>(nx));
        const double xstep = (dual_hi[static_cast<std::size_t>(axis)] -
                              dual_lo[static_cast<std::size_t>(axis)]) /
                             (nx - 1);
        for (int k = 0; k < nx; ++k)
            x_nodes[static_cast<std::size_t>(k)] = dual_lo[static_cast<std::size_t>(axis)] + k * xstep;

        std::array<int, 3> next_counts = cur_counts;
        next_counts[static_cast<std::size_t>(axis)] = nx;
        std::vector<double> next(static_cast<std::size_t>(next_counts[0]) *
                                 static_cast<std::size_t>(next_counts[1]) *
                                 static_cast<std::size_t>(next_counts[2]));

        const int cur_c[3] = {cur_counts[0], cur_counts[1], cur_counts[2]};
        const int nxt_c[3] = {next_counts[0], next_counts[1], next_counts[2]};
        const std::size_t cur_stride[3] = {
            static_cast<std::size_t>(cur_c[1]) * static_cast<std::size_t>(cur_c[2]),
            static_cast<std::size_t>(cur_c[2]), 1};
        const std::size_t nxt_stride[3] = {
            static_cast<std::size_t>(nxt_c[1]) * static_cast<std::size_t>(nxt_c[2]),
            static_cast<std::size_t>(nxt_c[2]), 1};

        line_in.resize(static_cast<std::size_t>(ny));
        line_out.resize(static_cast<std::size_t>(nx));

        int oa = axis == 0 ? 1 : 0;
        int ob = axis == 2 ? 1 : 2;
        if (oa == ob) ob = 2;
        for (int ia = 0; ia < cur_c[oa]; ++ia)
            for (int ib = 0; ib < cur_c[ob]; ++ib) {
                const std::size_t base_in = static_cast<std::size_t>(ia) * cur_stride[oa] +
                                            static_cast<std::size_t>(ib) * cur_stride[ob];
                for (int j = 0; j < ny; ++j) {
                    const double v = buf[base_in + static_cast<std::size_t>(j) * cur_stride[axis]];
                    // later passes hold partial suprema: conjugate their negation
                    line_in[static_cast<std::size_t>(j)] = axis == 0 ? v : -v;
                }
                detail::conjugate_line(y_nodes, line_in, x_nodes, line_out, hull);
                const std::size_t base_out = static_cast<std::size_t>(ia) * nxt_stride[oa] +
                                             static_cast<std::size_t>(ib) * nxt_stride[ob];
                for (int k = 0; k < nx; ++k)
                    next[base_out + static_cast<std::size_t>(k) * nxt_stride[axis]] =
                        line_out[static_cast<std::size_t>(k)];
            }

        buf.swap(next);
        cur_counts = next_counts;
        cur_lo[static_cast<std::size_t>(axis)] = dual_lo[static_cast<std::size_t>(axis)];
        cur_hi[static_cast<std::size_t>(axis)] = dual_hi[static_cast<std::size_t>(axis)];
    }

    // -inf can only appear in intermediate passes (all-infinite lines); the
    // final supremum over a proper grid is finite, but guard regardless
    for (double& v : buf)
        if (v == -kPlusInf) v = kPlusInf;

    out.counts = cur_counts;
    out.lo = cur_lo;
    out.hi = cur_hi;
    out.values = std::move(buf);
    return out;
}

inline GridFunction legendre(const GridFunction& phi) {
    std::array<double, 3> dlo{0, 0, 0}, dhi{0, 0, 0};
    default_dual_box(phi, dlo, dhi);
    return legendre(phi, std::span<const double>(dlo.data(), static_cast<std::size_t>(phi.dim)),
                    std::span<const double>(dhi.data(), static_cast<std::size_t>(phi.dim)),
                    std::span<const int>(phi.counts.data(), static_cast<std::size_t>(phi.dim)));
}

/* Conjugate evaluated back on a prescribed box with the same node counts. */
inline GridFunction legendre_onto(const GridFunction& phi, const std::array<double, 3>& lo,
                                  const std::array<double, 3>& hi, const std::array<int, 3>& counts) {
    return legendre(phi, std::span<const double>(lo.data(), static_cast<std::size_t>(phi.dim)),
                    std::span<const double>(hi.data(), static_cast<std::size_t>(phi.dim)),
                    std::span<const int>(counts.data(), static_cast<std::size_t>(phi.dim)));
}

/*
 * Epi-sum of two grid functions through the conjugate identity: conjugates
 * add on a shared dual grid and one conjugation maps back.  The default
 * output box is the Minkowski sum of the input boxes, where the epi-sum
 * naturally lives.
 */
inline GridFunction inf_convolution(const GridFunction& phi, const GridFunction& psi) {
    if (phi.dim != psi.dim) throw std::invalid_argument("inf_convolution: dimension mismatch");
    std::array<double, 3> alo{0, 0, 0}, ahi{0, 0, 0}, blo{0, 0, 0}, bhi{0, 0, 0};
    default_dual_box(phi, alo, ahi);
    default_dual_box(psi, blo, bhi);
    std::array<double, 3> dlo{0, 0, 0}, dhi{0, 0, 0};
    std::array<int, 3> dcounts{1, 1, 1};
    for (int a = 0; a < phi.dim; ++a) {
        // the epi-sum's slope range is the intersection of the two ranges;
        // the union is a safe cover for both conjugates
        dlo[static_cast<std::size_t>(a)] = std::min(alo[static_cast<std::size_t>(a)], blo[static_cast<std::size_t>(a)]);
        dhi[static_cast<std::size_t>(a)] = std::max(ahi[static_cast<std::size_t>(a)], bhi[static_cast<std::size_t>(a)]);
        dcounts[static_cast<std::size_t>(a)] =
            std::max(phi.counts[static_cast<std::size_t>(a)], psi.counts[static_cast<std::size_t>(a)]);
    }
    const auto dspan_lo = std::span<const double>(dlo.data(), static_cast<std::size_t>(phi.dim));
    const auto dspan_hi = std::span<const double>(dhi.data(), static_cast<std::size_t>(phi.dim));
    const auto dspan_n = std::span<const int>(dcounts.data(), static_cast<std::size_t>(phi.dim));
    const GridFunction sum = grid_sum(legendre(phi, dspan_lo, dspan_hi, dspan_n),
                                      legendre(psi, dspan_lo, dspan_hi, dspan_n));
    std::array<double, 3> olo{0, 0, 0}, ohi{0, 0, 0};
    std::array<int, 3> ocounts{1, 1, 1};
    for (int a = 0; a < phi.dim; ++a) {
        olo[static_cast<std::size_t>(a)] =
            phi.lo[static_cast<std::size_t>(a)] + psi.lo[static_cast<std::size_t>(a)];
        ohi[static_cast<std::size_t>(a)] =
            phi.hi[static_cast<std::size_t>(a)] + psi.hi[static_cast<std::size_t>(a)];
        ocounts[static_cast<std::size_t>(a)] = dcounts[static_cast<std::size_t>(a)];
    }
    return legendre_onto(sum, olo, ohi, ocounts);
}

/*
 * Moreau envelope: quadratic regularization applied on the dual side, where
 * it is a pointwise addition of (t/2)||y||^2, then conjugated back onto the
 * original box.  Discretely the result never exceeds the input nodewise and
 * decreases in t, matching the analytic envelope's behaviour.
 */
inline GridFunction moreau(const GridFunction& phi, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("moreau: t must be positive");
    std::array<double, 3> dlo{0, 0, 0}, dhi{0, 0, 0};
    default_dual_box(phi, dlo, dhi);
    GridFunction conj =
        legendre(phi, std::span<const double>(dlo.data(), static_cast<std::size_t>(phi.dim)),
                 std::span<const double>(dhi.data(), static_cast<std::size_t>(phi.dim)),
                 std::span<const int>(phi.counts.data(), static_cast<std::size_t>(phi.dim)));
    std::size_t k = 0;
    for (int i0 = 0; i0 < conj.counts[0]; ++i0)
        for (int i1 = 0; i1 < conj.counts[1]; ++i1)
            for (int i2 = 0; i2 < conj.counts[2]; ++i2) {
                const int idx[3] = {i0, i1, i2};
                double q = 0.0;
                for (int a = 0; a < conj.dim; ++a) {
                    const double y = conj.node_coord(a, idx[a]);
                    q += y * y;
                }
                conj.values[k++] += 0.5 * t * q;
            }
    return legendre_onto(conj, phi.lo, phi.hi, phi.counts);
}

}  // namespace santalo

#endif
