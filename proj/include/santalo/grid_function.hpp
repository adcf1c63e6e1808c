#ifndef SANTALO_GRID_FUNCTION_HPP
#define SANTALO_GRID_FUNCTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "santalo/vec.hpp"

namespace santalo {

inline constexpr double kPlusInf = std::numeric_limits<double>::infinity();

/*
 * Extended-real function sampled on an axis-aligned box grid, dimensions 1-3.
 * +inf marks points outside the effective domain (the IEEE infinity is the
 * reserved sentinel; -inf never appears in stored values).  Unused axes
 * carry a single node at zero so the storage layout is uniform.
 */
struct GridFunction {
    int dim = 0;
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{0.0, 0.0, 0.0};
    std::array<int, 3> counts{1, 1, 1};
    std::vector<double> values;  // index = (i0 * counts[1] + i1) * counts[2] + i2

    std::size_t size() const { return values.size(); }

    double step(int axis) const {
        return counts[static_cast<std::size_t>(axis)] > 1
                   ? (hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]) /
                         (counts[static_cast<std::size_t>(axis)] - 1)
                   : 0.0;
    }

    double node_coord(int axis, int i) const {
        return lo[static_cast<std::size_t>(axis)] + i * step(axis);
    }

    std::size_t flat_index(int i0, int i1, int i2) const {
        return (static_cast<std::size_t>(i0) * static_cast<std::size_t>(counts[1]) +
                static_cast<std::size_t>(i1)) *
                   static_cast<std::size_t>(counts[2]) +
               static_cast<std::size_t>(i2);
    }

    double at(int i0, int i1 = 0, int i2 = 0) const { return values[flat_index(i0, i1, i2)]; }
    double& at(int i0, int i1 = 0, int i2 = 0) { return values[flat_index(i0, i1, i2)]; }

    Vec node_point(int i0, int i1 = 0, int i2 = 0) const {
        Vec x(static_cast<std::size_t>(dim));
        const int idx[3] = {i0, i1, i2};
        for (int a = 0; a < dim; ++a) x[static_cast<std::size_t>(a)] = node_coord(a, idx[a]);
        return x;
    }

    bool proper() const {
        for (double v : values)
            if (std::isfinite(v)) return true;
        return false;
    }

    /* Multilinear interpolation; +inf wherever any supporting corner is +inf
       or the point leaves the box. */
    double interpolate(std::span<const double> x) const {
        int base[3] = {0, 0, 0};
        double frac[3] = {0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) {
            const double s = step(a);
            const double t = (x[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]);
            if (s == 0.0) {
                if (std::abs(t) > 1e-12) return kPlusInf;
                continue;
            }
            double u = t / s;
            if (u < -1e-9 || u > counts[static_cast<std::size_t>(a)] - 1 + 1e-9) return kPlusInf;
            u = std::clamp(u, 0.0, static_cast<double>(counts[static_cast<std::size_t>(a)] - 1));
            int i = static_cast<int>(std::floor(u));
            if (i >= counts[static_cast<std::size_t>(a)] - 1) i = counts[static_cast<std::size_t>(a)] - 2;
            if (i < 0) i = 0;
            base[a] = i;
            frac[a] = u - i;
        }
        double acc = 0.0;
        const int corners = 1 << dim;
        for (int c = 0; c < corners; ++c) {
            double w = 1.0;
            int idx[3] = {base[0], base[1], base[2]};
            for (int a = 0; a < dim; ++a) {
                const bool high = (c >> a) & 1;
                w *= high ? frac[a] : 1.0 - frac[a];
                if (high) idx[a] += 1;
            }
            const double v = at(idx[0], idx[1], idx[2]);
            if (std::isinf(v)) {
                if (w > 1e-12) return kPlusInf;
                continue;
            }
            acc += w * v;
        }
        return acc;
    }
};

inline GridFunction make_grid(int dim, std::span<const double> lo, std::span<const double> hi,
                              std::span<const int> counts,
                              const std::function<double(std::span<const double>)>& fn) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("make_grid: dim must be 1, 2 or 3");
    GridFunction g;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) {
        g.lo[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)];
        g.hi[static_cast<std::size_t>(a)] = hi[static_cast<std::size_t>(a)];
        g.counts[static_cast<std::size_t>(a)] = counts[static_cast<std::size_t>(a)];
        if (g.counts[static_cast<std::size_t>(a)] < 2)
            throw std::invalid_argument("make_grid: each active axis needs at least 2 nodes");
        if (!(g.hi[static_cast<std::size_t>(a)] > g.lo[static_cast<std::size_t>(a)]))
            throw std::invalid_argument("make_grid: box must have positive extent");
    }
    g.values.resize(static_cast<std::size_t>(g.counts[0]) * static_cast<std::size_t>(g.counts[1]) *
                    static_cast<std::size_t>(g.counts[2]));
    Vec x(static_cast<std::size_t>(dim));
    std::size_t k = 0;
    for (int i0 = 0; i0 < g.counts[0]; ++i0)
        for (int i1 = 0; i1 < g.counts[1]; ++i1)
            for (int i2 = 0; i2 < g.counts[2]; ++i2) {
                const int idx[3] = {i0, i1, i2};
                for (int a = 0; a < dim; ++a) x[static_cast<std::size_t>(a)] = g.node_coord(a, idx[a]);
                double v = fn(x);
                if (v == -kPlusInf) throw std::invalid_argument("make_grid: -inf value");
                g.values[k++] = v;
            }
    return g;
}

inline GridFunction make_grid_cube(int dim, double half_width, int count_per_axis,
                                   const std::function<double(std::span<const double>)>& fn) {
    Vec lo(static_cast<std::size_t>(dim), -half_width), hi(static_cast<std::size_t>(dim), half_width);
    std::vector<int> counts(static_cast<std::size_t>(dim), count_per_axis);
    return make_grid(dim, lo, hi, counts, fn);
}

inline void require_same_layout(const GridFunction& a, const GridFunction& b, const char* who) {
    if (a.dim != b.dim) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    for (int ax = 0; ax < a.dim; ++ax)
        if (a.counts[static_cast<std::size_t>(ax)] != b.counts[static_cast<std::size_t>(ax)] ||
            std::abs(a.lo[static_cast<std::size_t>(ax)] - b.lo[static_cast<std::size_t>(ax)]) > 1e-12 ||
            std::abs(a.hi[static_cast<std::size_t>(ax)] - b.hi[static_cast<std::size_t>(ax)]) > 1e-12)
            throw std::invalid_argument(std::string(who) + ": box mismatch");
}

/* Pointwise sum with inf + finite = inf. */
inline GridFunction grid_sum(const GridFunction& a, const GridFunction& b) {
    require_same_layout(a, b, "grid_sum");
    GridFunction out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double x = a.values[i], y = b.values[i];
        out.values[i] = (std::isinf(x) || std::isinf(y)) ? kPlusInf : x + y;
    }
    return out;
}

/* f(x) -> f(-x): index reversal along every axis, box negated, exact. */
inline GridFunction reflected(const GridFunction& g) {
    GridFunction out = g;
    for (int a = 0; a < g.dim; ++a) {
        out.lo[static_cast<std::size_t>(a)] = -g.hi[static_cast<std::size_t>(a)];
        out.hi[static_cast<std::size_t>(a)] = -g.lo[static_cast<std::size_t>(a)];
    }
    for (int i0 = 0; i0 < g.counts[0]; ++i0)
        for (int i1 = 0; i1 < g.counts[1]; ++i1)
            for (int i2 = 0; i2 < g.counts[2]; ++i2)
                out.at(i0, i1, i2) =
                    g.at(g.counts[0] - 1 - i0, g.dim > 1 ? g.counts[1] - 1 - i1 : i1,
                         g.dim > 2 ? g.counts[2] - 1 - i2 : i2);
    return out;
}

inline double max_cell_diagonal(const GridFunction& g) {
    double d2 = 0.0;
    for (int a = 0; a < g.dim; ++a) d2 += g.step(a) * g.step(a);
    return std::sqrt(d2);
}

/* Largest finite-to-finite slope between adjacent nodes, over all axes. */
inline double lipschitz_estimate(const GridFunction& g) {
    double lip = 0.0;
    const int strides[3] = {g.counts[1] * g.counts[2], g.counts[2], 1};
    for (int a = 0; a < g.dim; ++a) {
        const double s = g.step(a);
        if (s == 0.0) continue;
        for (int i0 = 0; i0 < g.counts[0]; ++i0)
            for (int i1 = 0; i1 < g.counts[1]; ++i1)
                for (int i2 = 0; i2 < g.counts[2]; ++i2) {
                    const int idx[3] = {i0, i1, i2};
                    if (idx[a] + 1 >= g.counts[static_cast<std::size_t>(a)]) continue;
                    const std::size_t k = g.flat_index(i0, i1, i2);
                    const double v0 = g.values[k];
                    const double v1 = g.values[k + static_cast<std::size_t>(strides[a])];
                    if (std::isfinite(v0) && std::isfinite(v1))
                        lip = std::max(lip, std::abs(v1 - v0) / s);
                }
    }
    return lip;
}

/* Slack budget used by grid-level equality assertions. */
inline double grid_slack(const GridFunction& g) {
    return 2.0 * max_cell_diagonal(g) * lipschitz_estimate(g);
}

/*
 * Discrete midpoint convexity along axes and the in-plane diagonals:
 * v(m-d) + v(m+d) - 2 v(m) >= -slack at every interior node m, where the
 * slack scales with the local Lipschitz bound.  A finite pair straddling an
 * infinite midpoint is a violation (a proper convex function is finite on
 * segments between domain points).
 */
inline bool is_convex_grid(const GridFunction& g, double slack_factor = 1e-9) {
    std::vector<std::array<int, 3>> dirs;
    for (int a = 0; a < g.dim; ++a) {
        std::array<int, 3> d{0, 0, 0};
        d[static_cast<std::size_t>(a)] = 1;
        dirs.push_back(d);
    }
    for (int a = 0; a < g.dim; ++a)
        for (int b = a + 1; b < g.dim; ++b) {
            std::array<int, 3> d{0, 0, 0};
            d[static_cast<std::size_t>(a)] = 1;
            d[static_cast<std::size_t>(b)] = 1;
            dirs.push_back(d);
            d[static_cast<std::size_t>(b)] = -1;
            dirs.push_back(d);
        }
    for (const auto& d : dirs) {
        double len = 0.0;
        for (int a = 0; a < 3; ++a) len += d[static_cast<std::size_t>(a)] * g.step(a) *
                                          d[static_cast<std::size_t>(a)] * g.step(a);
        len = std::sqrt(len);
        for (int i0 = 0; i0 < g.counts[0]; ++i0)
            for (int i1 = 0; i1 < g.counts[1]; ++i1)
                for (int i2 = 0; i2 < g.counts[2]; ++i2) {
                    const int lo_idx[3] = {i0 - d[0], i1 - d[1], i2 - d[2]};
                    const int hi_idx[3] = {i0 + d[0], i1 + d[1], i2 + d[2]};
                    bool ok = true;
                    for (int a = 0; a < 3; ++a)
                        ok = ok && lo_idx[a] >= 0 && lo_idx[a] < g.counts[static_cast<std::size_t>(a)] &&
                             hi_idx[a] >= 0 && hi_idx[a] < g.counts[static_cast<std::size_t>(a)];
                    if (!ok) continue;
                    const double vm = g.at(i0, i1, i2);
                    const double va = g.at(lo_idx[0], lo_idx[1], lo_idx[2]);
                    const double vb = g.at(hi_idx[0], hi_idx[1], hi_idx[2]);
                    if (std::isinf(va) || std::isinf(vb)) continue;
                    if (std::isinf(vm)) return false;
                    const double local_lip =
                        (std::abs(va - vm) + std::abs(vb - vm)) / std::max(len, 1e-300);
                    const double slack = slack_factor * std::max(1.0, local_lip) * len;
                    if (va + vb - 2.0 * vm < -slack) return false;
                }
    }
    return true;
}

struct CoercivityFit {
    double gamma = 0.0;
    double beta = 0.0;
};

/*
 * Linear growth certificate phi(x) >= gamma ||x|| + beta on the grid.  gamma
 * is the smallest slope from the interior minimizer to the boundary shell;
 * beta then makes the bound valid at every node.  Fails (nullopt) when the
 * boundary shell does not rise above the minimum.
 */
inline std::optional<CoercivityFit> coercivity_margin(const GridFunction& g) {
    if (!g.proper()) throw std::invalid_argument("coercivity_margin: improper function");
    double vmin = kPlusInf;
    int arg[3] = {0, 0, 0};
    for (int i0 = 0; i0 < g.counts[0]; ++i0)
        for (int i1 = 0; i1 < g.counts[1]; ++i1)
            for (int i2 = 0; i2 < g.counts[2]; ++i2)
                if (g.at(i0, i1, i2) < vmin) {
                    vmin = g.at(i0, i1, i2);
                    arg[0] = i0;
                    arg[1] = i1;
                    arg[2] = i2;
                }
    const Vec xmin = g.node_point(arg[0], arg[1], arg[2]);
    double gamma = kPlusInf;
    for (int i0 = 0; i0 < g.counts[0]; ++i0)
        for (int i1 = 0; i1 < g.counts[1]; ++i1)
            for (int i2 = 0; i2 < g.counts[2]; ++i2) {
                const int idx[3] = {i0, i1, i2};
                bool boundary = false;
                for (int a = 0; a < g.dim; ++a)
                    boundary = boundary || idx[a] == 0 || idx[a] == g.counts[static_cast<std::size_t>(a)] - 1;
                if (!boundary) continue;
                const double v = g.at(i0, i1, i2);
                if (std::isinf(v)) continue;  // +inf shell value certifies growth trivially
                Vec x = g.node_point(i0, i1, i2);
                const double dist = norm(sub(x, xmin));
                if (dist < 1e-12) return std::nullopt;  // minimum sits on the shell
                gamma = std::min(gamma, (v - vmin) / dist);
            }
    if (!std::isfinite(gamma)) {
        // entire shell is +inf: domain is interior, growth is unbounded at
        // grid scale; report the steepest finite certificate available
        gamma = lipschitz_estimate(g);
        if (gamma <= 0.0) return std::nullopt;
    }
    if (gamma <= 1e-12) return std::nullopt;
    double beta = kPlusInf;
    for (int i0 = 0; i0 < g.counts[0]; ++i0)
        for (int i1 = 0; i1 < g.counts[1]; ++i1)
            for (int i2 = 0; i2 < g.counts[2]; ++i2) {
                const double v = g.at(i0, i1, i2);
                if (std::isinf(v)) continue;
                Vec x = g.node_point(i0, i1, i2);
                beta = std::min(beta, v - gamma * norm(x));
            }
    return CoercivityFit{gamma, beta};
}

/* CSV dump: one header line "dim,lo...,hi...,counts..." then one value per line. */
inline void write_grid_csv(const std::string& path, const GridFunction& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_grid_csv: cannot open " + path);
    out.precision(17);
    out << g.dim;
    for (int a = 0; a < g.dim; ++a) out << "," << g.lo[static_cast<std::size_t>(a)];
    for (int a = 0; a < g.dim; ++a) out << "," << g.hi[static_cast<std::size_t>(a)];
    for (int a = 0; a < g.dim; ++a) out << "," << g.counts[static_cast<std::size_t>(a)];
    out << "\n";
    for (double v : g.values) {
        if (std::isinf(v))
            out << "inf\n";
        else
            out << v << "\n";
    }
}

inline GridFunction read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_grid_csv: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("read_grid_csv: empty file");
    std::stringstream hs(header);
    std::string tok;
    std::vector<double> fields;
    while (std::getline(hs, tok, ',')) fields.push_back(std::stod(tok));
    if (fields.empty()) throw std::runtime_error("read_grid_csv: bad header");
    GridFunction g;
    g.dim = static_cast<int>(fields[0]);
    if (g.dim < 1 || g.dim > 3 ||
        fields.size() != static_cast<std::size_t>(1 + 3 * g.dim))
        throw std::runtime_error("read_grid_csv: bad header");
    std::size_t total = 1;
    for (int a = 0; a < g.dim; ++a) {
        g.lo[static_cast<std::size_t>(a)] = fields[static_cast<std::size_t>(1 + a)];
        g.hi[static_cast<std::size_t>(a)] = fields[static_cast<std::size_t>(1 + g.dim + a)];
        g.counts[static_cast<std::size_t>(a)] =
            static_cast<int>(fields[static_cast<std::size_t>(1 + 2 * g.dim + a)]);
        total *= static_cast<std::size_t>(g.counts[static_cast<std::size_t>(a)]);
    }
    g.values.reserve(total);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        g.values.push_back(line == "inf" ? kPlusInf : std::stod(line));
    }
    if (g.values.size() != total) throw std::runtime_error("read_grid_csv: value count mismatch");
    return g;
}

}  // namespace santalo

#endif
