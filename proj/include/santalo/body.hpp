#ifndef SANTALO_BODY_HPP
#define SANTALO_BODY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "santalo/sphere.hpp"
#include "santalo/vec.hpp"

namespace santalo {

using SupportFn = std::function<double(std::span<const double>)>;

/*
 * A convex body described by its support function.  The evaluator is
 * positively 1-homogeneous and defined for every nonzero argument, so
 * callers never need to normalize.  Optional extras (vertex list, exact
 * volume, exact radial function) let the metric routines pick exact paths;
 * the tags record structure that tests and checks may rely on.
 */
struct Body {
    int dim = 0;
    SupportFn support;
    std::optional<std::vector<Vec>> vertices;
    std::optional<double> exact_volume;
    SupportFn radial;  // empty unless an exact radial evaluator exists
    bool origin_interior = false;
    bool symmetric = false;
    bool smooth = false;
    std::string label;
};

inline double support(const Body& k, std::span<const double> u) { return k.support(u); }

/* ---- polygon helpers (dim 2) ------------------------------------------- */

/* Convex hull by monotone chain; returns counterclockwise vertices. */
inline std::vector<Vec> convex_hull_2d(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Vec> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-14) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-14) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline double polygon_area(const std::vector<Vec>& ccw) {
    double a = 0.0;
    for (std::size_t i = 0; i < ccw.size(); ++i) {
        const Vec& p = ccw[i];
        const Vec& q = ccw[(i + 1) % ccw.size()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * std::abs(a);
}

/* Largest lambda with lambda * u inside the polygon (o must be interior). */
inline double polygon_ray_exit(const std::vector<Vec>& ccw, std::span<const double> u) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ccw.size(); ++i) {
        const Vec& p = ccw[i];
        const Vec& q = ccw[(i + 1) % ccw.size()];
        const double nx = q[1] - p[1], ny = p[0] - q[0];  // outer normal of ccw edge
        const double h = nx * p[0] + ny * p[1];
        const double d = nx * u[0] + ny * u[1];
        if (d > 1e-14 && h > 0.0) best = std::min(best, h / d);
    }
    return best;
}

/* ---- polyhedron helpers (dim 3) ------------------------------------------ */

struct Facet3 {
    Vec normal;     // outward unit normal
    double offset;  // normal . x == offset on the face plane
    double area;
};

/*
 * Supporting-plane enumeration for a small 3-D point cloud: every vertex
 * triple whose plane has all points on one side is (part of) a facet.
 * Coplanar triples of one face collapse to a single entry.  Returns an
 * empty list when the hull is not full-dimensional.
 */
inline std::vector<Facet3> polyhedron_facets(const std::vector<Vec>& pts) {
    const std::size_t m = pts.size();
    if (m < 4 || m > 64) return {};
    double scale = 0.0;
    for (const Vec& p : pts) scale = std::max(scale, norm(p));
    const double eps = 1e-9 * std::max(1.0, scale);

    std::vector<Facet3> planes;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t l = j + 1; l < m; ++l) {
                const Vec& a = pts[i];
                const Vec& b = pts[j];
                const Vec& c = pts[l];
                Vec n{(b[1] - a[1]) * (c[2] - a[2]) - (b[2] - a[2]) * (c[1] - a[1]),
                      (b[2] - a[2]) * (c[0] - a[0]) - (b[0] - a[0]) * (c[2] - a[2]),
                      (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])};
                const double len = norm(n);
                if (len <= eps * eps) continue;  // collinear triple
                scale_inplace(n, 1.0 / len);
                double off = dot(n, a);
                bool above = false, below = false;
                for (const Vec& p : pts) {
                    const double d = dot(n, p) - off;
                    if (d > eps) above = true;
                    if (d < -eps) below = true;
                    if (above && below) break;
                }
                if (above && below) continue;  // cuts through the cloud
                if (above) {                   // flip so all points lie below
                    scale_inplace(n, -1.0);
                    off = -off;
                }
                bool known = false;
                for (const Facet3& f : planes)
                    if (std::abs(f.offset - off) <= 1e-7 * std::max(1.0, scale) &&
                        dot(f.normal, n) > 1.0 - 1e-10) {
                        known = true;
                        break;
                    }
                if (!known) planes.push_back({std::move(n), off, 0.0});
            }
    if (planes.size() < 4) return {};

    // face areas: gather incident vertices, order them angularly in-plane
    for (Facet3& f : planes) {
        std::vector<Vec> face;
        for (const Vec& p : pts)
            if (std::abs(dot(f.normal, p) - f.offset) <= 10.0 * eps) face.push_back(p);
        if (face.size() < 3) return {};
        Vec centroid(3, 0.0);
        for (const Vec& p : face)
            for (std::size_t t = 0; t < 3; ++t) centroid[t] += p[t];
        scale_inplace(centroid, 1.0 / static_cast<double>(face.size()));
        // orthonormal in-plane basis
        Vec e1 = std::abs(f.normal[0]) < 0.9 ? Vec{1.0, 0.0, 0.0} : Vec{0.0, 1.0, 0.0};
        const double proj = dot(e1, f.normal);
        for (std::size_t t = 0; t < 3; ++t) e1[t] -= proj * f.normal[t];
        scale_inplace(e1, 1.0 / norm(e1));
        const Vec e2{f.normal[1] * e1[2] - f.normal[2] * e1[1],
                     f.normal[2] * e1[0] - f.normal[0] * e1[2],
                     f.normal[0] * e1[1] - f.normal[1] * e1[0]};
        std::vector<std::pair<double, std::pair<double, double>>> flat;
        for (const Vec& p : face) {
            const Vec d = sub(p, centroid);
            const double x = dot(d, e1), y = dot(d, e2);
            flat.push_back({std::atan2(y, x), {x, y}});
        }
        std::sort(flat.begin(), flat.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        double twice_area = 0.0;
        for (std::size_t t = 0; t < flat.size(); ++t) {
            const auto& p = flat[t].second;
            const auto& q = flat[(t + 1) % flat.size()].second;
            twice_area += p.first * q.second - q.first * p.second;
        }
        f.area = 0.5 * std::abs(twice_area);
    }
    return planes;
}

/* ---- families ----------------------------------------------------------- */

inline Body make_polytope(int dim, std::vector<Vec> points, std::string label = "polytope") {
    if (points.empty()) throw std::invalid_argument("make_polytope: empty point list");
    for (const Vec& p : points)
        if (static_cast<int>(p.size()) != dim)
            throw std::invalid_argument("make_polytope: point dimension mismatch");
    Body k;
    k.dim = dim;
    k.label = std::move(label);
    if (dim == 2) points = convex_hull_2d(std::move(points));
    auto verts = std::make_shared<std::vector<Vec>>(points);
    k.vertices = *verts;
    k.support = [verts](std::span<const double> u) {
        double best = -std::numeric_limits<double>::infinity();
        for (const Vec& v : *verts) best = std::max(best, dot(v, u));
        return best;
    };
    if (dim == 2) {
        k.exact_volume = polygon_area(points);
        bool inner = true;
        for (std::size_t i = 0; i < verts->size() && inner; ++i) {
            const Vec& p = (*verts)[i];
            const Vec& q = (*verts)[(i + 1) % verts->size()];
            if ((q[1] - p[1]) * p[0] + (p[0] - q[0]) * p[1] <= 1e-12) inner = false;
        }
        if (inner && verts->size() >= 3) {
            k.origin_interior = true;
            k.radial = [verts](std::span<const double> u) {
                return polygon_ray_exit(*verts, normalized(u));
            };
        }
    } else if (dim == 3) {
        auto facets = std::make_shared<std::vector<Facet3>>(polyhedron_facets(*verts));
        if (!facets->empty()) {
            // divergence theorem from the vertex centroid (an interior point)
            Vec o(3, 0.0);
            for (const Vec& v : *verts)
                for (std::size_t t = 0; t < 3; ++t) o[t] += v[t];
            scale_inplace(o, 1.0 / static_cast<double>(verts->size()));
            double vol = 0.0;
            double min_offset = std::numeric_limits<double>::infinity();
            for (const Facet3& f : *facets) {
                vol += (f.offset - dot(f.normal, o)) * f.area;
                min_offset = std::min(min_offset, f.offset);
            }
            k.exact_volume = vol / 3.0;
            if (min_offset > 1e-9) {
                k.origin_interior = true;
                k.radial = [facets](std::span<const double> u) {
                    const Vec dir = normalized(u);
                    double best = std::numeric_limits<double>::infinity();
                    for (const Facet3& f : *facets) {
                        const double d = dot(f.normal, dir);
                        if (d > 1e-14) best = std::min(best, f.offset / d);
                    }
                    return best;
                };
            }
        }
    }
    return k;
}

inline Body ball(int dim, double r = 1.0) {
    Body k;
    k.dim = dim;
    k.support = [r](std::span<const double> u) { return r * norm(u); };
    k.radial = [r](std::span<const double>) { return r; };
    k.exact_volume = std::pow(r, dim) * unit_ball_volume(dim);
    k.origin_interior = r > 0.0;
    k.symmetric = true;
    k.smooth = true;
    k.label = "ball";
    return k;
}

/* Cube [-1, 1]^n. */
inline Body cube(int dim) {
    Body k;
    k.dim = dim;
    k.support = [](std::span<const double> u) {
        double s = 0.0;
        for (double x : u) s += std::abs(x);
        return s;
    };
    k.radial = [](std::span<const double> u) {
        double m = 0.0;
        for (double x : u) m = std::max(m, std::abs(x));
        return m > 0.0 ? norm(u) / m : 0.0;
    };
    k.exact_volume = std::pow(2.0, dim);
    std::vector<Vec> verts;
    if (dim == 2) {
        // planar vertex lists are boundary walks: keep them counterclockwise
        verts = {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
    } else {
        for (std::uint32_t mask = 0; mask < (1u << dim); ++mask) {
            Vec v(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i)
                v[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? 1.0 : -1.0;
            verts.push_back(std::move(v));
        }
    }
    k.vertices = std::move(verts);
    k.origin_interior = true;
    k.symmetric = true;
    k.label = "cube";
    return k;
}

/* conv{o, e_1, ..., e_n}. */
inline Body simplex(int dim) {
    std::vector<Vec> pts{Vec(static_cast<std::size_t>(dim), 0.0)};
    for (int i = 0; i < dim; ++i) pts.push_back(basis_vector(dim, i));
    Body k = make_polytope(dim, std::move(pts), "simplex");
    k.exact_volume = 1.0 / std::tgamma(dim + 1.0);
    k.origin_interior = false;
    k.radial = nullptr;
    return k;
}

inline Body ellipsoid(Vec semi_axes) {
    const int dim = static_cast<int>(semi_axes.size());
    Body k;
    k.dim = dim;
    auto a = std::make_shared<Vec>(std::move(semi_axes));
    for (double x : *a)
        if (x <= 0.0) throw std::invalid_argument("ellipsoid: semi-axes must be positive");
    k.support = [a](std::span<const double> u) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += (*a)[i] * (*a)[i] * u[i] * u[i];
        return std::sqrt(s);
    };
    k.radial = [a](std::span<const double> u) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * u[i] / ((*a)[i] * (*a)[i]);
        return norm(u) / std::sqrt(s);
    };
    double vol = unit_ball_volume(dim);
    for (double x : *a) vol *= x;
    k.exact_volume = vol;
    k.origin_interior = true;
    k.symmetric = true;
    k.smooth = true;
    k.label = "ellipsoid";
    return k;
}

/* Segment [-e_1, e_1] in R^dim. */
inline Body segment(int dim) {
    Body k;
    k.dim = dim;
    k.support = [](std::span<const double> u) { return std::abs(u[0]); };
    k.vertices = std::vector<Vec>{basis_vector(dim, 0), negated(basis_vector(dim, 0))};
    k.exact_volume = 0.0;
    k.symmetric = true;
    k.label = "segment";
    return k;
}

/*
 * Convex hull of k points sampled uniformly on the unit sphere; the point
 * stream is fully determined by the seed.
 */
inline Body random_polytope(int dim, int k, std::uint64_t seed) {
    if (k < dim + 1) throw std::invalid_argument("random_polytope: need at least dim + 1 points");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        Vec p(static_cast<std::size_t>(dim));
        double n2 = 0.0;
        do {
            for (double& x : p) x = gauss(rng);
            n2 = norm2(p);
        } while (n2 < 1e-12);
        scale_inplace(p, 1.0 / std::sqrt(n2));
        pts.push_back(std::move(p));
    }
    Body b = make_polytope(dim, std::move(pts), "random_polytope");
    b.label += "_" + std::to_string(seed);
    return b;
}

/* ---- support-level algebra ---------------------------------------------- */

inline Body translate(const Body& k, Vec y) {
    Body r = k;
    auto shift = std::make_shared<Vec>(std::move(y));
    SupportFn base = k.support;
    r.support = [base, shift](std::span<const double> u) { return base(u) + dot(*shift, u); };
    if (k.vertices) {
        std::vector<Vec> verts;
        for (const Vec& v : *k.vertices) verts.push_back(add(v, *shift));
        if (k.dim == 2 || k.dim == 3) {
            Body repacked = make_polytope(k.dim, verts, r.label);
            if (k.exact_volume) repacked.exact_volume = k.exact_volume;
            return repacked;
        }
        r.vertices = std::move(verts);
    }
    r.radial = nullptr;
    r.origin_interior = false;  // unknown after translation unless recomputed
    r.symmetric = false;
    return r;
}

inline Body minkowski_sum(const Body& a, const Body& b) {
    if (a.dim != b.dim) throw std::invalid_argument("minkowski_sum: dimension mismatch");
    Body r;
    r.dim = a.dim;
    SupportFn ha = a.support, hb = b.support;
    r.support = [ha, hb](std::span<const double> u) { return ha(u) + hb(u); };
    if (a.vertices && b.vertices) {
        std::vector<Vec> verts;
        for (const Vec& p : *a.vertices)
            for (const Vec& q : *b.vertices) verts.push_back(add(p, q));
        if (a.dim == 2) {
            Body poly = make_polytope(2, std::move(verts), a.label + "+" + b.label);
            poly.symmetric = a.symmetric && b.symmetric;
            return poly;
        }
        r.vertices = std::move(verts);
    }
    r.symmetric = a.symmetric && b.symmetric;
    r.origin_interior = a.origin_interior || b.origin_interior;
    r.label = a.label + "+" + b.label;
    return r;
}

inline Body scale_body(const Body& k, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("scale_body: negative factor");
    Body r = k;
    SupportFn base = k.support;
    r.support = [base, lambda](std::span<const double> u) { return lambda * base(u); };
    if (k.radial) {
        SupportFn rad = k.radial;
        r.radial = [rad, lambda](std::span<const double> u) { return lambda * rad(u); };
    }
    if (k.vertices) {
        std::vector<Vec> verts;
        for (const Vec& v : *k.vertices) verts.push_back(scaled(v, lambda));
        r.vertices = std::move(verts);
    }
    if (k.exact_volume) r.exact_volume = *k.exact_volume * std::pow(lambda, k.dim);
    r.label = k.label + "_scaled";
    return r;
}

inline Body reflect(const Body& k) {
    Body r = k;
    SupportFn base = k.support;
    r.support = [base](std::span<const double> u) { return base(negated(u)); };
    if (k.radial) {
        SupportFn rad = k.radial;
        r.radial = [rad](std::span<const double> u) { return rad(negated(u)); };
    }
    if (k.vertices) {
        std::vector<Vec> verts;
        for (const Vec& v : *k.vertices) verts.push_back(negated(v));
        r.vertices = std::move(verts);
    }
    r.label = "-" + k.label;
    return r;
}

/* (K + (-K)) / 2, the support-level average of a body and its reflection. */
inline Body central_symmetral(const Body& k) {
    Body sum = minkowski_sum(k, reflect(k));
    Body r = scale_body(sum, 0.5);
    r.symmetric = true;
    r.label = "delta(" + k.label + ")";
    if (r.vertices) {
        if (k.dim == 2) {
            Body poly = make_polytope(2, *r.vertices, r.label);
            poly.symmetric = true;
            return poly;
        }
    }
    return r;
}

inline Body rotate_body(const Body& k, const Mat& rot) {
    Body r = k;
    SupportFn base = k.support;
    Mat rot_copy = rot;
    r.support = [base, rot_copy](std::span<const double> u) {
        return base(rot_copy.apply_transposed(u));
    };
    if (k.radial) {
        SupportFn rad = k.radial;
        Mat rc = rot;
        r.radial = [rad, rc](std::span<const double> u) { return rad(rc.apply_transposed(u)); };
    }
    if (k.vertices) {
        std::vector<Vec> verts;
        for (const Vec& v : *k.vertices) verts.push_back(rot.apply(v));
        r.vertices = std::move(verts);
    }
    r.label = "rot(" + k.label + ")";
    return r;
}

/* Body whose support samples are given on the nodes of an external rule. */
inline Body from_support_fn(int dim, SupportFn h, std::string label = "custom") {
    Body k;
    k.dim = dim;
    k.support = std::move(h);
    k.label = std::move(label);
    return k;
}

/*
 * Exact membership test.  Polygons use the half-plane form (valid even when
 * the origin touches the boundary); otherwise a radial evaluator resolves
 * membership along the ray through x.
 */
inline bool body_contains(const Body& k, std::span<const double> x, double tol = 1e-9) {
    if (k.dim == 2 && k.vertices && k.vertices->size() >= 3) {
        const auto& v = *k.vertices;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Vec& p = v[i];
            const Vec& q = v[(i + 1) % v.size()];
            const double cr = (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]);
            if (cr < -tol) return false;
        }
        return true;
    }
    const double r = norm(x);
    if (r < tol) {
        if (k.origin_interior) return true;
        // fall through to the radial comparison at tiny radius
    }
    if (k.radial) return r <= k.radial(x) * (1.0 + tol) + tol;
    throw std::invalid_argument("body_contains: needs polygon vertices or a radial evaluator");
}

/* Minkowski gauge ||x||_K = inf { t > 0 : x in tK }; 0 at the origin. */
inline double body_gauge(const Body& k, std::span<const double> x) {
    const double r = norm(x);
    if (r == 0.0) return 0.0;
    if (k.radial) {
        const double rho = k.radial(x);
        if (!(rho > 1e-300)) return std::numeric_limits<double>::infinity();
        return r / rho;
    }
    throw std::invalid_argument("body_gauge: needs a radial evaluator");
}

}  // namespace santalo

#endif
