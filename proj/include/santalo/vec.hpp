#ifndef SANTALO_VEC_HPP
#define SANTALO_VEC_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace santalo {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline Vec to_vec(std::span<const double> a) { return Vec(a.begin(), a.end()); }

inline void scale_inplace(Vec& a, double s) {
    for (double& x : a) x *= s;
}

inline Vec scaled(std::span<const double> a, double s) {
    Vec r(a.begin(), a.end());
    scale_inplace(r, s);
    return r;
}

inline Vec add(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec negated(std::span<const double> a) { return scaled(a, -1.0); }

inline Vec normalized(std::span<const double> a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return scaled(a, 1.0 / n);
}

inline Vec basis_vector(int dim, int axis) {
    Vec e(static_cast<std::size_t>(dim), 0.0);
    e[static_cast<std::size_t>(axis)] = 1.0;
    return e;
}

/* Dense square matrix, row major.  Only small dimensions (n <= 8) are used. */
struct Mat {
    int n = 0;
    std::vector<double> a;  // n*n, a[i*n+j]

    Mat() = default;
    explicit Mat(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    static Mat identity(int n_) {
        Mat m(n_);
        for (int i = 0; i < n_; ++i) m(i, i) = 1.0;
        return m;
    }

    Vec apply(std::span<const double> x) const {
        assert(static_cast<int>(x.size()) == n);
        Vec y(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s;
        }
        return y;
    }

    /* Applies the transpose; for rotations this is the inverse. */
    Vec apply_transposed(std::span<const double> x) const {
        assert(static_cast<int>(x.size()) == n);
        Vec y(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += (*this)(i, j) * x[static_cast<std::size_t>(i)];
            y[static_cast<std::size_t>(j)] = s;
        }
        return y;
    }

    Mat multiplied(const Mat& rhs) const {
        assert(n == rhs.n);
        Mat r(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double v = (*this)(i, k);
                if (v == 0.0) continue;
                for (int j = 0; j < n; ++j) r(i, j) += v * rhs(k, j);
            }
        return r;
    }

    double column_dot(int j, std::span<const double> x) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += (*this)(i, j) * x[static_cast<std::size_t>(i)];
        return s;
    }
};

inline double max_abs_offdiag_gram_defect(const Mat& m) {
    double worst = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) {
            double g = 0.0;
            for (int k = 0; k < m.n; ++k) g += m(k, i) * m(k, j);
            double target = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(g - target));
        }
    return worst;
}

inline double det(Mat m) {
    int n = m.n;
    double d = 1.0;
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
        if (m(p, c) == 0.0) return 0.0;
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            d = -d;
        }
        d *= m(c, c);
        for (int r = c + 1; r < n; ++r) {
            double f = m(r, c) / m(c, c);
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return d;
}

/* Solves A x = b by Gaussian elimination with partial pivoting. */
inline Vec solve_linear(Mat m, Vec b) {
    int n = m.n;
    assert(static_cast<int>(b.size()) == n);
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(p, c))) p = r;
        if (std::abs(m(p, c)) < 1e-300) throw std::runtime_error("solve_linear: singular matrix");
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            std::swap(b[static_cast<std::size_t>(p)], b[static_cast<std::size_t>(c)]);
        }
        for (int r = c + 1; r < n; ++r) {
            double f = m(r, c) / m(c, c);
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(c)];
        }
    }
    Vec x(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int j = r + 1; j < n; ++j) s -= m(r, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(r)] = s / m(r, r);
    }
    return x;
}

}  // namespace santalo

#endif
