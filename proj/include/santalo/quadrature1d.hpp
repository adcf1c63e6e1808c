#ifndef SANTALO_QUADRATURE1D_HPP
#define SANTALO_QUADRATURE1D_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace santalo {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/*
 * Gauss-Legendre rule on [-1, 1].  Nodes are roots of the Legendre
 * polynomial P_m obtained by Newton iteration from Chebyshev estimates;
 * exact for polynomials of degree <= 2m - 1.
 */
inline Rule1D gauss_legendre(int m) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: m < 1");
    Rule1D r;
    r.nodes.resize(static_cast<std::size_t>(m));
    r.weights.resize(static_cast<std::size_t>(m));
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = m * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.nodes[static_cast<std::size_t>(i)] = -x;
        r.weights[static_cast<std::size_t>(i)] = w;
        r.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
        r.weights[static_cast<std::size_t>(m - 1 - i)] = w;
    }
    if (m % 2 == 1) r.nodes[static_cast<std::size_t>(m / 2)] = 0.0;
    return r;
}

inline Rule1D gauss_legendre_ab(int m, double a, double b) {
    Rule1D r = gauss_legendre(m);
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        r.nodes[i] = mid + hw * r.nodes[i];
        r.weights[i] *= hw;
    }
    return r;
}

namespace detail {
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/* Adaptive Simpson on [a, b] with absolute tolerance tol. */
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int max_depth = 52) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/*
 * Composite Simpson coefficients for n equally spaced nodes with spacing h.
 * An odd interval count is closed with a Simpson 3/8 tail, so any n >= 4
 * keeps fourth-order accuracy.
 */
inline std::vector<double> simpson_coefficients(int n, double h) {
    if (n < 2) throw std::invalid_argument("simpson_coefficients: n < 2");
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    auto simpson_block = [&](int first, int last) {  // even interval count
        if (last <= first) return;
        for (int i = first; i <= last; ++i) {
            double c = (i == first || i == last) ? 1.0 : ((i - first) % 2 == 1 ? 4.0 : 2.0);
            w[static_cast<std::size_t>(i)] += c * h / 3.0;
        }
    };
    const int intervals = n - 1;
    if (n == 2) {
        w[0] = w[1] = 0.5 * h;
    } else if (n == 3) {
        simpson_block(0, 2);
    } else if (intervals % 2 == 0) {
        simpson_block(0, n - 1);
    } else {
        simpson_block(0, n - 4);
        const double c38 = 3.0 * h / 8.0;
        w[static_cast<std::size_t>(n - 4)] += c38;
        w[static_cast<std::size_t>(n - 3)] += 3.0 * c38;
        w[static_cast<std::size_t>(n - 2)] += 3.0 * c38;
        w[static_cast<std::size_t>(n - 1)] += c38;
    }
    return w;
}

}  // namespace santalo

#endif
