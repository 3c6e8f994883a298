#pragma once

// Test-side oracles, kept independent of the library's evaluation paths:
// exp-sinh quadrature over (0, inf) with a log-space integrand, adaptive
// Simpson on finite intervals, the exponential integral E1, and the direct
// gamma-difference convolution.

#include <cmath>
#include <functional>
#include <limits>

namespace oracles {

// \int_0^inf exp(log_f(t)) dt by the exp-sinh double-exponential rule; the
// log-space product avoids overflow where endpoint singularities meet the
// vanishing node weights.  log_f may return -inf.
inline double integrate_exp_sinh_log(const std::function<double(double)>& log_f,
                                     int levels = 10) {
    const double pi_half = 1.5707963267948966;
    const double cutoff = 7.0;
    auto term = [&](double u) {
        const double s = pi_half * std::sinh(u);
        const double t = std::exp(s);
        const double log_w = s + std::log(pi_half * std::cosh(u));
        const double lf = log_f(t);
        return std::isfinite(lf) ? std::exp(lf + log_w) : 0.0;
    };
    double h = 1.0;
    double sum = term(0.0);
    for (double u = h; u <= cutoff; u += h) sum += term(u) + term(-u);
    double prev = sum * h;
    for (int level = 1; level <= levels; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double u = h; u <= cutoff; u += 2.0 * h) add += term(u) + term(-u);
        const double cur = 0.5 * prev + add * h;
        if (level > 3 && std::abs(cur - prev) < 1e-13 * std::max(1.0, std::abs(cur)))
            return cur;
        prev = cur;
    }
    return prev;
}

inline double simpson_recursive(const std::function<double(double)>& f, double a,
                                double b, double fa, double fm, double fb, double tol,
                                int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_recursive(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           simpson_recursive(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

inline double integrate_simpson(const std::function<double(double)>& f, double a,
                                double b, double tol = 1e-12, int depth = 40) {
    const double m = 0.5 * (a + b);
    return simpson_recursive(f, a, b, f(a), f(m), f(b), tol, depth);
}

// E1(x) by series for small x, Lentz continued fraction otherwise
inline double expint_e1(double x) {
    if (x <= 1.5) {
        const double euler = 0.57721566490153286;
        double sum = -euler - std::log(x);
        double term = 1.0;
        for (int k = 1; k < 60; ++k) {
            term *= -x / k;
            sum -= term / k;
        }
        return sum;
    }
    double b = x + 1.0, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i <= 200; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x);
}

struct GammaDiff {
    double a1, a2, b1, b2;  // shapes and scales (e^{-x/beta})

    double log_density1(double x) const {
        if (x <= 0.0) return -std::numeric_limits<double>::infinity();
        return (a1 - 1.0) * std::log(x) - x / b1 - a1 * std::log(b1) - std::lgamma(a1);
    }
    double log_density2(double x) const {
        if (x <= 0.0) return -std::numeric_limits<double>::infinity();
        return (a2 - 1.0) * std::log(x) - x / b2 - a2 * std::log(b2) - std::lgamma(a2);
    }
    // density of y = x1 - x2 by direct numerical convolution
    double convolution(double y) const {
        if (y >= 0.0) {
            return integrate_exp_sinh_log(
                [&](double t) { return log_density1(y + t) + log_density2(t); });
        }
        return integrate_exp_sinh_log(
            [&](double t) { return log_density1(t) + log_density2(t - y); });
    }
};

}  // namespace oracles
