#ifndef PRMIX_INTEGRATE_HPP
#define PRMIX_INTEGRATE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "prmix/errors.hpp"

namespace prmix {

/// n equally spaced nodes covering [lo, hi] inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw ConfigError("linspace: need at least two nodes");
    std::vector<double> xs(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) xs[i] = lo + h * static_cast<double>(i);
    xs.back() = hi;
    return xs;
}

/// Trapezoid rule over explicit nodes and values.
inline double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        sum += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i]);
    }
    return sum;
}

/// Trapezoid rule for f sampled on n equally spaced nodes over [lo, hi].
template <class F>
double trapezoid(F&& f, double lo, double hi, std::size_t n) {
    if (n < 2) throw ConfigError("trapezoid: need at least two nodes");
    const double h = (hi - lo) / static_cast<double>(n - 1);
    double sum = 0.5 * (f(lo) + f(hi));
    for (std::size_t i = 1; i + 1 < n; ++i) {
        sum += f(lo + h * static_cast<double>(i));
    }
    return sum * h;
}

namespace detail {

template <class F>
double adaptive_simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                             double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature to absolute tolerance tol.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
    if (!(a < b)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
        throw EvaluationError("adaptive_simpson: non-finite integrand");
    }
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace prmix

#endif
