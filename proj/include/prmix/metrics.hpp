#ifndef PRMIX_METRICS_HPP
#define PRMIX_METRICS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>

#include "prmix/errors.hpp"
#include "prmix/integrate.hpp"

namespace prmix::metrics {

/// Two densities compared over a fixed trapezoid grid. The range must cover
/// the support of f (up to mass 1e-10) for the divergences to be meaningful.
struct DensityPair {
    std::function<double(double)> f;
    std::function<double(double)> g;
    double range_lo = 0.0;
    double range_hi = 1.0;
    std::size_t resolution = 10000;
};

namespace detail {

inline void check_density_value(double v, double x, const char* which) {
    if (v < 0.0 || !std::isfinite(v)) {
        throw DomainError(std::string("metrics: density ") + which + " is " +
                          std::to_string(v) + " at x = " + std::to_string(x));
    }
}

} // namespace detail

/// KL divergence, the trapezoid integral of f log(f/g). Nodes where f
/// vanishes contribute nothing; a node with f > 1e-12 over g < 1e-300 makes
/// the divergence +infinity (a support violation, reported as a value
/// rather than an error).
inline double kl_divergence(const DensityPair& pair) {
    const auto xs = linspace(pair.range_lo, pair.range_hi, pair.resolution);
    std::vector<double> ys(xs.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = pair.f(xs[i]);
        const double g = pair.g(xs[i]);
        detail::check_density_value(f, xs[i], "f");
        detail::check_density_value(g, xs[i], "g");
        if (f <= 0.0) continue;
        if (f > 1e-12 && g < 1e-300) return std::numeric_limits<double>::infinity();
        ys[i] = g > 0.0 ? f * std::log(f / g) : 0.0;
    }
    return trapezoid(xs, ys);
}

/// L1 distance, the trapezoid integral of |f - g|; in [0, 2] for densities.
inline double l1_distance(const DensityPair& pair) {
    const auto xs = linspace(pair.range_lo, pair.range_hi, pair.resolution);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = pair.f(xs[i]);
        const double g = pair.g(xs[i]);
        detail::check_density_value(f, xs[i], "f");
        detail::check_density_value(g, xs[i], "g");
        ys[i] = std::abs(f - g);
    }
    return trapezoid(xs, ys);
}

/// Hellinger distance weighted by m_star / m_dagger:
///   rho^2(f, g) = integral of (sqrt f - sqrt g)^2 (m_star / m_dagger) dx.
/// With m_star = m_dagger this is the plain (unnormalized) Hellinger
/// distance, whose square ranges over [0, 2].
inline double hellinger_contrast(const std::function<double(double)>& f,
                                 const std::function<double(double)>& g,
                                 const std::function<double(double)>& m_star,
                                 const std::function<double(double)>& m_dagger,
                                 double range_lo, double range_hi,
                                 std::size_t resolution = 10000) {
    const auto xs = linspace(range_lo, range_hi, resolution);
    std::vector<double> ys(xs.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fs = m_star(xs[i]);
        if (fs <= 1e-12) continue;
        const double fd = m_dagger(xs[i]);
        if (fd < 1e-300) {
            throw EvaluationError("hellinger_contrast: weight denominator underflows at x = " +
                                  std::to_string(xs[i]));
        }
        const double fv = f(xs[i]);
        const double gv = g(xs[i]);
        detail::check_density_value(fv, xs[i], "f");
        detail::check_density_value(gv, xs[i], "g");
        const double diff = std::sqrt(fv) - std::sqrt(gv);
        ys[i] = diff * diff * (fs / fd);
    }
    return std::sqrt(trapezoid(xs, ys));
}

} // namespace prmix::metrics

#endif
