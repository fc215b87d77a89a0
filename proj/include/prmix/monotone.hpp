#ifndef PRMIX_MONOTONE_HPP
#define PRMIX_MONOTONE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prmix/errors.hpp"
#include "prmix/integrate.hpp"
#include "prmix/kernels.hpp"
#include "prmix/measure.hpp"
#include "prmix/pr_engine.hpp"

namespace prmix::monotone {

/// Analytic description of a non-increasing density on [0, inf) together
/// with its scale-mixture-of-uniforms representation: density m, CDF M, and
/// the mixing density p with m(x) = integral of Unif(x|0,u) p(u) du.
/// mixing_cdf is the closed form of u -> integral of p over [0,u] when one
/// is known; operations fall back to adaptive quadrature otherwise.
struct MonotoneTruth {
    std::function<double(double)> density;
    std::function<double(double)> cdf;
    std::function<double(double)> mixing_density;
    std::function<double(double)> mixing_cdf;
    std::string name;
};

/// integral of p* over [0, u], from the closed form when available.
inline double mixing_mass_below(const MonotoneTruth& truth, double u) {
    if (u <= 0.0) return 0.0;
    if (truth.mixing_cdf) return truth.mixing_cdf(u);
    return adaptive_simpson(truth.mixing_density, 0.0, u, 1e-10);
}

/// Standard exponential: m(x) = e^{ -x }, mixing density u e^{ -u }.
inline MonotoneTruth exponential_truth() {
    MonotoneTruth t;
    t.name = "exponential";
    t.density = [](double x) { return x >= 0.0 ? std::exp(-x) : 0.0; };
    t.cdf = [](double x) { return x >= 0.0 ? -std::expm1(-x) : 0.0; };
    t.mixing_density = [](double u) { return u >= 0.0 ? u * std::exp(-u) : 0.0; };
    // 1 - (1+u) e^{-u}, written to avoid cancellation for small u.
    t.mixing_cdf = [](double u) {
        return u > 0.0 ? (std::expm1(u) - u) * std::exp(-u) : 0.0;
    };
    return t;
}

/// Half standard normal: m(x) = sqrt(2/pi) e^{ -x^2/2 }.
inline MonotoneTruth half_normal_truth() {
    MonotoneTruth t;
    t.name = "halfnormal";
    const double c = std::sqrt(2.0 / std::numbers::pi);
    t.density = [c](double x) { return x >= 0.0 ? c * std::exp(-0.5 * x * x) : 0.0; };
    t.cdf = [](double x) { return x >= 0.0 ? std::erf(x / std::numbers::sqrt2) : 0.0; };
    t.mixing_density = [c](double u) {
        return u >= 0.0 ? c * u * u * std::exp(-0.5 * u * u) : 0.0;
    };
    t.mixing_cdf = [c](double u) {
        if (u <= 0.0) return 0.0;
        return std::erf(u / std::numbers::sqrt2) - c * u * std::exp(-0.5 * u * u);
    };
    return t;
}

inline MonotoneTruth truth_by_name(const std::string& name) {
    if (name == "exponential") return exponential_truth();
    if (name == "halfnormal") return half_normal_truth();
    throw ConfigError("unknown truth '" + name + "' (expected exponential | halfnormal)");
}

/// Smallest x with 1 - M(x) <= tail_mass, found by doubling and bisection.
inline double upper_tail_cutoff(const MonotoneTruth& truth, double tail_mass) {
    double hi = 1.0;
    int guard = 0;
    while (1.0 - truth.cdf(hi) > tail_mass) {
        hi *= 2.0;
        if (++guard > 64) throw EvaluationError("upper_tail_cutoff: CDF does not reach 1");
    }
    double lo = hi * 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (1.0 - truth.cdf(mid) > tail_mass ? lo : hi) = mid;
    }
    return hi;
}

/// The truth conditioned on X <= L: density m(x) 1_{[0,L]}(x) / M(L).
struct RestrictedTarget {
    MonotoneTruth truth;
    double upper = 0.0;  // L
    std::function<double(double)> density;
};

inline RestrictedTarget restrict_target(const MonotoneTruth& truth, double upper) {
    const double mass = truth.cdf(upper);
    if (!(mass > 0.0)) {
        throw DomainError("restrict_target: truth has no mass on [0, " +
                          std::to_string(upper) + "]");
    }
    RestrictedTarget out;
    out.truth = truth;
    out.upper = upper;
    out.density = [d = truth.density, upper, mass](double x) {
        return (x >= 0.0 && x <= upper) ? d(x) / mass : 0.0;
    };
    return out;
}

/// Data-driven mixing support [lower, max(data)].
inline SupportInterval build_support(std::span<const double> data, double lower) {
    if (data.empty()) throw ConfigError("build_support: no observations");
    const double hi = *std::max_element(data.begin(), data.end());
    if (!(lower < hi)) {
        throw ConfigError("build_support: lower bound " + std::to_string(lower) +
                          " is not below max(data) = " + std::to_string(hi));
    }
    return SupportInterval(lower, hi);
}

/// Starting measure for the recursion: point masses at both support
/// endpoints plus a uniform density on the interior. The endpoint atoms
/// keep every mixture density in the run bounded away from zero on [0, L].
inline MixingMeasure initial_guess(const SupportInterval& support, const PrConfig& config) {
    config.validate();
    MixingMeasure m;
    m.support = support;
    m.atom_lower_mass = config.initial_atom_lower;
    m.atom_upper_mass = config.initial_atom_upper;
    m.grid = uniform_grid(support, config.grid_size);
    const double level =
        (1.0 - config.initial_atom_lower - config.initial_atom_upper) / support.width();
    m.density.assign(m.grid.size(), level);
    return normalize(m);
}

/// Exact mixture-density evaluator for uniform-kernel mixtures: integrates
/// the stored piecewise-linear mixing density in closed form instead of
/// re-sampling the kernel on the grid, so clipped cells at x carry no
/// quadrature error. O(G) once, O(log G) per evaluation.
class UniformMixtureDensity {
public:
    explicit UniformMixtureDensity(MixingMeasure measure) : m_(std::move(measure)) {
        const std::size_t n = m_.grid.size();
        q_.resize(n);
        for (std::size_t i = 0; i < n; ++i) q_[i] = m_.density[i] / m_.grid[i];
        suffix_.assign(n, 0.0);
        for (std::size_t i = n - 1; i-- > 0;) {
            suffix_[i] = suffix_[i + 1] +
                         0.5 * (q_[i] + q_[i + 1]) * (m_.grid[i + 1] - m_.grid[i]);
        }
    }

    double operator()(double x) const {
        if (x < 0.0 || x > m_.support.upper) return 0.0;
        double acc = m_.atom_upper_mass / m_.support.upper;
        if (x <= m_.support.lower) acc += m_.atom_lower_mass / m_.support.lower;
        acc += interior_integral_from(x);
        return acc;
    }

    const MixingMeasure& measure() const { return m_; }

private:
    // integral of p(u)/u over [max(x, grid front), grid back]
    double interior_integral_from(double x) const {
        if (x <= m_.grid.front()) return suffix_.front();
        if (x >= m_.grid.back()) return 0.0;
        const auto it = std::upper_bound(m_.grid.begin(), m_.grid.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - m_.grid.begin()) - 1;
        const double a = m_.grid[j];
        const double b = m_.grid[j + 1];
        const double t = (x - a) / (b - a);
        const double qx = q_[j] + t * (q_[j + 1] - q_[j]);
        return suffix_[j + 1] + 0.5 * (qx + q_[j + 1]) * (b - x);
    }

    MixingMeasure m_;
    std::vector<double> q_;
    std::vector<double> suffix_;
};

/// The mixing measure on [lower, upper] whose uniform mixture minimizes the
/// KL divergence from the restricted truth: atoms
///   a_l = P*([0, lower]) / M(upper)   and   a_u = upper m(upper) / M(upper)
/// at the endpoints, and interior density p*(u) / M(upper). The measure is
/// renormalized after gridding so the unit-mass invariant holds exactly.
inline MixingMeasure kl_minimizer(const MonotoneTruth& truth, const SupportInterval& support,
                                  std::size_t grid_size = 1000) {
    const double mass_upper = truth.cdf(support.upper);
    if (!(mass_upper > 0.0)) {
        throw DomainError("kl_minimizer: truth has no mass below the support upper bound");
    }
    MixingMeasure m;
    m.support = support;
    m.atom_lower_mass = mixing_mass_below(truth, support.lower) / mass_upper;
    m.atom_upper_mass = support.upper * truth.density(support.upper) / mass_upper;
    m.grid = uniform_grid(support, grid_size);
    m.density.resize(m.grid.size());
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        const double v = truth.mixing_density(m.grid[i]);
        if (!std::isfinite(v) || v < 0.0) {
            throw EvaluationError("kl_minimizer: bad mixing density at u = " +
                                  std::to_string(m.grid[i]));
        }
        m.density[i] = v / mass_upper;
    }
    const double raw = total_mass(m);
    if (std::abs(raw - 1.0) > 1e-3) {
        throw EvaluationError("kl_minimizer: gridded mass " + std::to_string(raw) +
                              " is inconsistent with the truth's mixing density");
    }
    return normalize(m);
}

/// Density of the KL-minimizing mixture; agrees with the restricted truth
/// on (lower, upper] and is constant on [0, lower].
inline UniformMixtureDensity kl_minimizer_density(const MonotoneTruth& truth,
                                                  const SupportInterval& support,
                                                  std::size_t grid_size = 1000) {
    return UniformMixtureDensity(kl_minimizer(truth, support, grid_size));
}

/// Upper bound on the L1 distance between the full truth and the best
/// mixture on [lower, upper]:
///   2 { 1 - M(upper) + P*([0, lower]) / M(upper) }.
inline double restriction_bias_bound(const MonotoneTruth& truth,
                                     const SupportInterval& support) {
    const double mass_upper = truth.cdf(support.upper);
    if (!(mass_upper > 0.0)) {
        throw DomainError("restriction_bias_bound: truth has no mass below upper bound");
    }
    return 2.0 * (1.0 - mass_upper + mixing_mass_below(truth, support.lower) / mass_upper);
}

/// Estimate of the density at its mode, the origin. For uniform-kernel fits
/// this equals the fitted mixture density anywhere on [0, lower].
inline double origin_estimate(const PrFit& fit_result) {
    return mixture_density(fit_result.kernel, fit_result.mixing, 0.0);
}

/// Result of inverting the scale-mixture representation numerically.
/// A non-increasing density with a jump at the edge of a bounded support
/// has a point-mass component there, reported separately.
struct WilliamsonMixing {
    std::function<double(double)> mixing_density;  // u -> max(0, -u m'(u))
    struct Atom {
        double location = 0.0;
        double mass = 0.0;
    };
    std::optional<Atom> atom;
};

/// Inverts m(x) = integral of Unif(x|0,u) P(du) through p(u) = -u m'(u).
/// The derivative must be non-positive up to tolerance 1e-8; small positive
/// noise is clipped to zero. Missing mass (a jump of m at the support edge)
/// is located by bisection and reported as an atom.
inline WilliamsonMixing williamson_inverse(std::function<double(double)> density,
                                           std::function<double(double)> density_derivative) {
    WilliamsonMixing out;
    out.mixing_density = [density_derivative](double u) {
        if (u <= 0.0) return 0.0;
        const double d = density_derivative(u);
        if (d > 1e-8) {
            throw DomainError("williamson_inverse: density increases at u = " +
                              std::to_string(u) + " (derivative " + std::to_string(d) + ")");
        }
        return std::max(0.0, -u * d);
    };

    // Find where the density has decayed, integrate the mixing density up to
    // there and attribute any missing mass to an edge atom.
    double hi = 1.0;
    int guard = 0;
    while (density(hi) > 1e-14) {
        hi *= 2.0;
        if (++guard > 60) return out;  // heavy tail; no bounded edge to detect
    }
    const double integral = adaptive_simpson(out.mixing_density, 0.0, hi, 1e-10);
    const double deficit = 1.0 - integral;
    if (deficit > 1e-6) {
        double lo = 0.0;
        double edge_hi = hi;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + edge_hi);
            (density(mid) > 1e-14 ? lo : edge_hi) = mid;
        }
        out.atom = WilliamsonMixing::Atom{0.5 * (lo + edge_hi), deficit};
    }
    return out;
}

} // namespace prmix::monotone

#endif
