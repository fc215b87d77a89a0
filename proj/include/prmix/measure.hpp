#ifndef PRMIX_MEASURE_HPP
#define PRMIX_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "prmix/errors.hpp"
#include "prmix/integrate.hpp"

namespace prmix {

/// Mass-conservation tolerance every measure in the library honours.
inline constexpr double kMassTolerance = 1e-10;

/// Compact parameter interval [lower, upper] with 0 < lower < upper.
struct SupportInterval {
    double lower = 0.0;
    double upper = 0.0;

    SupportInterval() = default;
    SupportInterval(double lo, double hi) : lower(lo), upper(hi) {
        if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
            throw ConfigError("SupportInterval: require 0 < lower < upper < inf, got [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
    }

    double width() const { return upper - lower; }
    bool operator==(const SupportInterval& other) const = default;
};

/// Hybrid probability measure on a compact interval: point masses at both
/// endpoints plus a Lebesgue density tabulated on an increasing grid of
/// interior node locations. Values are immutable by convention; every
/// operation below is pure and returns a fresh measure.
struct MixingMeasure {
    SupportInterval support;
    double atom_lower_mass = 0.0;
    double atom_upper_mass = 0.0;
    std::vector<double> grid;     // strictly increasing, spans the support
    std::vector<double> density;  // density w.r.t. Lebesgue measure at grid nodes
};

/// G equally spaced grid nodes covering the support, endpoints included.
inline std::vector<double> uniform_grid(const SupportInterval& support, std::size_t n_nodes) {
    if (n_nodes < 2) throw ConfigError("uniform_grid: grid size must be >= 2");
    return linspace(support.lower, support.upper, n_nodes);
}

/// Lebesgue part of the total mass (trapezoid rule over the grid).
inline double interior_mass(const MixingMeasure& m) {
    return trapezoid(m.grid, m.density);
}

inline double total_mass(const MixingMeasure& m) {
    return m.atom_lower_mass + m.atom_upper_mass + interior_mass(m);
}

/// Throws unless the structural invariants hold: matching array sizes,
/// increasing grid inside the support, non-negative components, and total
/// mass within kMassTolerance of one.
inline void validate(const MixingMeasure& m) {
    if (m.grid.size() != m.density.size()) {
        throw EvaluationError("MixingMeasure: grid/density size mismatch");
    }
    if (m.grid.size() < 2) throw EvaluationError("MixingMeasure: need at least two grid nodes");
    if (m.grid.front() < m.support.lower || m.grid.back() > m.support.upper) {
        throw EvaluationError("MixingMeasure: grid exceeds support");
    }
    for (std::size_t i = 0; i + 1 < m.grid.size(); ++i) {
        if (!(m.grid[i] < m.grid[i + 1])) {
            throw EvaluationError("MixingMeasure: grid not strictly increasing");
        }
    }
    if (m.atom_lower_mass < 0.0 || m.atom_upper_mass < 0.0) {
        throw EvaluationError("MixingMeasure: negative atom mass");
    }
    for (double v : m.density) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw EvaluationError("MixingMeasure: density values must be finite and >= 0");
        }
    }
    const double mass = total_mass(m);
    if (std::abs(mass - 1.0) > kMassTolerance) {
        throw EvaluationError("MixingMeasure: total mass " + std::to_string(mass) +
                              " violates the unit-mass invariant");
    }
}

/// Integral of f against the measure: both atoms plus the trapezoid-rule
/// integral of f times the grid density. f must be finite at the endpoints
/// and at every grid node.
template <class F>
double quadrature(const MixingMeasure& m, F&& f) {
    auto eval = [&](double u) {
        const double v = f(u);
        if (!std::isfinite(v)) {
            throw EvaluationError("quadrature: integrand is not finite at u = " +
                                  std::to_string(u));
        }
        return v;
    };
    double sum = m.atom_lower_mass * eval(m.support.lower) +
                 m.atom_upper_mass * eval(m.support.upper);
    double prev = eval(m.grid.front()) * m.density.front();
    for (std::size_t i = 1; i < m.grid.size(); ++i) {
        const double cur = eval(m.grid[i]) * m.density[i];
        sum += 0.5 * (prev + cur) * (m.grid[i] - m.grid[i - 1]);
        prev = cur;
    }
    return sum;
}

/// Same integral with the integrand already tabulated: value_lower/upper at
/// the endpoint atoms and node_values[i] at grid[i]. Hot paths use this to
/// reuse a precomputed kernel column.
inline double quadrature_tabulated(const MixingMeasure& m, double value_lower,
                                   double value_upper, std::span<const double> node_values) {
    double sum = m.atom_lower_mass * value_lower + m.atom_upper_mass * value_upper;
    double prev = node_values[0] * m.density[0];
    for (std::size_t i = 1; i < m.grid.size(); ++i) {
        const double cur = node_values[i] * m.density[i];
        sum += 0.5 * (prev + cur) * (m.grid[i] - m.grid[i - 1]);
        prev = cur;
    }
    return sum;
}

/// Rescales all components by the total mass. Fails on degenerate input.
inline MixingMeasure normalize(const MixingMeasure& m) {
    const double mass = total_mass(m);
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw EvaluationError("normalize: degenerate measure with total mass " +
                              std::to_string(mass));
    }
    MixingMeasure out = m;
    out.atom_lower_mass /= mass;
    out.atom_upper_mass /= mass;
    for (double& v : out.density) v /= mass;
    return out;
}

/// CDF evaluated at u, counting the lower atom for u >= lower and the
/// upper atom only at u >= upper; between grid nodes the (piecewise linear)
/// density integrates to a quadratic, handled exactly.
inline double cdf(const MixingMeasure& m, double u) {
    if (u < m.support.lower) return 0.0;
    double acc = m.atom_lower_mass;
    for (std::size_t i = 0; i + 1 < m.grid.size(); ++i) {
        const double a = m.grid[i];
        const double b = m.grid[i + 1];
        if (u >= b) {
            acc += 0.5 * (m.density[i] + m.density[i + 1]) * (b - a);
        } else if (u > a) {
            const double t = (u - a) / (b - a);
            const double pu = m.density[i] + t * (m.density[i + 1] - m.density[i]);
            acc += 0.5 * (m.density[i] + pu) * (u - a);
            break;
        } else {
            break;
        }
    }
    if (u >= m.support.upper) acc += m.atom_upper_mass;
    return acc;
}

/// Kolmogorov distance between the two CDFs, evaluated over the union of
/// both grids. The upper endpoint is compared through its left limit so
/// that differences in the upper atom are visible for normalized measures.
inline double weak_distance(const MixingMeasure& a, const MixingMeasure& b) {
    if (!(a.support == b.support)) {
        throw EvaluationError("weak_distance: measures live on different supports");
    }
    auto cdf_left_limit = [](const MixingMeasure& m, double u) {
        double v = cdf(m, u);
        if (u >= m.support.upper) v -= m.atom_upper_mass;
        return v;
    };
    double worst = 0.0;
    auto scan = [&](const std::vector<double>& nodes) {
        for (double u : nodes) {
            worst = std::max(worst, std::abs(cdf_left_limit(a, u) - cdf_left_limit(b, u)));
        }
    };
    scan(a.grid);
    if (b.grid != a.grid) scan(b.grid);
    return worst;
}

/// Fixed-field-order JSON form:
/// {"lower","upper","atom_lower","atom_upper","grid","density"}.
inline nlohmann::ordered_json to_json(const MixingMeasure& m) {
    nlohmann::ordered_json j;
    j["lower"] = m.support.lower;
    j["upper"] = m.support.upper;
    j["atom_lower"] = m.atom_lower_mass;
    j["atom_upper"] = m.atom_upper_mass;
    j["grid"] = m.grid;
    j["density"] = m.density;
    return j;
}

inline MixingMeasure measure_from_json(const nlohmann::json& j) {
    MixingMeasure m;
    try {
        m.support = SupportInterval(j.at("lower").get<double>(), j.at("upper").get<double>());
        m.atom_lower_mass = j.at("atom_lower").get<double>();
        m.atom_upper_mass = j.at("atom_upper").get<double>();
        m.grid = j.at("grid").get<std::vector<double>>();
        m.density = j.at("density").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("MixingMeasure JSON: ") + e.what());
    }
    validate(m);
    return m;
}

} // namespace prmix

#endif
