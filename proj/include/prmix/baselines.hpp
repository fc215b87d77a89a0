#ifndef PRMIX_BASELINES_HPP
#define PRMIX_BASELINES_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "prmix/errors.hpp"

namespace prmix::baselines {

/// Non-increasing step density on [0, breakpoints.back()]: heights[k] on
/// the interval (breakpoints[k-1], breakpoints[k]], first interval closed
/// at zero.
struct StepDensity {
    std::vector<double> breakpoints;
    std::vector<double> heights;
};

/// Grenander estimator: left derivative of the least concave majorant of
/// the empirical distribution function, computed as the upper convex hull
/// of the ECDF vertices (monotone chain after sorting and merging ties).
inline StepDensity grenander(std::span<const double> data) {
    if (data.empty()) throw ConfigError("grenander: no observations");
    std::vector<double> xs(data.begin(), data.end());
    for (double x : xs) {
        if (x < 0.0) {
            throw DomainError("grenander: negative observation " + std::to_string(x));
        }
        if (x == 0.0) {
            throw DomainError("grenander: observation at 0 puts an ECDF atom at the "
                              "origin; no step density represents it");
        }
    }
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());

    // Distinct values with cumulative counts; ties become single ECDF jumps.
    std::vector<double> vx{0.0};
    std::vector<double> vc{0.0};
    for (std::size_t i = 0; i < xs.size();) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        vx.push_back(xs[i]);
        vc.push_back(static_cast<double>(j));
        i = j;
    }

    // Upper hull; popping on cross >= 0 merges collinear runs.
    std::vector<std::size_t> hull;
    for (std::size_t k = 0; k < vx.size(); ++k) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull[hull.size() - 1];
            const double cross = (vx[b] - vx[a]) * (vc[k] - vc[a]) -
                                 (vc[b] - vc[a]) * (vx[k] - vx[a]);
            if (cross >= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(k);
    }

    StepDensity out;
    out.breakpoints.reserve(hull.size() - 1);
    out.heights.reserve(hull.size() - 1);
    for (std::size_t k = 1; k < hull.size(); ++k) {
        const std::size_t a = hull[k - 1];
        const std::size_t b = hull[k];
        out.breakpoints.push_back(vx[b]);
        out.heights.push_back((vc[b] - vc[a]) / n / (vx[b] - vx[a]));
    }
    return out;
}

/// Height of the interval containing x; zero past the last breakpoint, the
/// first height at x = 0 (the estimator's raw, origin-inconsistent value).
inline double step_density_at(const StepDensity& d, double x) {
    if (x < 0.0) return 0.0;
    const auto it = std::lower_bound(d.breakpoints.begin(), d.breakpoints.end(), x);
    if (it == d.breakpoints.end()) return 0.0;
    return d.heights[static_cast<std::size_t>(it - d.breakpoints.begin())];
}

inline nlohmann::ordered_json to_json(const StepDensity& d) {
    nlohmann::ordered_json j;
    j["breakpoints"] = d.breakpoints;
    j["heights"] = d.heights;
    return j;
}

} // namespace prmix::baselines

#endif
