#ifndef PRMIX_TESTS_HELPERS_HPP
#define PRMIX_TESTS_HELPERS_HPP

#include <algorithm>
#include <vector>

#include "prmix/baselines.hpp"
#include "prmix/measure.hpp"
#include "prmix/monotone.hpp"
#include "prmix/rng.hpp"

namespace test_helpers {

inline prmix::MixingMeasure uniform_density_measure(const prmix::SupportInterval& support,
                                                    std::size_t grid_size) {
    prmix::MixingMeasure m;
    m.support = support;
    m.grid = prmix::uniform_grid(support, grid_size);
    m.density.assign(grid_size, 1.0 / support.width());
    return prmix::normalize(m);
}

inline prmix::MixingMeasure endpoint_atom_measure(const prmix::SupportInterval& support,
                                                  std::size_t grid_size, bool at_upper) {
    prmix::MixingMeasure m;
    m.support = support;
    m.grid = prmix::uniform_grid(support, grid_size);
    m.density.assign(grid_size, 0.0);
    (at_upper ? m.atom_upper_mass : m.atom_lower_mass) = 1.0;
    return m;
}

/// Interior point mass approximated by a one-node density spike.
inline prmix::MixingMeasure grid_delta_measure(const prmix::SupportInterval& support,
                                               std::size_t grid_size, double location) {
    prmix::MixingMeasure m;
    m.support = support;
    m.grid = prmix::uniform_grid(support, grid_size);
    m.density.assign(grid_size, 0.0);
    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < m.grid.size(); ++i) {
        if (std::abs(m.grid[i] - location) < std::abs(m.grid[best] - location)) best = i;
    }
    const double h = m.grid[1] - m.grid[0];
    m.density[best] = 1.0 / h;
    return prmix::normalize(m);
}

/// Random atoms plus a rough positive density, normalized.
inline prmix::MixingMeasure random_measure(const prmix::SupportInterval& support,
                                           std::size_t grid_size, prmix::rng::Engine& gen) {
    prmix::MixingMeasure m;
    m.support = support;
    m.grid = prmix::uniform_grid(support, grid_size);
    m.density.resize(grid_size);
    for (double& v : m.density) v = 0.05 + prmix::rng::uniform01(gen);
    m.atom_lower_mass = 0.3 * prmix::rng::uniform01(gen);
    m.atom_upper_mass = 0.3 * prmix::rng::uniform01(gen);
    return prmix::normalize(m);
}

/// iid draws from the truth conditioned on X <= upper (rejection).
inline std::vector<double> sample_restricted_exponential(double upper, std::size_t n,
                                                         prmix::rng::Engine& gen) {
    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        const double x = prmix::rng::standard_exponential(gen);
        if (x <= upper) out.push_back(x);
    }
    return out;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

/// O(n^3) least-concave-majorant construction used as an independent oracle
/// for the hull-based Grenander estimator: an ECDF vertex is kept iff no
/// chord between an earlier and a later vertex passes on or above it.
inline prmix::baselines::StepDensity brute_force_grenander(std::vector<double> data) {
    std::sort(data.begin(), data.end());
    const double n = static_cast<double>(data.size());
    std::vector<double> vx{0.0}, vc{0.0};
    for (std::size_t i = 0; i < data.size();) {
        std::size_t j = i;
        while (j < data.size() && data[j] == data[i]) ++j;
        vx.push_back(data[i]);
        vc.push_back(static_cast<double>(j));
        i = j;
    }
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < vx.size(); ++j) {
        bool dominated = false;
        for (std::size_t i = 0; i < j && !dominated; ++i) {
            for (std::size_t k = j + 1; k < vx.size() && !dominated; ++k) {
                // chord value at vx[j] >= vc[j], written cross-multiplied
                const double cross = (vx[j] - vx[i]) * (vc[k] - vc[i]) -
                                     (vc[j] - vc[i]) * (vx[k] - vx[i]);
                if (cross >= 0.0) dominated = true;
            }
        }
        if (!dominated) keep.push_back(j);
    }
    prmix::baselines::StepDensity out;
    for (std::size_t t = 1; t < keep.size(); ++t) {
        const std::size_t a = keep[t - 1];
        const std::size_t b = keep[t];
        out.breakpoints.push_back(vx[b]);
        out.heights.push_back((vc[b] - vc[a]) / n / (vx[b] - vx[a]));
    }
    return out;
}

} // namespace test_helpers

#endif
