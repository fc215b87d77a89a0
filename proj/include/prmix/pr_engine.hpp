#ifndef PRMIX_PR_ENGINE_HPP
#define PRMIX_PR_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "prmix/errors.hpp"
#include "prmix/kernels.hpp"
#include "prmix/measure.hpp"
#include "prmix/rng.hpp"

namespace prmix {

/// Settings of the recursive estimator. Step sizes follow
/// w_i = a (i+1)^{-gamma}. The default gamma = 1 is the schedule backed by
/// the convergence theory, and there the weight constant must satisfy
/// 0 < a < 2/9; validation rejects larger values outright. Exponents in
/// (1/2, 1) keep the standard stochastic-approximation requirements
/// (divergent weight sum, summable squares) and learn much faster at small
/// n; they are the usual empirical choice for benchmarking.
struct PrConfig {
    double weight_constant = 0.1;      // a in w_i = a (i+1)^{-gamma}
    double weight_exponent = 1.0;      // gamma in (1/2, 1]
    std::size_t grid_size = 1000;      // G, nodes of the mixing grid
    std::size_t permutations = 25;     // R, random data orderings to average
    double initial_atom_lower = 0.05;  // starting point mass at the lower endpoint
    double initial_atom_upper = 0.05;  // starting point mass at the upper endpoint
    std::uint64_t seed = 0;
    double density_floor = 1e-300;     // guard for the update denominator

    void validate() const {
        if (!(weight_exponent > 0.5) || !(weight_exponent <= 1.0)) {
            throw ConfigError("PrConfig: weight exponent must lie in (1/2, 1], got " +
                              std::to_string(weight_exponent));
        }
        if (weight_exponent == 1.0) {
            if (!(weight_constant > 0.0) || !(weight_constant < 2.0 / 9.0)) {
                throw ConfigError("PrConfig: weight constant must lie in (0, 2/9), got " +
                                  std::to_string(weight_constant));
            }
        } else if (!(weight_constant > 0.0) || !(weight_constant <= 1.0)) {
            throw ConfigError("PrConfig: weight constant must lie in (0, 1], got " +
                              std::to_string(weight_constant));
        }
        if (grid_size < 2) throw ConfigError("PrConfig: grid size must be >= 2");
        if (permutations < 1) throw ConfigError("PrConfig: permutation count must be >= 1");
        if (!(initial_atom_lower > 0.0) || !(initial_atom_lower < 1.0) ||
            !(initial_atom_upper > 0.0) || !(initial_atom_upper < 1.0) ||
            !(initial_atom_lower + initial_atom_upper < 1.0)) {
            throw ConfigError(
                "PrConfig: initial atom masses must be in (0,1) with sum below 1");
        }
        if (!(density_floor > 0.0)) throw ConfigError("PrConfig: density floor must be > 0");
    }

    double weight_at(std::size_t i) const {
        if (weight_exponent == 1.0) return weight_constant / static_cast<double>(i + 1);
        return weight_constant * std::pow(static_cast<double>(i + 1), -weight_exponent);
    }
};

/// Step size of update i >= 1 under the theory-backed schedule: a / (i + 1),
/// strictly decreasing.
inline double weight(std::size_t i, double a) {
    if (!(a > 0.0) || !(a < 2.0 / 9.0)) {
        throw ConfigError("weight: constant must lie in (0, 2/9), got " + std::to_string(a));
    }
    if (i < 1) throw ConfigError("weight: iteration index must be >= 1");
    return a / static_cast<double>(i + 1);
}

/// One row of the per-iteration diagnostics trace.
struct PrTraceRow {
    std::size_t iteration = 0;
    double weight = 0.0;
    double denominator = 0.0;           // mixture density at the consumed observation
    std::optional<double> kl;           // divergence from a supplied reference, if any
};

/// Result of a full fit: the permutation-averaged mixing measure, the
/// individual per-permutation measures, the trace of the first permutation,
/// and the observation bookkeeping.
struct PrFit {
    MixingMeasure mixing;
    std::vector<MixingMeasure> per_permutation;
    std::vector<PrTraceRow> diagnostics;
    std::size_t n_used = 0;
    std::size_t n_dropped = 0;
    Kernel kernel;

    double density(double x) const { return mixture_density(kernel, mixing, x); }
};

namespace detail {

/// Kernel evaluated at one observation across the endpoint atoms and every
/// grid node. Reused between the update denominator and numerator.
struct KernelColumn {
    double at_lower = 0.0;
    double at_upper = 0.0;
    std::vector<double> at_grid;
};

inline void fill_column(const Kernel& kernel, const MixingMeasure& m, double x,
                        KernelColumn& col) {
    col.at_grid.resize(m.grid.size());
    col.at_lower = kernel.evaluate(x, m.support.lower);
    col.at_upper = kernel.evaluate(x, m.support.upper);
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        col.at_grid[i] = kernel.evaluate(x, m.grid[i]);
    }
    if (!std::isfinite(col.at_lower) || !std::isfinite(col.at_upper)) {
        throw EvaluationError("pr_update: kernel not finite at a support endpoint");
    }
    for (std::size_t i = 0; i < col.at_grid.size(); ++i) {
        if (!std::isfinite(col.at_grid[i])) {
            throw EvaluationError("pr_update: kernel not finite at grid node u = " +
                                  std::to_string(m.grid[i]));
        }
    }
}

/// Applies one recursion step in place and renormalizes. Returns the
/// denominator m_{i-1}(x). Exact-arithmetic mass is conserved by
/// construction; the renormalization only absorbs floating-point drift.
inline double update_in_place(MixingMeasure& m, const KernelColumn& col, double x, double w,
                              double density_floor) {
    const double d = quadrature_tabulated(m, col.at_lower, col.at_upper, col.at_grid);
    if (!(d > density_floor) || !std::isfinite(d)) {
        throw EvaluationError(
            "pr_update: zero-likelihood observation x = " + std::to_string(x) +
            " (mixture density " + std::to_string(d) + "); data outside the model support");
    }
    const double keep = 1.0 - w;
    const double move = w / d;
    m.atom_lower_mass *= keep + move * col.at_lower;
    m.atom_upper_mass *= keep + move * col.at_upper;
    for (std::size_t i = 0; i < m.density.size(); ++i) {
        m.density[i] *= keep + move * col.at_grid[i];
    }
    const double mass = total_mass(m);
    m.atom_lower_mass /= mass;
    m.atom_upper_mass /= mass;
    for (double& v : m.density) v /= mass;
    return d;
}

} // namespace detail

/// Single recursion step: mixes the previous measure with the one-observation
/// posterior at weight w and renormalizes.
inline MixingMeasure pr_update(const MixingMeasure& p_prev, double x, double w,
                               const Kernel& kernel, double density_floor = 1e-300) {
    if (!(w > 0.0) || !(w < 1.0)) {
        throw ConfigError("pr_update: weight must lie in (0,1), got " + std::to_string(w));
    }
    MixingMeasure next = p_prev;
    detail::KernelColumn col;
    detail::fill_column(kernel, next, x, col);
    detail::update_in_place(next, col, x, w, density_floor);
    return next;
}

/// Optional instrumentation for fit().
struct FitHooks {
    /// Reference density for a per-iteration KL column in the diagnostics
    /// trace (first permutation only). Integrated by trapezoid on
    /// [0, support upper] with kl_resolution nodes.
    std::function<double(double)> kl_reference;
    std::size_t kl_resolution = 2001;

    /// Called after every update of every permutation with
    /// (permutation index, iteration index, current measure).
    /// A non-null observer forces sequential permutation processing.
    std::function<void(std::size_t, std::size_t, const MixingMeasure&)> observer;

    /// Worker threads for the permutation fan-out; 0 = hardware default.
    unsigned max_threads = 0;
};

namespace detail {

template <class DensityFn>
double kl_against_reference(const DensityFn& reference, const Kernel& kernel,
                            const MixingMeasure& m, std::size_t resolution) {
    // Trapezoid KL on [0, upper]; reference-zero regions contribute nothing.
    const double hi = m.support.upper;
    const auto xs = linspace(0.0, hi, resolution);
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = reference(xs[i]);
        if (f <= 0.0) {
            ys[i] = 0.0;
            continue;
        }
        const double g = mixture_density(kernel, m, xs[i]);
        ys[i] = (g > 0.0) ? f * std::log(f / g) : std::numeric_limits<double>::infinity();
    }
    return trapezoid(xs, ys);
}

} // namespace detail

/// Full predictive-recursion fit. For each of R seeded permutations of the
/// usable observations the recursion runs once from p0; the returned mixing
/// measure is the component-wise average over permutations (all share one
/// grid). Observations outside the kernel's observation range at the upper
/// support endpoint are dropped and counted. Deterministic given data order,
/// seed and config; permutations run in parallel and are reduced in fixed
/// order, so scheduling cannot change the result.
inline PrFit fit(std::span<const double> data, const Kernel& kernel, const MixingMeasure& p0,
                 const PrConfig& config, const FitHooks& hooks = {}) {
    config.validate();
    validate(p0);

    const ObservationInterval usable = kernel.observation_support(p0.support.upper);
    std::vector<double> obs;
    obs.reserve(data.size());
    std::size_t dropped = 0;
    for (double x : data) {
        if (usable.contains(x)) {
            obs.push_back(x);
        } else {
            ++dropped;
        }
    }
    if (obs.empty() && dropped > 0) {
        throw EvaluationError("fit: all " + std::to_string(dropped) +
                              " observations fall outside the model support");
    }

    PrFit out;
    out.kernel = kernel;
    out.n_used = obs.size();
    out.n_dropped = dropped;

    const std::size_t runs = config.permutations;
    out.per_permutation.assign(runs, p0);
    std::vector<std::vector<PrTraceRow>> traces(1);

    auto run_one = [&](std::size_t perm) {
        rng::Engine gen(config.seed + perm);
        std::vector<std::size_t> order(obs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng::fisher_yates(order, gen);

        MixingMeasure& m = out.per_permutation[perm];
        detail::KernelColumn col;
        for (std::size_t i = 1; i <= order.size(); ++i) {
            const double x = obs[order[i - 1]];
            const double w = config.weight_at(i);
            detail::fill_column(kernel, m, x, col);
            double d;
            try {
                d = detail::update_in_place(m, col, x, w, config.density_floor);
            } catch (const EvaluationError& e) {
                throw EvaluationError(std::string(e.what()) + " (iteration " +
                                      std::to_string(i) + ")");
            }
            if (perm == 0) {
                PrTraceRow row{i, w, d, std::nullopt};
                if (hooks.kl_reference) {
                    row.kl = detail::kl_against_reference(hooks.kl_reference, kernel, m,
                                                          hooks.kl_resolution);
                }
                traces[0].push_back(row);
            }
            if (hooks.observer) hooks.observer(perm, i, m);
        }
    };

    unsigned hw = hooks.max_threads ? hooks.max_threads : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t n_threads = hooks.observer ? 1 : std::min<std::size_t>(runs, hw);
    if (n_threads <= 1) {
        for (std::size_t r = 0; r < runs; ++r) run_one(r);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t r = t; r < runs; r += n_threads) run_one(r);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    out.diagnostics = std::move(traces[0]);

    // Fixed-order component-wise average; preserves the mass invariant.
    MixingMeasure avg = out.per_permutation.front();
    for (std::size_t r = 1; r < runs; ++r) {
        const MixingMeasure& m = out.per_permutation[r];
        avg.atom_lower_mass += m.atom_lower_mass;
        avg.atom_upper_mass += m.atom_upper_mass;
        for (std::size_t i = 0; i < avg.density.size(); ++i) avg.density[i] += m.density[i];
    }
    const double inv = 1.0 / static_cast<double>(runs);
    avg.atom_lower_mass *= inv;
    avg.atom_upper_mass *= inv;
    for (double& v : avg.density) v *= inv;
    out.mixing = std::move(avg);
    return out;
}

/// Writes the diagnostics trace as CSV with columns
/// iteration,weight,denominator[,kl].
inline void write_trace_csv(const PrFit& fit_result, std::ostream& os) {
    const bool with_kl = !fit_result.diagnostics.empty() &&
                         fit_result.diagnostics.front().kl.has_value();
    os << "iteration,weight,denominator" << (with_kl ? ",kl" : "") << "\n";
    for (const auto& row : fit_result.diagnostics) {
        os << row.iteration << ',' << row.weight << ',' << row.denominator;
        if (with_kl) os << ',' << row.kl.value();
        os << "\n";
    }
}

/// Nonnegative stationarity diagnostic
///   T(P) = integral over u of ( integral of m*(x)/m_P(x) k(x|u) dx )^2 P(du) - 1.
/// It vanishes exactly at the mixing measure whose mixture minimizes the
/// KL divergence from m*. One fixed trapezoid grid in x is used for the
/// inner integral and for the mixture density itself, which makes the
/// discrete Jensen bound hold structurally: the returned value can only
/// drop below zero by the trapezoid defect of integrating m* itself.
inline double t_functional(const MixingMeasure& p, const std::function<double(double)>& m_star,
                           const Kernel& kernel, std::span<const double> x_grid) {
    if (x_grid.size() < 2) throw ConfigError("t_functional: need at least two x nodes");
    const std::size_t nx = x_grid.size();

    // Trapezoid weights of the x grid.
    std::vector<double> wx(nx, 0.0);
    for (std::size_t j = 0; j + 1 < nx; ++j) {
        const double h = x_grid[j + 1] - x_grid[j];
        wx[j] += 0.5 * h;
        wx[j + 1] += 0.5 * h;
    }

    // Mixture density and the ratio m*/m_P on the x grid, computed with the
    // same measure quadrature used for the outer integral.
    std::vector<double> ratio(nx, 0.0);
    for (std::size_t j = 0; j < nx; ++j) {
        const double f = m_star(x_grid[j]);
        if (f <= 1e-12) continue;
        const double mp = mixture_density(kernel, p, x_grid[j]);
        if (!(mp > 1e-300)) {
            throw EvaluationError("t_functional: mixture density underflow at x = " +
                                  std::to_string(x_grid[j]));
        }
        ratio[j] = f / mp;
    }

    auto g = [&](double u) {
        double acc = 0.0;
        for (std::size_t j = 0; j < nx; ++j) {
            if (ratio[j] != 0.0) acc += wx[j] * ratio[j] * kernel.evaluate(x_grid[j], u);
        }
        return acc;
    };

    const double value = quadrature(p, [&](double u) {
        const double gu = g(u);
        return gu * gu;
    });
    return value - 1.0;
}

} // namespace prmix

#endif
