#ifndef PRMIX_BENCH_HPP
#define PRMIX_BENCH_HPP

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "prmix/baselines.hpp"
#include "prmix/errors.hpp"
#include "prmix/metrics.hpp"
#include "prmix/monotone.hpp"
#include "prmix/pr_engine.hpp"
#include "prmix/rng.hpp"
#include "prmix/svg.hpp"

namespace prmix::bench {

/// Shortest round-trip decimal form of a double; keeps CSV output
/// byte-stable and loss-free.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// n seeded draws from a named truth. Exponential uses the inverse CDF
/// -ln(1-U); the half normal takes |Z| from a Box-Muller sampler. The byte
/// stream is a pure function of (truth_name, n, seed).
inline std::vector<double> sample_truth(const std::string& truth_name, std::size_t n,
                                        std::uint64_t seed) {
    if (n < 1) throw ConfigError("sample_truth: need n >= 1");
    std::vector<double> out;
    out.reserve(n);
    rng::Engine gen(seed);
    if (truth_name == "exponential") {
        for (std::size_t i = 0; i < n; ++i) out.push_back(rng::standard_exponential(gen));
    } else if (truth_name == "halfnormal") {
        rng::NormalSampler normal;
        for (std::size_t i = 0; i < n; ++i) out.push_back(std::abs(normal(gen)));
    } else {
        throw ConfigError("sample_truth: unknown truth '" + truth_name + "'");
    }
    return out;
}

/// Estimator settings used by the harness: the engine config plus the lower
/// support bound of the data-driven mixing interval [ell, max(data)].
struct PrSettings {
    PrConfig config;
    double support_lower = 1e-5;  // ell
};

struct ExperimentSpec {
    std::string truth_name = "exponential";
    std::vector<std::size_t> sample_sizes = {50, 100, 200};
    std::size_t replications = 200;
    std::vector<std::string> estimators = {"pr", "grenander"};
    PrSettings pr;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";

    void validate() const {
        if (replications < 1) throw ConfigError("ExperimentSpec: replications must be >= 1");
        if (sample_sizes.empty()) throw ConfigError("ExperimentSpec: no sample sizes");
        for (std::size_t n : sample_sizes) {
            if (n < 1) throw ConfigError("ExperimentSpec: sample sizes must be positive");
        }
        if (estimators.empty()) throw ConfigError("ExperimentSpec: no estimators");
        for (const auto& e : estimators) {
            if (e != "pr" && e != "grenander") {
                throw ConfigError("ExperimentSpec: unknown estimator '" + e + "'");
            }
        }
        pr.config.validate();
        if (!(pr.support_lower > 0.0)) {
            throw ConfigError("ExperimentSpec: ell must be positive");
        }
        monotone::truth_by_name(truth_name);
    }
};

inline nlohmann::ordered_json to_json(const ExperimentSpec& spec) {
    nlohmann::ordered_json j;
    j["truth_name"] = spec.truth_name;
    j["sample_sizes"] = spec.sample_sizes;
    j["replications"] = spec.replications;
    j["estimators"] = spec.estimators;
    j["pr_config"] = {{"a", spec.pr.config.weight_constant},
                      {"gamma", spec.pr.config.weight_exponent},
                      {"grid", spec.pr.config.grid_size},
                      {"permutations", spec.pr.config.permutations},
                      {"p0_lower", spec.pr.config.initial_atom_lower},
                      {"p0_upper", spec.pr.config.initial_atom_upper},
                      {"density_floor", spec.pr.config.density_floor},
                      {"ell", spec.pr.support_lower}};
    j["seed"] = spec.seed;
    j["output_dir"] = spec.output_dir.string();
    return j;
}

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
    ExperimentSpec spec;
    try {
        spec.truth_name = j.at("truth_name").get<std::string>();
        spec.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
        if (j.contains("replications")) spec.replications = j.at("replications").get<std::size_t>();
        if (j.contains("estimators")) {
            spec.estimators = j.at("estimators").get<std::vector<std::string>>();
        }
        if (j.contains("pr_config")) {
            const auto& p = j.at("pr_config");
            if (p.contains("a")) spec.pr.config.weight_constant = p.at("a").get<double>();
            if (p.contains("gamma")) {
                spec.pr.config.weight_exponent = p.at("gamma").get<double>();
            }
            if (p.contains("grid")) spec.pr.config.grid_size = p.at("grid").get<std::size_t>();
            if (p.contains("permutations")) {
                spec.pr.config.permutations = p.at("permutations").get<std::size_t>();
            }
            if (p.contains("p0_lower")) {
                spec.pr.config.initial_atom_lower = p.at("p0_lower").get<double>();
            }
            if (p.contains("p0_upper")) {
                spec.pr.config.initial_atom_upper = p.at("p0_upper").get<double>();
            }
            if (p.contains("density_floor")) {
                spec.pr.config.density_floor = p.at("density_floor").get<double>();
            }
            if (p.contains("ell")) spec.pr.support_lower = p.at("ell").get<double>();
        }
        if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_dir")) {
            spec.output_dir = j.at("output_dir").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment spec JSON: ") + e.what());
    }
    spec.validate();
    return spec;
}

/// One (estimator, sample size, replication) outcome.
struct ResultRow {
    std::string truth;
    std::string estimator;
    std::size_t n = 0;
    std::size_t replication = 0;
    double l1 = 0.0;
    double origin_ratio = 0.0;
    double wall_time_ms = 0.0;
    std::string error;  // empty on success
};

inline std::uint64_t truth_index(const std::string& truth_name) {
    if (truth_name == "exponential") return 1;
    if (truth_name == "halfnormal") return 2;
    throw ConfigError("truth_index: unknown truth '" + truth_name + "'");
}

/// Seed of the data set for one replication; a pure function of the spec
/// seed and the replication coordinates, so reruns and reruns-in-parallel
/// see identical data.
inline std::uint64_t replication_seed(std::uint64_t spec_seed, const std::string& truth_name,
                                      std::size_t n, std::size_t replication) {
    return rng::derive_seed(spec_seed, truth_index(truth_name), n, replication);
}

/// PR fit of one data set under harness settings.
inline PrFit fit_pr(std::span<const double> data, const PrSettings& settings,
                    std::uint64_t fit_seed, unsigned max_threads = 0) {
    PrConfig config = settings.config;
    config.seed = fit_seed;
    const SupportInterval support = monotone::build_support(data, settings.support_lower);
    MixingMeasure p0 = monotone::initial_guess(support, config);
    FitHooks hooks;
    hooks.max_threads = max_threads;
    return fit(data, uniform_kernel(), p0, config, hooks);
}

namespace detail {

struct MetricContext {
    monotone::MonotoneTruth truth;
    double range_hi = 0.0;
    std::size_t resolution = 40001;
};

inline MetricContext make_metric_context(const std::string& truth_name, double support_hi) {
    MetricContext ctx;
    ctx.truth = monotone::truth_by_name(truth_name);
    ctx.range_hi = std::max(support_hi, monotone::upper_tail_cutoff(ctx.truth, 1e-12));
    return ctx;
}

/// L1 distance to the truth, integrated piecewise around split_at. Mixtures
/// on [ell, L] are constant on [0, ell]; a fixed grid over the whole range
/// cannot resolve that plateau when ell is tiny, so it gets its own panel.
inline double l1_to_truth(const MetricContext& ctx, const std::function<double(double)>& est,
                          double split_at) {
    metrics::DensityPair pair;
    pair.f = ctx.truth.density;
    pair.g = est;
    double total = 0.0;
    if (split_at > 0.0 && split_at < ctx.range_hi) {
        pair.range_lo = 0.0;
        pair.range_hi = split_at;
        pair.resolution = 129;
        total += metrics::l1_distance(pair);
        pair.range_lo = split_at;
    } else {
        pair.range_lo = 0.0;
    }
    pair.range_hi = ctx.range_hi;
    pair.resolution = ctx.resolution;
    return total + metrics::l1_distance(pair);
}

} // namespace detail

/// Runs the full experiment grid: for every sample size and replication,
/// draws a data set, fits every requested estimator, and scores L1 distance
/// to the truth plus the at-origin ratio. Writes results.csv (deterministic;
/// sorted by estimator, n, replication), timings.csv (wall times; excluded
/// from results.csv so that byte-identical reruns remain possible), and one
/// boxplot SVG per metric and sample size. Replications fan out over a
/// thread pool; rows land in pre-assigned slots so scheduling cannot change
/// the output.
inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const auto truth = monotone::truth_by_name(spec.truth_name);
    const double truth_at_origin = truth.density(0.0);

    struct Task {
        std::size_t n = 0;
        std::size_t replication = 0;
    };
    std::vector<Task> tasks;
    for (std::size_t n : spec.sample_sizes) {
        for (std::size_t r = 0; r < spec.replications; ++r) tasks.push_back({n, r});
    }

    std::vector<std::vector<ResultRow>> rows_per_task(tasks.size());
    auto run_task = [&](std::size_t t) {
        const Task task = tasks[t];
        const std::uint64_t data_seed =
            replication_seed(spec.seed, spec.truth_name, task.n, task.replication);
        const std::vector<double> data = sample_truth(spec.truth_name, task.n, data_seed);
        const double data_max = *std::max_element(data.begin(), data.end());
        const auto ctx = detail::make_metric_context(spec.truth_name, data_max);

        for (const std::string& est : spec.estimators) {
            ResultRow row;
            row.truth = spec.truth_name;
            row.estimator = est;
            row.n = task.n;
            row.replication = task.replication;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                if (est == "pr") {
                    const PrFit f = fit_pr(data, spec.pr, rng::derive_seed(data_seed, 0x70), 1);
                    const monotone::UniformMixtureDensity dens(f.mixing);
                    row.l1 = detail::l1_to_truth(ctx, std::cref(dens), spec.pr.support_lower);
                    row.origin_ratio = monotone::origin_estimate(f) / truth_at_origin;
                } else {
                    const auto g = baselines::grenander(data);
                    auto dens = [&g](double x) { return baselines::step_density_at(g, x); };
                    row.l1 = detail::l1_to_truth(ctx, dens, spec.pr.support_lower);
                    row.origin_ratio = baselines::step_density_at(g, 0.0) / truth_at_origin;
                }
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            const auto t1 = std::chrono::steady_clock::now();
            row.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            rows_per_task[t].push_back(row);
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t n_threads = std::min<std::size_t>(tasks.size(), hw);
    if (n_threads <= 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(n_threads);
        for (std::size_t w = 0; w < n_threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t t = w; t < tasks.size(); t += n_threads) run_task(t);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    std::vector<ResultRow> rows;
    for (auto& chunk : rows_per_task) {
        for (auto& r : chunk) rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.truth, a.estimator, a.n, a.replication) <
               std::tie(b.truth, b.estimator, b.n, b.replication);
    });

    namespace fs = std::filesystem;
    fs::create_directories(spec.output_dir);
    {
        std::ofstream csv(spec.output_dir / "results.csv", std::ios::binary);
        csv << "truth,estimator,n,replication,l1,origin_ratio,error\n";
        for (const auto& r : rows) {
            csv << r.truth << ',' << r.estimator << ',' << r.n << ',' << r.replication << ',';
            if (r.error.empty()) {
                csv << format_double(r.l1) << ',' << format_double(r.origin_ratio) << ",\n";
            } else {
                std::string msg = r.error;
                std::replace(msg.begin(), msg.end(), ',', ';');
                std::replace(msg.begin(), msg.end(), '\n', ' ');
                csv << ",," << msg << "\n";
            }
        }
    }
    {
        std::ofstream csv(spec.output_dir / "timings.csv", std::ios::binary);
        csv << "truth,estimator,n,replication,wall_time_ms\n";
        for (const auto& r : rows) {
            csv << r.truth << ',' << r.estimator << ',' << r.n << ',' << r.replication << ','
                << format_double(r.wall_time_ms) << "\n";
        }
    }

    // One boxplot per metric and sample size, estimators side by side.
    for (std::size_t n : spec.sample_sizes) {
        for (const std::string metric : {"l1", "origin_ratio"}) {
            std::vector<std::string> labels;
            std::vector<std::vector<double>> groups;
            for (const auto& est : spec.estimators) {
                std::vector<double> values;
                for (const auto& r : rows) {
                    if (r.n == n && r.estimator == est && r.error.empty()) {
                        values.push_back(metric == std::string("l1") ? r.l1 : r.origin_ratio);
                    }
                }
                if (!values.empty()) {
                    labels.push_back(est);
                    groups.push_back(std::move(values));
                }
            }
            if (groups.empty()) continue;
            const std::string title = spec.truth_name + ", " +
                                      (metric == std::string("l1") ? "L1 distance"
                                                                   : "origin ratio") +
                                      ", n = " + std::to_string(n);
            std::ofstream out(spec.output_dir /
                                  ("boxplot_" + std::string(metric) + "_n" + std::to_string(n) +
                                   ".svg"),
                              std::ios::binary);
            out << svg::boxplot(title, labels, groups);
        }
    }
    return rows;
}

/// Reads a single-column CSV of non-negative reals. Reports offending line
/// numbers; blank lines are skipped.
inline std::vector<double> read_observation_csv(std::istream& in, const std::string& name) {
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Trim whitespace and a possible trailing CR.
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(begin, end - begin + 1);
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
            throw InputError(name + ": line " + std::to_string(line_no) +
                             ": not a number: '" + tok + "'");
        }
        if (v < 0.0) {
            throw InputError(name + ": line " + std::to_string(line_no) +
                             ": negative observation " + tok);
        }
        out.push_back(v);
    }
    if (out.empty()) throw InputError(name + ": no observations");
    return out;
}

/// Freedman-Diaconis histogram as (edges, per-bin density values).
inline std::pair<std::vector<double>, std::vector<double>> fd_histogram(
    std::vector<double> data) {
    std::sort(data.begin(), data.end());
    const double n = static_cast<double>(data.size());
    const double iqr =
        svg::quantile_sorted(data, 0.75) - svg::quantile_sorted(data, 0.25);
    const double hi = data.back();
    double bin_width = 2.0 * iqr / std::cbrt(n);
    if (!(bin_width > 0.0)) bin_width = hi > 0.0 ? hi : 1.0;
    std::size_t bins = static_cast<std::size_t>(std::ceil(hi / bin_width));
    bins = std::clamp<std::size_t>(bins, 1, 200);
    std::vector<double> edges(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        edges[b] = hi * static_cast<double>(b) / static_cast<double>(bins);
    }
    std::vector<double> density(bins, 0.0);
    for (double x : data) {
        std::size_t b = static_cast<std::size_t>(
            std::min<double>(static_cast<double>(bins - 1),
                             std::floor(x / hi * static_cast<double>(bins))));
        density[b] += 1.0;
    }
    const double w = hi / static_cast<double>(bins);
    for (double& d : density) d /= n * w;
    return {edges, density};
}

struct FitFileResult {
    std::size_t n_used = 0;
    std::size_t n_dropped = 0;
    std::filesystem::path json_path;
    std::filesystem::path svg_path;
};

/// Fits the PR estimator (and optionally the Grenander baseline) to a
/// single-column CSV and writes <stem>_estimate.json plus
/// <stem>_density.svg with the curves over a histogram of the data.
inline FitFileResult fit_file(const std::filesystem::path& input_csv, const PrSettings& settings,
                              bool with_grenander, const std::filesystem::path& output_dir,
                              std::optional<std::filesystem::path> diagnostics_csv = {}) {
    std::ifstream in(input_csv);
    if (!in) throw InputError("cannot open " + input_csv.string());
    const std::vector<double> data = read_observation_csv(in, input_csv.filename().string());

    const PrFit f = fit_pr(data, settings, settings.config.seed);
    const monotone::UniformMixtureDensity pr_density(f.mixing);

    namespace fs = std::filesystem;
    fs::create_directories(output_dir);
    const std::string stem = input_csv.stem().string();

    nlohmann::ordered_json j;
    j["n_used"] = f.n_used;
    j["n_dropped"] = f.n_dropped;
    j["support_lower"] = f.mixing.support.lower;
    j["support_upper"] = f.mixing.support.upper;
    j["mixing"] = to_json(f.mixing);
    std::optional<baselines::StepDensity> gren;
    if (with_grenander) {
        gren = baselines::grenander(data);
        j["grenander"] = baselines::to_json(*gren);
    }

    FitFileResult result;
    result.n_used = f.n_used;
    result.n_dropped = f.n_dropped;
    result.json_path = output_dir / (stem + "_estimate.json");
    result.svg_path = output_dir / (stem + "_density.svg");

    {
        std::ofstream out(result.json_path, std::ios::binary);
        out << j.dump(2) << "\n";
    }
    {
        const auto [edges, hist] = fd_histogram(data);
        std::vector<svg::Curve> curves;
        svg::Curve pr_curve{"pr", "#d62728", {}};
        const double hi = f.mixing.support.upper;
        for (std::size_t i = 0; i <= 400; ++i) {
            const double x = hi * static_cast<double>(i) / 400.0;
            pr_curve.points.emplace_back(x, pr_density(x));
        }
        curves.push_back(std::move(pr_curve));
        if (gren) {
            svg::Curve gc{"grenander", "#1f77b4", {}};
            double prev_x = 0.0;
            for (std::size_t k = 0; k < gren->breakpoints.size(); ++k) {
                gc.points.emplace_back(prev_x, gren->heights[k]);
                gc.points.emplace_back(gren->breakpoints[k], gren->heights[k]);
                prev_x = gren->breakpoints[k];
            }
            curves.push_back(std::move(gc));
        }
        std::ofstream out(result.svg_path, std::ios::binary);
        out << svg::density_overlay(stem + " (n = " + std::to_string(f.n_used) + ")", edges,
                                    hist, curves);
    }
    if (diagnostics_csv) {
        std::ofstream out(*diagnostics_csv, std::ios::binary);
        write_trace_csv(f, out);
    }
    return result;
}

} // namespace prmix::bench

#endif
