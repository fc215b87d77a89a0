#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "prmix/bench.hpp"

using namespace prmix;
using namespace prmix::bench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("prmix_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("sample_truth moments and determinism") {
    SECTION("exponential mean") {
        const auto xs = sample_truth("exponential", 1000000, 7);
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        CHECK(mean == Catch::Approx(1.0).margin(0.01));
    }

    SECTION("half-normal mean") {
        const auto xs = sample_truth("halfnormal", 1000000, 7);
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        CHECK(mean == Catch::Approx(std::sqrt(2.0 / std::numbers::pi)).margin(0.01));
    }

    SECTION("identical seeds give identical streams") {
        const auto a = sample_truth("exponential", 1000, 42);
        const auto b = sample_truth("exponential", 1000, 42);
        CHECK(a == b);
        const auto c = sample_truth("exponential", 1000, 43);
        CHECK(a != c);
    }

    SECTION("bad arguments") {
        CHECK_THROWS_AS(sample_truth("weibull", 10, 1), ConfigError);
        CHECK_THROWS_AS(sample_truth("exponential", 0, 1), ConfigError);
    }
}

TEST_CASE("experiment spec JSON round trip") {
    ExperimentSpec spec;
    spec.truth_name = "halfnormal";
    spec.sample_sizes = {25, 75};
    spec.replications = 4;
    spec.estimators = {"pr"};
    spec.pr.config.weight_constant = 0.15;
    spec.pr.config.grid_size = 321;
    spec.pr.support_lower = 0.02;
    spec.seed = 99;
    spec.output_dir = "/tmp/prmix_spec_rt";

    const auto j = to_json(spec);
    const auto back = spec_from_json(j);
    CHECK(back.truth_name == spec.truth_name);
    CHECK(back.sample_sizes == spec.sample_sizes);
    CHECK(back.replications == spec.replications);
    CHECK(back.estimators == spec.estimators);
    CHECK(back.pr.config.weight_constant == spec.pr.config.weight_constant);
    CHECK(back.pr.config.grid_size == spec.pr.config.grid_size);
    CHECK(back.pr.support_lower == spec.pr.support_lower);
    CHECK(back.seed == spec.seed);

    auto bad = j;
    bad["estimators"] = {"mcmc"};
    CHECK_THROWS_AS(spec_from_json(bad), ConfigError);
    auto bad2 = j;
    bad2["replications"] = 0;
    CHECK_THROWS_AS(spec_from_json(bad2), ConfigError);
}

TEST_CASE("run_experiment row accounting and output files") {
    ExperimentSpec spec;
    spec.truth_name = "exponential";
    spec.sample_sizes = {50};
    spec.replications = 1;
    spec.estimators = {"pr", "grenander"};
    spec.pr.config.grid_size = 200;
    spec.pr.config.permutations = 2;
    spec.seed = 5;
    spec.output_dir = fresh_dir("rows");

    const auto rows = run_experiment(spec);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.error.empty());
        CHECK(r.l1 >= 0.0);
        CHECK(r.l1 <= 2.0);
        CHECK(r.origin_ratio > 0.0);
    }
    const std::string csv = slurp(spec.output_dir / "results.csv");
    CHECK(csv.rfind("truth,estimator,n,replication,l1,origin_ratio,error\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
    CHECK(fs::exists(spec.output_dir / "timings.csv"));
    CHECK(fs::exists(spec.output_dir / "boxplot_l1_n50.svg"));
    CHECK(fs::exists(spec.output_dir / "boxplot_origin_ratio_n50.svg"));
    const std::string box = slurp(spec.output_dir / "boxplot_l1_n50.svg");
    CHECK(box.rfind("<svg", 0) == 0);
}

TEST_CASE("run_experiment is deterministic across runs") {
    ExperimentSpec spec;
    spec.truth_name = "exponential";
    spec.sample_sizes = {30, 60};
    spec.replications = 2;
    spec.pr.config.grid_size = 150;
    spec.pr.config.permutations = 3;
    spec.seed = 11;

    spec.output_dir = fresh_dir("det_a");
    run_experiment(spec);
    const std::string first = slurp(spec.output_dir / "results.csv");
    spec.output_dir = fresh_dir("det_b");
    run_experiment(spec);
    const std::string second = slurp(spec.output_dir / "results.csv");
    CHECK(first == second);
    CHECK_FALSE(first.empty());
}

TEST_CASE("observation CSV reader") {
    SECTION("plain column with blank lines and CRLF") {
        std::istringstream in("1.5\n\n2.25\r\n0.125\n");
        const auto xs = read_observation_csv(in, "t");
        CHECK(xs == std::vector<double>{1.5, 2.25, 0.125});
    }

    SECTION("non-numeric line is rejected with its number") {
        std::istringstream in("1.0\nbanana\n");
        CHECK_THROWS_MATCHES(read_observation_csv(in, "t"), InputError,
                             Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("line 2")));
    }

    SECTION("negative values are rejected") {
        std::istringstream in("1.0\n-2.0\n");
        CHECK_THROWS_AS(read_observation_csv(in, "t"), InputError);
    }

    SECTION("empty input is rejected") {
        std::istringstream in("\n\n");
        CHECK_THROWS_AS(read_observation_csv(in, "t"), InputError);
    }
}

TEST_CASE("fit_file end to end") {
    const fs::path dir = fresh_dir("fitfile");
    const fs::path input = dir / "obs.csv";

    SECTION("writes estimate JSON and density SVG") {
        const auto data = sample_truth("exponential", 86, 4);
        {
            std::ofstream out(input);
            for (double x : data) out << format_double(x) << "\n";
        }
        PrSettings settings;
        settings.config.grid_size = 300;
        settings.config.permutations = 3;
        const auto result = fit_file(input, settings, true, dir, dir / "trace.csv");
        CHECK(result.n_used == 86);
        CHECK(result.n_dropped == 0);

        const auto j = nlohmann::json::parse(slurp(result.json_path));
        CHECK(j.at("n_used").get<std::size_t>() == 86);
        const double max_obs = *std::max_element(data.begin(), data.end());
        CHECK(j.at("support_upper").get<double>() == max_obs);
        CHECK(j.contains("grenander"));
        const auto mixing = measure_from_json(j.at("mixing"));
        CHECK(std::abs(total_mass(mixing) - 1.0) < 1e-10);

        const std::string svg = slurp(result.svg_path);
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("polyline") != std::string::npos);

        const std::string trace = slurp(dir / "trace.csv");
        CHECK(trace.rfind("iteration,weight,denominator\n", 0) == 0);
        CHECK(std::count(trace.begin(), trace.end(), '\n') == 87);
    }

    SECTION("repeated single value fits on [0, value]") {
        {
            std::ofstream out(input);
            for (int i = 0; i < 12; ++i) out << "2.5\n";
        }
        PrSettings settings;
        settings.config.grid_size = 100;
        settings.config.permutations = 1;
        const auto result = fit_file(input, settings, false, dir);
        const auto j = nlohmann::json::parse(slurp(result.json_path));
        const auto mixing = measure_from_json(j.at("mixing"));
        const monotone::UniformMixtureDensity dens(mixing);
        CHECK(mixing.support.upper == 2.5);
        CHECK(dens(2.6) == 0.0);
        CHECK(dens(1.0) > 0.0);
    }

    SECTION("missing file is an input error") {
        PrSettings settings;
        CHECK_THROWS_AS(fit_file(dir / "nope.csv", settings, false, dir), InputError);
    }
}

TEST_CASE("fd histogram integrates to one") {
    const auto data = sample_truth("halfnormal", 500, 9);
    const auto [edges, density] = fd_histogram(data);
    REQUIRE(edges.size() == density.size() + 1);
    double mass = 0.0;
    for (std::size_t b = 0; b < density.size(); ++b) {
        mass += density[b] * (edges[b + 1] - edges[b]);
    }
    CHECK(mass == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("format_double is a shortest round trip") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("replication seeds are stable and distinct") {
    const auto s1 = replication_seed(7, "exponential", 50, 0);
    CHECK(s1 == replication_seed(7, "exponential", 50, 0));
    CHECK(s1 != replication_seed(7, "exponential", 50, 1));
    CHECK(s1 != replication_seed(7, "halfnormal", 50, 0));
    CHECK(s1 != replication_seed(8, "exponential", 50, 0));
}
