// Command-line front end: fit a monotone density to a data file, run a
// seeded simulation experiment, or print the closed-form quantities of the
// restricted uniform-mixture model for a named truth.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "prmix/prmix.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;

int run_fit(const std::string& input, prmix::bench::PrSettings settings, bool with_grenander,
            const std::string& output_dir, const std::optional<std::string>& diagnostics) {
    std::optional<std::filesystem::path> diag;
    if (diagnostics) diag = *diagnostics;
    const auto result =
        prmix::bench::fit_file(input, settings, with_grenander, output_dir, diag);
    std::cout << "n_used " << result.n_used << "\n"
              << "n_dropped " << result.n_dropped << "\n"
              << "estimate " << result.json_path.string() << "\n"
              << "plot " << result.svg_path.string() << "\n";
    return kExitOk;
}

int run_simulate(const std::string& spec_path) {
    std::ifstream in(spec_path);
    if (!in) throw prmix::InputError("cannot open " + spec_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw prmix::InputError(spec_path + ": " + e.what());
    }
    const auto spec = prmix::bench::spec_from_json(j);
    const auto rows = prmix::bench::run_experiment(spec);
    std::size_t failures = 0;
    for (const auto& r : rows) failures += r.error.empty() ? 0 : 1;
    std::cout << "rows " << rows.size() << "\n"
              << "failures " << failures << "\n"
              << "results " << (spec.output_dir / "results.csv").string() << "\n";
    return kExitOk;
}

int run_oracle(const std::string& truth_name, double ell, double upper) {
    const auto truth = prmix::monotone::truth_by_name(truth_name);
    const prmix::SupportInterval support(ell, upper);
    const double mass_upper = truth.cdf(upper);
    const double a_lower = prmix::monotone::mixing_mass_below(truth, ell) / mass_upper;
    const double a_upper = upper * truth.density(upper) / mass_upper;
    const double a_interior = (prmix::monotone::mixing_mass_below(truth, upper) -
                               prmix::monotone::mixing_mass_below(truth, ell)) /
                              mass_upper;
    std::printf("truth %s, support [%g, %g]\n", truth_name.c_str(), ell, upper);
    std::printf("best-mixture atom at lower endpoint  %.10g\n", a_lower);
    std::printf("best-mixture interior mass           %.10g\n", a_interior);
    std::printf("best-mixture atom at upper endpoint  %.10g\n", a_upper);
    std::printf("truncation L1 bias bound             %.10g\n",
                prmix::monotone::restriction_bias_bound(truth, support));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recursive nonparametric mixing-distribution estimation for monotone "
                 "densities, with a Grenander baseline and a simulation harness"};
    app.require_subcommand(1);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit a monotone density to a one-column CSV");
    std::string fit_input;
    std::string fit_output_dir = ".";
    std::optional<std::string> fit_diagnostics;
    prmix::bench::PrSettings settings;
    bool with_grenander = false;
    fit_cmd->add_option("input", fit_input, "CSV file with one non-negative column")
        ->required();
    fit_cmd->add_option("--ell", settings.support_lower, "lower mixing support bound");
    fit_cmd->add_option("--perms", settings.config.permutations, "random permutations to average");
    fit_cmd->add_option("--a", settings.config.weight_constant, "weight constant in (0, 2/9)");
    fit_cmd->add_option("--grid", settings.config.grid_size, "mixing grid size");
    fit_cmd->add_option("--seed", settings.config.seed, "RNG seed");
    fit_cmd->add_option("--p0-lower", settings.config.initial_atom_lower,
                        "initial mass at the lower endpoint");
    fit_cmd->add_option("--p0-upper", settings.config.initial_atom_upper,
                        "initial mass at the upper endpoint");
    fit_cmd->add_option("--out", fit_output_dir, "output directory");
    fit_cmd->add_option("--diagnostics", fit_diagnostics,
                        "also write the per-iteration trace CSV here");
    fit_cmd->add_flag("--grenander", with_grenander, "also fit the Grenander baseline");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run a seeded benchmark experiment");
    std::string spec_path;
    sim_cmd->add_option("spec", spec_path, "experiment spec JSON")->required();

    // oracle
    auto* oracle_cmd =
        app.add_subcommand("oracle", "print closed-form target quantities for a truth");
    std::string truth_name;
    double oracle_ell = 1e-5;
    double oracle_upper = 10.0;
    oracle_cmd->add_option("truth", truth_name, "exponential | halfnormal")->required();
    oracle_cmd->add_option("--ell", oracle_ell, "lower mixing support bound");
    oracle_cmd->add_option("--L", oracle_upper, "upper mixing support bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (fit_cmd->parsed()) {
            return run_fit(fit_input, settings, with_grenander, fit_output_dir,
                           fit_diagnostics);
        }
        if (sim_cmd->parsed()) return run_simulate(spec_path);
        if (oracle_cmd->parsed()) return run_oracle(truth_name, oracle_ell, oracle_upper);
    } catch (const prmix::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const prmix::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
