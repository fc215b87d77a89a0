#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "prmix/measure.hpp"

using namespace prmix;
using test_helpers::endpoint_atom_measure;
using test_helpers::grid_delta_measure;
using test_helpers::random_measure;
using test_helpers::uniform_density_measure;

TEST_CASE("support interval validation") {
    CHECK_NOTHROW(SupportInterval(1e-5, 3.0));
    CHECK_THROWS_AS(SupportInterval(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(SupportInterval(-1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(SupportInterval(2.0, 2.0), ConfigError);
    CHECK_THROWS_AS(SupportInterval(2.0, 1.0), ConfigError);
    CHECK_THROWS_AS(SupportInterval(1.0, std::numeric_limits<double>::infinity()),
                    ConfigError);
}

TEST_CASE("quadrature of the constant one is the total mass") {
    const SupportInterval support(0.1, 2.0);
    for (const auto& m : {uniform_density_measure(support, 1000),
                          endpoint_atom_measure(support, 50, true),
                          grid_delta_measure(support, 400, 1.0)}) {
        CHECK(quadrature(m, [](double) { return 1.0; }) == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("quadrature of a point mass evaluates the integrand at the atom") {
    const double upper = 2.0;
    const auto m = endpoint_atom_measure(SupportInterval(0.1, upper), 20, true);
    const double got = quadrature(m, [](double u) { return u * u; });
    CHECK(got == Catch::Approx(upper * upper).margin(1e-14));
}

TEST_CASE("quadrature recovers the mean of a uniform density") {
    // mean of Unif(0.1, 2) = 1.05; trapezoid is exact for linear integrands
    const auto m = uniform_density_measure(SupportInterval(0.1, 2.0), 1000);
    CHECK(quadrature(m, [](double u) { return u; }) == Catch::Approx(1.05).margin(1e-6));
}

TEST_CASE("quadrature reports the offending node for non-finite integrands") {
    const auto m = uniform_density_measure(SupportInterval(0.5, 2.0), 10);
    CHECK_THROWS_MATCHES(
        quadrature(m, [](double u) { return u < 1.0 ? 1.0 : std::nan(""); }),
        EvaluationError, Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("not finite at u")));
}

TEST_CASE("quadrature is linear in the integrand") {
    rng::Engine gen(11);
    const SupportInterval support(0.2, 4.0);
    for (int trial = 0; trial < 25; ++trial) {
        const auto m = random_measure(support, 257, gen);
        const double c = 4.0 * rng::uniform01(gen) - 2.0;
        auto f = [](double u) { return std::sin(3.0 * u) + 2.0; };
        auto g = [](double u) { return std::exp(-u); };
        const double lhs = quadrature(m, [&](double u) { return f(u) + c * g(u); });
        const double rhs = quadrature(m, f) + c * quadrature(m, g);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("normalize") {
    const SupportInterval support(0.1, 2.0);
    const auto m = uniform_density_measure(support, 100);

    SECTION("unit-mass input is unchanged") {
        const auto out = normalize(m);
        CHECK(out.atom_lower_mass == m.atom_lower_mass);
        for (std::size_t i = 0; i < m.density.size(); ++i) {
            CHECK(out.density[i] == Catch::Approx(m.density[i]).epsilon(1e-14));
        }
    }

    SECTION("doubling every component normalizes back") {
        MixingMeasure doubled = m;
        doubled.atom_lower_mass *= 2.0;
        doubled.atom_upper_mass *= 2.0;
        for (double& v : doubled.density) v *= 2.0;
        const auto out = normalize(doubled);
        for (std::size_t i = 0; i < m.density.size(); ++i) {
            CHECK(out.density[i] == Catch::Approx(m.density[i]).epsilon(1e-14));
        }
    }

    SECTION("atoms 0.4/0.8 with no density rescale to 1/3 and 2/3") {
        MixingMeasure atoms;
        atoms.support = support;
        atoms.grid = uniform_grid(support, 10);
        atoms.density.assign(10, 0.0);
        atoms.atom_lower_mass = 0.4;
        atoms.atom_upper_mass = 0.8;
        const auto out = normalize(atoms);
        CHECK(out.atom_lower_mass == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
        CHECK(out.atom_upper_mass == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
    }

    SECTION("degenerate input is an error") {
        MixingMeasure zero;
        zero.support = support;
        zero.grid = uniform_grid(support, 10);
        zero.density.assign(10, 0.0);
        CHECK_THROWS_AS(normalize(zero), EvaluationError);
        zero.atom_lower_mass = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(normalize(zero), EvaluationError);
    }
}

TEST_CASE("weak distance") {
    const SupportInterval support(0.1, 2.0);

    SECTION("identical measures are at distance zero") {
        rng::Engine gen(5);
        const auto m = random_measure(support, 200, gen);
        CHECK(weak_distance(m, m) == 0.0);
    }

    SECTION("endpoint atoms are at distance one") {
        const auto lo = endpoint_atom_measure(support, 100, false);
        const auto hi = endpoint_atom_measure(support, 100, true);
        CHECK(weak_distance(lo, hi) == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("uniform density vs point mass at its mean") {
        const auto unif = uniform_density_measure(support, 1000);
        const auto spike = grid_delta_measure(support, 1000, 1.05);
        CHECK(weak_distance(unif, spike) == Catch::Approx(0.5).margin(0.01));
    }

    SECTION("mismatched supports are rejected") {
        const auto a = uniform_density_measure(support, 50);
        const auto b = uniform_density_measure(SupportInterval(0.1, 2.5), 50);
        CHECK_THROWS_AS(weak_distance(a, b), EvaluationError);
    }

    SECTION("pseudo-metric: symmetry exact, triangle inequality on random triples") {
        rng::Engine gen(17);
        for (int trial = 0; trial < 20; ++trial) {
            const auto a = random_measure(support, 128, gen);
            const auto b = random_measure(support, 128, gen);
            const auto c = random_measure(support, 128, gen);
            const double ab = weak_distance(a, b);
            CHECK(ab == weak_distance(b, a));
            CHECK(ab <= weak_distance(a, c) + weak_distance(c, b) + 1e-12);
        }
    }

    SECTION("upper atom differences are visible through the left limit") {
        auto a = uniform_density_measure(support, 300);
        MixingMeasure b = a;
        b.atom_upper_mass = 0.25;
        for (double& v : b.density) v *= 0.75;
        CHECK(weak_distance(a, b) == Catch::Approx(0.25).margin(1e-9));
    }
}

TEST_CASE("operations keep the mass invariant and non-negativity") {
    rng::Engine gen(23);
    const SupportInterval support(0.05, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = random_measure(support, 101, gen);
        REQUIRE_NOTHROW(validate(m));
        CHECK(std::abs(total_mass(m) - 1.0) <= 1e-10);
    }
}

TEST_CASE("measure JSON round trip with fixed field order") {
    rng::Engine gen(31);
    const auto m = random_measure(SupportInterval(0.5, 3.0), 64, gen);
    const auto j = to_json(m);
    const std::string dumped = j.dump();
    CHECK(dumped.rfind("{\"lower\":", 0) == 0);
    CHECK(dumped.find("\"upper\":") < dumped.find("\"atom_lower\":"));
    CHECK(dumped.find("\"atom_lower\":") < dumped.find("\"atom_upper\":"));
    CHECK(dumped.find("\"grid\":") < dumped.find("\"density\":"));

    const auto back = measure_from_json(nlohmann::json::parse(dumped));
    CHECK(back.support == m.support);
    CHECK(back.atom_lower_mass == m.atom_lower_mass);
    CHECK(back.atom_upper_mass == m.atom_upper_mass);
    CHECK(back.grid == m.grid);
    CHECK(back.density == m.density);
}

TEST_CASE("validate rejects broken measures") {
    const SupportInterval support(0.1, 2.0);
    auto m = uniform_density_measure(support, 16);

    auto negative = m;
    negative.density[3] = -0.1;
    CHECK_THROWS_AS(validate(negative), EvaluationError);

    auto off_mass = m;
    off_mass.atom_lower_mass = 0.5;
    CHECK_THROWS_AS(validate(off_mass), EvaluationError);

    auto bad_grid = m;
    std::swap(bad_grid.grid[4], bad_grid.grid[5]);
    CHECK_THROWS_AS(validate(bad_grid), EvaluationError);
}
