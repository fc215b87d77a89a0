#ifndef PRMIX_RNG_HPP
#define PRMIX_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace prmix::rng {

/// All randomness in the library flows through this engine so that runs are
/// reproducible from a single 64-bit seed, independent of the standard
/// library's distribution implementations.
using Engine = std::mt19937_64;

/// Uniform draw in [0, 1) with 53 random bits.
inline double uniform01(Engine& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t uniform_below(Engine& gen, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % n;
}

/// In-place Fisher-Yates shuffle.
template <class T>
void fisher_yates(std::vector<T>& values, Engine& gen) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(gen, i));
        std::swap(values[i - 1], values[j]);
    }
}

/// Standard exponential via inverse CDF, -ln(1 - U).
inline double standard_exponential(Engine& gen) {
    return -std::log1p(-uniform01(gen));
}

/// Standard normal via Box-Muller; draws two uniforms and caches the
/// second variate.
class NormalSampler {
public:
    double operator()(Engine& gen) {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        // 1 - U in (0, 1] keeps the log argument away from zero.
        const double r = std::sqrt(-2.0 * std::log1p(-uniform01(gen)));
        const double theta = 2.0 * std::numbers::pi * uniform01(gen);
        cached_ = r * std::sin(theta);
        has_cached_ = true;
        return r * std::cos(theta);
    }

private:
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// splitmix64 mixing step; used to derive independent per-task seeds from
/// (base seed, task coordinates) without correlated streams.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t h = mix(base ^ 0x2545f4914f6cdd1dULL);
    h = mix(h ^ a);
    h = mix(h ^ b);
    h = mix(h ^ c);
    return h;
}

} // namespace prmix::rng

#endif
