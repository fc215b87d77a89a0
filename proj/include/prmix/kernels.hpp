#ifndef PRMIX_KERNELS_HPP
#define PRMIX_KERNELS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "prmix/errors.hpp"
#include "prmix/measure.hpp"

namespace prmix {

/// Observation range of a kernel component, possibly unbounded.
struct ObservationInterval {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lower && x <= upper; }
};

/// A known conditional density k(x | u): for each mixing parameter u,
/// x -> evaluate(x, u) is a probability density on observation_support(u).
/// Kernel objects are stateless and safe to share across threads.
struct Kernel {
    std::function<double(double x, double u)> evaluate;
    std::function<ObservationInterval(double u)> observation_support;
    std::string name;
    std::string descriptor;
};

/// Scale-uniform kernel, k(x|u) = 1/u on the closed interval [0, u].
/// The boundary x = u is inside the support so boundary observations keep a
/// positive likelihood.
inline Kernel uniform_kernel() {
    Kernel k;
    k.name = "uniform";
    k.descriptor = "uniform";
    k.evaluate = [](double x, double u) {
        if (!(u > 0.0)) {
            throw ConfigError("uniform kernel: mixing parameter must be positive, got u = " +
                              std::to_string(u));
        }
        return (x >= 0.0 && x <= u) ? 1.0 / u : 0.0;
    };
    k.observation_support = [](double u) { return ObservationInterval{0.0, u}; };
    return k;
}

/// Gaussian location kernel with fixed standard deviation sigma.
inline Kernel gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ConfigError("gaussian kernel: sigma must be positive, got " +
                          std::to_string(sigma));
    }
    Kernel k;
    k.name = "gaussian";
    k.descriptor = "gaussian(sigma=" + std::to_string(sigma) + ")";
    const double inv_norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    k.evaluate = [sigma, inv_norm](double x, double u) {
        const double z = (x - u) / sigma;
        return inv_norm * std::exp(-0.5 * z * z);
    };
    k.observation_support = [](double) { return ObservationInterval{}; };
    return k;
}

/// Mixture density m_P(x), the kernel integrated against the mixing measure.
inline double mixture_density(const Kernel& kernel, const MixingMeasure& p, double x) {
    if (!std::isfinite(x)) throw EvaluationError("mixture_density: observation is not finite");
    return quadrature(p, [&](double u) { return kernel.evaluate(x, u); });
}

} // namespace prmix

#endif
