#ifndef PRMIX_PRMIX_HPP
#define PRMIX_PRMIX_HPP

// Umbrella header for the predictive recursion mixture library.

#include "prmix/baselines.hpp"
#include "prmix/bench.hpp"
#include "prmix/errors.hpp"
#include "prmix/integrate.hpp"
#include "prmix/kernels.hpp"
#include "prmix/measure.hpp"
#include "prmix/metrics.hpp"
#include "prmix/monotone.hpp"
#include "prmix/pr_engine.hpp"
#include "prmix/rng.hpp"
#include "prmix/svg.hpp"

#endif
