#ifndef PRMIX_ERRORS_HPP
#define PRMIX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace prmix {

/// Invalid algorithm or estimator settings (bad weight constant, atom
/// masses, grid sizes, unknown names). CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Unusable input data (unreadable file, negative observations, empty
/// column). CLI maps this to exit code 3.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical evaluation failed: non-finite integrand, degenerate measure,
/// underflowing denominator, incompatible operands.
class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the mathematical domain of an operation
/// (negative density value, negative observation for a monotone model).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

} // namespace prmix

#endif
