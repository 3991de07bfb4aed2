#pragma once

#include <stdexcept>
#include <string>

namespace wgb {

/// Invalid input: bad parameters, malformed configuration, violated preconditions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A waveguide that violates one of the regularity assumptions the bounds rely on.
class AssumptionError : public InputError {
public:
    using InputError::InputError;
};

/// Numerical failure: quadrature depth exhausted, eigensolver not converged, factorization breakdown.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double best_estimate = 0.0)
        : std::runtime_error(what), best_estimate_(best_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InputError(message);
}

} // namespace wgb
