#pragma once

#include <stdexcept>
#include <string>

namespace ewjn {

// Convergence failure of an iterative/adaptive numeric procedure. Carries the
// best estimate reached and the residual that failed to meet the tolerance.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// Generic numeric failure (quadrature target missed, non-PSD rate matrix, ...).
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& what, double achieved = 0.0)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Dense linear solve failed or is untrustworthy.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, double rcond)
        : std::runtime_error(what + " (rcond estimate " + std::to_string(rcond) + ")"),
          rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

// Problem size exceeds the configured memory budget.
class capacity_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input file could not be parsed or failed validation.
class parse_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ewjn
