#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace impact {

// Driver name sets disagree or an unknown driver was referenced.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A property evaluation produced a non-finite value; carries the offending point.
struct EvaluationError : std::runtime_error {
    std::vector<double> theta;
    EvaluationError(const std::string& msg, std::vector<double> at)
        : std::runtime_error(msg), theta(std::move(at)) {}
};

// Inner maximization did not converge; carries the best point found so far.
struct ConvergenceError : std::runtime_error {
    std::vector<double> best_tau;
    double best_value;
    ConvergenceError(const std::string& msg, std::vector<double> tau, double value)
        : std::runtime_error(msg), best_tau(std::move(tau)), best_value(value) {}
};

// Re-optimized behaviour made a maximized property worse than the frozen one.
struct OptimalityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An internal identity (e.g. the impact decomposition) failed its tolerance.
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace impact
