#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace blockrip {

// Error taxonomy shared by the C++ core, the C API and the CLI exit codes.
enum class ErrorCode : int {
    ok = 0,
    internal = 1,
    validation = 2,
    capacity = 3,
    convergence = 4,
    io = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Bad arguments and config violations. Exit code 2.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorCode::validation, what) {}
};

// Combinatorial guards (support enumeration, Gram size caps). Exit code 3.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& what)
        : Error(ErrorCode::capacity, what) {}
};

// Iterative solvers that failed to converge. Carries the best value seen
// and, for the recovery solvers, the residual history. Exit code 4.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_value,
                     std::vector<double> history = {})
        : Error(ErrorCode::convergence, what),
          best_value_(best_value),
          history_(std::move(history)) {}
    double best_value() const { return best_value_; }
    const std::vector<double>& history() const { return history_; }

private:
    double best_value_;
    std::vector<double> history_;
};

// File problems. Exit code 5.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace blockrip
