#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace lsb {

/// Broad failure class, used by the CLI to choose an exit code.
enum class ErrorKind { Input, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Malformed arguments, dimension mismatches, bad configuration.
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

/// The Jacobian has no singular value below the rank threshold.
class NotSingularError : public Error {
public:
    explicit NotSingularError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// A standing assumption about the singular point does not hold.
class AssumptionError : public Error {
public:
    explicit AssumptionError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// Newton-type iteration failed; carries the best iterate seen.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd best, double residual)
        : Error(ErrorKind::Numerical, what), best_(std::move(best)), residual_(residual) {}

    const Eigen::VectorXd& best_iterate() const noexcept { return best_; }
    double residual() const noexcept { return residual_; }

private:
    Eigen::VectorXd best_;
    double residual_;
};

/// Bracketing search found nothing to bracket.
class SearchError : public Error {
public:
    explicit SearchError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class GenerationError : public Error {
public:
    explicit GenerationError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// No positive radius passes the certificate test.
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InputError(msg);
}

inline void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* name) {
    if (!m.allFinite()) throw InputError(std::string(name) + " has non-finite entries");
}

}  // namespace detail
}  // namespace lsb
