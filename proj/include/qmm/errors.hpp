#pragma once

#include <stdexcept>
#include <string>

namespace qmm {

enum class ErrorKind {
    parameter,      // physically meaningless input (e.g. non-positive scale)
    stability,      // CFL violation
    validation,     // record invariant violated
    shape,          // grid / array size mismatch
    divergence,     // non-finite value produced during time stepping
    integration,    // Bloch norm drift beyond tolerance
    convergence,    // steady state not reached
    configuration,  // scenario or boundary configuration inconsistent
    state,          // operation called without the history it needs
    input,          // malformed analysis input
    pole,           // evaluation exactly on an undamped resonance
    incomplete,     // pulses did not leave the domain
    io,
    internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, unsigned long long step)
        : Error(ErrorKind::divergence, what), step_(step) {}

    unsigned long long step() const noexcept { return step_; }

private:
    unsigned long long step_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(ErrorKind::convergence, what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace qmm
