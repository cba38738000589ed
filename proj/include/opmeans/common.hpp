#pragma once

// Shared error types and the deterministic random generator used by every
// randomized check in the library.

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace opmeans {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside an operation's mathematical domain (non-PD operand,
// eigenvalue outside a scalar function's domain, parameter out of range).
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed textual spec or JSON input.
class ParseError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Eigensolver failed to meet its off-diagonal threshold within the sweep
// budget; carries the residual off-diagonal norm.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Regularization ladder exhausted before the stopping rule fired; carries
// the last step gap and the smallest epsilon reached.
class LadderError : public Error {
public:
    LadderError(const std::string& msg, double last_gap, double last_eps)
        : Error(msg), last_gap_(last_gap), last_eps_(last_eps) {}
    double last_gap() const { return last_gap_; }
    double last_eps() const { return last_eps_; }

private:
    double last_gap_;
    double last_eps_;
};

// SplitMix64 stream. Platform-independent, so seeded runs are bit-identical
// everywhere; child streams are derived by counter-based mixing, which makes
// trials independent and safe to run concurrently.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller on explicit uniforms
    double gaussian();

    // log-uniform over [10^lo_exp, 10^hi_exp]
    double log_uniform_pow10(double lo_exp, double hi_exp);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Counter-based seed split: fold a path of indices into a fresh seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

}  // namespace opmeans
