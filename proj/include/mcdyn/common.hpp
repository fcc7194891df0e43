#ifndef MCDYN_COMMON_HPP
#define MCDYN_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcdyn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A branch image leaves [0,1] beyond tolerance, or a map definition is malformed.
class InvalidMapError : public Error {
public:
    using Error::Error;
};

// A transition matrix violates row-stochasticity (zero row, negative entry, bad sum).
class InvalidChainError : public Error {
public:
    using Error::Error;
};

// Operation requires strictly monotone branches and the map has none.
class UnsupportedMapError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual(residual) {}
    double residual;
};

// Malformed automaton/system description.
class SpecError : public Error {
public:
    using Error::Error;
};

/// Deterministic splitmix64 generator. Used everywhere randomness is needed so
/// that runs are reproducible across platforms (std:: distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    /// Independent substream k of a base seed.
    static Rng stream(std::uint64_t seed, std::uint64_t k) {
        Rng mix(seed ^ (0xD1B54A32D192ED03ull * (k + 1)));
        mix.next_u64();
        return mix;
    }

private:
    std::uint64_t state_;
};

}  // namespace mcdyn

#endif
