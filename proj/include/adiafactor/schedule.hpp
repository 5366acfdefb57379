#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "adiafactor/errors.hpp"

namespace adiafactor {

enum class EvolutionMode { continuous, discrete };

inline std::string to_string(EvolutionMode mode) { return mode == EvolutionMode::continuous ? "continuous" : "discrete"; }

inline EvolutionMode parse_mode(const std::string& text) {
    if (text == "continuous") return EvolutionMode::continuous;
    if (text == "discrete") return EvolutionMode::discrete;
    throw InvalidArgument("unknown evolution mode '" + text + "'");
}

/// Polynomial interpolation s(t) = (t/T)^r, or its sampled form s_m = (m/M)^r
/// applied for M + 1 steps of length tau = T / (M + 1).
struct Schedule {
    double total_time = 0.0;
    unsigned exponent = 2;
    EvolutionMode mode = EvolutionMode::continuous;
    unsigned steps = 0;  ///< M; discrete mode applies M + 1 unitaries
    double tau = 0.0;

    static Schedule continuous(double total_time, unsigned exponent) {
        Schedule s{total_time, exponent, EvolutionMode::continuous, 0, 0.0};
        s.validate();
        return s;
    }

    /// Discrete passage with step length tau; total time is (M + 1) * tau.
    static Schedule discrete(unsigned steps, double tau, unsigned exponent) {
        Schedule s{tau * (steps + 1), exponent, EvolutionMode::discrete, steps, tau};
        s.validate();
        return s;
    }

    /// Discrete passage over a fixed total time.
    static Schedule discrete_over(double total_time, unsigned steps, unsigned exponent) {
        Schedule s{total_time, exponent, EvolutionMode::discrete, steps, total_time / (steps + 1)};
        s.validate();
        return s;
    }

    void validate() const {
        if (!(total_time > 0.0) || !std::isfinite(total_time)) throw InvalidArgument("total evolution time must be positive");
        if (exponent < 1) throw InvalidArgument("interpolation exponent r must be at least 1");
        if (mode == EvolutionMode::discrete) {
            if (!(tau > 0.0)) throw InvalidArgument("step duration tau must be positive");
            if (std::abs(tau * (steps + 1) - total_time) > 1e-12 * std::max(1.0, total_time)) {
                throw InvalidArgument("tau * (M + 1) must equal the total time");
            }
        }
    }

    /// s(t) for t in [0, T]; clamped against rounding.
    double at_time(double t) const noexcept {
        return std::clamp(std::pow(t / total_time, static_cast<double>(exponent)), 0.0, 1.0);
    }

    /// s_m for m in [0, M]. A single-step passage (M = 0) applies the problem Hamiltonian.
    double at_step(unsigned m) const noexcept {
        if (steps == 0) return 1.0;
        return std::pow(static_cast<double>(m) / steps, static_cast<double>(exponent));
    }
};

}  // namespace adiafactor
