#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adiafactor/encoding.hpp"
#include "adiafactor/errors.hpp"

namespace adiafactor {

using Amplitude = std::complex<double>;

/// Pure n-qubit state: 2^n complex amplitudes in the computational basis.
class StateVector {
public:
    StateVector() = default;

    explicit StateVector(unsigned n) : n_(check_qubits(n)), amplitudes_(std::size_t{1} << n) {}

    StateVector(unsigned n, std::vector<Amplitude> amplitudes) : n_(check_qubits(n)), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != (std::size_t{1} << n)) throw DimensionError("amplitude count is not 2^n");
    }

    static StateVector basis(unsigned n, BasisIndex j) {
        StateVector psi(n);
        psi.amplitudes_.at(j) = 1.0;
        return psi;
    }

    unsigned qubits() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }

    std::span<Amplitude> amplitudes() noexcept { return amplitudes_; }
    std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }

    Amplitude& operator[](std::size_t j) noexcept { return amplitudes_[j]; }
    const Amplitude& operator[](std::size_t j) const noexcept { return amplitudes_[j]; }

    double norm_squared() const noexcept {
        double total = 0.0;
        for (const auto& a : amplitudes_) total += std::norm(a);
        return total;
    }

    std::vector<double> populations() const {
        std::vector<double> out(amplitudes_.size());
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::norm(amplitudes_[j]);
        return out;
    }

private:
    static unsigned check_qubits(unsigned n) {
        if (n < 1 || n > kMaxQubits) {
            throw DimensionError("qubit count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxQubits) + "]");
        }
        return n;
    }

    unsigned n_ = 0;
    std::vector<Amplitude> amplitudes_;
};

/// Ground state of g * sum_k sigma_x^k: amplitude (-1)^parity(j) / sqrt(2^n).
inline StateVector initial_state(unsigned n) {
    StateVector psi(n);
    const double amp = 1.0 / std::sqrt(static_cast<double>(psi.dimension()));
    for (std::size_t j = 0; j < psi.dimension(); ++j) {
        psi[j] = (std::popcount(j) % 2 == 0) ? amp : -amp;
    }
    return psi;
}

/// |<target|psi>|^2.
inline double fidelity(const StateVector& psi, BasisIndex target) {
    if (target >= psi.dimension()) throw DimensionError("target index " + std::to_string(target) + " out of range");
    return std::norm(psi[target]);
}

/// |<target|psi>|, the amplitude overlap.
inline double overlap(const StateVector& psi, BasisIndex target) { return std::sqrt(fidelity(psi, target)); }

/// Total population on the zero-cost basis states.
inline double success_probability(const StateVector& psi, const CostDiagonal& diag) {
    if (diag.costs.size() != psi.dimension()) throw DimensionError("state and cost diagonal sizes differ");
    double total = 0.0;
    for (std::size_t j = 0; j < psi.dimension(); ++j) {
        if (diag.costs[j] == 0) total += std::norm(psi[j]);
    }
    return total;
}

/// |<a|b>|^2 for two states of equal size.
inline double state_fidelity(const StateVector& a, const StateVector& b) {
    if (a.dimension() != b.dimension()) throw DimensionError("state sizes differ");
    Amplitude inner{};
    for (std::size_t j = 0; j < a.dimension(); ++j) inner += std::conj(a[j]) * b[j];
    return std::norm(inner);
}

}  // namespace adiafactor
