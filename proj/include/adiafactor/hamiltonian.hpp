#pragma once

// H(s) = (1 - s) * g * sum_k sigma_x^k + s * diag(costs), applied matrix-free.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adiafactor/encoding.hpp"
#include "adiafactor/errors.hpp"
#include "adiafactor/state.hpp"

namespace adiafactor {

/// Largest n for which H(s) is assembled densely.
inline constexpr unsigned kMaxDenseQubits = 12;

/// Optional cost renormalization: costs / max_cost * factor. Not part of the
/// raw-unit model; results computed with it are flagged in every report.
struct CostScaling {
    std::optional<double> normalize_to;

    bool enabled() const noexcept { return normalize_to.has_value(); }
    friend bool operator==(const CostScaling&, const CostScaling&) = default;
};

/// Floating-point form of H(s) used by the evolution engine.
struct Hamiltonian {
    unsigned n = 0;
    double g = 0.0;
    std::vector<double> costs;

    std::size_t dimension() const noexcept { return costs.size(); }
    double max_cost() const noexcept { return costs.empty() ? 0.0 : *std::max_element(costs.begin(), costs.end()); }

    /// Upper bound on the spectral radius of H(s) for every s in [0, 1].
    double spectral_bound() const noexcept { return n * g + max_cost(); }
};

inline Hamiltonian make_hamiltonian(const CostDiagonal& diag, double g, const CostScaling& scaling = {}) {
    if (!(g > 0.0)) throw InvalidArgument("transverse field g must be positive");
    if (diag.costs.size() != diag.instance.dimension()) throw DimensionError("cost diagonal does not match its instance");
    Hamiltonian h{diag.instance.n, g, std::vector<double>(diag.costs.size())};
    double factor = 1.0;
    if (scaling.enabled()) {
        if (!(*scaling.normalize_to > 0.0)) throw InvalidArgument("cost normalization factor must be positive");
        const Cost max_cost = diag.max_cost();
        factor = max_cost == 0 ? 1.0 : *scaling.normalize_to / static_cast<double>(max_cost);
    }
    for (std::size_t j = 0; j < h.costs.size(); ++j) h.costs[j] = static_cast<double>(diag.costs[j]) * factor;
    return h;
}

/// out = H(s) * in.
inline void apply_hamiltonian(const Hamiltonian& h, double s, std::span<const Amplitude> in, std::span<Amplitude> out) {
    const std::size_t dim = h.dimension();
    if (in.size() != dim || out.size() != dim) throw DimensionError("state size does not match the Hamiltonian");
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("interpolation value s must lie in [0, 1]");
    const double transverse = h.g * (1.0 - s);
    for (std::size_t j = 0; j < dim; ++j) out[j] = (s * h.costs[j]) * in[j];
    if (transverse == 0.0) return;
    for (unsigned k = 0; k < h.n; ++k) {
        const std::size_t bit = std::size_t{1} << k;
        for (std::size_t j = 0; j < dim; ++j) out[j] += transverse * in[j ^ bit];
    }
}

inline StateVector apply_hamiltonian(const StateVector& psi, double s, double g, const CostDiagonal& diag) {
    const Hamiltonian h = make_hamiltonian(diag, g);
    StateVector out(psi.qubits());
    apply_hamiltonian(h, s, psi.amplitudes(), out.amplitudes());
    return out;
}

/// Dense real symmetric H(s); n <= kMaxDenseQubits.
inline Eigen::MatrixXd dense_hamiltonian(const Hamiltonian& h, double s) {
    if (h.n > kMaxDenseQubits) {
        throw DimensionError("dense H(s) limited to n <= " + std::to_string(kMaxDenseQubits));
    }
    const auto dim = static_cast<Eigen::Index>(h.dimension());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    const double transverse = h.g * (1.0 - s);
    for (Eigen::Index j = 0; j < dim; ++j) {
        m(j, j) = s * h.costs[static_cast<std::size_t>(j)];
        for (unsigned k = 0; k < h.n; ++k) m(j, j ^ (Eigen::Index{1} << k)) += transverse;
    }
    return m;
}

/// The k lowest eigenvalues of H(s), ascending.
inline std::vector<double> spectrum(const Hamiltonian& h, double s, std::size_t k) {
    if (k < 1 || k > h.dimension()) throw InvalidArgument("eigenvalue count k must lie in [1, 2^n]");
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("interpolation value s must lie in [0, 1]");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_hamiltonian(h, s), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalFailure("eigensolver did not converge");
    const auto& values = solver.eigenvalues();  // ascending
    return {values.data(), values.data() + k};
}

inline std::vector<double> spectrum(double s, double g, const CostDiagonal& diag, std::size_t k) {
    return spectrum(make_hamiltonian(diag, g), s, k);
}

}  // namespace adiafactor
