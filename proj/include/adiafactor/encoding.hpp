#pragma once

// Encoding of an odd composite N as a diagonal cost Hamiltonian over two
// qubit registers holding the odd trial factors x and y.
//
// Bit order: qubit 1 is the most significant bit of a basis index. Qubits
// 1..n_x hold X' (x = 2X' + 1) and qubits n_x+1..n hold Y' (y = 2Y' + 1),
// each most-significant-first. The same order is used for Pauli-Z subset
// masks: mask bit (n - i) selects qubit i.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "adiafactor/errors.hpp"
#include "adiafactor/number_theory.hpp"

namespace adiafactor {

/// Largest register width the library will materialize (2^n amplitudes).
inline constexpr unsigned kMaxQubits = 22;

using BasisIndex = std::uint64_t;
using Cost = std::uint64_t;

struct FactorInstance {
    std::uint64_t N = 0;
    unsigned ell = 0;  ///< bit length of N
    unsigned n_x = 0;
    unsigned n_y = 0;
    unsigned n = 0;

    std::uint64_t dimension() const noexcept { return std::uint64_t{1} << n; }
    friend bool operator==(const FactorInstance&, const FactorInstance&) = default;
};

namespace detail {

inline unsigned layout_nx(std::uint64_t N) noexcept {
    return nt::bit_count(nt::floor_odd(nt::isqrt(N))) - 1;
}

inline unsigned layout_ny(std::uint64_t N) noexcept { return nt::bit_count(N / 3) - 1; }

/// Total qubit count for odd N >= 9, without validating compositeness.
inline unsigned layout_qubits(std::uint64_t N) noexcept { return layout_nx(N) + layout_ny(N); }

}  // namespace detail

/// Register layout for an odd composite N >= 9.
inline FactorInstance factor_layout(std::uint64_t N) {
    if (N < 9) throw InvalidInstance("N=" + std::to_string(N) + " is below 9");
    if (N % 2 == 0) throw InvalidInstance("N=" + std::to_string(N) + " is even; divide out factors of 2 first");
    if (nt::is_prime(N)) throw InvalidInstance("N=" + std::to_string(N) + " is prime");
    if (N > (std::uint64_t{1} << 62)) throw InvalidInstance("N=" + std::to_string(N) + " exceeds 2^62");
    FactorInstance inst;
    inst.N = N;
    inst.ell = nt::bit_count(N);
    inst.n_x = detail::layout_nx(N);
    inst.n_y = detail::layout_ny(N);
    inst.n = inst.n_x + inst.n_y;
    return inst;
}

struct FactorPair {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    friend bool operator==(const FactorPair&, const FactorPair&) = default;
};

inline FactorPair decode_basis(BasisIndex j, const FactorInstance& inst) {
    if (j >= inst.dimension()) {
        throw DimensionError("basis index " + std::to_string(j) + " out of range for n=" + std::to_string(inst.n));
    }
    const std::uint64_t y_bits = j & ((std::uint64_t{1} << inst.n_y) - 1);
    const std::uint64_t x_bits = j >> inst.n_y;
    return {2 * x_bits + 1, 2 * y_bits + 1};
}

/// Inverse of decode_basis; nullopt when (x, y) is not representable.
inline std::optional<BasisIndex> encode_basis(FactorPair pair, const FactorInstance& inst) noexcept {
    if (pair.x % 2 == 0 || pair.y % 2 == 0) return std::nullopt;
    const std::uint64_t x_bits = pair.x / 2;
    const std::uint64_t y_bits = pair.y / 2;
    if (x_bits >= (std::uint64_t{1} << inst.n_x) || y_bits >= (std::uint64_t{1} << inst.n_y)) return std::nullopt;
    return (x_bits << inst.n_y) | y_bits;
}

/// Basis label |z_1 z_2 ... z_n>, most significant (qubit 1) first.
inline std::string basis_label(BasisIndex j, unsigned n) {
    std::string label(n, '0');
    for (unsigned i = 0; i < n; ++i) {
        if ((j >> (n - 1 - i)) & 1) label[i] = '1';
    }
    return label;
}

/// Diagonal of the problem Hamiltonian: costs[j] = (N - x(j) y(j))^2, exact.
struct CostDiagonal {
    FactorInstance instance;
    std::vector<Cost> costs;

    Cost max_cost() const noexcept { return costs.empty() ? 0 : *std::max_element(costs.begin(), costs.end()); }

    /// Basis indices with zero cost (the factor-encoding states).
    std::vector<BasisIndex> solutions() const {
        std::vector<BasisIndex> out;
        for (BasisIndex j = 0; j < costs.size(); ++j) {
            if (costs[j] == 0) out.push_back(j);
        }
        return out;
    }
};

inline Cost factor_cost(std::uint64_t N, FactorPair pair) {
    const __int128 diff = static_cast<__int128>(N) - static_cast<__int128>(pair.x) * static_cast<__int128>(pair.y);
    const unsigned __int128 mag = static_cast<unsigned __int128>(diff < 0 ? -diff : diff);
    // A magnitude above 2^32 - 1 squares past uint64.
    if (mag > std::numeric_limits<std::uint32_t>::max()) {
        throw CostOverflow("cost (N - xy)^2 overflows 64 bits for N=" + std::to_string(N));
    }
    return static_cast<Cost>(mag * mag);
}

inline CostDiagonal build_cost_diagonal(const FactorInstance& inst) {
    if (inst.n == 0 || inst.n > kMaxQubits) {
        throw DimensionError("n=" + std::to_string(inst.n) + " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
    CostDiagonal diag{inst, std::vector<Cost>(inst.dimension())};
    for (BasisIndex j = 0; j < diag.costs.size(); ++j) {
        diag.costs[j] = factor_cost(inst.N, decode_basis(j, inst));
    }
    return diag;
}

/// Coefficients of H_P over products of sigma_z, one per subset mask.
///
/// Coefficients are dyadic rationals numerators[mask] / 2^n. Cost diagonals
/// always give integers; arbitrary diagonals need not.
struct PauliZExpansion {
    unsigned n = 0;
    std::vector<std::int64_t> numerators;

    std::uint64_t size() const noexcept { return numerators.size(); }

    bool is_integral(std::uint64_t mask) const {
        return numerators.at(mask) % (std::int64_t{1} << n) == 0;
    }

    /// Exact integer coefficient; throws when it is not an integer.
    std::int64_t coefficient(std::uint64_t mask) const {
        if (!is_integral(mask)) throw InvalidArgument("coefficient of " + std::to_string(mask) + " is not an integer");
        return numerators[mask] / (std::int64_t{1} << n);
    }

    double coefficient_value(std::uint64_t mask) const {
        return static_cast<double>(numerators.at(mask)) / static_cast<double>(std::int64_t{1} << n);
    }

    /// Value on basis state j; sigma_z^i contributes +1 if bit i of j is 0, -1 otherwise.
    __int128 evaluate(BasisIndex j) const {
        __int128 total = 0;
        for (std::uint64_t mask = 0; mask < numerators.size(); ++mask) {
            const bool odd = std::popcount(j & mask) % 2 == 1;
            total += odd ? -static_cast<__int128>(numerators[mask]) : numerators[mask];
        }
        // total is 2^n times an integer diagonal entry
        return total / (static_cast<__int128>(1) << n);
    }

    /// Nonzero (mask, coefficient) pairs in ascending mask order; integral expansions only.
    std::vector<std::pair<std::uint64_t, std::int64_t>> terms() const {
        std::vector<std::pair<std::uint64_t, std::int64_t>> out;
        for (std::uint64_t mask = 0; mask < numerators.size(); ++mask) {
            if (numerators[mask] != 0) out.emplace_back(mask, coefficient(mask));
        }
        return out;
    }
};

/// Mask selecting the 1-based qubits listed, e.g. z_mask(3, {1, 3}) == 0b101.
inline std::uint64_t z_mask(unsigned n, std::initializer_list<unsigned> qubits) {
    std::uint64_t mask = 0;
    for (unsigned q : qubits) {
        if (q < 1 || q > n) throw InvalidArgument("qubit " + std::to_string(q) + " out of range");
        mask |= std::uint64_t{1} << (n - q);
    }
    return mask;
}

/// Term label such as "I", "Z1", "Z1Z3".
inline std::string term_label(std::uint64_t mask, unsigned n) {
    if (mask == 0) return "I";
    std::string out;
    for (unsigned q = 1; q <= n; ++q) {
        if ((mask >> (n - q)) & 1) out += "Z" + std::to_string(q);
    }
    return out;
}

/// Unnormalized Walsh-Hadamard transform of an integer diagonal.
inline PauliZExpansion walsh_expand(unsigned n, const std::vector<Cost>& values) {
    if (n > kMaxQubits || values.size() != (std::uint64_t{1} << n)) {
        throw DimensionError("diagonal length is not 2^n for n <= " + std::to_string(kMaxQubits));
    }
    std::vector<__int128> work(values.begin(), values.end());
    for (std::size_t half = 1; half < work.size(); half <<= 1) {
        for (std::size_t block = 0; block < work.size(); block += 2 * half) {
            for (std::size_t k = block; k < block + half; ++k) {
                const __int128 a = work[k];
                const __int128 b = work[k + half];
                work[k] = a + b;
                work[k + half] = a - b;
            }
        }
    }
    PauliZExpansion out{n, std::vector<std::int64_t>(work.size())};
    for (std::size_t k = 0; k < work.size(); ++k) {
        if (work[k] > std::numeric_limits<std::int64_t>::max() || work[k] < std::numeric_limits<std::int64_t>::min()) {
            throw CostOverflow("Walsh sum overflows 64 bits");
        }
        out.numerators[k] = static_cast<std::int64_t>(work[k]);
    }
    return out;
}

inline PauliZExpansion pauli_z_expand(const CostDiagonal& diag) { return walsh_expand(diag.instance.n, diag.costs); }

// ---------------------------------------------------------------------------
// Instance sampling

/// Inclusive range of odd N >= 9 whose layout uses exactly `qubits` qubits.
struct OddRange {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::uint64_t odd_count() const noexcept { return (hi - lo) / 2 + 1; }
};

namespace detail {

inline constexpr std::uint64_t kMaxInstanceN = std::uint64_t{1} << 62;

/// Smallest odd N >= 9 with layout_qubits(N) >= q, or nullopt past kMaxInstanceN.
inline std::optional<std::uint64_t> first_odd_with_at_least(unsigned q) {
    std::uint64_t hi = 9;
    while (layout_qubits(hi) < q) {
        if (hi > kMaxInstanceN / 2) return std::nullopt;
        hi = hi * 2 + 1;
    }
    std::uint64_t lo = 9;
    if (layout_qubits(lo) >= q) return lo;
    // invariant: layout(lo) < q <= layout(hi), both odd
    while (hi - lo > 2) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (mid % 2 == 0) ++mid;
        if (mid >= hi) mid = hi - 2;
        if (layout_qubits(mid) >= q) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace detail

inline std::optional<OddRange> layout_range(unsigned qubits) {
    const auto first = detail::first_odd_with_at_least(qubits);
    if (!first || detail::layout_qubits(*first) != qubits) return std::nullopt;
    const auto next = detail::first_odd_with_at_least(qubits + 1);
    const std::uint64_t hi = next ? *next - 2 : detail::kMaxInstanceN - 1;
    return OddRange{*first, hi};
}

/// Odd N of the given bit length (ell >= 4).
inline std::optional<OddRange> bit_length_range(unsigned ell) {
    if (ell < 4 || ell > 62) return std::nullopt;
    return OddRange{std::max<std::uint64_t>(9, (std::uint64_t{1} << (ell - 1)) + 1), (std::uint64_t{1} << ell) - 1};
}

inline std::vector<std::uint64_t> odd_semiprimes_in(OddRange range) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t N = range.lo; N <= range.hi; N += 2) {
        if (nt::is_semiprime(N)) out.push_back(N);
    }
    return out;
}

struct SamplingOptions {
    /// Ranges with at most this many odd numbers are enumerated exactly.
    std::uint64_t enumerate_below = std::uint64_t{1} << 16;
    std::uint64_t max_retries = std::uint64_t{1} << 20;
};

/// Uniform odd semiprime from `range`, deterministic in `seed`.
inline std::uint64_t sample_odd_semiprime(OddRange range, std::uint64_t seed, const SamplingOptions& opts = {}) {
    std::mt19937_64 rng(seed);
    if (range.odd_count() <= opts.enumerate_below) {
        const auto candidates = odd_semiprimes_in(range);
        if (candidates.empty()) {
            throw NoInstance("no odd semiprime in [" + std::to_string(range.lo) + ", " + std::to_string(range.hi) + "]");
        }
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        return candidates[pick(rng)];
    }
    std::uniform_int_distribution<std::uint64_t> pick(0, range.odd_count() - 1);
    for (std::uint64_t attempt = 0; attempt < opts.max_retries; ++attempt) {
        const std::uint64_t N = range.lo + 2 * pick(rng);
        if (nt::is_semiprime(N)) return N;
    }
    throw SamplingExhausted("no odd semiprime found after " + std::to_string(opts.max_retries) + " draws");
}

/// Random odd semiprime N = p*q (p <= q) whose layout has exactly `qubit_budget` qubits.
inline FactorInstance random_instance(unsigned qubit_budget, std::uint64_t rng_seed, const SamplingOptions& opts = {}) {
    if (qubit_budget < 2) throw InvalidArgument("qubit budget must be at least 2");
    const auto range = layout_range(qubit_budget);
    if (!range) throw NoInstance("no odd N has a layout with n=" + std::to_string(qubit_budget));
    return factor_layout(sample_odd_semiprime(*range, rng_seed, opts));
}

}  // namespace adiafactor
