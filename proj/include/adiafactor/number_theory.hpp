#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace adiafactor::nt {

inline constexpr std::uint64_t isqrt(std::uint64_t v) noexcept {
    if (v < 2) return v;
    std::uint64_t r = static_cast<std::uint64_t>(__builtin_sqrt(static_cast<double>(v)));
    while (r > 0 && static_cast<unsigned __int128>(r) * r > v) --r;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= v) ++r;
    return r;
}

inline constexpr std::uint64_t icbrt(std::uint64_t v) noexcept {
    std::uint64_t r = 0;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) * (r + 1) <= v) ++r;
    return r;
}

/// Minimal number of bits needed to write v (m(0) = 0).
inline constexpr unsigned bit_count(std::uint64_t v) noexcept {
    return static_cast<unsigned>(std::bit_width(v));
}

/// Largest odd integer not larger than v (v >= 1).
inline constexpr std::uint64_t floor_odd(std::uint64_t v) noexcept {
    return (v % 2 == 1) ? v : v - 1;
}

inline constexpr std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline constexpr std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Deterministic Miller-Rabin; the first twelve primes as witnesses cover all of uint64.
inline constexpr bool is_prime(std::uint64_t n) noexcept {
    constexpr std::array<std::uint64_t, 12> witnesses{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n < 2) return false;
    for (auto p : witnesses) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++s;
    }
    for (auto a : witnesses) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Smallest prime factor of n (n >= 2), by trial division up to `limit`; 0 if none found.
inline constexpr std::uint64_t smallest_factor_upto(std::uint64_t n, std::uint64_t limit) noexcept {
    if (n % 2 == 0) return 2;
    for (std::uint64_t p = 3; p <= limit && p * p <= n; p += 2) {
        if (n % p == 0) return p;
    }
    return 0;
}

/// True when n = p*q for primes p <= q (p == q allowed).
inline constexpr bool is_semiprime(std::uint64_t n) noexcept {
    if (n < 4 || is_prime(n)) return false;
    // A composite with no prime factor <= cbrt(n) has exactly two prime factors.
    const std::uint64_t p = smallest_factor_upto(n, icbrt(n));
    if (p == 0) return true;
    return is_prime(n / p);
}

}  // namespace adiafactor::nt
