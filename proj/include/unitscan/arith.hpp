#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace unitscan {

using u32 = uint32_t;
using u64 = uint64_t;
using i64 = int64_t;
using u128 = __uint128_t;

namespace arith {

// ---- word-size primitives (search fast path) ----

inline u64 mulmod(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }
inline u64 addmod(u64 a, u64 b, u64 m) {
    u64 s = a + b;
    if (s < a || s >= m) s -= m;
    return s;
}

u64 isqrt(u64 n);
bool is_perfect_square(u64 n);
bool is_perfect_cube(u64 n);

/// base^exp mod m, m >= 2. Throws std::invalid_argument on m < 2.
u64 modpow(u64 base, u64 exp, u64 m);
mpz_class modpow(const mpz_class& base, const mpz_class& exp, const mpz_class& m);

mpz_class isqrt(const mpz_class& n);

/// Kronecker symbol (a/b), total on all integer pairs.
int kronecker(i64 a, i64 b);

// ---- sieves and primality ----

/// Primes <= 10^6, computed once, shared.
const std::vector<u32>& small_primes();
/// Simple sieve of [2, n]; n capped at 2^26.
std::vector<u32> primes_up_to(u64 n);

/// Bit i of the result corresponds to lo + i; range is [lo, hi] inclusive.
std::vector<bool> segmented_primes(u64 lo, u64 hi);
std::vector<bool> segmented_squarefree(u64 lo, u64 hi);

/// Deterministic for all 64-bit inputs (fixed Miller-Rabin base set).
bool is_probable_prime(u64 n);
/// Screening only; no false negatives on primes.
bool is_probable_prime(const mpz_class& n);

/// Exact for all 64-bit n (trial division + perfect-power fallback).
bool is_squarefree(u64 n);
/// Exact for all 64-bit n >= 1.
bool is_powerful(u64 n);

// ---- factorization ----

inline constexpr u64 kTrialDivisionBound = 1'000'000;
inline constexpr u64 kDefaultRhoBudget = 1u << 23;

struct Factorization {
    mpz_class n;
    std::vector<std::pair<mpz_class, unsigned>> factors;  // sorted by prime
    mpz_class cofactor;  // 1 when complete, unfactored remainder otherwise
    bool complete = false;

    unsigned distinct_primes() const { return (unsigned)factors.size(); }
};

/// Trial division to 10^6, then Brent-rho within the iteration budget.
/// Incompleteness is reported via `complete`/`cofactor`, never thrown.
Factorization factorize(const mpz_class& n, u64 rho_budget = kDefaultRhoBudget);
Factorization factorize(u64 n, u64 rho_budget = kDefaultRhoBudget);

// ---- Bernoulli numbers mod p ----

/// B_{(p-1)/2} mod p for prime p ≡ 1 (mod 4), p >= 13, via the power-sum
/// congruence S_n(p) ≡ p·B_n (mod p^2) with n = (p-1)/2.
u64 bernoulli_half_mod_p(u64 p);

}  // namespace arith
}  // namespace unitscan
