#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "unitscan/arith.hpp"

namespace unitscan::certify {

// Pocklington-style primality certificates: c is prime if a | c-1, a^2 > c,
// 2^(c-1) = 1 (mod c) and gcd(2^((c-1)/p) - 1, c) = 1 for every prime p | a,
// where each such p is itself proven prime (by trial division up to 10^6 or
// by a nested certificate).

inline constexpr u64 kTrialLeafBound = 1'000'000;

struct Certificate;

struct FactorEntry {
    enum class Kind { TrialDivision, Nested };
    mpz_class p;
    Kind kind = Kind::TrialDivision;
    std::unique_ptr<Certificate> cert;  // set iff kind == Nested
};

struct Certificate {
    mpz_class c;
    // trial-leaf certificates have a == 0 and no factors (valid for c <= 10^6)
    mpz_class a;
    std::vector<FactorEntry> factors;

    bool is_trial_leaf() const { return a == 0; }
    Certificate clone() const;
};

struct VerifyResult {
    bool ok = false;
    std::string reason;  // empty when ok
    std::string path;    // chain path of the failing link, e.g. "4591/85"
};

/// Full independent verification; never returns a "probably".
VerifyResult verify_certificate(const Certificate& cert);

struct BuildOptions {
    u64 rho_budget = arith::kDefaultRhoBudget;
    u64 leaf_bound = kTrialLeafBound;          // primes <= bound become trial leaves
    std::vector<mpz_class> hints;              // known prime factors, tried at every level
};

struct BuildResult {
    bool ok = false;
    Certificate cert;
    std::string error;
};

/// Builds a certificate for probable-prime n: factors n-1, multiplies primes
/// (largest first) into a until a^2 > n, recursively certifies factors above
/// the leaf bound. The result is self-verified before being returned.
BuildResult build_certificate(const mpz_class& n, const BuildOptions& opts = {});

// ---- serialization ----
// One JSON object per certificate. A chain file holds one object per line,
// ordered leaves-first; factor entries of kind "cert" may omit the inline
// certificate when an earlier line proves that prime.

std::string to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);

void write_chain(const Certificate& cert, std::ostream& os);
Certificate read_chain(std::istream& is);

/// Number of certificate objects write_chain would emit.
u64 chain_length(const Certificate& cert);

}  // namespace unitscan::certify
