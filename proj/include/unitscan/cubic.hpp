#pragma once

#include <iosfwd>
#include <vector>

#include "unitscan/arith.hpp"

namespace unitscan::cubic {

// Exact arithmetic in Z[t]/(t^3 - d) extended by third-denominators:
// an element is (a + b*t + c*t^2)/den with den in {1, 3}, t = cbrt(d).
// Elements are canonical: a thirds element has some numerator not divisible
// by 3, and true thirds require d = 1 or 8 (mod 9).

struct CubicElement {
    mpz_class a, b, c;
    u64 d = 2;
    bool thirds = false;
};

/// Canonicalizing constructor; throws std::invalid_argument on an invariant
/// violation (d < 2, or irreducible thirds with d mod 9 not in {1, 8}).
CubicElement make_cubic(mpz_class a, mpz_class b, mpz_class c, u64 d, bool thirds = false);

inline CubicElement cubic_one(u64 d) { return {1, 0, 0, d, false}; }

/// Component formulas over t^3 = d; exact, with denominator reduction.
/// Throws on mismatched d or a product outside the representable ring.
CubicElement cubic_mul(const CubicElement& x, const CubicElement& y);

/// (a^3 + b^3 d + c^3 d^2 - 3abcd) / den^3, multiplicative.
mpq_class cubic_norm(const CubicElement& x);

/// Adjugate formula (a^2 - bcd, c^2 d - ab, b^2 - ac) / N; requires N != 0
/// and a result representable with denominator 1 or 3.
CubicElement cubic_inverse(const CubicElement& x);

/// The three component equations of x * x_inv = 1, checked exactly on the
/// scaled integer coordinates.
bool verify_unit_pair(const CubicElement& x, const CubicElement& x_inv);

struct DivisibilityReport {
    bool p_divides_b = false;
    bool threeD_divides_b = false;
};

/// Divisibility of the thirds-numerator b of eta = (a + b t + c t^2)/3
/// (b is taken as 3*b' when the element is stored with denominator 1).
DivisibilityReport aac_cubic_divisibility(const CubicElement& eta, const mpz_class& p);

enum class Fundamentality { fundamental, not_fundamental, needs_more_precision };

const char* to_string(Fundamentality f);

struct FundamentalityResult {
    Fundamentality verdict = Fundamentality::needs_more_precision;
    unsigned witness_root = 0;  // the prime z whose root scan hit, when not fundamental
};

/// Root-scan fundamentality test for a unit x with real embedding m > 1:
/// for each prime z <= log_L(m) the procedure scans the integers within
/// 11/4 * n^(-1/2) of n = m^(1/z) and tests whether r = w*n - n^2 + 1/n is
/// integral. All floor/comparison/integrality decisions are certified with
/// interval arithmetic, with precision doubling from 128 bits up to the cap.
/// Throws std::domain_error when m <= 1, std::invalid_argument when x is not
/// a unit.
FundamentalityResult fundamentality_check(const CubicElement& x,
                                          unsigned max_precision_bits = 8192);

struct UnitFixture {
    CubicElement eta;
    CubicElement eta_inv;
};

/// Fixture lines: d a b c a_inv b_inv c_inv (thirds numerators, decimal).
std::vector<UnitFixture> read_unit_fixtures(std::istream& is);

}  // namespace unitscan::cubic
