#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>

#include "unitscan/arith.hpp"
#include "unitscan/certify.hpp"
#include "unitscan/cfrac.hpp"

namespace unitscan::pell {

// The witness route: u^2 - d^3 v^2 = ±4 with u, v of bounded size encodes a
// unit of the order Z + d*O_K strictly between 1 and eps^d, which forces
// d | y for prime d.

struct PellWitness {
    mpz_class d, u, v;
    int sign4 = -4;  // the right-hand side, +4 or -4
};

enum class WitnessVerdict {
    proves_d_divides_y,
    equation_failed,
    bound_inconclusive,
    not_certified_prime,
};

const char* to_string(WitnessVerdict v);

struct WitnessCheck {
    WitnessVerdict verdict;
    std::string detail;
};

/// Checks, in order: the certificate proves d prime; the equation and parity
/// hold exactly; the digit bounds (u < 10^(d-1), v < 10^(d-16), v*d < 10^(d-1))
/// together with d >= 361 force the unit below eps^d.
WitnessCheck check_witness(const PellWitness& w, const certify::Certificate& cert);

/// u = 2x + y, v = y/d for a unit with d | y over omega = (1+sqrt(d))/2.
/// Throws std::invalid_argument unless d = 1 mod 4 and d | y.
PellWitness make_witness(const cfrac::FundamentalUnit& unit);

// witness file format: "d=", "u=", "v=", "sign=" lines, decimal
void write_witness(const PellWitness& w, std::ostream& os);
PellWitness read_witness(std::istream& is);

/// (RC): N(eps) = +1, d != 1 mod 8, y even and d | y.
bool rc_satisfies(u64 d, const cfrac::UnitMod& um);

struct AnalysisRow {
    u64 d = 0;
    bool d_divides_Y = false;
    bool d_divides_y = false;
    bool rc = false;
    int alpha = 0;  // y mod 2
    int beta = 0;   // d mod 8
    unsigned s = 0; // number of distinct primes dividing d
    bool s_is_lower_bound = false;
    int norm = 0;
    u64 period = 0;
    std::optional<u64> h_external;  // passed through, never computed
};

/// Throws std::invalid_argument when d is provably not squarefree.
AnalysisRow analyze(u64 d, std::optional<u64> h_external = std::nullopt,
                    u64 step_budget = cfrac::kDefaultStepBudget);

struct BernoulliCheck {
    u64 p = 0;
    u64 bernoulli_residue = 0;  // B_{(p-1)/2} mod p
    u64 y_residue = 0;          // y mod p
    bool consistent = false;    // (p | y) iff (B = 0 mod p)
    std::string note;
};

inline constexpr u64 kBernoulliFeasibleBound = 100'000;

/// Cross-checks the continued-fraction y mod p against the Bernoulli
/// congruence h(d)*v = u*B_{(d-1)/2} (mod d).
BernoulliCheck mordell_bernoulli_check(u64 p, u64 bound = kBernoulliFeasibleBound);

struct ScreenInput {
    bool d_divides_y = false;
    bool y_odd = false;
    int norm = 0;
};

struct ScreenResult {
    std::set<char> matches;           // clause labels among {a,b,c,d,e}
    bool requires_external_h = false; // matched clauses still need h(d) = 2
    bool factorization_incomplete = false;
};

/// Shape/congruence/parity/norm screen for the open-problem clauses; the
/// class-number condition is reported, never decided.
ScreenResult open_problem_screen(u64 d, const ScreenInput& in,
                                 const arith::Factorization& fact);

}  // namespace unitscan::pell
