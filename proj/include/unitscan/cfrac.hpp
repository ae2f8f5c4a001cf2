#pragma once

#include <utility>

#include "unitscan/arith.hpp"

namespace unitscan::cfrac {

// Continued-fraction engine for omega = (1+sqrt(d))/2 (d = 1 mod 4) or
// sqrt(d) (d = 2,3 mod 4). States are quadratic surds (P + sqrt(D))/Q; the
// expansion is iterated until the partial quotient equals the terminal
// quotient e, at which point the committed denominator q_{l-1} is the y of
// the fundamental unit eps = x + y*omega.
//
// All state arithmetic fits 64 bits for d < 2^62 (after the first step every
// state is reduced, so P <= h and Q <= 2h with h = isqrt(d)).

inline constexpr u64 kMaxRadicand = 1ull << 62;
inline constexpr u64 kDefaultStepBudget = 1ull << 35;

struct SurdState {
    u64 Q;  // denominator, > 0, divides D - P^2
    u64 P;
    u64 D;  // non-square radicand
    u64 h;  // cached isqrt(D)
};

struct InitialState {
    SurdState state;
    u64 e;  // terminal partial quotient
};

/// Throws std::invalid_argument on perfect squares, d < 2 or d >= 2^62.
InitialState initial_state(u64 d);

struct StepResult {
    SurdState next;
    u64 k;  // partial quotient produced from the input state
};

/// One step of the expansion, with the exact-division invariant checked.
/// Throws std::logic_error on a corrupted state.
StepResult cf_step(const SurdState& s);

struct YMod {
    u64 residue = 0;  // q_{l-1} mod m
    u64 period = 0;   // l
    int norm = 0;     // (-1)^l
    bool overflowed = false;
};

/// Convergent denominator y mod m at the end of the period.
/// d = 5 is special-cased (eps = omega, y = 1).
YMod y_mod(u64 d, u64 m, u64 step_budget = kDefaultStepBudget);

struct UnitMod {
    u64 x = 0;  // x mod m
    u64 y = 0;  // y mod m
    int y_parity = 0;
    u64 period = 0;
    int norm = 0;
    bool overflowed = false;
};

/// Like y_mod but also tracks convergent numerators, yielding both unit
/// coefficients mod m plus the parity of y.
UnitMod unit_mod(u64 d, u64 m, u64 step_budget = kDefaultStepBudget);

struct FundamentalUnit {
    u64 d = 0;
    mpz_class x, y;  // eps = x + y*omega
    int norm = 0;
    u64 period = 0;
    bool overflowed = false;
};

/// Exact unit reconstruction from the full quotient sequence via a balanced
/// 2x2 matrix product tree. The norm-form identity is re-verified on the
/// result (a failure throws std::logic_error).
FundamentalUnit fundamental_unit(u64 d, u64 step_budget = kDefaultStepBudget);

/// Coefficients of (x + y*omega)^3 mod m, odd m.
std::pair<u64, u64> unit_cube_mod(u64 x, u64 y, u64 d, u64 m);

/// Whether d divides Y, where eps' = X + Y*sqrt(d) is the smallest power of
/// eps lying in Z[sqrt(d)]. Uses only residues mod d plus the parity of y.
bool d_divides_Y(u64 d, const UnitMod& um);
bool d_divides_Y(const FundamentalUnit& unit);

}  // namespace unitscan::cfrac
