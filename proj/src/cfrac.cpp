#include "unitscan/cfrac.hpp"

#include <cassert>
#include <stdexcept>
#include <vector>

namespace unitscan::cfrac {

InitialState initial_state(u64 d) {
    if (d < 2) throw std::invalid_argument("initial_state: d must be >= 2");
    if (d >= kMaxRadicand) throw std::invalid_argument("initial_state: d must be < 2^62");
    u64 h = arith::isqrt(d);
    if (h * h == d) throw std::invalid_argument("initial_state: d is a perfect square");
    if (d % 4 == 1) return {{2, 1, d, h}, 2 * ((1 + h) / 2) - 1};
    return {{1, 0, d, h}, 2 * h};
}

StepResult cf_step(const SurdState& s) {
    if (s.Q == 0) throw std::logic_error("cf_step: Q = 0");
    u64 k = (s.h + s.P) / s.Q;
    if (k * s.Q < s.P) throw std::logic_error("cf_step: corrupted state (negative successor)");
    u64 P2 = k * s.Q - s.P;  // <= h from here on
    u64 sq = P2 * P2;
    if (sq > s.D || (s.D - sq) % s.Q != 0) {
        throw std::logic_error("cf_step: corrupted state (division not exact)");
    }
    u64 Q2 = (s.D - sq) / s.Q;
    if (Q2 == 0) throw std::logic_error("cf_step: corrupted state (square radicand?)");
    return {{Q2, P2, s.D, s.h}, k};
}

YMod y_mod(u64 d, u64 m, u64 step_budget) {
    if (m < 2) throw std::invalid_argument("y_mod: modulus must be >= 2");
    if (d == 5) return {1 % m, 1, -1, false};
    auto [s, e] = initial_state(d);
    u64 Q = s.Q, P = s.P, h = s.h;
    u64 x = 1 % m, y = 0;
    u64 steps = 0;
    for (;;) {
        u64 k = (h + P) / Q;
        if (k == e) break;
        if (steps == step_budget) return {0, 0, 0, true};
        u64 ny = (u64)(((u128)y * k + x) % m);
        x = y;
        y = ny;
        ++steps;
        P = k * Q - P;
        assert(P <= h && d >= P * P && (d - P * P) % Q == 0);
        Q = (d - P * P) / Q;
    }
    return {y, steps, (steps & 1) ? -1 : +1, false};
}

UnitMod unit_mod(u64 d, u64 m, u64 step_budget) {
    if (m < 2) throw std::invalid_argument("unit_mod: modulus must be >= 2");
    if (d == 5) return {0, 1 % m, 1, 1, -1, false};
    auto [s, e] = initial_state(d);
    u64 Q = s.Q, P = s.P, h = s.h;
    u64 qx = 1 % m, qy = 0;      // denominators q_{j-2}, q_{j-1} mod m
    u64 px = 0, py = 1 % m;      // numerators p_{j-2}, p_{j-1} mod m
    int qx_par = 1, qy_par = 0;  // same recurrences mod 2
    int px_par = 0, py_par = 1;
    u64 steps = 0;
    for (;;) {
        u64 k = (h + P) / Q;
        if (k == e) break;
        if (steps == step_budget) return {0, 0, 0, 0, 0, true};
        u64 nqy = (u64)(((u128)qy * k + qx) % m);
        u64 npy = (u64)(((u128)py * k + px) % m);
        int kp = (int)(k & 1);
        int nqy_par = (kp & qy_par) ^ qx_par;
        int npy_par = (kp & py_par) ^ px_par;
        qx = qy; qy = nqy;
        px = py; py = npy;
        qx_par = qy_par; qy_par = nqy_par;
        px_par = py_par; py_par = npy_par;
        ++steps;
        P = k * Q - P;
        Q = (d - P * P) / Q;
    }
    u64 xm = py;  // x = p_{l-1} - q_{l-1} in the omega basis, else p_{l-1}
    if (d % 4 == 1) xm = py >= qy ? py - qy : py + (m - qy);
    return {xm, qy, qy_par, steps, (steps & 1) ? -1 : +1, false};
}

namespace {

// Segment of the quotient stream as a 2x2 matrix product with mpz entries.
struct Mat {
    mpz_class a, b, c, d;  // [[a, b], [c, d]]
    u64 leaves;
};

Mat mat_mul(const Mat& l, const Mat& r) {
    Mat out;
    out.a = l.a * r.a + l.b * r.c;
    out.b = l.a * r.b + l.b * r.d;
    out.c = l.c * r.a + l.d * r.c;
    out.d = l.c * r.b + l.d * r.d;
    out.leaves = l.leaves + r.leaves;
    return out;
}

// Accumulates quotient matrices [[k,1],[1,0]] in u64 until entries approach
// overflow, then flushes to an mpz stack merged in balanced fashion.
class ConvergentTree {
public:
    void push(u64 k) {
        // leaf multiply: [[a,b],[c,d]] * [[k,1],[1,0]]
        if (a_ > (kLimit - b_) / (k ? k : 1) || c_ > (kLimit - d_) / (k ? k : 1)) flush();
        u64 na = a_ * k + b_, nc = c_ * k + d_;
        b_ = a_; d_ = c_;
        a_ = na; c_ = nc;
        ++count_;
    }

    // final [[p_{l-1}, p_{l-2}], [q_{l-1}, q_{l-2}]]
    Mat finish() {
        flush();
        if (stack_.empty()) {
            Mat id;
            id.a = 1; id.b = 0; id.c = 0; id.d = 1;
            id.leaves = 0;
            return id;
        }
        Mat acc = std::move(stack_.front());
        for (size_t i = 1; i < stack_.size(); ++i) acc = mat_mul(acc, stack_[i]);
        stack_.clear();
        return acc;
    }

private:
    static constexpr u64 kLimit = 1ull << 62;

    void flush() {
        if (count_ == 0) return;
        Mat m;
        m.a = a_; m.b = b_; m.c = c_; m.d = d_;
        m.leaves = count_;
        stack_.push_back(std::move(m));
        a_ = 1; b_ = 0; c_ = 0; d_ = 1;
        count_ = 0;
        while (stack_.size() >= 2 &&
               stack_[stack_.size() - 2].leaves <= stack_.back().leaves) {
            Mat top = std::move(stack_.back());
            stack_.pop_back();
            Mat second = std::move(stack_.back());
            stack_.pop_back();
            stack_.push_back(mat_mul(second, top));
        }
    }

    u64 a_ = 1, b_ = 0, c_ = 0, d_ = 1;
    u64 count_ = 0;
    std::vector<Mat> stack_;
};

}  // namespace

FundamentalUnit fundamental_unit(u64 d, u64 step_budget) {
    if (d == 5) {
        FundamentalUnit u;
        u.d = 5; u.x = 0; u.y = 1; u.norm = -1; u.period = 1;
        return u;
    }
    auto [s, e] = initial_state(d);
    u64 Q = s.Q, P = s.P, h = s.h;
    ConvergentTree tree;
    u64 steps = 0;
    for (;;) {
        u64 k = (h + P) / Q;
        if (k == e) break;
        if (steps == step_budget) {
            FundamentalUnit u;
            u.d = d;
            u.overflowed = true;
            return u;
        }
        tree.push(k);
        ++steps;
        P = k * Q - P;
        Q = (d - P * P) / Q;
    }
    Mat m = tree.finish();
    FundamentalUnit u;
    u.d = d;
    u.period = steps;
    u.norm = (steps & 1) ? -1 : +1;
    u.y = m.c;  // q_{l-1}
    u.x = d % 4 == 1 ? mpz_class(m.a - m.c) : m.a;
    // norm-form invariant guards the x reconstruction and the termination rule
    mpz_class nf;
    if (d % 4 == 1) {
        nf = u.x * u.x + u.x * u.y - u.y * u.y * mpz_class((d - 1) / 4);
    } else {
        nf = u.x * u.x - mpz_class(d) * u.y * u.y;
    }
    if (nf != u.norm) throw std::logic_error("fundamental_unit: norm-form invariant violated");
    return u;
}

std::pair<u64, u64> unit_cube_mod(u64 x, u64 y, u64 d, u64 m) {
    if (m < 2 || m % 2 == 0) throw std::invalid_argument("unit_cube_mod: modulus must be odd >= 3");
    using arith::addmod;
    using arith::mulmod;
    x %= m;
    y %= m;
    u64 c = d % 4 == 1 ? ((d - 1) / 4) % m : d % m;  // omega^2 = omega + c or = c
    bool affine = d % 4 == 1;                         // omega^2 contributes to omega term
    // square
    u64 yy = mulmod(y, y, m);
    u64 x2 = addmod(mulmod(x, x, m), mulmod(yy, c, m), m);
    u64 y2 = addmod(mulmod(2 % m, mulmod(x, y, m), m), affine ? yy : 0, m);
    // multiply (x2 + y2*omega)(x + y*omega)
    u64 cross = mulmod(y2, y, m);
    u64 x3 = addmod(mulmod(x2, x, m), mulmod(cross, c, m), m);
    u64 y3 = addmod(addmod(mulmod(x2, y, m), mulmod(y2, x, m), m), affine ? cross : 0, m);
    return {x3, y3};
}

bool d_divides_Y(u64 d, const UnitMod& um) {
    if (d % 4 != 1) return um.y == 0;  // omega = sqrt(d): Y = y
    if (um.y_parity == 0) return um.y == 0;  // eps in Z[sqrt d], Y = y/2, d odd
    auto [x3, y3] = unit_cube_mod(um.x, um.y, d, d);
    (void)x3;
    return y3 == 0;  // eps' = eps^3, Y = y3/2, d odd
}

bool d_divides_Y(const FundamentalUnit& unit) {
    u64 d = unit.d;
    if (d % 4 != 1) return mpz_divisible_ui_p(unit.y.get_mpz_t(), d) != 0;
    if (mpz_even_p(unit.y.get_mpz_t())) return mpz_divisible_ui_p(unit.y.get_mpz_t(), d) != 0;
    u64 xm = mpz_fdiv_ui(unit.x.get_mpz_t(), d);
    u64 ym = mpz_fdiv_ui(unit.y.get_mpz_t(), d);
    auto [x3, y3] = unit_cube_mod(xm, ym, d, d);
    (void)x3;
    return y3 == 0;
}

}  // namespace unitscan::cfrac
