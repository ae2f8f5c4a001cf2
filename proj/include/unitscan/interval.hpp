#pragma once

#include <optional>

#include "unitscan/arith.hpp"

namespace unitscan::cubic {

// Fixed-point interval [lo, hi] * 2^-scale over mpz, rounded outward on every
// operation. Binary operations require both operands at the same scale.
class Interval {
public:
    Interval() = default;
    Interval(mpz_class lo, mpz_class hi, long scale);

    static Interval from_integer(const mpz_class& v, long scale);
    /// Certified enclosure of n^(1/k) for integer n >= 0.
    static Interval nth_root_of(const mpz_class& n, unsigned k, long scale);

    long scale() const { return scale_; }
    const mpz_class& lo() const { return lo_; }
    const mpz_class& hi() const { return hi_; }

    Interval operator+(const Interval& o) const;
    Interval operator-(const Interval& o) const;
    Interval operator*(const Interval& o) const;
    Interval neg() const;
    Interval abs() const;
    Interval mul_int(const mpz_class& m) const;
    Interval div_uint(unsigned long u) const;
    Interval reciprocal() const;  // requires 0 strictly outside
    Interval sqrt() const;        // requires lo >= 0
    Interval nth_root(unsigned k) const;

    /// Certified strict comparison; nullopt when the intervals overlap.
    std::optional<bool> less_than(const Interval& o) const;
    /// Certified sign; 0 only for the exact point interval [0, 0].
    std::optional<int> sign() const;

    mpz_class width_scaled() const { return hi_ - lo_; }
    std::optional<mpz_class> certified_floor() const;
    std::optional<mpz_class> certified_ceil() const;
    /// True iff some integer w satisfies lo - slack <= w <= hi + slack
    /// (slack given in scaled units).
    bool contains_integer_within(const mpz_class& slack_scaled) const;

private:
    mpz_class lo_, hi_;
    long scale_ = 0;
};

}  // namespace unitscan::cubic
