#include "unitscan/interval.hpp"

#include <stdexcept>

namespace unitscan::cubic {

namespace {

mpz_class shift_left(const mpz_class& v, long k) {
    mpz_class r;
    mpz_mul_2exp(r.get_mpz_t(), v.get_mpz_t(), k);
    return r;
}

mpz_class floor_shift_right(const mpz_class& v, long k) {
    mpz_class r;
    mpz_fdiv_q_2exp(r.get_mpz_t(), v.get_mpz_t(), k);
    return r;
}

mpz_class ceil_shift_right(const mpz_class& v, long k) {
    mpz_class r;
    mpz_cdiv_q_2exp(r.get_mpz_t(), v.get_mpz_t(), k);
    return r;
}

mpz_class floor_root(const mpz_class& v, unsigned k) {
    mpz_class r;
    mpz_root(r.get_mpz_t(), v.get_mpz_t(), k);
    return r;
}

mpz_class ceil_root(const mpz_class& v, unsigned k) {
    mpz_class r = floor_root(v, k);
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), r.get_mpz_t(), k);
    if (p < v) r += 1;
    return r;
}

}  // namespace

Interval::Interval(mpz_class lo, mpz_class hi, long scale)
    : lo_(std::move(lo)), hi_(std::move(hi)), scale_(scale) {
    if (lo_ > hi_) throw std::logic_error("Interval: lo > hi");
}

Interval Interval::from_integer(const mpz_class& v, long scale) {
    mpz_class s = shift_left(v, scale);
    return Interval(s, s, scale);
}

Interval Interval::nth_root_of(const mpz_class& n, unsigned k, long scale) {
    if (n < 0) throw std::invalid_argument("nth_root_of: negative input");
    mpz_class big = shift_left(n, (long)k * scale);
    return Interval(floor_root(big, k), ceil_root(big, k), scale);
}

Interval Interval::operator+(const Interval& o) const {
    return Interval(lo_ + o.lo_, hi_ + o.hi_, scale_);
}

Interval Interval::operator-(const Interval& o) const {
    return Interval(lo_ - o.hi_, hi_ - o.lo_, scale_);
}

Interval Interval::operator*(const Interval& o) const {
    mpz_class p1 = lo_ * o.lo_, p2 = lo_ * o.hi_, p3 = hi_ * o.lo_, p4 = hi_ * o.hi_;
    mpz_class mn = std::min(std::min(p1, p2), std::min(p3, p4));
    mpz_class mx = std::max(std::max(p1, p2), std::max(p3, p4));
    return Interval(floor_shift_right(mn, scale_), ceil_shift_right(mx, scale_), scale_);
}

Interval Interval::neg() const { return Interval(-hi_, -lo_, scale_); }

Interval Interval::abs() const {
    if (lo_ >= 0) return *this;
    if (hi_ <= 0) return neg();
    mpz_class m = std::max(mpz_class(-lo_), hi_);
    return Interval(0, m, scale_);
}

Interval Interval::mul_int(const mpz_class& m) const {
    if (m >= 0) return Interval(lo_ * m, hi_ * m, scale_);
    return Interval(hi_ * m, lo_ * m, scale_);
}

Interval Interval::div_uint(unsigned long u) const {
    if (u == 0) throw std::invalid_argument("div_uint: division by zero");
    mpz_class l, h;
    mpz_fdiv_q_ui(l.get_mpz_t(), lo_.get_mpz_t(), u);
    mpz_cdiv_q_ui(h.get_mpz_t(), hi_.get_mpz_t(), u);
    return Interval(l, h, scale_);
}

Interval Interval::reciprocal() const {
    if (lo_ <= 0 && hi_ >= 0) throw std::domain_error("reciprocal: interval contains zero");
    if (hi_ < 0) return neg().reciprocal().neg();
    mpz_class one = shift_left(1, 2 * scale_);
    mpz_class l, h;
    mpz_fdiv_q(l.get_mpz_t(), one.get_mpz_t(), hi_.get_mpz_t());
    mpz_cdiv_q(h.get_mpz_t(), one.get_mpz_t(), lo_.get_mpz_t());
    return Interval(l, h, scale_);
}

Interval Interval::sqrt() const { return nth_root(2); }

Interval Interval::nth_root(unsigned k) const {
    if (lo_ < 0) throw std::domain_error("nth_root: negative interval");
    long extra = (long)(k - 1) * scale_;
    return Interval(floor_root(shift_left(lo_, extra), k),
                    ceil_root(shift_left(hi_, extra), k), scale_);
}

std::optional<bool> Interval::less_than(const Interval& o) const {
    if (hi_ < o.lo_) return true;
    if (lo_ >= o.hi_) return false;
    return std::nullopt;
}

std::optional<int> Interval::sign() const {
    if (lo_ > 0) return 1;
    if (hi_ < 0) return -1;
    if (lo_ == 0 && hi_ == 0) return 0;
    return std::nullopt;
}

std::optional<mpz_class> Interval::certified_floor() const {
    mpz_class f1 = floor_shift_right(lo_, scale_);
    mpz_class f2 = floor_shift_right(hi_, scale_);
    if (f1 == f2) return f1;
    return std::nullopt;
}

std::optional<mpz_class> Interval::certified_ceil() const {
    mpz_class c1 = ceil_shift_right(lo_, scale_);
    mpz_class c2 = ceil_shift_right(hi_, scale_);
    if (c1 == c2) return c1;
    return std::nullopt;
}

bool Interval::contains_integer_within(const mpz_class& slack_scaled) const {
    mpz_class first = ceil_shift_right(lo_ - slack_scaled, scale_);
    mpz_class last = floor_shift_right(hi_ + slack_scaled, scale_);
    return first <= last;
}

}  // namespace unitscan::cubic
