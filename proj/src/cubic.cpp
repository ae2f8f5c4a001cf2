#include "unitscan/cubic.hpp"

#include <istream>
#include <sstream>
#include <stdexcept>

#include "unitscan/interval.hpp"

namespace unitscan::cubic {

namespace {

bool all_divisible_by_3(const mpz_class& a, const mpz_class& b, const mpz_class& c) {
    return mpz_divisible_ui_p(a.get_mpz_t(), 3) && mpz_divisible_ui_p(b.get_mpz_t(), 3) &&
           mpz_divisible_ui_p(c.get_mpz_t(), 3);
}

}  // namespace

CubicElement make_cubic(mpz_class a, mpz_class b, mpz_class c, u64 d, bool thirds) {
    if (d < 2) throw std::invalid_argument("make_cubic: d must be >= 2");
    if (thirds && all_divisible_by_3(a, b, c)) {
        a /= 3; b /= 3; c /= 3;
        thirds = false;
    }
    if (thirds && d % 9 != 1 && d % 9 != 8) {
        throw std::invalid_argument("make_cubic: thirds need d = 1 or 8 (mod 9)");
    }
    return {std::move(a), std::move(b), std::move(c), d, thirds};
}

CubicElement cubic_mul(const CubicElement& x, const CubicElement& y) {
    if (x.d != y.d) throw std::invalid_argument("cubic_mul: mismatched radicands");
    mpz_class dz(x.d);
    mpz_class a = x.a * y.a + (x.b * y.c + x.c * y.b) * dz;
    mpz_class b = x.a * y.b + x.b * y.a + x.c * y.c * dz;
    mpz_class c = x.a * y.c + x.b * y.b + x.c * y.a;
    int den = (x.thirds ? 3 : 1) * (y.thirds ? 3 : 1);
    if (den == 9) {
        if (!all_divisible_by_3(a, b, c)) {
            throw std::domain_error("cubic_mul: product falls outside the ring");
        }
        a /= 3; b /= 3; c /= 3;
        den = 3;
    }
    return make_cubic(std::move(a), std::move(b), std::move(c), x.d, den == 3);
}

mpq_class cubic_norm(const CubicElement& x) {
    mpz_class dz(x.d);
    mpz_class n = x.a * x.a * x.a + x.b * x.b * x.b * dz + x.c * x.c * x.c * dz * dz -
                  3 * x.a * x.b * x.c * dz;
    mpq_class q(n);
    if (x.thirds) q /= 27;
    q.canonicalize();
    return q;
}

CubicElement cubic_inverse(const CubicElement& x) {
    mpz_class dz(x.d);
    // adjugate of the scaled integer coordinates
    mpz_class adj_a = x.a * x.a - x.b * x.c * dz;
    mpz_class adj_b = x.c * x.c * dz - x.a * x.b;
    mpz_class adj_c = x.b * x.b - x.a * x.c;
    mpz_class nint = x.a * x.a * x.a + x.b * x.b * x.b * dz + x.c * x.c * x.c * dz * dz -
                     3 * x.a * x.b * x.c * dz;  // norm of the integer coordinates
    if (nint == 0) throw std::domain_error("cubic_inverse: zero norm");
    // x = X/den, x^-1 = den * adj(X) / N(X); target denominator 1 or 3
    int den = x.thirds ? 3 : 1;
    mpz_class na = 3 * den * adj_a, nb = 3 * den * adj_b, nc = 3 * den * adj_c;
    if (!mpz_divisible_p(na.get_mpz_t(), nint.get_mpz_t()) ||
        !mpz_divisible_p(nb.get_mpz_t(), nint.get_mpz_t()) ||
        !mpz_divisible_p(nc.get_mpz_t(), nint.get_mpz_t())) {
        throw std::domain_error("cubic_inverse: not representable with denominator 1 or 3");
    }
    return make_cubic(na / nint, nb / nint, nc / nint, x.d, true);
}

bool verify_unit_pair(const CubicElement& x, const CubicElement& x_inv) {
    if (x.d != x_inv.d) throw std::invalid_argument("verify_unit_pair: mismatched radicands");
    mpz_class dz(x.d);
    mpz_class p1 = x.a * x_inv.a + (x.b * x_inv.c + x.c * x_inv.b) * dz;
    mpz_class p2 = x.a * x_inv.b + x.b * x_inv.a + x.c * x_inv.c * dz;
    mpz_class p3 = x.a * x_inv.c + x.b * x_inv.b + x.c * x_inv.a;
    int den = (x.thirds ? 3 : 1) * (x_inv.thirds ? 3 : 1);
    return p1 == den && p2 == 0 && p3 == 0;
}

DivisibilityReport aac_cubic_divisibility(const CubicElement& eta, const mpz_class& p) {
    mpz_class b = eta.thirds ? eta.b : mpz_class(3 * eta.b);
    DivisibilityReport rep;
    rep.p_divides_b = mpz_divisible_p(b.get_mpz_t(), p.get_mpz_t()) != 0;
    mpz_class threeD = 3 * mpz_class(eta.d);
    rep.threeD_divides_b = mpz_divisible_p(b.get_mpz_t(), threeD.get_mpz_t()) != 0;
    return rep;
}

const char* to_string(Fundamentality f) {
    switch (f) {
        case Fundamentality::fundamental: return "fundamental";
        case Fundamentality::not_fundamental: return "not_fundamental";
        case Fundamentality::needs_more_precision: return "needs_more_precision";
    }
    return "?";
}

namespace {

Interval embed(const CubicElement& x, const Interval& t, const Interval& t2, long scale) {
    Interval v = Interval::from_integer(x.a, scale) + t.mul_int(x.b) + t2.mul_int(x.c);
    if (x.thirds) v = v.div_uint(3);
    return v;
}

bool same_coords(const CubicElement& x, const CubicElement& y) {
    mpz_class xs = x.thirds ? 1 : 3, ys = y.thirds ? 1 : 3;
    return x.a * ys == y.a * xs && x.b * ys == y.b * xs && x.c * ys == y.c * xs;
}

// one full pass of the procedure at a fixed precision; nullopt = escalate
std::optional<FundamentalityResult> run_at(const CubicElement& x, long scale) {
    u64 d = x.d;
    Interval t = Interval::nth_root_of(mpz_class(d), 3, scale);
    Interval t2 = Interval::nth_root_of(mpz_class(d) * mpz_class(d), 3, scale);
    Interval m = embed(x, t, t2, scale);

    auto m_sign = (m - Interval::from_integer(1, scale)).sign();
    if (!m_sign) return std::nullopt;
    if (*m_sign <= 0) throw std::domain_error("fundamentality_check: embedding not > 1");

    bool l_thirds = d % 9 == 1 || d % 9 == 8;
    CubicElement L = make_cubic(1, 1, 1, d, l_thirds);

    // q = floor(log m / log L) via exact powers of L
    u64 q = 0;
    CubicElement pw = L;
    for (u64 k = 1;; ++k) {
        if (k > 1'000'000) return std::nullopt;
        if (same_coords(pw, x)) {
            q = k;
            break;
        }
        auto s = (m - embed(pw, t, t2, scale)).sign();
        if (!s) return std::nullopt;
        if (*s < 0) {
            q = k - 1;
            break;
        }
        pw = cubic_mul(pw, L);
    }

    for (u64 z = 2; z <= q; ++z) {
        if (!arith::is_probable_prime(z)) continue;
        Interval n = m.nth_root((unsigned)z);
        Interval margin = n.sqrt().reciprocal().mul_int(11).div_uint(4);
        auto wlo = (n - margin).certified_ceil();
        auto whi = (n + margin).certified_floor();
        if (!wlo || !whi) return std::nullopt;
        Interval nsq = n * n;
        Interval ninv = n.reciprocal();
        for (mpz_class w = *wlo; w <= *whi; ++w) {
            auto close = (Interval::from_integer(w, scale) - n).abs().less_than(margin);
            if (!close) return std::nullopt;
            if (!*close) continue;
            Interval r = n.mul_int(w) - nsq + ninv;
            mpz_class width = r.width_scaled();
            mpz_class quarter;
            mpz_mul_2exp(quarter.get_mpz_t(), mpz_class(1).get_mpz_t(), scale - 2);
            if (width >= quarter) return std::nullopt;
            if (r.contains_integer_within(width)) {
                return FundamentalityResult{Fundamentality::not_fundamental, (unsigned)z};
            }
        }
    }
    return FundamentalityResult{Fundamentality::fundamental, 0};
}

}  // namespace

FundamentalityResult fundamentality_check(const CubicElement& x, unsigned max_precision_bits) {
    mpq_class n = cubic_norm(x);
    if (n != 1 && n != -1) throw std::invalid_argument("fundamentality_check: not a unit");
    if (same_coords(x, cubic_one(x.d))) {
        throw std::domain_error("fundamentality_check: embedding not > 1");
    }
    long cap = std::max(32l, (long)max_precision_bits);
    for (long p = std::min(128l, cap);; p = std::min(2 * p, cap)) {
        auto r = run_at(x, p);
        if (r) return *r;
        if (p >= cap) break;
    }
    return FundamentalityResult{Fundamentality::needs_more_precision, 0};
}

std::vector<UnitFixture> read_unit_fixtures(std::istream& is) {
    std::vector<UnitFixture> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        u64 d;
        std::string a, b, c, ai, bi, ci;
        if (!(ls >> d >> a >> b >> c >> ai >> bi >> ci)) {
            throw std::runtime_error("unit fixture: malformed line: " + line);
        }
        UnitFixture f{make_cubic(mpz_class(a), mpz_class(b), mpz_class(c), d, true),
                      make_cubic(mpz_class(ai), mpz_class(bi), mpz_class(ci), d, true)};
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace unitscan::cubic
