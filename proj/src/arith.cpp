#include "unitscan/arith.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace unitscan::arith {

u64 isqrt(u64 n) {
    if (n == 0) return 0;
    u64 r = (u64)std::sqrt((double)n);
    // sqrt(double) can be off by one either way near 2^53 and above
    while (r > 0 && r > n / r) --r;
    while (r + 1 <= n / (r + 1)) ++r;
    return r;
}

bool is_perfect_square(u64 n) {
    u64 r = isqrt(n);
    return r * r == n;
}

bool is_perfect_cube(u64 n) {
    if (n == 0) return true;
    u64 r = (u64)std::cbrt((double)n);
    // 2642245^3 is the largest cube below 2^64
    for (u64 c = (r > 1 ? r - 1 : 0); c <= r + 1; ++c) {
        if (c <= 2642245 && c * c * c == n) return true;
    }
    return false;
}

u64 modpow(u64 base, u64 exp, u64 m) {
    if (m < 2) throw std::invalid_argument("modpow: modulus must be >= 2");
    u64 result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

mpz_class modpow(const mpz_class& base, const mpz_class& exp, const mpz_class& m) {
    if (m < 2) throw std::invalid_argument("modpow: modulus must be >= 2");
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

mpz_class isqrt(const mpz_class& n) {
    if (n < 0) throw std::invalid_argument("isqrt: negative input");
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

int kronecker(i64 a, i64 b) {
    if (b == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (b & 1) == 0) return 0;
    int k = 1;
    // strip twos from b, applying (a/2) per factor
    int v = 0;
    while ((b & 1) == 0) { b /= 2; ++v; }
    if (v & 1) {
        int am8 = (int)(((a % 8) + 8) % 8);
        if (am8 == 3 || am8 == 5) k = -k;
    }
    if (b < 0) {
        b = -b;
        if (a < 0) k = -k;
    }
    if (b == 1) return k;
    if (a < 0) {
        // (-1/b) for odd b > 0
        a = -a;
        if (b % 4 == 3) k = -k;
    }
    a %= b;
    // Jacobi loop: b odd positive, 0 <= a < b
    while (a != 0) {
        while ((a & 1) == 0) {
            a /= 2;
            i64 bm8 = b % 8;
            if (bm8 == 3 || bm8 == 5) k = -k;
        }
        std::swap(a, b);
        if ((a & 3) == 3 && (b & 3) == 3) k = -k;
        a %= b;
    }
    return b == 1 ? k : 0;
}

const std::vector<u32>& small_primes() {
    static std::vector<u32> primes;
    static std::once_flag once;
    std::call_once(once, [] {
        primes = primes_up_to(kTrialDivisionBound);
    });
    return primes;
}

std::vector<u32> primes_up_to(u64 n) {
    if (n > (1ull << 26)) throw std::invalid_argument("primes_up_to: limit above 2^26");
    std::vector<bool> comp(n + 1, false);
    std::vector<u32> out;
    for (u64 i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back((u32)i);
        for (u64 j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
}

std::vector<bool> segmented_primes(u64 lo, u64 hi) {
    if (lo < 2) throw std::invalid_argument("segmented_primes: lo must be >= 2");
    if (hi < lo) return {};
    std::vector<bool> is_p(hi - lo + 1, true);
    u64 root = isqrt(hi);
    auto base = root <= kTrialDivisionBound ? small_primes() : primes_up_to(root);
    for (u32 p : base) {
        if ((u64)p > root) break;
        u64 start = std::max((u64)p * p, (lo + p - 1) / p * p);
        for (u64 j = start; j <= hi; j += p) is_p[j - lo] = false;
    }
    return is_p;
}

std::vector<bool> segmented_squarefree(u64 lo, u64 hi) {
    if (lo < 2) throw std::invalid_argument("segmented_squarefree: lo must be >= 2");
    if (hi < lo) return {};
    std::vector<bool> sf(hi - lo + 1, true);
    u64 root = isqrt(hi);
    auto base = root <= kTrialDivisionBound ? small_primes() : primes_up_to(root);
    for (u32 p : base) {
        u64 p2 = (u64)p * p;
        if (p2 > hi) break;
        u64 start = (lo + p2 - 1) / p2 * p2;
        for (u64 j = start; j <= hi; j += p2) sf[j - lo] = false;
    }
    return sf;
}

namespace {

bool miller_rabin(u64 n, u64 a) {
    if (a % n == 0) return true;
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    u64 x = modpow(a % n, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace

bool is_probable_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    // this base set is deterministic for all n < 3.3e24
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (!miller_rabin(n, a)) return false;
    }
    return true;
}

bool is_probable_prime(const mpz_class& n) {
    if (n < 2) return false;
    if (n.fits_ulong_p()) return is_probable_prime((u64)n.get_ui());
    return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

namespace {

// Brent's cycle variant of Pollard rho; returns a nontrivial factor or 0.
// `budget` counts f-iterations and is decremented in place.
u64 rho_brent(u64 n, u64& budget) {
    if ((n & 1) == 0) return 2;
    for (u64 c = 1; c < 64 && budget > 0; ++c) {
        u64 y = 2, m = 128, g = 1, r = 1, q = 1, x = 0, ys = 0;
        while (g == 1 && budget > 0) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = addmod(mulmod(y, y, n), c, n);
            for (u64 k = 0; k < r && g == 1 && budget > 0; k += m) {
                ys = y;
                u64 lim = std::min({m, r - k, budget});
                for (u64 i = 0; i < lim; ++i) {
                    y = addmod(mulmod(y, y, n), c, n);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                budget -= lim;
                g = std::gcd(q, n);
            }
            r *= 2;
        }
        if (g == n) {
            // the factor sits in the last batch; re-walk it one gcd at a time
            g = 1;
            for (u64 i = 0; i < m && g == 1; ++i) {
                ys = addmod(mulmod(ys, ys, n), c, n);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            }
        }
        if (g > 1 && g < n) return g;
    }
    return 0;
}

void factor_u64_into(u64 n, u64& budget, std::vector<std::pair<u64, unsigned>>& out, bool& complete) {
    if (n == 1) return;
    if (is_probable_prime(n)) {  // exact for u64
        out.emplace_back(n, 1);
        return;
    }
    u64 f = budget > 0 ? rho_brent(n, budget) : 0;
    if (f == 0 || f == n) {
        complete = false;
        out.emplace_back(n, 0);  // sentinel exponent 0 = unfactored cofactor
        return;
    }
    factor_u64_into(f, budget, out, complete);
    factor_u64_into(n / f, budget, out, complete);
}

}  // namespace

Factorization factorize(u64 n, u64 rho_budget) {
    mpz_class z;
    mpz_set_ui(z.get_mpz_t(), n);
    return factorize(z, rho_budget);
}

Factorization factorize(const mpz_class& n, u64 rho_budget) {
    if (n < 2) throw std::invalid_argument("factorize: n must be >= 2");
    Factorization res;
    res.n = n;
    res.complete = true;
    res.cofactor = 1;
    mpz_class m = n;
    std::vector<std::pair<mpz_class, unsigned>> found;
    for (u32 p : small_primes()) {
        if (m == 1) break;
        if (mpz_cmp_ui(m.get_mpz_t(), (unsigned long)p * p) < 0) break;
        unsigned e = 0;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
            ++e;
        }
        if (e) found.emplace_back(p, e);
    }
    if (m > 1 && m < kTrialDivisionBound * mpz_class(kTrialDivisionBound)) {
        // fully trial-divided below its square root: m is prime
        found.emplace_back(m, 1);
        m = 1;
    }
    if (m > 1) {
        if (m.fits_ulong_p()) {
            u64 budget = rho_budget;
            std::vector<std::pair<u64, unsigned>> parts;
            bool complete = true;
            factor_u64_into(m.get_ui(), budget, parts, complete);
            mpz_class cof = 1;
            for (auto& [p, e] : parts) {
                mpz_class pz;
                mpz_set_ui(pz.get_mpz_t(), p);
                if (e == 0) {
                    cof *= pz;
                } else {
                    found.emplace_back(pz, e);
                }
            }
            res.complete = complete;
            res.cofactor = cof;
        } else {
            // beyond 64 bits: probable-prime cofactors accepted, perfect powers
            // peeled, otherwise reported incomplete (rho in mpz is out of scope
            // for the search domain)
            mpz_class c = m;
            unsigned power = 1;
            while (mpz_perfect_power_p(c.get_mpz_t())) {
                // find smallest prime exponent root
                for (unsigned e = 2;; ++e) {
                    mpz_class root;
                    if (mpz_root(root.get_mpz_t(), c.get_mpz_t(), e) != 0) {
                        c = root;
                        power *= e;
                        break;
                    }
                    if (e > 64) break;
                }
            }
            if (is_probable_prime(c)) {
                found.emplace_back(c, power);
            } else {
                res.complete = false;
                res.cofactor = m;
            }
        }
    }
    // merge duplicates and sort
    std::sort(found.begin(), found.end(),
              [](auto& a, auto& b) { return a.first < b.first; });
    for (auto& [p, e] : found) {
        if (!res.factors.empty() && res.factors.back().first == p) {
            res.factors.back().second += e;
        } else {
            res.factors.emplace_back(p, e);
        }
    }
    return res;
}

bool is_squarefree(u64 n) {
    if (n == 0) return false;
    if (n == 1) return true;
    u64 m = n;
    for (u32 p : small_primes()) {
        u64 pp = (u64)p * p;
        if (pp > m) break;
        if (m % p == 0) {
            m /= p;
            if (m % p == 0) return false;
        }
    }
    if (m == 1) return true;
    if (is_perfect_square(m) || is_perfect_cube(m)) return false;
    if (m < (u64)1e18 || is_probable_prime(m)) return true;
    // m >= 1e18 composite: could be p^2*q with p,q > 10^6; smallest factor
    // is below m^(1/3) so rho splits it quickly
    auto f = factorize(m, kDefaultRhoBudget << 4);
    if (!f.complete) throw std::runtime_error("is_squarefree: factorization budget exceeded");
    for (auto& [p, e] : f.factors) {
        if (e >= 2) return false;
    }
    return true;
}

bool is_powerful(u64 n) {
    if (n == 0) return false;
    if (n == 1) return true;
    u64 m = n;
    for (u32 p : small_primes()) {
        u64 pp = (u64)p * p;
        if (pp > m) break;
        if (m % p == 0) {
            unsigned e = 0;
            while (m % p == 0) { m /= p; ++e; }
            if (e < 2) return false;
        }
    }
    if (m == 1) return true;
    // remaining cofactor has all prime factors > 10^6; within 64 bits it is
    // powerful iff it is a perfect square or cube
    return is_perfect_square(m) || is_perfect_cube(m);
}

u64 bernoulli_half_mod_p(u64 p) {
    if (p < 13) throw std::invalid_argument("bernoulli_half_mod_p: p must be >= 13");
    if (p % 4 != 1) throw std::invalid_argument("bernoulli_half_mod_p: p must be 1 mod 4");
    if (!is_probable_prime(p)) throw std::invalid_argument("bernoulli_half_mod_p: p must be prime");
    if (p >= (1ull << 32)) throw std::invalid_argument("bernoulli_half_mod_p: p^2 must fit 64 bits");
    u64 p2 = p * p;
    u64 n = (p - 1) / 2;
    u64 s = 0;
    for (u64 a = 1; a < p; ++a) {
        s = addmod(s, modpow(a, n, p2), p2);
    }
    // S_n(p) ≡ p·B_n (mod p^2); the division must be exact
    if (s % p != 0) throw std::logic_error("bernoulli_half_mod_p: power sum not divisible by p");
    return (s / p) % p;
}

}  // namespace unitscan::arith
