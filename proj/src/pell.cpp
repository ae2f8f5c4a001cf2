#include "unitscan/pell.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace unitscan::pell {

const char* to_string(WitnessVerdict v) {
    switch (v) {
        case WitnessVerdict::proves_d_divides_y: return "proves_d_divides_y";
        case WitnessVerdict::equation_failed: return "equation_failed";
        case WitnessVerdict::bound_inconclusive: return "bound_inconclusive";
        case WitnessVerdict::not_certified_prime: return "not_certified_prime";
    }
    return "?";
}

namespace {

// exact count of decimal digits
mpz_class decimal_digits(const mpz_class& n) {
    if (n == 0) return 1;
    size_t est = mpz_sizeinbase(n.get_mpz_t(), 10);  // exact or one too big
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, est - 1);
    return n >= pow10 ? mpz_class(est) : mpz_class(est - 1);
}

}  // namespace

WitnessCheck check_witness(const PellWitness& w, const certify::Certificate& cert) {
    if (cert.c != w.d) {
        return {WitnessVerdict::not_certified_prime,
                "certificate proves " + cert.c.get_str() + ", not d"};
    }
    auto vr = certify::verify_certificate(cert);
    if (!vr.ok) {
        return {WitnessVerdict::not_certified_prime,
                "certificate rejected: " + vr.reason + " at " + vr.path};
    }
    if (w.sign4 != 4 && w.sign4 != -4) {
        return {WitnessVerdict::equation_failed, "sign must be +4 or -4"};
    }
    if (w.u < 1 || w.v < 1) {
        return {WitnessVerdict::equation_failed, "u and v must be positive"};
    }
    mpz_class lhs = w.u * w.u - w.d * w.d * w.d * w.v * w.v;
    if (lhs != w.sign4) {
        return {WitnessVerdict::equation_failed,
                "u^2 - d^3 v^2 = " + (mpz_sizeinbase(lhs.get_mpz_t(), 10) > 40
                                          ? std::string("(large value)")
                                          : lhs.get_str()) +
                    ", expected " + std::to_string(w.sign4)};
    }
    if ((w.u - w.v) % 2 != 0) {
        return {WitnessVerdict::equation_failed, "u and v have different parity"};
    }
    // bound chain: eta = (u + v*d*sqrt(d))/2 < 10^(d-1) * (1+sqrt(d))/2
    //              <= ((1+sqrt(d))/2)^d  (needs (1+sqrt(d))/2 >= 10, i.e. d >= 361)
    if (w.d < 361) {
        return {WitnessVerdict::bound_inconclusive,
                "d < 361: 10^(d-1) * (1+sqrt(d))/2 <= ((1+sqrt(d))/2)^d unavailable"};
    }
    mpz_class du = decimal_digits(w.u);
    mpz_class dv = decimal_digits(w.v);
    mpz_class dd = decimal_digits(w.d);
    if (du > w.d - 1) {
        return {WitnessVerdict::bound_inconclusive, "u not below 10^(d-1)"};
    }
    if (dv > w.d - 16) {
        return {WitnessVerdict::bound_inconclusive, "v not below 10^(d-16)"};
    }
    if (dv + dd > w.d - 1) {
        return {WitnessVerdict::bound_inconclusive, "v*d not below 10^(d-1)"};
    }
    return {WitnessVerdict::proves_d_divides_y, "unit of O_d strictly between 1 and eps^d"};
}

PellWitness make_witness(const cfrac::FundamentalUnit& unit) {
    if (unit.d % 4 != 1) throw std::invalid_argument("make_witness: d must be 1 mod 4");
    if (unit.norm != 1 && unit.norm != -1) throw std::invalid_argument("make_witness: unit has no norm");
    if (unit.y <= 0 || !mpz_divisible_ui_p(unit.y.get_mpz_t(), unit.d)) {
        throw std::invalid_argument("make_witness: d does not divide y");
    }
    PellWitness w;
    w.d = mpz_class(unit.d);
    w.u = 2 * unit.x + unit.y;
    w.v = unit.y / w.d;
    w.sign4 = 4 * unit.norm;
    return w;
}

void write_witness(const PellWitness& w, std::ostream& os) {
    os << "d=" << w.d.get_str() << "\n";
    os << "u=" << w.u.get_str() << "\n";
    os << "v=" << w.v.get_str() << "\n";
    os << "sign=" << w.sign4 << "\n";
}

PellWitness read_witness(std::istream& is) {
    PellWitness w;
    bool got_d = false, got_u = false, got_v = false, got_sign = false;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("witness file: malformed line");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        if (key == "d") { w.d = mpz_class(val); got_d = true; }
        else if (key == "u") { w.u = mpz_class(val); got_u = true; }
        else if (key == "v") { w.v = mpz_class(val); got_v = true; }
        else if (key == "sign") { w.sign4 = std::stoi(val); got_sign = true; }
        else throw std::runtime_error("witness file: unknown key " + key);
    }
    if (!(got_d && got_u && got_v && got_sign)) {
        throw std::runtime_error("witness file: missing field");
    }
    return w;
}

bool rc_satisfies(u64 d, const cfrac::UnitMod& um) {
    return um.norm == 1 && d % 8 != 1 && um.y_parity == 0 && um.y == 0;
}

AnalysisRow analyze(u64 d, std::optional<u64> h_external, u64 step_budget) {
    if (d < 2) throw std::invalid_argument("analyze: d must be >= 2");
    auto fact = arith::factorize(d);
    if (fact.complete) {
        for (auto& [p, e] : fact.factors) {
            if (e >= 2) throw std::invalid_argument("analyze: d is not squarefree");
        }
    }
    auto um = cfrac::unit_mod(d, d, step_budget);
    if (um.overflowed) throw std::runtime_error("analyze: step budget exceeded");
    AnalysisRow row;
    row.d = d;
    row.d_divides_y = um.y == 0;
    row.d_divides_Y = cfrac::d_divides_Y(d, um);
    row.rc = rc_satisfies(d, um);
    row.alpha = um.y_parity;
    row.beta = (int)(d % 8);
    row.s = fact.distinct_primes();
    row.s_is_lower_bound = !fact.complete;
    row.norm = um.norm;
    row.period = um.period;
    row.h_external = h_external;
    return row;
}

BernoulliCheck mordell_bernoulli_check(u64 p, u64 bound) {
    if (p < 13 || p > bound) {
        throw std::invalid_argument("mordell_bernoulli_check: p out of range");
    }
    if (p % 4 != 1 || !arith::is_probable_prime(p)) {
        throw std::invalid_argument("mordell_bernoulli_check: p must be a prime = 1 mod 4");
    }
    BernoulliCheck out;
    out.p = p;
    out.bernoulli_residue = arith::bernoulli_half_mod_p(p);
    auto ym = cfrac::y_mod(p, p);
    if (ym.overflowed) throw std::runtime_error("mordell_bernoulli_check: step budget exceeded");
    out.y_residue = ym.residue;
    out.consistent = (out.y_residue == 0) == (out.bernoulli_residue == 0);
    out.note = "h(d)v = u*B_{(d-1)/2} (mod d); p never divides h(d) (h(d) < d) "
               "nor u (u^2 = +-4 mod p), so p | y iff B_{(p-1)/2} = 0 mod p";
    return out;
}

ScreenResult open_problem_screen(u64 d, const ScreenInput& in,
                                 const arith::Factorization& fact) {
    ScreenResult res;
    if (!fact.complete) {
        res.factorization_incomplete = true;
        return res;
    }
    if (!in.d_divides_y) return res;
    for (auto& [p, e] : fact.factors) {
        if (e >= 2) return res;  // clauses require squarefree shapes
    }
    auto primes = fact.factors;

    auto has2 = [&] {
        return !primes.empty() && primes.front().first == 2;
    };

    if (primes.size() == 2 && !has2()) {
        u64 p = primes[0].first.get_ui();
        u64 q = primes[1].first.get_ui();
        auto ordered = {std::pair{p, q}, std::pair{q, p}};
        for (auto [f, g] : ordered) {
            if (f % 8 == 5 && g % 4 == 3 && in.y_odd) res.matches.insert('a');
            if (f % 8 == 1 && g % 4 == 3 && in.y_odd) res.matches.insert('c');
        }
        if (p % 4 == 1 && q % 4 == 1 && p != q && d % 8 == 5 && in.norm == -1) {
            res.matches.insert('b');
        }
    }
    if (primes.size() == 3 && has2()) {
        u64 p = primes[1].first.get_ui();
        u64 q = primes[2].first.get_ui();
        if (p % 8 == 3 && q % 8 == 3 && p != q) res.matches.insert('d');
        auto ordered = {std::pair{p, q}, std::pair{q, p}};
        for (auto [f, g] : ordered) {
            if (f % 8 == 1 && g % 4 == 3 && arith::kronecker((i64)f, (i64)g) == -1) {
                res.matches.insert('e');
            }
        }
    }
    res.requires_external_h = !res.matches.empty();
    return res;
}

}  // namespace unitscan::pell
