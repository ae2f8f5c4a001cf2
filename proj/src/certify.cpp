#include "unitscan/certify.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace unitscan::certify {

using nlohmann::json;

Certificate Certificate::clone() const {
    Certificate out;
    out.c = c;
    out.a = a;
    out.factors.reserve(factors.size());
    for (const auto& f : factors) {
        FactorEntry e;
        e.p = f.p;
        e.kind = f.kind;
        if (f.cert) e.cert = std::make_unique<Certificate>(f.cert->clone());
        out.factors.push_back(std::move(e));
    }
    return out;
}

namespace {

bool trial_division_prime(const mpz_class& p) {
    if (p < 2 || p > kTrialLeafBound) return false;
    u64 n = p.get_ui();
    for (u64 q = 2; q * q <= n; ++q) {
        if (n % q == 0) return false;
    }
    return true;
}

VerifyResult fail(const std::string& reason, const std::string& path) {
    return {false, reason, path};
}

VerifyResult verify_rec(const Certificate& cert, const std::string& parent_path) {
    std::string path = parent_path.empty() ? cert.c.get_str()
                                           : parent_path + "/" + cert.c.get_str();
    if (cert.is_trial_leaf()) {
        if (!cert.factors.empty()) return fail("trial leaf must not list factors", path);
        if (cert.c > kTrialLeafBound) return fail("trial leaf above 10^6", path);
        if (!trial_division_prime(cert.c)) return fail("trial division finds a factor", path);
        return {true, "", ""};
    }
    const mpz_class& c = cert.c;
    const mpz_class& a = cert.a;
    if (!(c > 1)) return fail("c must be > 1", path);
    if (!(a * a > c)) return fail("a^2 > c violated", path);
    if (!mpz_divisible_p(mpz_class(c - 1).get_mpz_t(), a.get_mpz_t()))
        return fail("a does not divide c-1", path);
    if (cert.factors.empty()) return fail("empty factor list", path);

    // the listed p must be exactly the distinct primes dividing a
    mpz_class rest = a;
    for (size_t i = 0; i < cert.factors.size(); ++i) {
        const auto& f = cert.factors[i];
        if (f.p < 2) return fail("factor below 2", path);
        for (size_t j = 0; j < i; ++j) {
            if (cert.factors[j].p == f.p) return fail("duplicate factor listed", path);
        }
        if (!mpz_divisible_p(rest.get_mpz_t(), f.p.get_mpz_t()))
            return fail("listed p does not divide a", path);
        while (mpz_divisible_p(rest.get_mpz_t(), f.p.get_mpz_t())) {
            mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), f.p.get_mpz_t());
        }
    }
    if (rest != 1) return fail("factor list incomplete for a", path);

    // primality of each listed p
    for (const auto& f : cert.factors) {
        if (f.kind == FactorEntry::Kind::TrialDivision) {
            if (f.p > kTrialLeafBound) return fail("trial-division factor above 10^6", path);
            if (!trial_division_prime(f.p)) return fail("trial division finds a factor of p", path);
        } else {
            if (!f.cert) return fail("nested certificate missing", path);
            if (f.cert->c != f.p) return fail("nested certificate proves a different number", path);
            auto sub = verify_rec(*f.cert, path);
            if (!sub.ok) return sub;
        }
    }

    // base-2 conditions
    if (arith::modpow(mpz_class(2), mpz_class(c - 1), c) != 1)
        return fail("2^(c-1) != 1 mod c", path);
    for (const auto& f : cert.factors) {
        mpz_class e = (c - 1) / f.p;
        mpz_class w = arith::modpow(mpz_class(2), e, c);
        mpz_class g;
        mpz_class wm1 = w - 1;
        if (wm1 < 0) wm1 += c;
        mpz_gcd(g.get_mpz_t(), wm1.get_mpz_t(), c.get_mpz_t());
        if (g != 1) return fail("gcd(2^((c-1)/" + f.p.get_str() + ")-1, c) != 1", path);
    }
    return {true, "", ""};
}

}  // namespace

VerifyResult verify_certificate(const Certificate& cert) {
    return verify_rec(cert, "");
}

namespace {

bool build_rec(const mpz_class& n, const BuildOptions& opts, int depth,
               Certificate& out, std::string& error) {
    if (depth > 64) {
        error = "certificate chain too deep";
        return false;
    }
    if (!arith::is_probable_prime(n)) {
        error = n.get_str() + " is not a probable prime";
        return false;
    }
    if (n <= opts.leaf_bound && n <= kTrialLeafBound) {
        out.c = n;
        out.a = 0;
        out.factors.clear();
        return true;
    }

    mpz_class m = n - 1;
    std::vector<std::pair<mpz_class, unsigned>> primes;
    for (const auto& h : opts.hints) {
        if (h < 2 || !arith::is_probable_prime(h)) continue;
        unsigned e = 0;
        while (mpz_divisible_p(m.get_mpz_t(), h.get_mpz_t())) {
            mpz_divexact(m.get_mpz_t(), m.get_mpz_t(), h.get_mpz_t());
            ++e;
        }
        if (e) primes.emplace_back(h, e);
    }
    if (m > 1) {
        auto f = arith::factorize(m, opts.rho_budget);
        for (auto& [p, e] : f.factors) primes.emplace_back(p, e);
        // an incomplete factorization is still usable if the factored part
        // reaches past sqrt(n)
    }
    std::sort(primes.begin(), primes.end(),
              [](auto& x, auto& y) { return x.first > y.first; });

    // only primes passing the base-2 condition gcd(2^((n-1)/p) - 1, n) = 1
    // may appear in a; for roughly one prime in p that condition fails
    std::vector<std::pair<mpz_class, unsigned>> usable;
    for (auto& [p, e] : primes) {
        mpz_class w = arith::modpow(mpz_class(2), (n - 1) / p, n);
        mpz_class wm1 = w - 1;
        if (wm1 < 0) wm1 += n;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), wm1.get_mpz_t(), n.get_mpz_t());
        if (g == 1) usable.emplace_back(p, e);
    }

    // greedy largest-first assembly of a; when certifying a selected prime
    // fails deeper down, drop it and retry with the remaining candidates
    std::vector<mpz_class> blacklist;
    for (;;) {
        mpz_class a = 1;
        std::vector<mpz_class> used;
        for (auto& [p, e] : usable) {
            if (a * a > n) break;
            bool banned = false;
            for (const auto& b : blacklist) banned |= b == p;
            if (banned) continue;
            bool took = false;
            for (unsigned i = 0; i < e && !(a * a > n); ++i) {
                a *= p;
                took = true;
            }
            if (took) used.push_back(p);
        }
        if (!(a * a > n)) {
            error = "usable factored part of n-1 too small to reach a^2 > n for n = " +
                    n.get_str();
            return false;
        }

        out.c = n;
        out.a = a;
        out.factors.clear();
        bool subfail = false;
        for (const auto& p : used) {
            FactorEntry fe;
            fe.p = p;
            if (p <= opts.leaf_bound && p <= kTrialLeafBound) {
                fe.kind = FactorEntry::Kind::TrialDivision;
            } else {
                fe.kind = FactorEntry::Kind::Nested;
                fe.cert = std::make_unique<Certificate>();
                if (!build_rec(p, opts, depth + 1, *fe.cert, error)) {
                    blacklist.push_back(p);
                    subfail = true;
                    break;
                }
            }
            out.factors.push_back(std::move(fe));
        }
        if (!subfail) return true;
    }
}

}  // namespace

BuildResult build_certificate(const mpz_class& n, const BuildOptions& opts) {
    BuildResult res;
    if (n < 2) {
        res.error = "n must be >= 2";
        return res;
    }
    if (!build_rec(n, opts, 0, res.cert, res.error)) return res;
    auto check = verify_certificate(res.cert);
    if (!check.ok) {
        res.error = "self-verification failed: " + check.reason + " at " + check.path;
        return res;
    }
    res.ok = true;
    return res;
}

namespace {

json cert_to_json_obj(const Certificate& cert, bool inline_nested) {
    json j;
    j["c"] = cert.c.get_str();
    if (cert.is_trial_leaf()) {
        j["kind"] = "trial";
        return j;
    }
    j["a"] = cert.a.get_str();
    json fs = json::array();
    for (const auto& f : cert.factors) {
        json e;
        e["p"] = f.p.get_str();
        if (f.kind == FactorEntry::Kind::TrialDivision) {
            e["kind"] = "trial";
        } else {
            e["kind"] = "cert";
            if (inline_nested && f.cert) e["cert"] = cert_to_json_obj(*f.cert, true);
        }
        fs.push_back(std::move(e));
    }
    j["factors"] = std::move(fs);
    return j;
}

Certificate cert_from_json_obj(const json& j,
                               const std::map<std::string, const Certificate*>* resolved) {
    Certificate cert;
    cert.c = mpz_class(j.at("c").get<std::string>());
    if (j.contains("kind") && j.at("kind") == "trial") {
        cert.a = 0;
        return cert;
    }
    cert.a = mpz_class(j.at("a").get<std::string>());
    for (const auto& e : j.at("factors")) {
        FactorEntry fe;
        fe.p = mpz_class(e.at("p").get<std::string>());
        std::string kind = e.at("kind").get<std::string>();
        if (kind == "trial") {
            fe.kind = FactorEntry::Kind::TrialDivision;
        } else if (kind == "cert") {
            fe.kind = FactorEntry::Kind::Nested;
            if (e.contains("cert")) {
                fe.cert = std::make_unique<Certificate>(cert_from_json_obj(e.at("cert"), resolved));
            } else if (resolved) {
                auto it = resolved->find(fe.p.get_str());
                if (it == resolved->end()) {
                    throw std::runtime_error("chain references " + fe.p.get_str() +
                                             " before it is proven");
                }
                fe.cert = std::make_unique<Certificate>(it->second->clone());
            } else {
                throw std::runtime_error("factor of kind cert lacks a certificate");
            }
        } else {
            throw std::runtime_error("unknown factor kind: " + kind);
        }
        cert.factors.push_back(std::move(fe));
    }
    return cert;
}

void collect_chain(const Certificate& cert, std::vector<const Certificate*>& order,
                   std::vector<std::string>& seen) {
    for (const auto& f : cert.factors) {
        if (f.cert) collect_chain(*f.cert, order, seen);
    }
    std::string key = cert.c.get_str();
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
        seen.push_back(key);
        order.push_back(&cert);
    }
}

}  // namespace

std::string to_json(const Certificate& cert) {
    return cert_to_json_obj(cert, true).dump();
}

Certificate certificate_from_json(const std::string& text) {
    return cert_from_json_obj(json::parse(text), nullptr);
}

void write_chain(const Certificate& cert, std::ostream& os) {
    std::vector<const Certificate*> order;
    std::vector<std::string> seen;
    collect_chain(cert, order, seen);
    for (const Certificate* c : order) {
        os << cert_to_json_obj(*c, false).dump() << "\n";
    }
}

Certificate read_chain(std::istream& is) {
    std::map<std::string, const Certificate*> resolved;
    std::vector<std::unique_ptr<Certificate>> owned;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cert = std::make_unique<Certificate>(
            cert_from_json_obj(json::parse(line), &resolved));
        resolved[cert->c.get_str()] = cert.get();
        owned.push_back(std::move(cert));
    }
    if (owned.empty()) throw std::runtime_error("empty certificate chain");
    return owned.back()->clone();
}

u64 chain_length(const Certificate& cert) {
    std::vector<const Certificate*> order;
    std::vector<std::string> seen;
    collect_chain(cert, order, seen);
    return order.size();
}

}  // namespace unitscan::certify
