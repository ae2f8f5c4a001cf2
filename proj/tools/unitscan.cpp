// unitscan: command-line toolkit for fundamental-unit divisibility checks,
// primality certificate chains, Pell witnesses and interval scans.
//
// Exit codes: 0 verified/found, 1 refuted/not-verified, 2 inconclusive,
//             3 usage error, 4 runtime error.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unitscan/arith.hpp"
#include "unitscan/certify.hpp"
#include "unitscan/cfrac.hpp"
#include "unitscan/cubic.hpp"
#include "unitscan/pell.hpp"
#include "unitscan/search.hpp"

namespace {

using namespace unitscan;

constexpr int kExitVerified = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 3;
constexpr int kExitRuntime = 4;

std::atomic<bool> g_cancel{false};

void handle_sigint(int) { g_cancel.store(true); }

// numeric options resolve as: explicit flag > UNITSCAN_* environment
// variable > key=value config file > built-in default
struct LayeredOption {
    CLI::App* owner = nullptr;
    CLI::Option* flag = nullptr;
    std::function<void(const std::string&)> set;
    std::string env;
    std::string key;
};

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::map<std::string, std::string> out;
    if (path.empty()) return out;
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config file: expected key=value, got: " + line);
        }
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

void apply_layers(const std::vector<LayeredOption>& opts, const std::string& config_path) {
    auto config = read_config_file(config_path);
    for (const auto& o : opts) {
        if (!o.owner->parsed()) continue;
        if (o.flag->count() > 0) {
            std::cerr << "# config " << o.key << " set by flag\n";
            continue;
        }
        if (const char* v = std::getenv(o.env.c_str())) {
            o.set(v);
            std::cerr << "# config " << o.key << "=" << v << " from " << o.env << "\n";
            continue;
        }
        auto it = config.find(o.key);
        if (it != config.end()) {
            o.set(it->second);
            std::cerr << "# config " << o.key << "=" << it->second << " from file\n";
        }
    }
}

template <typename T>
std::function<void(const std::string&)> setter(T& target) {
    return [&target](const std::string& s) { target = (T)std::stoull(s); };
}

std::string norm_str(int n) { return n >= 0 ? "+1" : "-1"; }

struct VerifyAacArgs {
    u64 d = 0;
    bool mod_only = false;
    bool exact = false;
    std::string witness_path;
    std::string cert_path;
    std::string emit_witness_path;
    u64 step_budget = cfrac::kDefaultStepBudget;
};

int run_verify_aac(const VerifyAacArgs& a) {
    if (!a.witness_path.empty()) {
        std::ifstream wf(a.witness_path);
        if (!wf) throw std::runtime_error("cannot open witness file " + a.witness_path);
        pell::PellWitness w = pell::read_witness(wf);
        std::ifstream cf(a.cert_path);
        if (!cf) throw std::runtime_error("cannot open certificate file " + a.cert_path);
        certify::Certificate cert = certify::read_chain(cf);
        auto res = pell::check_witness(w, cert);
        std::cout << "route=witness d=" << w.d.get_str() << " verdict="
                  << pell::to_string(res.verdict) << "\n";
        std::cout << res.detail << "\n";
        switch (res.verdict) {
            case pell::WitnessVerdict::proves_d_divides_y: return kExitVerified;
            case pell::WitnessVerdict::bound_inconclusive: return kExitInconclusive;
            default: return kExitRefuted;
        }
    }
    if (a.exact) {
        auto unit = cfrac::fundamental_unit(a.d, a.step_budget);
        if (unit.overflowed) {
            std::cout << "step budget exceeded (route=exact, d=" << a.d << ")\n";
            return kExitInconclusive;
        }
        bool div = mpz_divisible_ui_p(unit.y.get_mpz_t(), a.d) != 0;
        u64 ydigits = mpz_sizeinbase(unit.y.get_mpz_t(), 10);
        if (div) {
            if (!a.emit_witness_path.empty()) {
                auto w = pell::make_witness(unit);
                std::ofstream os(a.emit_witness_path, std::ios::trunc);
                if (!os) throw std::runtime_error("cannot open " + a.emit_witness_path);
                pell::write_witness(w, os);
            }
            std::cout << "d | y  (route=exact, d=" << a.d << ", period=" << unit.period
                      << ", norm=" << norm_str(unit.norm) << ", y_digits~" << ydigits << ")\n";
            return kExitVerified;
        }
        u64 r = mpz_fdiv_ui(unit.y.get_mpz_t(), a.d);
        std::cout << "y ≡ " << r << " (mod " << a.d << ")  (route=exact, period="
                  << unit.period << ", norm=" << norm_str(unit.norm) << ")\n";
        return kExitRefuted;
    }
    auto ym = cfrac::y_mod(a.d, a.d, a.step_budget);
    if (ym.overflowed) {
        std::cout << "step budget exceeded (route=mod, d=" << a.d << ")\n";
        return kExitInconclusive;
    }
    if (ym.residue == 0) {
        std::cout << "d | y  (route=mod, d=" << a.d << ", period=" << ym.period
                  << ", norm=" << norm_str(ym.norm) << ")\n";
        return kExitVerified;
    }
    std::cout << "y ≡ " << ym.residue << " (mod " << a.d << ")  (route=mod, period="
              << ym.period << ", norm=" << norm_str(ym.norm) << ")\n";
    return kExitRefuted;
}

struct CertifyArgs {
    std::string n;
    bool build = false;
    std::string verify_path;
    std::string out_path;
    u64 leaf_bound = certify::kTrialLeafBound;
    u64 rho_budget = arith::kDefaultRhoBudget;
    std::vector<std::string> hints;
};

int run_certify(const CertifyArgs& a) {
    mpz_class n(a.n);
    if (!a.verify_path.empty()) {
        std::ifstream is(a.verify_path);
        if (!is) throw std::runtime_error("cannot open certificate file " + a.verify_path);
        certify::Certificate cert = certify::read_chain(is);
        if (cert.c != n) {
            std::cout << "certificate proves " << cert.c.get_str() << ", not " << n.get_str()
                      << "\n";
            return kExitRefuted;
        }
        auto res = certify::verify_certificate(cert);
        if (res.ok) {
            std::cout << "certificate verifies: " << n.get_str() << " is prime (links="
                      << certify::chain_length(cert) << ")\n";
            return kExitVerified;
        }
        std::cout << "certificate rejected: " << res.reason << " at " << res.path << "\n";
        return kExitRefuted;
    }
    certify::BuildOptions opts;
    opts.leaf_bound = a.leaf_bound;
    opts.rho_budget = a.rho_budget;
    for (const auto& h : a.hints) opts.hints.emplace_back(h);
    auto res = certify::build_certificate(n, opts);
    if (!res.ok) {
        if (res.error.find("not a probable prime") != std::string::npos) {
            std::cout << res.error << "\n";
            return kExitRefuted;
        }
        std::cout << "could not assemble certificate: " << res.error << "\n";
        return kExitInconclusive;
    }
    if (!a.out_path.empty()) {
        std::ofstream os(a.out_path, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open output file " + a.out_path);
        certify::write_chain(res.cert, os);
    } else {
        certify::write_chain(res.cert, std::cout);
    }
    std::cout << "certified " << n.get_str() << " (links=" << certify::chain_length(res.cert)
              << ")\n";
    return kExitVerified;
}

struct AnalyzeArgs {
    u64 d = 0;
    std::optional<u64> h;
    u64 step_budget = cfrac::kDefaultStepBudget;
};

int run_analyze(const AnalyzeArgs& a) {
    auto row = pell::analyze(a.d, a.h, a.step_budget);
    std::cout << "d=" << row.d << " d_divides_Y=" << (row.d_divides_Y ? "true" : "false")
              << " d_divides_y=" << (row.d_divides_y ? "true" : "false")
              << " rc=" << (row.rc ? "true" : "false") << " alpha=" << row.alpha
              << " beta=" << row.beta << " s=" << row.s;
    if (row.s_is_lower_bound) std::cout << " s_is_lower_bound=true";
    std::cout << " norm=" << norm_str(row.norm);
    if (row.h_external) std::cout << " h=" << *row.h_external;
    std::cout << " period=" << row.period << "\n";
    return kExitVerified;
}

int run_bernoulli(u64 lo, std::optional<u64> hi_opt, u64 bound) {
    u64 hi = hi_opt.value_or(lo);
    if (hi < lo) throw std::invalid_argument("bernoulli-check: hi < lo");
    u64 checked = 0, inconsistent = 0;
    bool single = !hi_opt.has_value();
    for (u64 p = lo; p <= hi; ++p) {
        if (p % 4 != 1 || !arith::is_probable_prime(p)) {
            if (single) throw std::invalid_argument("bernoulli-check: p must be a prime = 1 mod 4");
            continue;
        }
        auto res = pell::mordell_bernoulli_check(p, bound);
        ++checked;
        if (single || !res.consistent) {
            std::cout << "p=" << res.p << " B=" << res.bernoulli_residue
                      << " y=" << res.y_residue
                      << " consistent=" << (res.consistent ? "true" : "false") << "\n";
        }
        if (!res.consistent) ++inconsistent;
    }
    if (checked == 0) throw std::invalid_argument("bernoulli-check: no admissible prime in range");
    if (inconsistent == 0) {
        std::cout << "all consistent (checked=" << checked << ")\n";
        return kExitVerified;
    }
    std::cout << "inconsistent=" << inconsistent << " (checked=" << checked << ")\n";
    return kExitRefuted;
}

struct SearchArgs {
    search::SearchConfig cfg;
    std::string filter = "squarefree";
    std::string report = "y";
    std::string out_path;
    std::string checkpoint_path;
    bool resume = false;
};

int run_search(SearchArgs& a) {
    a.cfg.filter = search::filter_from_string(a.filter);
    a.cfg.report_y = a.cfg.report_threeY = a.cfg.report_bigY = false;
    {
        std::string tok;
        std::istringstream rs(a.report);
        while (std::getline(rs, tok, ',')) {
            if (tok == "y") a.cfg.report_y = true;
            else if (tok == "3y") a.cfg.report_threeY = true;
            else if (tok == "Y") a.cfg.report_bigY = true;
            else throw std::invalid_argument("unknown report kind: " + tok);
        }
    }
    std::cerr << "# config search lo=" << a.cfg.lo << " hi=" << a.cfg.hi
              << " filter=" << search::to_string(a.cfg.filter) << " cong_r=" << a.cfg.cong_r
              << " cong_m=" << a.cfg.cong_m << " shards=" << a.cfg.shards
              << " checkpoint_interval=" << a.cfg.checkpoint_interval
              << " report=" << a.report << " step_budget=" << a.cfg.step_budget
              << " digest=" << std::hex << search::config_digest(a.cfg) << std::dec << "\n";
    search::ScanCallbacks cb;
    cb.cancel = &g_cancel;
    std::signal(SIGINT, handle_sigint);
    auto res = search::scan_file(a.cfg, a.out_path, a.checkpoint_path, a.resume, cb);
    if (a.out_path.empty()) {
        for (const auto& h : res.hits) std::cout << search::format_hit(h) << "\n";
        for (u64 d : res.summary.overflows) std::cout << "overflow " << d << "\n";
    }
    std::cout << search::format_summary(res.summary) << "\n";
    if (!res.completed) {
        std::cerr << "# scan interrupted; resume with --resume\n";
        return kExitInconclusive;
    }
    return kExitVerified;
}

struct CubicArgs {
    std::string fixture_path;
    bool fundamental = false;
    unsigned max_precision = 8192;
};

int run_cubic_verify(const CubicArgs& a) {
    std::ifstream is(a.fixture_path);
    if (!is) throw std::runtime_error("cannot open fixture file " + a.fixture_path);
    auto fixtures = cubic::read_unit_fixtures(is);
    if (fixtures.empty()) throw std::runtime_error("fixture file has no units");
    bool all_ok = true;
    bool any_imprecise = false;
    for (const auto& f : fixtures) {
        bool pair_ok = cubic::verify_unit_pair(f.eta, f.eta_inv);
        auto rep = cubic::aac_cubic_divisibility(f.eta, mpz_class((unsigned long)f.eta.d));
        std::cout << "d=" << f.eta.d << " unit_pair=" << (pair_ok ? "ok" : "fail")
                  << " threeD_divides_b=" << (rep.threeD_divides_b ? "true" : "false");
        if (pair_ok && a.fundamental) {
            auto fr = cubic::fundamentality_check(f.eta, a.max_precision);
            std::cout << " fundamentality=" << cubic::to_string(fr.verdict);
            if (fr.verdict == cubic::Fundamentality::not_fundamental) {
                std::cout << " root=" << fr.witness_root;
                all_ok = false;
            }
            if (fr.verdict == cubic::Fundamentality::needs_more_precision) any_imprecise = true;
        }
        std::cout << "\n";
        if (!pair_ok) all_ok = false;
    }
    if (!all_ok) return kExitRefuted;
    if (any_imprecise) return kExitInconclusive;
    return kExitVerified;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unitscan: continued fractions, Pell units and divisibility search"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value configuration file")
        ->envname("UNITSCAN_CONFIG");
    std::vector<LayeredOption> layered;

    VerifyAacArgs va;
    auto* sc_verify = app.add_subcommand("verify-aac", "check whether d divides y");
    sc_verify->add_option("d", va.d, "radicand")->required();
    auto* f_mod = sc_verify->add_flag("--mod-only", va.mod_only, "continued fraction mod d (default)");
    auto* f_exact = sc_verify->add_flag("--exact", va.exact, "exact fundamental unit");
    auto* f_wit = sc_verify->add_option("--witness", va.witness_path, "witness file");
    sc_verify->add_option("--cert", va.cert_path, "certificate chain file")->needs(f_wit);
    f_wit->needs("--cert");
    f_mod->excludes(f_exact)->excludes(f_wit);
    f_exact->excludes(f_wit);
    sc_verify->add_option("--emit-witness", va.emit_witness_path,
                          "write the Pell witness file (with --exact, when d | y)")
        ->needs(f_exact);
    layered.push_back({sc_verify,
                       sc_verify->add_option("--step-budget", va.step_budget,
                                             "max continued-fraction steps"),
                       setter(va.step_budget), "UNITSCAN_STEP_BUDGET", "step-budget"});

    CertifyArgs ca;
    auto* sc_certify = app.add_subcommand("certify", "build or verify primality certificates");
    sc_certify->add_option("n", ca.n, "number to certify")->required();
    auto* f_build = sc_certify->add_flag("--build", ca.build, "build a certificate chain");
    auto* f_cverify = sc_certify->add_option("--verify", ca.verify_path, "verify a chain file");
    f_build->excludes(f_cverify);
    sc_certify->add_option("--out", ca.out_path, "chain output file");
    layered.push_back({sc_certify,
                       sc_certify->add_option("--leaf-bound", ca.leaf_bound,
                                              "largest trial-division leaf"),
                       setter(ca.leaf_bound), "UNITSCAN_LEAF_BOUND", "leaf-bound"});
    layered.push_back({sc_certify,
                       sc_certify->add_option("--rho-budget", ca.rho_budget,
                                              "factoring iteration budget"),
                       setter(ca.rho_budget), "UNITSCAN_RHO_BUDGET", "rho-budget"});
    sc_certify->add_option("--hint", ca.hints, "known prime factor (repeatable)");

    std::string w_path, w_cert;
    auto* sc_witness = app.add_subcommand("witness", "check a Pell witness file");
    sc_witness->add_option("file", w_path, "witness file")->required();
    sc_witness->add_option("--cert", w_cert, "certificate chain file")->required();

    AnalyzeArgs aa;
    u64 aa_h = 0;
    auto* sc_analyze = app.add_subcommand("analyze", "compute the analysis row for d");
    sc_analyze->set_help_flag("--help", "print help");  // frees --h below
    sc_analyze->add_option("d", aa.d, "squarefree radicand")->required();
    auto* f_h = sc_analyze->add_option("--h,--class-number", aa_h,
                                       "externally supplied class number (passed through)");
    layered.push_back({sc_analyze,
                       sc_analyze->add_option("--step-budget", aa.step_budget,
                                              "max continued-fraction steps"),
                       setter(aa.step_budget), "UNITSCAN_STEP_BUDGET", "step-budget"});

    u64 b_lo = 0, b_hi = 0, b_bound = pell::kBernoulliFeasibleBound;
    auto* sc_bern = app.add_subcommand("bernoulli-check",
                                       "Bernoulli cross-check for primes p = 1 mod 4");
    sc_bern->add_option("p", b_lo, "prime, or lower bound of a range")->required();
    auto* f_bhi = sc_bern->add_option("hi", b_hi, "upper bound of the range");
    layered.push_back({sc_bern, sc_bern->add_option("--bound", b_bound, "feasibility bound"),
                       setter(b_bound), "UNITSCAN_BERNOULLI_BOUND", "bernoulli-bound"});

    SearchArgs sa;
    auto* sc_search = app.add_subcommand("search", "scan an interval for d | y");
    sc_search->add_option("lo", sa.cfg.lo, "lower bound")->required();
    sc_search->add_option("hi", sa.cfg.hi, "upper bound")->required();
    sc_search->add_option("--filter", sa.filter,
                          "squarefree | primes1mod4 | primes3mod4 | sfcong")
        ->required();
    sc_search->add_option("--cong-r", sa.cfg.cong_r, "residue for sfcong");
    sc_search->add_option("--cong-m", sa.cfg.cong_m, "modulus for sfcong");
    layered.push_back({sc_search,
                       sc_search->add_option("--shards", sa.cfg.shards, "worker count"),
                       setter(sa.cfg.shards), "UNITSCAN_SHARDS", "shards"});
    sc_search->add_option("--checkpoint", sa.checkpoint_path, "checkpoint file");
    sc_search->add_flag("--resume", sa.resume, "resume from the checkpoint");
    sc_search->add_option("--out", sa.out_path, "hit records file");
    sc_search->add_option("--report", sa.report, "comma list of y,3y,Y");
    layered.push_back({sc_search,
                       sc_search->add_option("--step-budget", sa.cfg.step_budget,
                                             "max steps per candidate"),
                       setter(sa.cfg.step_budget), "UNITSCAN_STEP_BUDGET", "step-budget"});
    layered.push_back({sc_search,
                       sc_search->add_option("--checkpoint-interval", sa.cfg.checkpoint_interval,
                                             "candidates between checkpoint writes"),
                       setter(sa.cfg.checkpoint_interval), "UNITSCAN_CHECKPOINT_INTERVAL",
                       "checkpoint-interval"});

    CubicArgs cu;
    auto* sc_cubic = app.add_subcommand("cubic", "pure cubic unit checks");
    auto* sc_cubic_vu = sc_cubic->add_subcommand("verify-unit", "verify unit fixtures");
    sc_cubic_vu->add_option("fixture", cu.fixture_path, "fixture file")->required();
    sc_cubic_vu->add_flag("--fundamental", cu.fundamental, "also run the fundamentality check");
    layered.push_back({sc_cubic_vu,
                       sc_cubic_vu->add_option("--max-precision", cu.max_precision,
                                               "interval precision cap (bits)"),
                       setter(cu.max_precision), "UNITSCAN_MAX_PRECISION", "max-precision"});
    sc_cubic->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        apply_layers(layered, config_path);
        if (sc_verify->parsed()) return run_verify_aac(va);
        if (sc_certify->parsed()) {
            if (ca.verify_path.empty() && !ca.build) ca.build = true;
            return run_certify(ca);
        }
        if (sc_witness->parsed()) {
            VerifyAacArgs wa;
            wa.witness_path = w_path;
            wa.cert_path = w_cert;
            return run_verify_aac(wa);
        }
        if (sc_analyze->parsed()) {
            if (*f_h) aa.h = aa_h;
            return run_analyze(aa);
        }
        if (sc_bern->parsed()) {
            return run_bernoulli(b_lo, *f_bhi ? std::optional<u64>(b_hi) : std::nullopt, b_bound);
        }
        if (sc_search->parsed()) return run_search(sa);
        if (sc_cubic->parsed()) return run_cubic_verify(cu);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
