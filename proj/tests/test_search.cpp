#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "unitscan/search.hpp"

using namespace unitscan;
using namespace unitscan::search;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// exact-unit brute force over the range: which squarefree d have d | y
std::vector<u64> exact_divisibility_hits(u64 lo, u64 hi) {
    std::vector<u64> hits;
    for (u64 d = lo; d <= hi; ++d) {
        if (!arith::is_squarefree(d)) continue;
        auto unit = cfrac::fundamental_unit(d);
        if (unit.y > 0 && mpz_divisible_ui_p(unit.y.get_mpz_t(), d)) hits.push_back(d);
    }
    return hits;
}

}  // namespace

TEST_CASE("squarefree scan of [2, 100] hits exactly d = 46") {
    SearchConfig cfg;
    cfg.lo = 2;
    cfg.hi = 100;
    auto res = scan(cfg);
    REQUIRE(res.completed);
    REQUIRE(res.hits.size() == 1);
    CHECK(res.hits[0].d == 46);
    CHECK(res.hits[0].kind == HitKind::y_divisible);
    CHECK(res.hits[0].period == 12);
    CHECK(res.hits[0].norm == 1);
    CHECK(res.summary.overflows.empty());
}

TEST_CASE("scan hits equal the exact-unit oracle on [2, 10^4]") {
    SearchConfig cfg;
    cfg.lo = 2;
    cfg.hi = 10000;
    cfg.shards = 2;
    auto res = scan(cfg);
    REQUIRE(res.completed);
    std::vector<u64> got;
    for (auto& h : res.hits) got.push_back(h.d);
    CHECK(got == exact_divisibility_hits(2, 10000));
}

TEST_CASE("the counterexample window hits exactly d = 331914313984493") {
    SearchConfig cfg;
    cfg.lo = 331914313984490ull;
    cfg.hi = 331914313984495ull;
    cfg.filter = Filter::primes_1mod4;
    auto res = scan(cfg);
    REQUIRE(res.completed);
    REQUIRE(res.hits.size() == 1);
    CHECK(res.hits[0].d == 331914313984493ull);
    CHECK(res.hits[0].kind == HitKind::y_divisible);
    CHECK(res.hits[0].norm == -1);
    CHECK(res.hits[0].period == 1486413ull);
}

TEST_CASE("prime filters: no prime d = 1 mod 4 up to 10^5 divides y") {
    SearchConfig cfg;
    cfg.lo = 2;
    cfg.hi = 100000;
    cfg.filter = Filter::primes_1mod4;
    cfg.shards = 2;
    auto res = scan(cfg);
    REQUIRE(res.completed);
    CHECK(res.hits.empty());
    CHECK(res.summary.overflows.empty());
    // scanned count equals an independent count of the filter
    u64 expect = 0;
    for (u64 d = 2; d <= 100000; ++d) {
        if (d % 4 == 1 && arith::is_probable_prime(d)) ++expect;
    }
    CHECK(res.summary.scanned == expect);
}

TEST_CASE("filter soundness: every scanned candidate passes its predicate") {
    struct Case {
        Filter f;
        u64 r, m;
    };
    for (auto c : {Case{Filter::squarefree, 0, 1}, Case{Filter::primes_3mod4, 0, 1},
                   Case{Filter::squarefree_congruence, 5, 8}}) {
        SearchConfig cfg;
        cfg.lo = 2;
        cfg.hi = 10000;
        cfg.filter = c.f;
        cfg.cong_r = c.r;
        cfg.cong_m = c.m;
        auto res = scan(cfg);
        REQUIRE(res.completed);
        u64 expect = 0;
        for (u64 d = 2; d <= 10000; ++d) {
            bool pass = false;
            switch (c.f) {
                case Filter::squarefree: pass = oracles::squarefree_trial(d); break;
                case Filter::primes_3mod4:
                    pass = d % 4 == 3 && arith::is_probable_prime(d);
                    break;
                case Filter::squarefree_congruence:
                    pass = d % c.m == c.r && oracles::squarefree_trial(d);
                    break;
                default: break;
            }
            if (pass) ++expect;
        }
        CHECK(res.summary.scanned == expect);
        for (auto& h : res.hits) {
            CHECK(oracles::squarefree_trial(h.d));
            if (c.f == Filter::squarefree_congruence) CHECK(h.d % c.m == c.r);
        }
    }
}

TEST_CASE("requested kinds: d | y implies d | 3y and d | Y") {
    SearchConfig cfg;
    cfg.lo = 2;
    cfg.hi = 10000;
    cfg.report_threeY = true;
    cfg.report_bigY = true;
    auto res = scan(cfg);
    REQUIRE(res.completed);
    std::set<u64> y_hits, threeY_hits, bigY_hits;
    for (auto& h : res.hits) {
        if (h.kind == HitKind::y_divisible) y_hits.insert(h.d);
        if (h.kind == HitKind::threeY_divisible) threeY_hits.insert(h.d);
        if (h.kind == HitKind::Y_divisible) bigY_hits.insert(h.d);
    }
    CHECK(y_hits.count(46) == 1);
    for (u64 d : y_hits) {
        CHECK(threeY_hits.count(d) == 1);
        CHECK(bigY_hits.count(d) == 1);
    }
    // and Y-divisibility implies 3y-divisibility (d | Y => d | 3y)
    for (u64 d : bigY_hits) CHECK(threeY_hits.count(d) == 1);
}

TEST_CASE("shard counts 1, 2, 8 produce identical output") {
    std::string base;
    for (unsigned shards : {1u, 2u, 8u}) {
        SearchConfig cfg;
        cfg.lo = 2;
        cfg.hi = 100000;
        cfg.shards = shards;
        std::string out = tmp_path("unitscan_shards_" + std::to_string(shards) + ".txt");
        auto res = scan_file(cfg, out, "", false);
        REQUIRE(res.completed);
        std::string text = slurp(out);
        if (base.empty()) base = text;
        CHECK(text == base);
        std::remove(out.c_str());
    }
}

TEST_CASE("step-budget overflows are recorded per candidate, never dropped") {
    SearchConfig cfg;
    cfg.lo = 2;
    cfg.hi = 100;
    cfg.step_budget = 2;
    auto res = scan(cfg);
    REQUIRE(res.completed);
    CHECK_FALSE(res.summary.overflows.empty());
    // d = 7 has period 4: it must be among the overflows with budget 2
    bool has7 = false;
    for (u64 d : res.summary.overflows) has7 |= d == 7;
    CHECK(has7);
    // every overflow is a real budget violation
    for (u64 d : res.summary.overflows) {
        auto ym = cfrac::y_mod(d, d);
        CHECK(ym.period > 2);
    }
}

TEST_CASE("kill and resume reproduce the uninterrupted output byte for byte") {
    SearchConfig cfg;
    cfg.lo = 2;
    cfg.hi = 100000;
    cfg.shards = 2;
    cfg.checkpoint_interval = 8192;

    std::string full_out = tmp_path("unitscan_full.txt");
    {
        auto res = scan_file(cfg, full_out, "", false);
        REQUIRE(res.completed);
    }
    std::string reference = slurp(full_out);

    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 3; ++trial) {
        std::string out = tmp_path("unitscan_killed.txt");
        std::string ckpt = tmp_path("unitscan_killed.ckpt");
        std::remove(ckpt.c_str());
        u64 kill_after = 1 + rng() % 20;
        std::atomic<bool> cancel{false};
        ScanCallbacks cb;
        cb.cancel = &cancel;
        cb.on_chunk = [&](u64 chunks) {
            if (chunks >= kill_after) cancel.store(true);
        };
        auto killed = scan_file(cfg, out, ckpt, false, cb);
        CAPTURE(kill_after);
        REQUIRE_FALSE(killed.completed);

        auto resumed = scan_file(cfg, out, ckpt, true);
        REQUIRE(resumed.completed);
        CHECK(slurp(out) == reference);

        // resuming a completed checkpoint does no work and rewrites the file
        bool worked = false;
        ScanCallbacks cb2;
        cb2.on_chunk = [&](u64) { worked = true; };
        auto again = scan_file(cfg, out, ckpt, true, cb2);
        REQUIRE(again.completed);
        CHECK_FALSE(worked);
        CHECK(slurp(out) == reference);
        CHECK(again.summary.scanned == resumed.summary.scanned);
        std::remove(out.c_str());
        std::remove(ckpt.c_str());
    }
    std::remove(full_out.c_str());
}

TEST_CASE("checkpoints are bound to their configuration") {
    SearchConfig cfg;
    cfg.lo = 2;
    cfg.hi = 50000;
    cfg.checkpoint_interval = 4096;
    std::string out = tmp_path("unitscan_digest.txt");
    std::string ckpt = tmp_path("unitscan_digest.ckpt");

    std::atomic<bool> cancel{false};
    ScanCallbacks cb;
    cb.cancel = &cancel;
    cb.on_chunk = [&](u64 chunks) {
        if (chunks >= 2) cancel.store(true);
    };
    auto killed = scan_file(cfg, out, ckpt, false, cb);
    REQUIRE_FALSE(killed.completed);

    SearchConfig edited = cfg;
    edited.lo = 4;  // different range: digest mismatch
    CHECK_THROWS_WITH_AS(scan_file(edited, out, ckpt, true),
                         "checkpoint does not match this configuration", std::runtime_error);

    // shard count is not part of the digest: resume with more workers is fine
    SearchConfig more_shards = cfg;
    more_shards.shards = 8;
    auto resumed = scan_file(more_shards, out, ckpt, true);
    CHECK(resumed.completed);

    // corrupt checkpoint: flip one byte
    {
        std::string text = slurp(ckpt);
        text[text.size() / 2] = text[text.size() / 2] == 'a' ? 'b' : 'a';
        std::ofstream os(ckpt, std::ios::trunc);
        os << text;
    }
    CHECK_THROWS_AS(scan_file(cfg, out, ckpt, true), std::runtime_error);

    std::remove(out.c_str());
    std::remove(ckpt.c_str());
}

TEST_CASE("config digest distinguishes configurations") {
    SearchConfig a;
    a.lo = 2;
    a.hi = 1000;
    SearchConfig b = a;
    b.hi = 1001;
    CHECK(config_digest(a) != config_digest(b));
    SearchConfig c = a;
    c.filter = Filter::primes_1mod4;
    CHECK(config_digest(a) != config_digest(c));
    SearchConfig d = a;
    d.shards = 16;
    CHECK(config_digest(a) == config_digest(d));
}

TEST_CASE("configuration validation") {
    SearchConfig cfg;
    cfg.lo = 1;
    cfg.hi = 10;
    CHECK_THROWS_AS(scan(cfg), std::invalid_argument);
    cfg.lo = 20;
    CHECK_THROWS_AS(scan(cfg), std::invalid_argument);
    cfg.lo = 2;
    cfg.hi = 10;
    cfg.shards = 0;
    CHECK_THROWS_AS(scan(cfg), std::invalid_argument);
    cfg.shards = 1;
    cfg.filter = Filter::squarefree_congruence;
    cfg.cong_r = 9;
    cfg.cong_m = 8;
    CHECK_THROWS_AS(scan(cfg), std::invalid_argument);
    cfg.cong_r = 1;
    CHECK_NOTHROW(scan(cfg));
    CHECK_THROWS_AS(filter_from_string("nonsense"), std::invalid_argument);
}

TEST_CASE("scan output formatting is stable") {
    HitRecord h{46, HitKind::y_divisible, 12, 1};
    CHECK(format_hit(h) == "hit 46 y 12 1");
    Summary s;
    s.scanned = 60;
    s.hits = 1;
    CHECK(format_summary(s) == "summary scanned=60 hits=1 overflows=0");
}
