#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <vector>

#include "unitscan/cfrac.hpp"

namespace unitscan::search {

enum class Filter {
    squarefree,
    primes_1mod4,
    primes_3mod4,
    squarefree_congruence,
};

const char* to_string(Filter f);
/// Accepts the CLI tokens: squarefree, primes1mod4, primes3mod4, sfcong.
Filter filter_from_string(const std::string& s);

enum class HitKind { y_divisible, threeY_divisible, Y_divisible };

/// Tokens used in output records: y, 3y, Y.
const char* to_string(HitKind k);

struct SearchConfig {
    u64 lo = 2;
    u64 hi = 2;
    Filter filter = Filter::squarefree;
    u64 cong_r = 0;  // for squarefree_congruence: d = cong_r (mod cong_m)
    u64 cong_m = 1;
    unsigned shards = 1;
    u64 checkpoint_interval = 1u << 16;  // candidates between checkpoint writes
    bool report_y = true;
    bool report_threeY = false;
    bool report_bigY = false;
    u64 step_budget = cfrac::kDefaultStepBudget;
};

/// Binds checkpoints to the exact configuration that produced them.
u64 config_digest(const SearchConfig& cfg);

struct HitRecord {
    u64 d = 0;
    HitKind kind = HitKind::y_divisible;
    u64 period = 0;
    int norm = 0;
};

struct Summary {
    u64 scanned = 0;  // candidates passing the filter that were evaluated
    u64 hits = 0;
    std::vector<u64> overflows;  // step-budget overflows, listed individually
};

struct ScanCallbacks {
    // invoked by the ordered writer after each chunk is committed
    std::function<void(u64 chunks_done)> on_chunk;
    std::atomic<bool>* cancel = nullptr;
};

struct ScanResult {
    std::vector<HitRecord> hits;  // ordered by d
    Summary summary;
    bool completed = true;  // false when cancelled mid-scan
};

std::string format_hit(const HitRecord& h);
std::string format_summary(const Summary& s);

/// In-memory scan. Work is distributed to `shards` workers in dynamic chunks
/// of 4096 candidates; results are merged in range order, so output does not
/// depend on the shard count.
ScanResult scan(const SearchConfig& cfg, const ScanCallbacks& cb = {});

/// File-backed scan with atomic checkpoints (write temp + checksum + rename).
/// On resume the output file is rewritten from the checkpoint so that a
/// killed-and-resumed scan is byte-identical to an uninterrupted one.
/// Either path may be empty to disable that side.
ScanResult scan_file(const SearchConfig& cfg, const std::string& out_path,
                     const std::string& checkpoint_path, bool resume,
                     const ScanCallbacks& cb = {});

}  // namespace unitscan::search
