#include "unitscan/search.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace unitscan::search {

namespace {

constexpr u64 kChunk = 4096;
constexpr u64 kFnvOffset = 1469598103934665603ull;
constexpr u64 kFnvPrime = 1099511628211ull;

u64 fnv1a(const std::string& s, u64 h = kFnvOffset) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string hex16(u64 v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
    return buf;
}

}  // namespace

const char* to_string(Filter f) {
    switch (f) {
        case Filter::squarefree: return "squarefree";
        case Filter::primes_1mod4: return "primes1mod4";
        case Filter::primes_3mod4: return "primes3mod4";
        case Filter::squarefree_congruence: return "sfcong";
    }
    return "?";
}

Filter filter_from_string(const std::string& s) {
    if (s == "squarefree") return Filter::squarefree;
    if (s == "primes1mod4") return Filter::primes_1mod4;
    if (s == "primes3mod4") return Filter::primes_3mod4;
    if (s == "sfcong") return Filter::squarefree_congruence;
    throw std::invalid_argument("unknown filter: " + s);
}

const char* to_string(HitKind k) {
    switch (k) {
        case HitKind::y_divisible: return "y";
        case HitKind::threeY_divisible: return "3y";
        case HitKind::Y_divisible: return "Y";
    }
    return "?";
}

u64 config_digest(const SearchConfig& cfg) {
    std::ostringstream os;
    os << "v1|" << cfg.lo << "|" << cfg.hi << "|" << to_string(cfg.filter) << "|"
       << cfg.cong_r << "|" << cfg.cong_m << "|" << cfg.report_y << cfg.report_threeY
       << cfg.report_bigY << "|" << cfg.step_budget;
    // shard count and checkpoint cadence do not affect output, so they are
    // deliberately not part of the digest
    return fnv1a(os.str());
}

std::string format_hit(const HitRecord& h) {
    std::ostringstream os;
    os << "hit " << h.d << " " << to_string(h.kind) << " " << h.period << " " << h.norm;
    return os.str();
}

std::string format_summary(const Summary& s) {
    std::ostringstream os;
    os << "summary scanned=" << s.scanned << " hits=" << s.hits
       << " overflows=" << s.overflows.size();
    return os.str();
}

namespace {

void validate(const SearchConfig& cfg) {
    if (cfg.lo < 2) throw std::invalid_argument("search: lo must be >= 2");
    if (cfg.hi < cfg.lo) throw std::invalid_argument("search: hi must be >= lo");
    if (cfg.hi >= cfrac::kMaxRadicand) throw std::invalid_argument("search: hi must be < 2^62");
    if (cfg.shards < 1) throw std::invalid_argument("search: shards must be >= 1");
    if (cfg.filter == Filter::squarefree_congruence) {
        if (cfg.cong_m < 1 || cfg.cong_r >= cfg.cong_m) {
            throw std::invalid_argument("search: need 0 <= r < m for the congruence filter");
        }
    }
    if (!cfg.report_y && !cfg.report_threeY && !cfg.report_bigY) {
        throw std::invalid_argument("search: nothing to report");
    }
}

struct ChunkOut {
    std::vector<std::string> lines;   // emitted records, in order
    std::vector<HitRecord> hits;
    std::vector<u64> overflows;
    u64 scanned = 0;
};

ChunkOut evaluate_chunk(const SearchConfig& cfg, u64 a, u64 b) {
    ChunkOut out;
    std::vector<bool> pass;
    switch (cfg.filter) {
        case Filter::squarefree:
        case Filter::squarefree_congruence:
            pass = arith::segmented_squarefree(a, b);
            break;
        case Filter::primes_1mod4:
        case Filter::primes_3mod4:
            pass = arith::segmented_primes(a, b);
            break;
    }
    for (u64 d = a; d <= b; ++d) {
        if (!pass[d - a]) continue;
        if (cfg.filter == Filter::primes_1mod4 && d % 4 != 1) continue;
        if (cfg.filter == Filter::primes_3mod4 && d % 4 != 3) continue;
        if (cfg.filter == Filter::squarefree_congruence && d % cfg.cong_m != cfg.cong_r) continue;
        ++out.scanned;
        u64 residue, period;
        int norm, y_parity = 0;
        u64 xres = 0;
        if (cfg.report_bigY) {
            auto um = cfrac::unit_mod(d, d, cfg.step_budget);
            if (um.overflowed) {
                out.overflows.push_back(d);
                out.lines.push_back("overflow " + std::to_string(d));
                continue;
            }
            residue = um.y;
            period = um.period;
            norm = um.norm;
            y_parity = um.y_parity;
            xres = um.x;
        } else {
            auto ym = cfrac::y_mod(d, d, cfg.step_budget);
            if (ym.overflowed) {
                out.overflows.push_back(d);
                out.lines.push_back("overflow " + std::to_string(d));
                continue;
            }
            residue = ym.residue;
            period = ym.period;
            norm = ym.norm;
        }
        auto emit = [&](HitKind kind) {
            HitRecord h{d, kind, period, norm};
            out.lines.push_back(format_hit(h));
            out.hits.push_back(h);
        };
        if (cfg.report_y && residue == 0) emit(HitKind::y_divisible);
        if (cfg.report_threeY && (u64)((u128)3 * residue % d) == 0) emit(HitKind::threeY_divisible);
        if (cfg.report_bigY) {
            cfrac::UnitMod um;
            um.x = xres;
            um.y = residue;
            um.y_parity = y_parity;
            if (cfrac::d_divides_Y(d, um)) emit(HitKind::Y_divisible);
        }
    }
    return out;
}

struct CheckpointState {
    u64 cursor = 0;   // next chunk index to evaluate/commit
    u64 scanned = 0;
    std::vector<std::string> lines;
    std::vector<HitRecord> hits;
    std::vector<u64> overflows;
};

void write_checkpoint(const std::string& path, const SearchConfig& cfg,
                      const CheckpointState& st) {
    if (path.empty()) return;
    std::ostringstream body;
    body << "unitscan-checkpoint v1\n";
    body << "config " << hex16(config_digest(cfg)) << "\n";
    body << "cursor " << st.cursor << "\n";
    body << "scanned " << st.scanned << "\n";
    body << "lines " << st.lines.size() << "\n";
    for (const auto& l : st.lines) body << l << "\n";
    std::string payload = body.str();
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write checkpoint " + tmp);
        os << payload << "checksum " << hex16(fnv1a(payload)) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw std::runtime_error("cannot rename checkpoint into place: " + path);
    }
}

HitRecord parse_hit_line(const std::string& line) {
    std::istringstream is(line);
    std::string tag, kind;
    HitRecord h;
    is >> tag >> h.d >> kind >> h.period >> h.norm;
    if (!is || tag != "hit") throw std::runtime_error("checkpoint: bad hit line");
    if (kind == "y") h.kind = HitKind::y_divisible;
    else if (kind == "3y") h.kind = HitKind::threeY_divisible;
    else if (kind == "Y") h.kind = HitKind::Y_divisible;
    else throw std::runtime_error("checkpoint: bad hit kind");
    return h;
}

CheckpointState read_checkpoint(const std::string& path, const SearchConfig& cfg) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("checkpoint not found: " + path);
    std::ostringstream payload;
    std::string line;
    std::vector<std::string> raw;
    while (std::getline(is, line)) raw.push_back(line);
    if (raw.size() < 6) throw std::runtime_error("checkpoint truncated");
    std::string checksum_line = raw.back();
    raw.pop_back();
    for (const auto& l : raw) payload << l << "\n";
    if (checksum_line != "checksum " + hex16(fnv1a(payload.str()))) {
        throw std::runtime_error("checkpoint corrupt (checksum mismatch)");
    }
    size_t i = 0;
    if (raw[i++] != "unitscan-checkpoint v1") throw std::runtime_error("checkpoint: bad header");
    if (raw[i++] != "config " + hex16(config_digest(cfg))) {
        throw std::runtime_error("checkpoint does not match this configuration");
    }
    CheckpointState st;
    auto field = [&](const std::string& name) -> u64 {
        std::istringstream fs(raw[i++]);
        std::string tag;
        u64 v;
        fs >> tag >> v;
        if (!fs || tag != name) throw std::runtime_error("checkpoint: expected " + name);
        return v;
    };
    st.cursor = field("cursor");
    st.scanned = field("scanned");
    u64 nlines = field("lines");
    if (raw.size() != i + nlines) throw std::runtime_error("checkpoint: line count mismatch");
    for (u64 k = 0; k < nlines; ++k) {
        const std::string& l = raw[i + k];
        st.lines.push_back(l);
        if (l.rfind("hit ", 0) == 0) {
            st.hits.push_back(parse_hit_line(l));
        } else if (l.rfind("overflow ", 0) == 0) {
            st.overflows.push_back(std::stoull(l.substr(9)));
        } else {
            throw std::runtime_error("checkpoint: unknown record line");
        }
    }
    return st;
}

}  // namespace

ScanResult scan_file(const SearchConfig& cfg, const std::string& out_path,
                     const std::string& checkpoint_path, bool resume,
                     const ScanCallbacks& cb) {
    validate(cfg);
    u64 n_chunks = (cfg.hi - cfg.lo) / kChunk + 1;

    CheckpointState st;
    if (resume) {
        if (checkpoint_path.empty()) throw std::invalid_argument("resume needs a checkpoint path");
        st = read_checkpoint(checkpoint_path, cfg);
        if (st.cursor > n_chunks) throw std::runtime_error("checkpoint cursor out of range");
    }

    std::ofstream out;
    if (!out_path.empty()) {
        out.open(out_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file " + out_path);
        for (const auto& l : st.lines) out << l << "\n";
        out.flush();
    }

    std::atomic<u64> next_chunk{st.cursor};
    std::mutex mu;
    std::condition_variable cv;
    std::map<u64, ChunkOut> done;
    std::atomic<bool> stop{false};
    std::string worker_error;

    auto cancelled = [&] { return cb.cancel && cb.cancel->load(); };

    auto worker = [&] {
        for (;;) {
            if (stop.load() || cancelled()) return;
            u64 i = next_chunk.fetch_add(1);
            if (i >= n_chunks) return;
            u64 a = cfg.lo + i * kChunk;
            u64 b = std::min(cfg.hi, a + kChunk - 1);
            try {
                ChunkOut co = evaluate_chunk(cfg, a, b);
                std::lock_guard<std::mutex> lk(mu);
                done.emplace(i, std::move(co));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(mu);
                if (worker_error.empty()) worker_error = e.what();
                stop.store(true);
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(cfg.shards);
    for (unsigned i = 0; i < cfg.shards; ++i) threads.emplace_back(worker);

    // ordered writer: emit chunks strictly by index
    u64 since_ckpt = 0;
    // dedup guard across the resume boundary: drop (d, kind) pairs at or
    // below the last committed record
    u64 last_d = st.hits.empty() ? 0 : st.hits.back().d;
    bool completed = true;
    while (st.cursor < n_chunks) {
        ChunkOut co;
        {
            std::unique_lock<std::mutex> lk(mu);
            cv.wait_for(lk, std::chrono::milliseconds(50), [&] {
                return done.count(st.cursor) > 0 || !worker_error.empty();
            });
            if (!worker_error.empty()) {
                std::string err = worker_error;
                lk.unlock();
                stop.store(true);
                cv.notify_all();
                for (auto& t : threads) t.join();
                write_checkpoint(checkpoint_path, cfg, st);
                throw std::runtime_error("scan worker failed: " + err);
            }
            auto it = done.find(st.cursor);
            if (it == done.end()) {
                if (cancelled()) {
                    completed = false;
                    break;
                }
                continue;
            }
            co = std::move(it->second);
            done.erase(it);
        }
        for (size_t k = 0; k < co.lines.size(); ++k) {
            st.lines.push_back(co.lines[k]);
            if (!out_path.empty()) out << co.lines[k] << "\n";
        }
        for (const auto& h : co.hits) {
            if (h.d < last_d) continue;  // duplicate from a re-scanned chunk
            st.hits.push_back(h);
            last_d = h.d;
        }
        for (u64 d : co.overflows) st.overflows.push_back(d);
        st.scanned += co.scanned;
        st.cursor += 1;
        since_ckpt += kChunk;
        if (!out_path.empty()) out.flush();
        if (since_ckpt >= cfg.checkpoint_interval) {
            write_checkpoint(checkpoint_path, cfg, st);
            since_ckpt = 0;
        }
        if (cb.on_chunk) cb.on_chunk(st.cursor);
        if (cancelled()) {
            completed = st.cursor == n_chunks;
            break;
        }
    }
    stop.store(true);
    cv.notify_all();
    for (auto& t : threads) t.join();

    write_checkpoint(checkpoint_path, cfg, st);

    ScanResult res;
    res.hits = std::move(st.hits);
    res.summary.scanned = st.scanned;
    res.summary.hits = res.hits.size();
    res.summary.overflows = std::move(st.overflows);
    res.completed = completed;
    if (completed && !out_path.empty()) {
        out << format_summary(res.summary) << "\n";
        out.flush();
    }
    return res;
}

ScanResult scan(const SearchConfig& cfg, const ScanCallbacks& cb) {
    return scan_file(cfg, "", "", false, cb);
}

}  // namespace unitscan::search
