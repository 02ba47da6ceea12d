#pragma once

// Knowledge-transfer-at-precompute simulator: a TTL-stamped store of teacher
// embeddings, a student query path that substitutes zero placeholders on
// miss, a FIFO refresh queue with a per-cycle budget, and a deterministic
// workload driver on a virtual clock.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lattice/core.hpp"

namespace lattice {

struct PairKey {
    std::string user_id;
    std::string item_id;

    auto operator<=>(const PairKey&) const = default;

    void validate() const {
        if (user_id.empty() || item_id.empty())
            throw UsageError("PairKey: user and item ids must be non-empty");
    }
};

struct CacheEntry {
    std::vector<double> embedding;
    double teacher_logit = 0.0;
    TimestampMs written_at = 0;
    DurationMs ttl_ms = 0;

    // Validity is inclusive at exactly ttl, expired one tick after.
    bool valid_at(TimestampMs now) const { return now - written_at <= ttl_ms; }
};

struct QueryResult {
    std::vector<double> embedding; // stored values on hit, all zeros on miss
    bool hit = false;
    bool enqueued = false; // true when this query newly queued the key
    std::optional<double> teacher_logit;
};

struct TransferStats {
    std::uint64_t queries = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses_absent = 0;
    std::uint64_t misses_expired = 0;
    std::uint64_t refreshes = 0;

    double hit_rate() const {
        return queries == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(queries);
    }
};

// FIFO with deduplication: a key is pending at most once.
class RefreshQueue {
public:
    explicit RefreshQueue(std::size_t budget_per_cycle) : budget_(budget_per_cycle) {
        if (budget_ == 0) throw UsageError("RefreshQueue: budget must be positive");
    }

    bool enqueue(const PairKey& key) {
        if (pending_.count(key)) return false;
        pending_.insert(key);
        fifo_.push_back(key);
        return true;
    }

    std::optional<PairKey> pop() {
        if (fifo_.empty()) return std::nullopt;
        PairKey key = std::move(fifo_.front());
        fifo_.pop_front();
        pending_.erase(key);
        return key;
    }

    std::size_t budget_per_cycle() const { return budget_; }
    std::size_t size() const { return fifo_.size(); }
    std::vector<PairKey> pending() const { return {fifo_.begin(), fifo_.end()}; }

private:
    std::deque<PairKey> fifo_;
    std::set<PairKey> pending_;
    std::size_t budget_;
};

struct TeacherOutput {
    std::vector<double> embedding;
    double logit = 0.0;
};

// Pure function of the key; the simulator treats teacher state as
// time-invariant per key.
using TeacherFn = std::function<TeacherOutput(const PairKey&)>;

struct StoreConfig {
    std::size_t dimension = 0;
    DurationMs ttl_ms = 0;
    std::size_t refresh_budget = 1;
    std::optional<std::size_t> capacity;   // entry-count cap; evicts oldest-written first
    std::optional<double> label_smoothing; // applied to the teacher logit on read

    void validate() const {
        if (dimension == 0) throw UsageError("StoreConfig: dimension must be positive");
        if (ttl_ms <= 0) throw UsageError("StoreConfig: ttl must be positive");
        if (refresh_budget == 0) throw UsageError("StoreConfig: refresh budget must be positive");
        if (capacity && *capacity == 0) throw UsageError("StoreConfig: capacity must be positive");
        if (label_smoothing && !(*label_smoothing >= 0.0 && *label_smoothing < 1.0))
            throw UsageError("StoreConfig: label smoothing must be in [0, 1)");
    }
};

// Teacher embedding store. Expired entries stay in place (counted as expired
// misses) until the next refresh overwrites them. Writers are serialized on
// an internal mutex; all operations are linearized at the clock value passed in.
class TeacherEmbeddingStore {
public:
    explicit TeacherEmbeddingStore(StoreConfig config)
        : config_(config), queue_(config.refresh_budget) {
        config_.validate();
    }

    QueryResult student_query(const PairKey& key, TimestampMs now) {
        key.validate();
        std::lock_guard lock(mu_);
        ++stats_.queries;

        QueryResult result;
        auto it = entries_.find(key);
        if (it != entries_.end() && it->second.valid_at(now)) {
            ++stats_.hits;
            result.hit = true;
            result.embedding = it->second.embedding;
            double logit = it->second.teacher_logit;
            if (config_.label_smoothing)
                logit = logit * (1.0 - *config_.label_smoothing) + *config_.label_smoothing / 2.0;
            result.teacher_logit = logit;
            return result;
        }

        if (it == entries_.end())
            ++stats_.misses_absent;
        else
            ++stats_.misses_expired;
        result.embedding.assign(config_.dimension, 0.0);
        result.enqueued = queue_.enqueue(key);
        return result;
    }

    std::size_t teacher_refresh_cycle(const TeacherFn& teacher, TimestampMs now) {
        std::lock_guard lock(mu_);
        std::size_t refreshed = 0;
        for (std::size_t i = 0; i < queue_.budget_per_cycle(); ++i) {
            auto key = queue_.pop();
            if (!key) break;
            TeacherOutput out = teacher(*key);
            if (out.embedding.size() != config_.dimension)
                throw DataError("teacher returned dimension " +
                                std::to_string(out.embedding.size()) + ", store expects " +
                                std::to_string(config_.dimension));
            write(*key, std::move(out), now);
            ++refreshed;
            ++stats_.refreshes;
        }
        return refreshed;
    }

    const TransferStats& stats() const { return stats_; }
    std::size_t entry_count() const { return entries_.size(); }
    std::size_t pending_count() const { return queue_.size(); }
    std::vector<PairKey> pending_keys() const { return queue_.pending(); }
    const StoreConfig& config() const { return config_; }

private:
    void write(const PairKey& key, TeacherOutput out, TimestampMs now) {
        auto it = entries_.find(key);
        if (it != entries_.end()) by_write_seq_.erase(it->second.seq);
        CacheEntryWithSeq entry;
        entry.embedding = std::move(out.embedding);
        entry.teacher_logit = out.logit;
        entry.written_at = now;
        entry.ttl_ms = config_.ttl_ms;
        entry.seq = next_seq_++;
        by_write_seq_[entry.seq] = key;
        entries_[key] = std::move(entry);

        if (config_.capacity) {
            while (entries_.size() > *config_.capacity) {
                auto oldest = by_write_seq_.begin();
                entries_.erase(oldest->second);
                by_write_seq_.erase(oldest);
            }
        }
    }

    struct CacheEntryWithSeq : CacheEntry {
        std::uint64_t seq = 0;
    };

    StoreConfig config_;
    std::map<PairKey, CacheEntryWithSeq> entries_;
    std::map<std::uint64_t, PairKey> by_write_seq_;
    std::uint64_t next_seq_ = 0;
    RefreshQueue queue_;
    TransferStats stats_;
    mutable std::mutex mu_;
};

// Student input assembly: [base || teacher embedding]; the appended block is
// all zeros on miss, so the output dimension never depends on hit/miss.
inline std::vector<double> student_feature_vector(const QueryResult& result,
                                                  std::span<const double> base_features,
                                                  std::size_t dimension) {
    if (result.embedding.size() != dimension)
        throw UsageError("student_feature_vector: embedding dimension mismatch");
    std::vector<double> out(base_features.begin(), base_features.end());
    out.insert(out.end(), result.embedding.begin(), result.embedding.end());
    return out;
}

// Deterministic synthetic teacher: embedding and logit derived from the key
// by stable hashing, time-invariant per key.
inline TeacherFn synthetic_teacher(std::size_t dimension, Seed seed = Seed{0x7e0c4e5}) {
    return [dimension, seed](const PairKey& key) {
        ByteWriter w;
        w.length_prefixed(key.user_id);
        w.length_prefixed(key.item_id);
        Rng rng(Seed{stable_hash(std::span<const std::uint8_t>(w.view()), seed)});
        TeacherOutput out;
        out.embedding.reserve(dimension);
        for (std::size_t i = 0; i < dimension; ++i)
            out.embedding.push_back(rng.uniform01() * 2.0 - 1.0);
        out.logit = rng.uniform01();
        return out;
    };
}

enum class WorkloadPattern {
    zipfian,     // popularity-skewed random queries, refresh at every cycle end
    double_pass, // each pair: miss, refresh, advance, hit -- hit rate exactly 1/2
};

struct WorkloadSpec {
    std::size_t pairs = 0;
    WorkloadPattern pattern = WorkloadPattern::zipfian;
    double zipf_exponent = 1.0;
    std::size_t queries_per_cycle = 0;
    std::size_t cycles = 0;
    DurationMs cycle_ms = 1000;
    DurationMs ttl_ms = 0;
    std::size_t refresh_budget = 0;
    Seed seed;
    std::size_t dimension = 8;
    std::optional<std::size_t> capacity;

    void validate() const {
        if (pairs == 0) throw UsageError("WorkloadSpec: pairs must be positive");
        if (cycle_ms <= 0) throw UsageError("WorkloadSpec: cycle_ms must be positive");
        if (ttl_ms <= 0) throw UsageError("WorkloadSpec: ttl must be positive");
        if (refresh_budget == 0) throw UsageError("WorkloadSpec: refresh budget must be positive");
        if (dimension == 0) throw UsageError("WorkloadSpec: dimension must be positive");
        if (pattern == WorkloadPattern::zipfian) {
            if (queries_per_cycle == 0)
                throw UsageError("WorkloadSpec: queries_per_cycle must be positive");
            if (cycles == 0) throw UsageError("WorkloadSpec: cycles must be positive");
            if (!(zipf_exponent >= 0.0)) throw UsageError("WorkloadSpec: zipf exponent must be >= 0");
        }
    }
};

struct CyclePoint {
    std::size_t cycle = 0;
    TimestampMs time_ms = 0;
    std::uint64_t queries = 0; // within this cycle
    std::uint64_t hits = 0;
    double hit_rate = 0.0;
};

struct SimulationResult {
    TransferStats stats;
    std::vector<CyclePoint> series;
};

namespace detail {

inline PairKey workload_pair(std::size_t rank) {
    return PairKey{"u" + std::to_string(rank), "v" + std::to_string(rank)};
}

// Cumulative Zipf weights over ranks 1..n: weight(k) = k^-z.
inline std::vector<double> zipf_cdf(std::size_t n, double z) {
    std::vector<double> cdf(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        total += std::pow(static_cast<double>(k + 1), -z);
        cdf[k] = total;
    }
    for (double& v : cdf) v /= total;
    return cdf;
}

} // namespace detail

inline SimulationResult simulate(const WorkloadSpec& spec) {
    spec.validate();

    StoreConfig store_config;
    store_config.dimension = spec.dimension;
    store_config.ttl_ms = spec.ttl_ms;
    store_config.refresh_budget = spec.refresh_budget;
    store_config.capacity = spec.capacity;
    TeacherEmbeddingStore store(store_config);
    TeacherFn teacher = synthetic_teacher(spec.dimension);
    VirtualClock clock;

    SimulationResult result;

    if (spec.pattern == WorkloadPattern::double_pass) {
        for (std::size_t i = 0; i < spec.pairs; ++i) {
            const PairKey key = detail::workload_pair(i + 1);
            CyclePoint point;
            point.cycle = i;
            point.queries = 2;
            point.hits += store.student_query(key, clock.now()).hit ? 1 : 0;
            store.teacher_refresh_cycle(teacher, clock.now());
            clock.advance(spec.cycle_ms);
            point.hits += store.student_query(key, clock.now()).hit ? 1 : 0;
            clock.advance(spec.cycle_ms);
            point.time_ms = clock.now();
            point.hit_rate = static_cast<double>(point.hits) / 2.0;
            result.series.push_back(point);
        }
        result.stats = store.stats();
        return result;
    }

    Rng rng(spec.seed);
    const std::vector<double> cdf = detail::zipf_cdf(spec.pairs, spec.zipf_exponent);
    for (std::size_t cycle = 0; cycle < spec.cycles; ++cycle) {
        CyclePoint point;
        point.cycle = cycle;
        for (std::size_t q = 0; q < spec.queries_per_cycle; ++q) {
            const double u = rng.uniform01();
            const std::size_t rank =
                static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            const PairKey key = detail::workload_pair(std::min(rank, spec.pairs - 1) + 1);
            if (store.student_query(key, clock.now()).hit) ++point.hits;
            ++point.queries;
        }
        store.teacher_refresh_cycle(teacher, clock.now());
        clock.advance(spec.cycle_ms);
        point.time_ms = clock.now();
        point.hit_rate = point.queries == 0
                             ? 0.0
                             : static_cast<double>(point.hits) / static_cast<double>(point.queries);
        result.series.push_back(point);
    }
    result.stats = store.stats();
    return result;
}

} // namespace lattice
