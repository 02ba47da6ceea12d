#pragma once

// Unified dataset construction (feature-union schema, zero padding) and
// attribution-window mixing: every impression is deterministically routed to
// one window by hashing its signature, and labels are materialized for all
// windows so the longest one can serve as the oracle head.

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lattice/core.hpp"

namespace lattice {

struct DatasetSchema {
    std::string domain;
    std::vector<FeatureId> features;

    static DatasetSchema create(std::string domain, std::vector<FeatureId> features) {
        std::set<FeatureId> seen;
        for (const auto& f : features) {
            if (f.empty()) throw UsageError("DatasetSchema: empty feature name");
            if (!seen.insert(f).second)
                throw UsageError("DatasetSchema: duplicate feature '" + f + "' in domain '" +
                                 domain + "'");
        }
        return DatasetSchema{std::move(domain), std::move(features)};
    }
};

// One original entry from one domain. Conversion timestamps are per task and
// absent when no positive event occurred.
struct DomainRecord {
    std::string domain;
    std::string user_id;
    std::string ad_id;
    TimestampMs impression_time_ms = 0;
    std::map<FeatureId, double> values;
    std::map<TaskId, TimestampMs> conversions;
};

struct DomainDataset {
    DatasetSchema schema;
    std::vector<DomainRecord> records;
};

struct AttributionWindow {
    std::string name;       // e.g. "90min", "1d", "7d"
    DurationMs duration_ms = 0;
};

struct ZipperConfig {
    std::vector<AttributionWindow> windows; // strictly increasing durations; last = oracle
    std::vector<double> probabilities;      // non-negative, sums to 1 within 1e-9
    Seed seed;

    static ZipperConfig create(std::vector<AttributionWindow> windows,
                               std::vector<double> probabilities, Seed seed) {
        if (windows.empty()) throw UsageError("ZipperConfig: no windows");
        if (probabilities.size() != windows.size())
            throw UsageError("ZipperConfig: probabilities/windows length mismatch");
        std::set<std::string> names;
        DurationMs prev = 0;
        for (std::size_t i = 0; i < windows.size(); ++i) {
            if (windows[i].name.empty()) throw UsageError("ZipperConfig: empty window name");
            if (!names.insert(windows[i].name).second)
                throw UsageError("ZipperConfig: duplicate window name '" + windows[i].name + "'");
            if (windows[i].duration_ms <= (i == 0 ? 0 : prev))
                throw UsageError("ZipperConfig: window durations must be positive and strictly increasing");
            prev = windows[i].duration_ms;
        }
        double sum = 0.0;
        for (double p : probabilities) {
            if (!(p >= 0.0) || !std::isfinite(p))
                throw UsageError("ZipperConfig: probabilities must be non-negative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw UsageError("ZipperConfig: probabilities must sum to 1");
        return ZipperConfig{std::move(windows), std::move(probabilities), seed};
    }

    std::size_t oracle_window() const { return windows.size() - 1; }
};

struct ZippedRecord {
    DomainRecord base;
    std::size_t assigned_window = 0;
    // Flattened task-major: labels[t * window_count + w], 0/1.
    std::vector<std::uint8_t> window_labels;

    std::uint8_t label(std::size_t task, std::size_t window, std::size_t window_count) const {
        return window_labels[task * window_count + window];
    }
};

template <typename RecordT>
struct UnifiedDataset {
    DatasetSchema schema; // union schema; records are padded to exactly these keys
    std::vector<RecordT> records;
};

struct ZippedDataset {
    DatasetSchema schema;
    std::vector<TaskId> tasks;
    ZipperConfig config;
    std::vector<ZippedRecord> records;
};

namespace detail {

inline std::string joined_domain_name(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "+";
        out += p;
    }
    return out;
}

// First-seen union of feature names across schemas.
inline std::vector<FeatureId> union_features(const std::vector<const DatasetSchema*>& schemas) {
    std::vector<FeatureId> features;
    std::set<FeatureId> seen;
    for (const auto* s : schemas)
        for (const auto& f : s->features)
            if (seen.insert(f).second) features.push_back(f);
    return features;
}

inline void pad_to_schema(std::map<FeatureId, double>& values,
                          const std::vector<FeatureId>& union_features) {
    for (const auto& f : union_features)
        values.try_emplace(f, 0.0); // zero is the pad value; 0 is reserved upstream for "absent"
}

} // namespace detail

// Concatenates datasets under the union schema, zero-padding features a
// record's source domain never declared. Input order is preserved.
inline UnifiedDataset<DomainRecord> merge_domains(const std::vector<DomainDataset>& datasets) {
    if (datasets.empty()) throw UsageError("merge_domains: no datasets");

    std::vector<const DatasetSchema*> schemas;
    std::vector<std::string> domain_names;
    for (const auto& d : datasets) {
        schemas.push_back(&d.schema);
        domain_names.push_back(d.schema.domain);
    }
    auto features = detail::union_features(schemas);

    UnifiedDataset<DomainRecord> out;
    out.schema = DatasetSchema::create(detail::joined_domain_name(domain_names), features);

    for (const auto& d : datasets) {
        const std::set<FeatureId> declared(d.schema.features.begin(), d.schema.features.end());
        for (const auto& rec : d.records) {
            for (const auto& [key, value] : rec.values) {
                (void)value;
                if (!declared.count(key))
                    throw DataError("merge_domains: record in domain '" + d.schema.domain +
                                    "' carries undeclared feature '" + key + "'");
            }
            DomainRecord padded = rec;
            detail::pad_to_schema(padded.values, out.schema.features);
            out.records.push_back(std::move(padded));
        }
    }
    return out;
}

// Deterministic window assignment from the impression signature alone.
// Signature encoding: len-prefixed user id, len-prefixed ad id, 8-byte
// big-endian timestamp. The hash is mapped to [0,1) and bucketed by the
// cumulative probabilities.
inline std::size_t assign_window(std::string_view user_id, std::string_view ad_id,
                                 TimestampMs impression_time_ms, const ZipperConfig& config) {
    ByteWriter w;
    w.length_prefixed(user_id);
    w.length_prefixed(ad_id);
    w.u64_be(static_cast<std::uint64_t>(impression_time_ms));
    const std::uint64_t h = stable_hash(std::span<const std::uint8_t>(w.view()), config.seed);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;

    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < config.windows.size(); ++i) {
        cum += config.probabilities[i];
        if (u < cum) return i;
    }
    return config.windows.size() - 1;
}

// Assigns every record to a window and materializes labels for all windows.
// A conversion at delay exactly equal to the window duration counts as inside
// (closed boundary).
inline ZippedDataset zip_dataset(const std::vector<DomainRecord>& records,
                                 const std::vector<TaskId>& tasks, const ZipperConfig& config) {
    {
        std::set<TaskId> seen;
        for (const auto& t : tasks) {
            if (t.empty()) throw UsageError("zip_dataset: empty task name");
            if (!seen.insert(t).second) throw UsageError("zip_dataset: duplicate task '" + t + "'");
        }
    }

    ZippedDataset out;
    out.tasks = tasks;
    out.config = config;

    std::vector<FeatureId> features;
    std::set<FeatureId> seen_features;
    std::vector<std::string> domains;
    std::set<std::string> seen_domains;
    const std::size_t window_count = config.windows.size();

    for (std::size_t ri = 0; ri < records.size(); ++ri) {
        const auto& rec = records[ri];
        for (const auto& [f, v] : rec.values) {
            (void)v;
            if (seen_features.insert(f).second) features.push_back(f);
        }
        if (seen_domains.insert(rec.domain).second) domains.push_back(rec.domain);

        ZippedRecord zr;
        zr.base = rec;
        zr.assigned_window =
            assign_window(rec.user_id, rec.ad_id, rec.impression_time_ms, config);
        zr.window_labels.assign(tasks.size() * window_count, 0);
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            auto it = rec.conversions.find(tasks[t]);
            if (it == rec.conversions.end()) continue;
            const TimestampMs delay = it->second - rec.impression_time_ms;
            if (delay < 0)
                throw DataError("zip_dataset: record #" + std::to_string(ri) + " task '" +
                                tasks[t] + "' converts before its impression");
            for (std::size_t w = 0; w < window_count; ++w)
                if (delay <= config.windows[w].duration_ms)
                    zr.window_labels[t * window_count + w] = 1;
        }
        out.records.push_back(std::move(zr));
    }

    out.schema = DatasetSchema::create(detail::joined_domain_name(domains), features);
    for (auto& zr : out.records) detail::pad_to_schema(zr.base.values, out.schema.features);
    return out;
}

struct WindowSummary {
    std::size_t count = 0;                  // records routed to this window
    std::map<TaskId, double> positive_rate; // using the window's own label; 0.0 when count = 0
};

inline std::map<std::string, WindowSummary> window_routing_summary(const ZippedDataset& dataset) {
    const std::size_t window_count = dataset.config.windows.size();
    std::vector<std::size_t> counts(window_count, 0);
    std::vector<std::vector<std::size_t>> positives(window_count,
                                                    std::vector<std::size_t>(dataset.tasks.size(), 0));

    for (const auto& rec : dataset.records) {
        if (rec.assigned_window >= window_count ||
            rec.window_labels.size() != dataset.tasks.size() * window_count)
            throw UsageError("window_routing_summary: dataset not produced by zip_dataset");
        ++counts[rec.assigned_window];
        for (std::size_t t = 0; t < dataset.tasks.size(); ++t)
            positives[rec.assigned_window][t] +=
                rec.label(t, rec.assigned_window, window_count);
    }

    std::map<std::string, WindowSummary> out;
    for (std::size_t w = 0; w < window_count; ++w) {
        WindowSummary s;
        s.count = counts[w];
        for (std::size_t t = 0; t < dataset.tasks.size(); ++t)
            s.positive_rate[dataset.tasks[t]] =
                counts[w] == 0 ? 0.0
                               : static_cast<double>(positives[w][t]) / static_cast<double>(counts[w]);
        out[dataset.config.windows[w].name] = s;
    }
    return out;
}

} // namespace lattice
