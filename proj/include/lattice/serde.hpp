#pragma once

// File formats for the CLI: CSV importance matrices, JSON-lines impression
// logs, and JSON configs/outputs for every subcommand. Parsing failures are
// DataError with file/line context; contract violations raised by the
// constructors are wrapped into DataError here because the offending values
// came from an input file.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lattice/core.hpp"
#include "lattice/datasets.hpp"
#include "lattice/filter.hpp"
#include "lattice/ktap.hpp"
#include "lattice/numerics.hpp"
#include "lattice/partitioner.hpp"
#include "lattice/sketch.hpp"

namespace lattice {

using nlohmann::json;

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

template <typename F>
auto wrap_data_error(const std::string& context, F&& fn) {
    try {
        return fn();
    } catch (const UsageError& e) {
        throw DataError(context + ": " + e.what());
    } catch (const json::exception& e) {
        throw DataError(context + ": " + e.what());
    }
}

inline json parse_json(const std::string& text, const std::string& context) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(context + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace detail

// ---- filter: CSV in (header = task names, first column = feature), JSON out

inline ImportanceMatrix parse_importance_csv(const std::string& content,
                                             const std::string& source = "matrix") {
    std::vector<std::string> lines;
    {
        std::stringstream ss(content);
        std::string line;
        while (std::getline(ss, line)) {
            if (!detail::trim(line).empty()) lines.push_back(line);
        }
    }
    if (lines.size() < 2) throw DataError(source + ": need a header row and at least one feature row");

    const auto header = detail::split_csv_line(lines[0]);
    if (header.size() < 2) throw DataError(source + ":1: header must name at least one task");
    std::vector<TaskId> tasks(header.begin() + 1, header.end());

    std::vector<FeatureId> features;
    std::vector<double> scores;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = detail::split_csv_line(lines[i]);
        const std::string where = source + ":" + std::to_string(i + 1);
        if (cells.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) +
                            " columns, got " + std::to_string(cells.size()));
        features.push_back(cells[0]);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cells[c], &pos);
                if (pos != cells[c].size()) throw std::invalid_argument("trailing characters");
                scores.push_back(v);
            } catch (const std::exception&) {
                throw DataError(where + ": '" + cells[c] + "' is not a number");
            }
        }
    }
    return detail::wrap_data_error(source, [&] {
        return ImportanceMatrix(std::move(features), std::move(tasks), std::move(scores));
    });
}

inline json selection_to_json(const SelectionResult& result) {
    json j;
    j["selected"] = result.selected;
    j["iteration_of"] = json::object();
    for (const auto& [f, it] : result.iteration_of) j["iteration_of"][f] = it;
    j["frontier_sizes"] = result.frontier_sizes;
    return j;
}

// ---- datasets: JSON-lines impression logs, zipper config, zipped output

inline DomainRecord record_from_json(const json& j, const std::string& context) {
    return detail::wrap_data_error(context, [&] {
        DomainRecord rec;
        rec.domain = j.at("domain").get<std::string>();
        rec.user_id = j.at("user_id").get<std::string>();
        rec.ad_id = j.at("ad_id").get<std::string>();
        rec.impression_time_ms = j.at("impression_time_ms").get<TimestampMs>();
        if (j.contains("features"))
            for (const auto& [k, v] : j.at("features").items())
                rec.values[k] = v.get<double>();
        if (j.contains("conversions"))
            for (const auto& [k, v] : j.at("conversions").items())
                rec.conversions[k] = v.get<TimestampMs>();
        return rec;
    });
}

inline json record_to_json(const DomainRecord& rec) {
    json j;
    j["domain"] = rec.domain;
    j["user_id"] = rec.user_id;
    j["ad_id"] = rec.ad_id;
    j["impression_time_ms"] = rec.impression_time_ms;
    j["features"] = json::object();
    for (const auto& [k, v] : rec.values) j["features"][k] = v;
    j["conversions"] = json::object();
    for (const auto& [k, v] : rec.conversions) j["conversions"][k] = v;
    return j;
}

inline std::vector<DomainRecord> parse_jsonl_records(const std::string& content,
                                                     const std::string& source) {
    std::vector<DomainRecord> records;
    std::stringstream ss(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        records.push_back(record_from_json(detail::parse_json(line, where), where));
    }
    return records;
}

// One JSONL file holds one domain dataset; the schema is the first-seen
// feature union and all records must agree on the domain tag.
inline DomainDataset dataset_from_records(std::vector<DomainRecord> records,
                                          const std::string& source) {
    if (records.empty()) throw DataError(source + ": no records");
    std::vector<FeatureId> features;
    std::set<FeatureId> seen;
    for (const auto& rec : records) {
        if (rec.domain != records.front().domain)
            throw DataError(source + ": mixed domains '" + records.front().domain + "' and '" +
                            rec.domain + "' in one file");
        for (const auto& [f, v] : rec.values) {
            (void)v;
            if (seen.insert(f).second) features.push_back(f);
        }
    }
    return detail::wrap_data_error(source, [&] {
        return DomainDataset{DatasetSchema::create(records.front().domain, std::move(features)),
                             std::move(records)};
    });
}

struct ZipRequest {
    ZipperConfig config;
    std::vector<TaskId> tasks;
};

inline ZipRequest zip_request_from_json(const json& j, const std::string& context) {
    return detail::wrap_data_error(context, [&] {
        std::vector<AttributionWindow> windows;
        for (const auto& w : j.at("windows"))
            windows.push_back({w.at("name").get<std::string>(), w.at("duration_ms").get<DurationMs>()});
        std::vector<double> probabilities = j.at("probabilities").get<std::vector<double>>();
        const Seed seed{j.at("seed").get<std::uint64_t>()};
        ZipRequest req{ZipperConfig::create(std::move(windows), std::move(probabilities), seed),
                       j.at("tasks").get<std::vector<TaskId>>()};
        return req;
    });
}

inline json zipped_record_to_json(const ZippedRecord& rec, const ZippedDataset& dataset) {
    json j = record_to_json(rec.base);
    const std::size_t window_count = dataset.config.windows.size();
    j["assigned_window"] = rec.assigned_window;
    j["assigned_window_name"] = dataset.config.windows[rec.assigned_window].name;
    json labels = json::object();
    for (std::size_t t = 0; t < dataset.tasks.size(); ++t) {
        json per_window = json::object();
        for (std::size_t w = 0; w < window_count; ++w)
            per_window[dataset.config.windows[w].name] = rec.label(t, w, window_count);
        labels[dataset.tasks[t]] = std::move(per_window);
    }
    j["window_labels"] = std::move(labels);
    return j;
}

inline json routing_summary_to_json(const std::map<std::string, WindowSummary>& summary) {
    json j = json::object();
    for (const auto& [name, s] : summary) {
        json entry;
        entry["count"] = s.count;
        entry["positive_rate"] = json::object();
        for (const auto& [task, rate] : s.positive_rate) entry["positive_rate"][task] = rate;
        j[name] = std::move(entry);
    }
    return j;
}

// ---- sketch: profile and search config

inline ProfileTable profile_from_json(const json& j, const std::string& context) {
    return detail::wrap_data_error(context, [&] {
        const auto strategies = j.at("strategies").get<std::vector<std::string>>();
        const auto batch_sizes = j.at("batch_sizes").get<std::vector<std::uint32_t>>();
        const std::size_t layers = j.at("layers").get<std::size_t>();

        std::vector<double> latency, comm;
        std::vector<std::int64_t> memory;
        const auto& lat = j.at("latency"); // [layer][strategy][batch]
        const auto& mem = j.at("memory");
        const auto& com = j.at("comm"); // [layer][strategy]
        if (lat.size() != layers || mem.size() != layers || com.size() != layers)
            throw DataError(context + ": latency/memory/comm must have one row per layer");
        for (std::size_t l = 0; l < layers; ++l) {
            if (lat[l].size() != strategies.size() || mem[l].size() != strategies.size() ||
                com[l].size() != strategies.size())
                throw DataError(context + ": layer " + std::to_string(l) +
                                " must have one entry per strategy");
            for (std::size_t s = 0; s < strategies.size(); ++s) {
                if (lat[l][s].size() != batch_sizes.size() || mem[l][s].size() != batch_sizes.size())
                    throw DataError(context + ": layer " + std::to_string(l) + " strategy " +
                                    std::to_string(s) + " must have one entry per batch size");
                for (std::size_t b = 0; b < batch_sizes.size(); ++b) {
                    latency.push_back(lat[l][s][b].get<double>());
                    memory.push_back(mem[l][s][b].get<std::int64_t>());
                }
                comm.push_back(com[l][s].get<double>());
            }
        }
        return ProfileTable(layers, strategies, batch_sizes, std::move(latency), std::move(memory),
                            std::move(comm));
    });
}

struct SketchSetup {
    SearchConfig config;
    HyperparamSpace space;
    QualityModel quality;
};

inline SketchSetup sketch_setup_from_json(const json& j, const std::string& context) {
    return detail::wrap_data_error(context, [&] {
        SearchConfig cfg;
        const auto& s = j.at("search");
        cfg.beam_width = s.at("beam_width").get<std::size_t>();
        cfg.steps_per_phase = s.at("steps_per_phase").get<std::size_t>();
        cfg.latency_budget_ms = s.at("latency_budget_ms").get<double>();
        cfg.quality_floor = s.at("quality_floor").get<double>();
        cfg.memory_capacity = s.at("memory_capacity").get<std::int64_t>();
        cfg.seed = Seed{s.at("seed").get<std::uint64_t>()};
        if (s.contains("scaling_exponent")) cfg.scaling_exponent = s.at("scaling_exponent").get<double>();
        if (s.contains("max_iterations")) cfg.max_iterations = s.at("max_iterations").get<std::size_t>();
        if (s.contains("score_mode")) {
            const auto mode = s.at("score_mode").get<std::string>();
            if (mode == "quality_per_flops") cfg.mode = ScoreMode::quality_per_flops;
            else if (mode == "throughput") cfg.mode = ScoreMode::throughput;
            else throw DataError(context + ": unknown score_mode '" + mode + "'");
        }
        cfg.validate();

        std::vector<KnobSpec> knobs;
        for (const auto& k : j.at("hyperparams").at("knobs")) {
            KnobSpec spec;
            spec.name = k.at("name").get<std::string>();
            spec.min_value = k.at("min").get<double>();
            spec.max_value = k.at("max").get<double>();
            spec.integral = k.value("integer", false);
            spec.initial = k.value("initial", (spec.min_value + spec.max_value) / 2.0);
            knobs.push_back(std::move(spec));
        }
        MonomialFlops flops;
        const auto& f = j.at("hyperparams").at("flops");
        flops.coefficient = f.value("coefficient", 1.0);
        if (f.contains("exponents")) flops.exponents = f.at("exponents").get<std::vector<double>>();
        flops.exponents.resize(knobs.size(), 0.0);

        QualityModel qm;
        const auto& q = j.at("quality");
        qm.baseline_quality = q.at("q0").get<double>();
        qm.reference_flops = q.at("f0").get<double>();
        qm.exponent = q.value("alpha", 0.003);
        qm.validate();

        return SketchSetup{cfg, HyperparamSpace(std::move(knobs), flops), qm};
    });
}

inline json plan_to_json(const ExecutionPlan& plan, const ProfileTable& profile) {
    json j;
    j["batch"] = plan.batch;
    json strategies = json::array();
    for (std::size_t s : plan.per_layer) strategies.push_back(profile.strategies()[s]);
    j["per_layer"] = std::move(strategies);
    j["total_latency_ms"] = plan.total_latency_ms;
    j["memory_units"] = plan.memory_units;
    j["throughput"] = plan.throughput();
    return j;
}

inline json batch_search_to_json(const BatchPlanSearch& result, const ProfileTable& profile) {
    json j;
    j["feasible"] = result.best.has_value();
    if (result.best) j["plan"] = plan_to_json(*result.best, profile);
    json outcomes = json::array();
    for (const auto& o : result.outcomes) {
        json e;
        e["batch"] = o.batch;
        e["feasible"] = o.feasible;
        if (o.feasible) {
            e["total_latency_ms"] = o.total_latency_ms;
            e["throughput"] = o.throughput;
        }
        outcomes.push_back(std::move(e));
    }
    j["per_batch"] = std::move(outcomes);
    return j;
}

inline json beam_result_to_json(const BeamSearchResult& result, const ProfileTable& profile,
                                const HyperparamSpace& space) {
    json j;
    json ranked = json::array();
    for (const auto& c : result.ranked) {
        json e;
        e["score"] = c.score;
        e["throughput"] = c.throughput;
        e["plan"] = plan_to_json(c.plan, profile);
        e["flops"] = c.hp.flops;
        json knobs = json::object();
        for (std::size_t i = 0; i < space.knobs().size(); ++i)
            knobs[space.knobs()[i].name] = c.hp.values[i];
        e["knobs"] = std::move(knobs);
        ranked.push_back(std::move(e));
    }
    j["ranked"] = std::move(ranked);
    if (!result.diagnostics.empty()) j["diagnostics"] = result.diagnostics;
    return j;
}

// ---- ktap: workload spec, stats, series

inline WorkloadSpec workload_from_json(const json& j, const std::string& context) {
    return detail::wrap_data_error(context, [&] {
        WorkloadSpec spec;
        spec.pairs = j.at("pairs").get<std::size_t>();
        if (j.contains("pattern")) {
            const auto p = j.at("pattern").get<std::string>();
            if (p == "zipfian") spec.pattern = WorkloadPattern::zipfian;
            else if (p == "double_pass") spec.pattern = WorkloadPattern::double_pass;
            else throw DataError(context + ": unknown pattern '" + p + "'");
        }
        spec.zipf_exponent = j.value("zipf_exponent", 1.0);
        spec.queries_per_cycle = j.value("rate", std::size_t{0});
        spec.cycles = j.value("cycles", std::size_t{0});
        if (j.contains("duration_ms") && !j.contains("cycles"))
            spec.cycles = static_cast<std::size_t>(j.at("duration_ms").get<std::int64_t>() /
                                                   j.value("cycle_ms", DurationMs{1000}));
        spec.cycle_ms = j.value("cycle_ms", DurationMs{1000});
        spec.ttl_ms = j.at("ttl_ms").get<DurationMs>();
        spec.refresh_budget = j.at("refresh_budget").get<std::size_t>();
        spec.seed = Seed{j.value("seed", std::uint64_t{0})};
        spec.dimension = j.value("dim", std::size_t{8});
        if (j.contains("capacity")) spec.capacity = j.at("capacity").get<std::size_t>();
        spec.validate();
        return spec;
    });
}

inline json stats_to_json(const TransferStats& stats) {
    json j;
    j["queries"] = stats.queries;
    j["hits"] = stats.hits;
    j["misses_absent"] = stats.misses_absent;
    j["misses_expired"] = stats.misses_expired;
    j["refreshes"] = stats.refreshes;
    j["hit_rate"] = stats.hit_rate();
    return j;
}

inline std::string series_to_csv(const std::vector<CyclePoint>& series) {
    std::ostringstream out;
    out << "cycle,time_ms,queries,hits,hit_rate\n";
    for (const auto& p : series)
        out << p.cycle << "," << p.time_ms << "," << p.queries << "," << p.hits << ","
            << p.hit_rate << "\n";
    return out.str();
}

// ---- partitioner: metadata, policy, portfolios, report

struct PartitionInput {
    std::vector<DomainMeta> domains;
    std::vector<ObjectiveMeta> objectives;
};

inline PartitionInput partition_input_from_json(const json& j, const std::string& context) {
    return detail::wrap_data_error(context, [&] {
        PartitionInput input;
        for (const auto& d : j.at("domains")) {
            DomainMeta meta;
            meta.name = d.at("name").get<std::string>();
            for (const auto& u : d.at("users")) meta.user_ids.insert(u.get<std::string>());
            for (const auto& i : d.at("items")) meta.item_ids.insert(i.get<std::string>());
            if (d.contains("compliance_tags"))
                for (const auto& t : d.at("compliance_tags"))
                    meta.compliance_tags.insert(t.get<std::string>());
            input.domains.push_back(std::move(meta));
        }
        for (const auto& o : j.at("objectives")) {
            ObjectiveMeta meta;
            meta.name = o.at("name").get<std::string>();
            meta.domain = o.at("domain").get<std::string>();
            const auto cls = o.at("feedback_class").get<std::string>();
            if (cls == "fresh_dense") meta.feedback_class = FeedbackClass::fresh_dense;
            else if (cls == "delayed_sparse") meta.feedback_class = FeedbackClass::delayed_sparse;
            else throw DataError(context + ": unknown feedback_class '" + cls + "'");
            if (o.contains("similarity"))
                for (const auto& [name, sim] : o.at("similarity").items())
                    meta.similarity[name] = sim.get<double>();
            meta.est_value = o.value("est_value", 0.0);
            meta.cost = o.value("cost", 0.0);
            input.objectives.push_back(std::move(meta));
        }
        return input;
    });
}

inline PartitionPolicy policy_from_json(const json& j, const std::string& context) {
    return detail::wrap_data_error(context, [&] {
        PartitionPolicy policy;
        policy.user_overlap_min = j.at("user_overlap_min").get<double>();
        policy.similarity_min = j.at("similarity_min").get<double>();
        policy.budget_per_portfolio = j.at("budget_per_portfolio").get<double>();
        if (j.contains("incompatible_tag_pairs"))
            for (const auto& pair : j.at("incompatible_tag_pairs"))
                policy.incompatible_tag_pairs.emplace_back(pair.at(0).get<std::string>(),
                                                           pair.at(1).get<std::string>());
        policy.require_item_overlap = j.value("require_item_overlap", false);
        policy.item_overlap_min = j.value("item_overlap_min", 0.0);
        return policy;
    });
}

inline json portfolios_to_json(const std::vector<Portfolio>& portfolios) {
    json j = json::array();
    for (const auto& p : portfolios) {
        json e;
        json members = json::array();
        for (const auto& m : p.members) members.push_back({{"domain", m.domain}, {"objective", m.objective}});
        e["members"] = std::move(members);
        e["total_cost"] = p.total_cost;
        e["compliance_union"] = p.compliance_union;
        e["over_budget"] = p.over_budget;
        j.push_back(std::move(e));
    }
    return j;
}

inline std::string partition_report(const std::vector<DomainMeta>& domains,
                                    const std::vector<Portfolio>& portfolios) {
    std::ostringstream out;
    out << "domain overlap matrix (user jaccard / item jaccard)\n";
    out << "        ";
    for (const auto& d : domains) out << d.name << "  ";
    out << "\n";
    for (const auto& a : domains) {
        out << a.name << ": ";
        for (const auto& b : domains) {
            if (a.name == b.name) {
                out << "1.00/1.00  ";
                continue;
            }
            const IdOverlap ov = id_overlap(a, b);
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f/%.2f  ", ov.user_jaccard, ov.item_jaccard);
            out << buf;
        }
        out << "\n";
    }
    out << "\nportfolios: " << portfolios.size() << "\n";
    for (std::size_t i = 0; i < portfolios.size(); ++i) {
        const auto& p = portfolios[i];
        out << "  [" << i << "] cost=" << p.total_cost << (p.over_budget ? " (over budget)" : "")
            << " members:";
        for (const auto& m : p.members) out << " " << m.domain << "/" << m.objective;
        out << "\n";
    }
    return out.str();
}

// ---- run manifest

struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::optional<std::uint64_t> seed;
    std::string tool_version;
    std::int64_t wall_duration_ms = 0;
};

inline json manifest_to_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    if (m.seed) j["seed"] = *m.seed;
    else j["seed"] = nullptr;
    j["tool_version"] = m.tool_version;
    j["wall_duration_ms"] = m.wall_duration_ms;
    return j;
}

} // namespace lattice
