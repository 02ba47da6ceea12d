// Unified command-line entry point. Subcommands: filter, merge, zip, sketch,
// ktap-sim, partition, kernels. Structured outputs are JSON (JSON-lines for
// record streams, CSV for series); all diagnostics go to stderr. Exit codes:
// 0 success, 1 usage error, 2 data error.
//
// File outputs are written to a temp file and renamed on success, and every
// file output gets a sibling <name>.manifest.json recording the run.
// LATTICE_OUT_DIR, when set, prefixes relative output paths.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lattice/serde.hpp"

namespace fs = std::filesystem;
using lattice::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct OutputWriter {
    std::string command;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::optional<std::uint64_t> seed;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    static fs::path resolve(const std::string& path) {
        fs::path p(path);
        if (p.is_relative()) {
            if (const char* dir = std::getenv("LATTICE_OUT_DIR")) p = fs::path(dir) / p;
        }
        return p;
    }

    static void write_atomic(const fs::path& path, const std::string& content) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        const fs::path tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw lattice::DataError(path.string() + ": cannot open for writing");
            out << content;
            if (!out) throw lattice::DataError(path.string() + ": write failed");
        }
        fs::rename(tmp, path);
    }

    // Empty path means stdout.
    void emit(const std::string& path, const std::string& content) {
        if (path.empty()) {
            std::cout << content;
            return;
        }
        const fs::path resolved = resolve(path);
        write_atomic(resolved, content);
        outputs.push_back(resolved.string());
    }

    // One manifest per file output, written last so it vouches for a
    // completed run.
    void finalize() {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        for (const auto& out : outputs) {
            lattice::RunManifest manifest;
            manifest.command = command;
            manifest.inputs = inputs;
            manifest.outputs = outputs;
            manifest.seed = seed;
            manifest.tool_version = kVersion;
            manifest.wall_duration_ms = elapsed;
            write_atomic(out + ".manifest.json", lattice::manifest_to_json(manifest).dump(2) + "\n");
        }
    }
};

int run_filter(const std::string& matrix_path, std::size_t budget, std::uint64_t seed,
               const std::string& out_path) {
    OutputWriter writer{"filter", {matrix_path}, {}, seed};
    const auto matrix =
        lattice::parse_importance_csv(lattice::detail::read_file(matrix_path), matrix_path);
    const auto result = lattice::select_features(matrix, budget, lattice::Seed{seed});
    writer.emit(out_path, lattice::selection_to_json(result).dump(2) + "\n");
    writer.finalize();
    return 0;
}

int run_merge(const std::vector<std::string>& input_paths, const std::string& out_path) {
    OutputWriter writer{"merge", input_paths, {}, std::nullopt};
    std::vector<lattice::DomainDataset> datasets;
    for (const auto& path : input_paths)
        datasets.push_back(lattice::dataset_from_records(
            lattice::parse_jsonl_records(lattice::detail::read_file(path), path), path));
    const auto merged = lattice::merge_domains(datasets);

    std::string lines;
    for (const auto& rec : merged.records) lines += lattice::record_to_json(rec).dump() + "\n";
    writer.emit(out_path, lines);
    std::cerr << "merged " << merged.records.size() << " records across "
              << merged.schema.features.size() << " union features\n";
    writer.finalize();
    return 0;
}

int run_zip(const std::string& records_path, const std::string& config_path,
            const std::string& out_path, const std::string& summary_path) {
    const auto request = lattice::zip_request_from_json(
        lattice::detail::parse_json(lattice::detail::read_file(config_path), config_path),
        config_path);
    OutputWriter writer{"zip", {records_path, config_path}, {}, request.config.seed.value};

    const auto records = lattice::parse_jsonl_records(lattice::detail::read_file(records_path),
                                                      records_path);
    const auto zipped = lattice::zip_dataset(records, request.tasks, request.config);
    const auto summary = lattice::window_routing_summary(zipped);

    std::string lines;
    for (const auto& rec : zipped.records)
        lines += lattice::zipped_record_to_json(rec, zipped).dump() + "\n";
    writer.emit(out_path, lines);

    const json summary_json = lattice::routing_summary_to_json(summary);
    if (summary_path.empty())
        std::cerr << "routing summary: " << summary_json.dump() << "\n";
    else
        writer.emit(summary_path, summary_json.dump(2) + "\n");
    writer.finalize();
    return 0;
}

int run_sketch(const std::string& profile_path, const std::string& config_path,
               const std::string& mode, const std::string& out_path) {
    const auto profile = lattice::profile_from_json(
        lattice::detail::parse_json(lattice::detail::read_file(profile_path), profile_path),
        profile_path);
    auto setup = lattice::sketch_setup_from_json(
        lattice::detail::parse_json(lattice::detail::read_file(config_path), config_path),
        config_path);
    OutputWriter writer{"sketch", {profile_path, config_path}, {}, setup.config.seed.value};

    json output;
    if (mode == "dp") {
        const auto search = lattice::dp_bootstrap_all_batches(profile, setup.config.memory_capacity);
        output = lattice::batch_search_to_json(search, profile);
        if (search.best)
            std::cerr << "dp: batch " << search.best->batch << ", latency "
                      << search.best->total_latency_ms << " ms, memory " << search.best->memory_units
                      << " units\n";
        else
            std::cerr << "dp: no feasible plan within capacity\n";
    } else {
        const auto result = lattice::beam_search(profile, setup.space, setup.quality, setup.config);
        output = lattice::beam_result_to_json(result, profile, setup.space);
        std::cerr << "beam: " << result.ranked.size() << " feasible candidate(s)\n";
        if (!result.diagnostics.empty()) std::cerr << "beam: " << result.diagnostics << "\n";
    }
    writer.emit(out_path, output.dump(2) + "\n");
    writer.finalize();
    return 0;
}

int run_ktap_sim(const std::string& workload_path, const std::string& out_path,
                 const std::string& series_path) {
    const auto spec = lattice::workload_from_json(
        lattice::detail::parse_json(lattice::detail::read_file(workload_path), workload_path),
        workload_path);
    OutputWriter writer{"ktap-sim", {workload_path}, {}, spec.seed.value};

    const auto result = lattice::simulate(spec);
    writer.emit(out_path, lattice::stats_to_json(result.stats).dump(2) + "\n");
    if (!series_path.empty()) writer.emit(series_path, lattice::series_to_csv(result.series));
    std::cerr << "simulated " << result.stats.queries << " queries, hit rate "
              << result.stats.hit_rate() << "\n";
    writer.finalize();
    return 0;
}

int run_partition(const std::string& meta_path, const std::string& policy_path,
                  const std::string& out_path, const std::string& report_path) {
    const auto input = lattice::partition_input_from_json(
        lattice::detail::parse_json(lattice::detail::read_file(meta_path), meta_path), meta_path);
    const auto policy = lattice::policy_from_json(
        lattice::detail::parse_json(lattice::detail::read_file(policy_path), policy_path),
        policy_path);
    OutputWriter writer{"partition", {meta_path, policy_path}, {}, std::nullopt};

    std::vector<lattice::Portfolio> portfolios;
    try {
        portfolios = lattice::partition(input.domains, input.objectives, policy);
    } catch (const lattice::UsageError& e) {
        // inputs came from files, so contract violations are data errors here
        throw lattice::DataError(std::string(e.what()));
    }
    writer.emit(out_path, lattice::portfolios_to_json(portfolios).dump(2) + "\n");
    const std::string report = lattice::partition_report(input.domains, portfolios);
    if (report_path.empty())
        std::cerr << report;
    else
        writer.emit(report_path, report);
    writer.finalize();
    return 0;
}

int run_kernels(const std::string& op, const std::string& input_path, const std::string& out_path) {
    const json in = lattice::detail::parse_json(lattice::detail::read_file(input_path), input_path);
    OutputWriter writer{"kernels", {input_path}, {}, std::nullopt};

    const auto vec = [&](const char* key) {
        if (!in.contains(key))
            throw lattice::DataError(input_path + ": missing '" + key + "' for op " + op);
        return in.at(key).get<std::vector<double>>();
    };
    const double eps = in.value("eps", lattice::kDefaultEps);

    json out;
    try {
        if (op == "correlation_loss") {
            const auto x = vec("x"), y = vec("y");
            out["result"] = lattice::correlation_loss(x, y, eps);
        } else if (op == "rms_norm") {
            out["result"] = lattice::rms_norm(vec("x"), eps);
        } else if (op == "swish_rn") {
            out["result"] = lattice::swish_rn(vec("x"), eps);
        } else if (op == "swish_rn_hard") {
            out["result"] = lattice::swish_rn_hard(vec("x"), eps);
        } else if (op == "swish_rn_jvp") {
            const auto x = vec("x"), t = vec("tangent");
            out["result"] = lattice::swish_rn_jvp(x, t, eps);
        } else if (op == "clip_features") {
            out["result"] = lattice::clip_features(vec("x"), in.at("c").get<double>());
        } else if (op == "smooth_labels") {
            out["result"] = lattice::smooth_labels(vec("y"), in.at("eps_s").get<double>());
        } else {
            throw lattice::UsageError("unknown kernel op '" + op + "'");
        }
    } catch (const lattice::UsageError& e) {
        if (std::string(e.what()).rfind("unknown kernel", 0) == 0) throw;
        throw lattice::DataError(std::string(e.what()));
    }
    writer.emit(out_path, out.dump(2) + "\n");
    writer.finalize();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice: consolidation toolkit (feature selection, dataset zipping, "
                 "execution-plan search, transfer-cache simulation, portfolio partitioning)"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // filter
    auto* filter_cmd = app.add_subcommand("filter", "Pareto-optimal feature selection from a CSV importance matrix");
    std::string filter_matrix, filter_out;
    std::size_t filter_budget = 0;
    std::uint64_t filter_seed = 0;
    filter_cmd->add_option("matrix", filter_matrix, "CSV: header = task names, first column = feature name")->required();
    filter_cmd->add_option("--budget", filter_budget, "number of features to select")->required();
    filter_cmd->add_option("--seed", filter_seed, "seed for random frontier fill")->required();
    filter_cmd->add_option("--out", filter_out, "output JSON path (default: stdout)");

    // merge
    auto* merge_cmd = app.add_subcommand("merge", "Merge JSONL domain datasets under the union schema with zero padding");
    std::vector<std::string> merge_inputs;
    std::string merge_out;
    merge_cmd->add_option("inputs", merge_inputs, "JSONL impression logs, one domain each")->required();
    merge_cmd->add_option("--out", merge_out, "output JSONL path (default: stdout)");

    // zip
    auto* zip_cmd = app.add_subcommand("zip", "Assign impressions to attribution windows and materialize per-window labels");
    std::string zip_records, zip_config, zip_out, zip_summary;
    zip_cmd->add_option("records", zip_records, "JSONL impression log")->required();
    zip_cmd->add_option("--config", zip_config, "JSON: windows, probabilities, seed, tasks")->required();
    zip_cmd->add_option("--out", zip_out, "output JSONL path (default: stdout)");
    zip_cmd->add_option("--summary", zip_summary, "routing summary JSON path (default: stderr)");

    // sketch
    auto* sketch_cmd = app.add_subcommand("sketch", "Execution-plan search over a profile table");
    std::string sketch_profile, sketch_config, sketch_mode = "dp", sketch_out;
    sketch_cmd->add_option("--profile", sketch_profile, "profile table JSON")->required();
    sketch_cmd->add_option("--config", sketch_config, "search config JSON")->required();
    sketch_cmd->add_option("--mode", sketch_mode, "dp | beam")
        ->check(CLI::IsMember({"dp", "beam"}));
    sketch_cmd->add_option("--out", sketch_out, "output JSON path (default: stdout)");

    // ktap-sim
    auto* ktap_cmd = app.add_subcommand("ktap-sim", "TTL transfer-cache simulation under a synthetic workload");
    std::string ktap_workload, ktap_out, ktap_series;
    ktap_cmd->add_option("--workload", ktap_workload, "workload spec JSON")->required();
    ktap_cmd->add_option("--out", ktap_out, "stats JSON path (default: stdout)");
    ktap_cmd->add_option("--series", ktap_series, "per-cycle hit-rate CSV path");

    // partition
    auto* part_cmd = app.add_subcommand("partition", "Group domain-objective pairs into portfolios");
    std::string part_meta, part_policy, part_out, part_report;
    part_cmd->add_option("metadata", part_meta, "JSON with domains and objectives")->required();
    part_cmd->add_option("--policy", part_policy, "policy JSON")->required();
    part_cmd->add_option("--out", part_out, "portfolios JSON path (default: stdout)");
    part_cmd->add_option("--report", part_report, "human-readable report path (default: stderr)");

    // kernels
    auto* kernels_cmd = app.add_subcommand("kernels", "Evaluate a numeric kernel on JSON inputs");
    std::string kernels_op, kernels_input, kernels_out;
    kernels_cmd->add_option("op", kernels_op,
                            "correlation_loss | rms_norm | swish_rn | swish_rn_hard | swish_rn_jvp | clip_features | smooth_labels")
        ->required();
    kernels_cmd->add_option("--input", kernels_input, "JSON input file")->required();
    kernels_cmd->add_option("--out", kernels_out, "output JSON path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (filter_cmd->parsed()) return run_filter(filter_matrix, filter_budget, filter_seed, filter_out);
        if (merge_cmd->parsed()) return run_merge(merge_inputs, merge_out);
        if (zip_cmd->parsed()) return run_zip(zip_records, zip_config, zip_out, zip_summary);
        if (sketch_cmd->parsed()) return run_sketch(sketch_profile, sketch_config, sketch_mode, sketch_out);
        if (ktap_cmd->parsed()) return run_ktap_sim(ktap_workload, ktap_out, ktap_series);
        if (part_cmd->parsed()) return run_partition(part_meta, part_policy, part_out, part_report);
        if (kernels_cmd->parsed()) return run_kernels(kernels_op, kernels_input, kernels_out);
    } catch (const lattice::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const lattice::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
