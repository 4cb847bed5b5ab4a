// Command-line front end: single runs, multi-algorithm batteries, ablations,
// sensitivity sweeps, stored-record reports and plots.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "evopref/runner.hpp"
#include "evopref/serialization.hpp"

namespace fs = std::filesystem;
using namespace evopref;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitIo = 3;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value
    std::string output_dir;
    int seed = -1;
    int threads = 0;
};

ExperimentConfig build_config(const CommonArgs& args) {
    ExperimentConfig config = args.config_path.empty()
                                  ? ExperimentConfig{}
                                  : load_config_file(args.config_path);
    for (const auto& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override '" + kv +
                                        "' is not key=value");
        apply_config_entry(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!args.output_dir.empty())
        config.output_dir = args.output_dir;
    if (args.threads > 0)
        config.threads = args.threads;
    config.validate();
    return config;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "config file (key = value)");
    cmd->add_option("-D,--define", args.overrides,
                    "config override key=value (repeatable)");
    cmd->add_option("-o,--out", args.output_dir, "output directory");
    cmd->add_option("-t,--threads", args.threads, "worker threads");
}

int cmd_run(const CommonArgs& args) {
    ExperimentConfig config = build_config(args);
    const int seed = args.seed >= 0 ? args.seed : config.seeds.front();
    const PreferenceLandscape landscape =
        PreferenceLandscape::build(config.landscape);
    const std::string label = config_label(config);

    SnapshotCallback snapshot;
    if (config.snapshot_every > 0) {
        const fs::path dir = run_output_dir(config, label, seed);
        fs::create_directories(dir);
        snapshot = [dir](int generation, const GridArchive& archive) {
            char name[64];
            std::snprintf(name, sizeof(name), "archive_gen%04d.json", generation);
            std::ofstream out(dir / name);
            out << archive_to_json(archive, true).dump(1);
        };
    }

    RunRecord record;
    if (config.algorithm == "evopref")
        record = evopref_run(config, landscape, seed, snapshot, config.threads);
    else
        record = run_algorithm(config, landscape, seed);
    write_run_outputs(config, landscape, record, label);

    std::printf("%s seed %d: %d/%d modes covered (%.1f%%), HV %.4f, %lld evals\n",
                record.algorithm.c_str(), seed, record.final_covered,
                config.landscape.modes, 100.0 * record.final_coverage_fraction,
                record.final_hypervolume,
                static_cast<long long>(record.evaluations_used));
    std::printf("outputs in %s\n", run_output_dir(config, label, seed).c_str());
    return 0;
}

int cmd_battery(const CommonArgs& args, const std::vector<std::string>& algos,
                const std::string& reference) {
    ExperimentConfig base = build_config(args);
    std::vector<ExperimentConfig> configs;
    for (const auto& algo : algos) {
        ExperimentConfig c = base;
        c.algorithm = algo;
        c.label.clear();
        configs.push_back(c);
    }
    BatteryOptions options;
    options.reference = reference;
    options.threads = base.threads;
    options.output_dir = base.output_dir;
    const BatteryReport report = run_battery(configs, options);
    std::fputs(report.report_text.c_str(), stdout);
    std::printf("\nbattery outputs in %s\n", base.output_dir.c_str());
    return 0;
}

int cmd_ablation(const CommonArgs& args) {
    ExperimentConfig base = build_config(args);
    BatteryOptions options;
    options.reference = "evopref_full";
    options.threads = base.threads;
    options.output_dir = base.output_dir;
    const BatteryReport report = run_battery(ablation_configs(base), options);
    std::fputs(report.report_text.c_str(), stdout);
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& parameter,
              const std::vector<double>& values) {
    ExperimentConfig base = build_config(args);
    BatteryOptions options;
    options.threads = base.threads;
    options.output_dir = base.output_dir;
    const SweepReport report = sensitivity_sweep(base, parameter, values, options);
    std::fputs(report.report_text.c_str(), stdout);
    return 0;
}

std::vector<RunRecord> load_records(const std::string& dir) {
    std::vector<RunRecord> records;
    std::vector<fs::path> summaries;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() == "summary.json")
            summaries.push_back(entry.path());
    std::sort(summaries.begin(), summaries.end());
    for (const auto& path : summaries) {
        std::ifstream in(path);
        nlohmann::json j;
        in >> j;
        RunRecord record = run_record_from_json(j);
        // Final-set objectives live in archive.json next to the summary.
        const fs::path archive_path = path.parent_path() / "archive.json";
        if (fs::exists(archive_path)) {
            std::ifstream ain(archive_path);
            nlohmann::json aj;
            ain >> aj;
            for (const auto& item : aj) {
                ArchiveEntry e;
                e.objectives = item.at("objectives").get<ObjectiveVector>();
                e.generation = item.at("generation").get<int>();
                e.mode = item.value("mode", -1);
                record.final_set.push_back(std::move(e));
            }
        }
        records.push_back(std::move(record));
    }
    if (records.empty())
        throw std::runtime_error("no summary.json files under '" + dir + "'");
    return records;
}

int cmd_report(const std::string& from, bool theory) {
    if (theory) {
        std::fputs(theory_report().c_str(), stdout);
        return 0;
    }
    const std::vector<RunRecord> records = load_records(from);
    // Group per algorithm and print median/IQR of the stored summaries.
    std::map<std::string, std::vector<double>> covered, hv;
    for (const auto& r : records) {
        covered[r.algorithm].push_back(r.final_covered);
        hv[r.algorithm].push_back(r.final_hypervolume);
    }
    std::printf("stored records: %zu runs\n\n", records.size());
    std::printf("algorithm        n   covered median [IQR]      HV median\n");
    for (auto& [algo, values] : covered) {
        const MedianIqr c = median_iqr(values);
        const MedianIqr h = median_iqr(hv[algo]);
        std::printf("%-15s %3zu  %6.1f [%5.1f, %5.1f]   %8.4f\n", algo.c_str(),
                    values.size(), c.median, c.q1, c.q3, h.median);
    }
    return 0;
}

int cmd_plot(const std::string& from, const std::string& out) {
    const std::vector<RunRecord> records = load_records(from);
    emit_plots(records, out.empty() ? from : out);
    std::printf("plots written to %s\n", (out.empty() ? from : out).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-objective evolution of low-rank genomes on synthetic "
                 "preference landscapes"};
    app.require_subcommand(1);

    CommonArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "execute one (config, seed) run");
    add_common(run_cmd, run_args);
    run_cmd->add_option("-s,--seed", run_args.seed, "run seed");

    CommonArgs battery_args;
    std::vector<std::string> battery_algos = {"evopref", "moead",    "smsemoa",
                                              "cmaes",   "gradient", "random"};
    std::string battery_reference = "evopref";
    auto* battery_cmd =
        app.add_subcommand("battery", "run the full seed battery per algorithm");
    add_common(battery_cmd, battery_args);
    battery_cmd->add_option("-a,--algos", battery_algos,
                            "algorithms to include");
    battery_cmd->add_option("-r,--reference", battery_reference,
                            "reference algorithm for pairwise tests");

    CommonArgs ablation_args;
    auto* ablation_cmd = app.add_subcommand(
        "ablation", "full vs w/o archive, w/o crossover, w/o crowding");
    add_common(ablation_cmd, ablation_args);

    CommonArgs sweep_args;
    std::string sweep_param = "p_c";
    std::vector<double> sweep_values;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "sensitivity sweep (sigma0 | p_c | g | tournament_size)");
    add_common(sweep_cmd, sweep_args);
    sweep_cmd->add_option("-p,--param", sweep_param, "parameter name")
        ->required();
    sweep_cmd->add_option("-v,--values", sweep_values, "values to test")
        ->required();

    std::string report_from;
    bool report_theory = false;
    auto* report_cmd =
        app.add_subcommand("report", "summaries from stored run records");
    report_cmd->add_option("--from", report_from, "battery output directory");
    report_cmd->add_flag("--theory", report_theory,
                         "print the expected-coverage bound evaluations");

    std::string plot_from, plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "emit SVG plots from records");
    plot_cmd->add_option("--from", plot_from, "battery output directory")
        ->required();
    plot_cmd->add_option("-o,--out", plot_out, "plot output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return cmd_run(run_args);
        if (battery_cmd->parsed())
            return cmd_battery(battery_args, battery_algos, battery_reference);
        if (ablation_cmd->parsed())
            return cmd_ablation(ablation_args);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_args, sweep_param, sweep_values);
        if (report_cmd->parsed()) {
            if (!report_theory && report_from.empty()) {
                std::fprintf(stderr, "report: need --from DIR or --theory\n");
                return kExitUsage;
            }
            return cmd_report(report_from, report_theory);
        }
        if (plot_cmd->parsed())
            return cmd_plot(plot_from, plot_out);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error (usage): %s\n", e.what());
        return kExitUsage;
    } catch (const std::ios_base::failure& e) {
        std::fprintf(stderr, "error (io): %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
