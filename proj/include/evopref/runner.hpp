#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "evopref/archive.hpp"
#include "evopref/config.hpp"
#include "evopref/landscape.hpp"
#include "evopref/record.hpp"
#include "evopref/stats.hpp"

namespace evopref {

using SnapshotCallback = std::function<void(int generation, const GridArchive&)>;

/// The main evolutionary loop: NSGA-II selection over a population of
/// low-rank genomes with a grid archive, archive-partner crossover and
/// 1/5-rule step-size adaptation. Deterministic in (config, seed),
/// independent of eval_threads.
RunRecord evopref_run(const ExperimentConfig& config,
                      const PreferenceLandscape& landscape, int seed,
                      const SnapshotCallback& on_snapshot = {},
                      int eval_threads = 1);

/// Dispatch by config.algorithm; builds the landscape from the config.
RunRecord run_algorithm(const ExperimentConfig& config, int seed);
RunRecord run_algorithm(const ExperimentConfig& config,
                        const PreferenceLandscape& landscape, int seed);

/// Label used for battery grouping and output directories.
std::string config_label(const ExperimentConfig& config);

struct RunSummary {
    std::string label;
    int seed = 0;
    int final_covered = 0;
    double final_coverage_fraction = 0.0;
    bool final_collapsed = false;
    double final_hypervolume = 0.0;
    double best_weighted = 0.0;
    std::int64_t evaluations_used = 0;
};

struct PairwiseComparison {
    std::string baseline;  // compared against the reference algorithm
    double p_value = 1.0;
    double p_adjusted = 1.0;
    double a12 = 0.5;
    std::string magnitude;
    int n_zero = 0;
};

struct BatteryReport {
    std::vector<std::string> labels;             // config order
    std::vector<std::vector<RunSummary>> runs;   // [config][seed]
    // medians/IQR per label for coverage count and hypervolume
    std::vector<MedianIqr> coverage_stats;
    std::vector<MedianIqr> hypervolume_stats;
    std::vector<double> collapse_rates;
    bool has_tests = false;
    FriedmanResult friedman;                     // over coverage counts
    std::string reference;
    std::vector<PairwiseComparison> pairwise;    // reference vs others
    std::string report_text;
};

struct BatteryOptions {
    std::string reference = "evopref";
    int threads = 1;
    bool write_outputs = true;
    std::string output_dir;  // empty -> first config's output_dir
};

/// Runs every (config, seed) pair, writes per-run outputs, aggregates
/// medians/IQR, Friedman + Holm, pairwise Wilcoxon + A12 vs the reference.
/// All configs must share the landscape seed and the seed list.
BatteryReport run_battery(const std::vector<ExperimentConfig>& configs,
                          const BatteryOptions& options = {});

/// Ablation preset: full, w/o archive, w/o crossover, w/o crowding.
std::vector<ExperimentConfig> ablation_configs(const ExperimentConfig& base);

struct SweepReport {
    std::string parameter;
    std::vector<double> values;
    std::vector<MedianIqr> coverage;  // per value, over seeds
    int default_index = -1;
    std::string report_text;
};

/// Sensitivity sweep over one of sigma0 | p_c | g | tournament_size,
/// n = 15 seeds per value.
SweepReport sensitivity_sweep(const ExperimentConfig& base,
                              const std::string& parameter,
                              const std::vector<double>& values,
                              const BatteryOptions& options = {});

/// SVG scatter of final-set objective pairs and median-hypervolume curves,
/// with backing CSVs, written into output_dir.
void emit_plots(const std::vector<RunRecord>& records,
                const std::string& output_dir);

// Per-run persistence: metrics.csv, generations.jsonl, archive.json,
// summary.json, config.txt, landscape.json under
// <output_dir>/<label>/seed_<n>/.
std::string run_output_dir(const ExperimentConfig& config,
                           const std::string& label, int seed);
void write_run_outputs(const ExperimentConfig& config,
                       const PreferenceLandscape& landscape,
                       const RunRecord& record, const std::string& label);
std::string metrics_csv(const RunRecord& record);

/// Eq.-style expected-coverage report (`report --theory`).
std::string theory_report();

}  // namespace evopref
