#include <algorithm>
#include <chrono>

#include "evopref/baselines.hpp"
#include "evopref/selection.hpp"
#include "run_common.hpp"

namespace evopref {

RunRecord run_random_search(const ExperimentConfig& config,
                            const PreferenceLandscape& landscape, int seed) {
    const auto start = std::chrono::steady_clock::now();
    const auto shape = config.genome_shape();
    EvalBudget budget(config.effective_budget());
    const std::uint64_t run_seed =
        derive_seed({stream::random_search, static_cast<std::uint64_t>(seed)});

    RunRecord record;
    record.algorithm = "random";
    record.config_hash = config.hash();
    record.seed = seed;

    // Sample i always comes from the same sub-seed, so a longer budget
    // extends the sample sequence instead of reshuffling it.
    std::int64_t sample_index = 0;
    double best_fitness = -1.0;
    ArchiveEntry best;

    // Running non-dominated set of everything evaluated, for the metrics.
    std::vector<ObjectiveVector> front;
    std::vector<int> all_modes;

    int batch = 0;
    while (budget.can_consume(1)) {
        const std::int64_t batch_size =
            std::min<std::int64_t>(config.mu, budget.remaining());
        const std::uint64_t gen_seed = generation_eval_seed(seed, batch);
        for (std::int64_t i = 0; i < batch_size; ++i, ++sample_index) {
            LowRankGenome g = random_init(
                shape, config.init_sigma,
                derive_seed({run_seed, static_cast<std::uint64_t>(sample_index)}),
                config.alpha);
            const Eigen::VectorXd z = landscape.project(g);
            ObjectiveVector f = landscape.evaluate_features(z, gen_seed);
            budget.consume(1);
            const int mode = landscape.mode_of_feature(z).value_or(-1);
            all_modes.push_back(mode);
            const double fitness = weighted_sum(f, config.scalar_weights);
            if (fitness > best_fitness) {
                best_fitness = fitness;
                best = ArchiveEntry{std::move(g), f, batch, mode};
            }
            // Merge into the running front.
            bool dominated = false;
            for (const auto& p : front)
                if (dominates(p, f) || p == f) {
                    dominated = true;
                    break;
                }
            if (!dominated) {
                std::erase_if(front, [&](const ObjectiveVector& p) {
                    return dominates(f, p);
                });
                front.push_back(f);
            }
        }
        record.rows.push_back(solution_set_row(batch, front, all_modes,
                                               landscape.num_modes(), 0.0,
                                               budget.used(), best_fitness));
        ++batch;
    }

    // Solution set: best-by-weighted-sum point; coverage analysis over all
    // evaluated samples is reflected in the rows above.
    std::vector<ArchiveEntry> final_set;
    final_set.push_back(best);
    finalize_record(record, std::move(final_set), landscape.num_modes());
    // Coverage of the full evaluated sample is the honest summary figure.
    const CoverageReport cov =
        coverage_from_modes(all_modes, landscape.num_modes());
    record.final_covered = cov.covered_count();
    record.final_coverage_fraction = cov.coverage_fraction;
    record.final_collapsed = cov.collapsed;
    record.evaluations_used = budget.used();
    record.wall_clock_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    return record;
}

}  // namespace evopref
