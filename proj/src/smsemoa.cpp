#include <algorithm>
#include <chrono>
#include <limits>

#include "evopref/baselines.hpp"
#include "evopref/metrics.hpp"
#include "evopref/selection.hpp"
#include "run_common.hpp"

namespace evopref {

std::vector<double> hypervolume_contributions(
    const std::vector<ObjectiveVector>& front, const ObjectiveVector& reference) {
    const double total = hypervolume(front, reference);
    std::vector<double> contrib(front.size(), 0.0);
    for (std::size_t i = 0; i < front.size(); ++i) {
        std::vector<ObjectiveVector> without;
        without.reserve(front.size() - 1);
        for (std::size_t j = 0; j < front.size(); ++j)
            if (j != i)
                without.push_back(front[j]);
        contrib[i] = total - hypervolume(without, reference);
    }
    return contrib;
}

int smsemoa_removal_index(const std::vector<ObjectiveVector>& objs,
                          const ObjectiveVector& reference) {
    const auto fronts = fast_nondominated_sort(objs);
    const auto& worst = fronts.back();
    if (worst.size() == 1)
        return worst[0];
    std::vector<ObjectiveVector> members;
    members.reserve(worst.size());
    for (int idx : worst)
        members.push_back(objs[idx]);
    const std::vector<double> contrib = hypervolume_contributions(members, reference);
    int arg = 0;
    for (std::size_t i = 1; i < contrib.size(); ++i)
        if (contrib[i] < contrib[arg])
            arg = static_cast<int>(i);
    return worst[arg];
}

RunRecord run_smsemoa(const ExperimentConfig& config,
                      const PreferenceLandscape& landscape, int seed) {
    const auto start = std::chrono::steady_clock::now();
    const auto shape = config.genome_shape();
    EvalBudget budget(config.effective_budget());
    const std::uint64_t run_seed =
        derive_seed({stream::smsemoa, static_cast<std::uint64_t>(seed)});
    const ObjectiveVector reference(landscape.num_objectives(), 0.0);

    std::vector<LowRankGenome> population;
    std::vector<ObjectiveVector> objectives;
    const std::uint64_t seed0 = generation_eval_seed(seed, 0);
    for (int i = 0; i < config.mu; ++i) {
        population.push_back(random_init(
            shape, config.init_sigma,
            derive_seed({run_seed, stream::init, static_cast<std::uint64_t>(i)}),
            config.alpha));
        objectives.push_back(landscape.evaluate(population[i], seed0));
        budget.consume(1);
    }

    RunRecord record;
    record.algorithm = "smsemoa";
    record.config_hash = config.hash();
    record.seed = seed;

    auto log_row = [&](int t) {
        std::vector<int> modes;
        modes.reserve(population.size());
        double best_w = 0.0;
        for (std::size_t i = 0; i < population.size(); ++i) {
            modes.push_back(landscape.mode_of(population[i]).value_or(-1));
            best_w = std::max(best_w,
                              weighted_sum(objectives[i], config.scalar_weights));
        }
        record.rows.push_back(solution_set_row(t, objectives, modes,
                                               landscape.num_modes(),
                                               config.sigma0, budget.used(),
                                               best_w));
    };
    log_row(0);

    // Steady state: one offspring per step; rows logged every mu steps so the
    // log has the same per-batch granularity as the generational algorithms.
    int step = 0;
    while (budget.can_consume(1)) {
        ++step;
        Rng rng(derive_seed({stream::smsemoa, static_cast<std::uint64_t>(seed),
                             static_cast<std::uint64_t>(step)}));
        const RankedPopulation ranked = RankedPopulation::rank_of(objectives);
        const int parent = binary_tournament(ranked, rng);
        LowRankGenome child =
            gaussian_mutate(population[parent], config.sigma0, rng.next_u64());
        const std::uint64_t gen_seed =
            generation_eval_seed(seed, 1 + (step - 1) / config.mu);
        const ObjectiveVector child_f = landscape.evaluate(child, gen_seed);
        budget.consume(1);

        population.push_back(std::move(child));
        objectives.push_back(child_f);
        const int removed = smsemoa_removal_index(objectives, reference);
        population.erase(population.begin() + removed);
        objectives.erase(objectives.begin() + removed);

        if (step % config.mu == 0)
            log_row(step / config.mu);
    }

    std::vector<ArchiveEntry> final_set;
    for (std::size_t i = 0; i < population.size(); ++i)
        final_set.push_back(ArchiveEntry{
            population[i], objectives[i], step / config.mu,
            landscape.mode_of(population[i]).value_or(-1)});
    finalize_record(record, std::move(final_set), landscape.num_modes());
    record.evaluations_used = budget.used();
    record.wall_clock_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    return record;
}

}  // namespace evopref
