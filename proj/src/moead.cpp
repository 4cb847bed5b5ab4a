#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "evopref/baselines.hpp"
#include "run_common.hpp"

namespace evopref {

namespace {

// All lattice points (i_1, ..., i_m), sum = h, scaled by 1/h.
void lattice_recurse(int m, int h, int remaining, std::vector<int>& parts,
                     std::vector<std::vector<double>>& out) {
    if (static_cast<int>(parts.size()) == m - 1) {
        std::vector<double> v;
        v.reserve(m);
        for (int p : parts)
            v.push_back(static_cast<double>(p) / h);
        v.push_back(static_cast<double>(remaining) / h);
        out.push_back(std::move(v));
        return;
    }
    for (int i = 0; i <= remaining; ++i) {
        parts.push_back(i);
        lattice_recurse(m, h, remaining - i, parts, out);
        parts.pop_back();
    }
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        s += (a[j] - b[j]) * (a[j] - b[j]);
    return s;
}

}  // namespace

WeightVectorSet WeightVectorSet::uniform(int count, int objectives, int t_nb) {
    if (count < 1 || objectives < 2)
        throw std::invalid_argument("need count >= 1 and objectives >= 2");

    // Smallest simplex lattice with at least `count` points.
    int h = 1;
    std::vector<std::vector<double>> candidates;
    for (;; ++h) {
        candidates.clear();
        std::vector<int> parts;
        lattice_recurse(objectives, h, h, parts, candidates);
        if (static_cast<int>(candidates.size()) >= count)
            break;
        if (h > 200)
            throw std::runtime_error("weight lattice generation failed");
    }

    // Greedy thinning: repeatedly drop one endpoint of the closest pair,
    // whichever removal leaves the larger minimum pairwise distance.
    std::vector<int> alive(candidates.size());
    std::iota(alive.begin(), alive.end(), 0);
    auto min_pair = [&](const std::vector<int>& idx, int skip) {
        double best = std::numeric_limits<double>::max();
        std::pair<int, int> arg{-1, -1};
        for (std::size_t a = 0; a < idx.size(); ++a) {
            if (idx[a] == skip)
                continue;
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                if (idx[b] == skip)
                    continue;
                const double d = sq_dist(candidates[idx[a]], candidates[idx[b]]);
                if (d < best) {
                    best = d;
                    arg = {idx[a], idx[b]};
                }
            }
        }
        return std::make_pair(best, arg);
    };
    while (static_cast<int>(alive.size()) > count) {
        const auto [dist, pair] = min_pair(alive, -1);
        (void)dist;
        const double keep_a = min_pair(alive, pair.second).first;
        const double keep_b = min_pair(alive, pair.first).first;
        const int drop = keep_a >= keep_b ? pair.second : pair.first;
        alive.erase(std::remove(alive.begin(), alive.end(), drop), alive.end());
    }

    WeightVectorSet set;
    set.vectors.reserve(count);
    for (int idx : alive)
        set.vectors.push_back(candidates[idx]);

    const int nb = std::min(t_nb, count);
    set.neighborhoods.resize(count);
    for (int i = 0; i < count; ++i) {
        std::vector<int> order(count);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return sq_dist(set.vectors[i], set.vectors[a]) <
                   sq_dist(set.vectors[i], set.vectors[b]);
        });
        set.neighborhoods[i].assign(order.begin(), order.begin() + nb);
    }
    return set;
}

double tchebycheff(const ObjectiveVector& f, const std::vector<double>& lambda,
                   const ObjectiveVector& z_star) {
    if (f.size() != lambda.size() || f.size() != z_star.size())
        throw std::invalid_argument("tchebycheff inputs differ in length");
    double worst = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        worst = std::max(worst, lambda[j] * std::abs(z_star[j] - f[j]));
    return worst;
}

void moead_update_ideal(MoeadState& state, const ObjectiveVector& f) {
    for (std::size_t j = 0; j < f.size(); ++j)
        state.z_star[j] = std::max(state.z_star[j], f[j]);
}

int moead_update_neighborhood(MoeadState& state, int subproblem,
                              const LowRankGenome& child,
                              const ObjectiveVector& child_f, Rng& rng) {
    std::vector<int> order = state.weights.neighborhoods[subproblem];
    // Seeded shuffle so the bounded replacement is not biased by index order.
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
    int replaced = 0;
    for (int nb : order) {
        if (replaced >= state.replace_bound)
            break;
        const double child_val =
            tchebycheff(child_f, state.weights.vectors[nb], state.z_star);
        const double incumbent_val = tchebycheff(
            state.incumbent_f[nb], state.weights.vectors[nb], state.z_star);
        if (child_val < incumbent_val) {
            state.incumbents[nb] = child;
            state.incumbent_f[nb] = child_f;
            ++replaced;
        }
    }
    return replaced;
}

void moead_generation(MoeadState& state, const PreferenceLandscape& landscape,
                      std::uint64_t run_seed, int generation,
                      EvalBudget& budget) {
    const int n = static_cast<int>(state.incumbents.size());
    const std::uint64_t gen_seed =
        generation_eval_seed(static_cast<int>(run_seed), generation);
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed({stream::moead, run_seed,
                             static_cast<std::uint64_t>(generation),
                             static_cast<std::uint64_t>(i)}));
        const auto& nbhd = state.weights.neighborhoods[i];
        const int a = nbhd[rng.uniform_int(0, static_cast<std::int64_t>(nbhd.size()) - 1)];
        const int b = nbhd[rng.uniform_int(0, static_cast<std::int64_t>(nbhd.size()) - 1)];
        const double gamma = rng.uniform(0.3, 0.7);
        LowRankGenome child = rank_preserving_crossover(state.incumbents[a],
                                                        state.incumbents[b], gamma);
        child = gaussian_mutate(child, state.sigma, rng.next_u64());
        const ObjectiveVector child_f = landscape.evaluate(child, gen_seed);
        budget.consume(1);
        moead_update_ideal(state, child_f);
        moead_update_neighborhood(state, i, child, child_f, rng);
    }
}

RunRecord run_moead(const ExperimentConfig& config,
                    const PreferenceLandscape& landscape, int seed) {
    const auto start = std::chrono::steady_clock::now();
    const auto shape = config.genome_shape();
    EvalBudget budget(config.effective_budget());
    const std::uint64_t run_seed =
        derive_seed({stream::moead, static_cast<std::uint64_t>(seed)});

    MoeadState state;
    state.weights = WeightVectorSet::uniform(config.mu,
                                             landscape.num_objectives(), 5);
    state.sigma = config.sigma0;
    state.z_star.assign(landscape.num_objectives(), 0.0);

    RunRecord record;
    record.algorithm = "moead";
    record.config_hash = config.hash();
    record.seed = seed;

    const std::uint64_t seed0 = generation_eval_seed(seed, 0);
    for (int i = 0; i < config.mu; ++i) {
        state.incumbents.push_back(random_init(
            shape, config.init_sigma,
            derive_seed({run_seed, stream::init, static_cast<std::uint64_t>(i)}),
            config.alpha));
        state.incumbent_f.push_back(landscape.evaluate(state.incumbents[i], seed0));
        budget.consume(1);
        moead_update_ideal(state, state.incumbent_f[i]);
    }

    auto log_row = [&](int t) {
        std::vector<int> modes;
        modes.reserve(state.incumbents.size());
        double best_w = 0.0;
        for (std::size_t i = 0; i < state.incumbents.size(); ++i) {
            modes.push_back(landscape.mode_of(state.incumbents[i]).value_or(-1));
            best_w = std::max(best_w, weighted_sum(state.incumbent_f[i],
                                                   config.scalar_weights));
        }
        record.rows.push_back(solution_set_row(t, state.incumbent_f, modes,
                                               landscape.num_modes(), state.sigma,
                                               budget.used(), best_w));
    };
    log_row(0);

    for (int t = 1; t <= config.generations && budget.can_consume(config.mu); ++t) {
        moead_generation(state, landscape, seed, t, budget);
        log_row(t);
    }

    std::vector<ArchiveEntry> final_set;
    for (std::size_t i = 0; i < state.incumbents.size(); ++i)
        final_set.push_back(ArchiveEntry{
            state.incumbents[i], state.incumbent_f[i], config.generations,
            landscape.mode_of(state.incumbents[i]).value_or(-1)});
    finalize_record(record, std::move(final_set), landscape.num_modes());
    record.evaluations_used = budget.used();
    record.wall_clock_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    return record;
}

}  // namespace evopref
