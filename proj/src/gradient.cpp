#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "evopref/baselines.hpp"
#include "run_common.hpp"

namespace evopref {

GradientTrajectory gradient_descent_run(const PreferenceLandscape& landscape,
                                        const std::vector<double>& weights,
                                        int steps, double learning_rate,
                                        bool cosine_decay, std::uint64_t seed,
                                        const std::vector<LayerShape>& shape,
                                        double init_sigma, double alpha,
                                        const Eigen::VectorXd* start) {
    if (steps < 0)
        throw std::invalid_argument("steps must be nonnegative");
    GradientTrajectory traj;
    Eigen::VectorXd x;
    if (start) {
        x = *start;
    } else {
        x = random_init(shape, init_sigma, derive_seed({stream::gradient, seed}),
                        alpha)
                .flatten();
    }
    traj.values.reserve(steps);

    constexpr double pi = 3.14159265358979323846;
    for (int t = 0; t < steps; ++t) {
        const Eigen::VectorXd grad = landscape.weighted_gradient_flat(x, weights);
        const double norm = grad.norm();
        traj.values.push_back(landscape.smoothed_weighted_value(x, weights));
        if (!std::isfinite(norm)) {
            traj.diverged = true;
            break;
        }
        if (norm < 1e-300) {
            traj.stalled = true;  // flat to machine precision; converged or lost
            break;
        }
        double lr = learning_rate;
        if (cosine_decay && steps > 1)
            lr *= 0.5 * (1.0 + std::cos(pi * t / (steps - 1.0)));
        x += (lr / norm) * grad;
        if (!x.allFinite()) {
            traj.diverged = true;
            break;
        }
    }
    traj.final_genome = LowRankGenome::from_flat(
        shape, x, alpha, derive_seed({stream::gradient, seed, 1}));
    if (traj.diverged)
        throw std::runtime_error(
            "gradient ascent diverged to non-finite parameters (seed " +
            std::to_string(seed) + ")");
    traj.final_mode = landscape.mode_of(traj.final_genome);
    return traj;
}

RunRecord run_gradient(const ExperimentConfig& config,
                       const PreferenceLandscape& landscape, int seed) {
    const auto start = std::chrono::steady_clock::now();
    const auto shape = config.genome_shape();
    EvalBudget budget(config.effective_budget());
    const std::uint64_t run_seed =
        derive_seed({stream::gradient, static_cast<std::uint64_t>(seed)});

    RunRecord record;
    record.algorithm = "gradient";
    record.config_hash = config.hash();
    record.seed = seed;

    const int restarts = config.gradient_restarts;
    // Each gradient evaluation counts one fitness evaluation; every restart
    // reserves one sharp evaluation for the final point it reports.
    const std::int64_t per_restart = budget.max() / restarts;
    if (per_restart < 2)
        throw std::invalid_argument("budget too small for gradient restarts");
    std::int64_t leftover = budget.max() - per_restart * restarts;

    std::vector<ArchiveEntry> finals;
    std::vector<ObjectiveVector> final_objs;
    std::vector<int> final_modes;

    for (int r = 0; r < restarts; ++r) {
        std::int64_t allowance = per_restart + (leftover > 0 ? 1 : 0);
        if (leftover > 0)
            --leftover;
        const int steps = static_cast<int>(allowance) - 1;
        GradientTrajectory traj = gradient_descent_run(
            landscape, config.scalar_weights, steps, config.learning_rate,
            config.cosine_decay, derive_seed({run_seed, static_cast<std::uint64_t>(r)}),
            shape, config.init_sigma, config.alpha);
        budget.consume(steps);

        const std::uint64_t gen_seed = generation_eval_seed(seed, r);
        const ObjectiveVector f = landscape.evaluate(traj.final_genome, gen_seed);
        budget.consume(1);
        const int mode = traj.final_mode.value_or(-1);
        finals.push_back(ArchiveEntry{traj.final_genome, f, r, mode});
        final_objs.push_back(f);
        final_modes.push_back(mode);

        record.rows.push_back(solution_set_row(
            r, final_objs, final_modes, landscape.num_modes(), 0.0,
            budget.used(),
            weighted_sum(*std::max_element(final_objs.begin(), final_objs.end(),
                                           [&](const auto& a, const auto& b) {
                                               return weighted_sum(a, config.scalar_weights) <
                                                      weighted_sum(b, config.scalar_weights);
                                           }),
                         config.scalar_weights)));
    }

    finalize_record(record, std::move(finals), landscape.num_modes());
    record.evaluations_used = budget.used();
    record.wall_clock_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    return record;
}

}  // namespace evopref
