#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "evopref/baselines.hpp"
#include "run_common.hpp"

namespace evopref {

namespace {

struct SepCmaes {
    // Separable CMA-ES with rank-one and rank-mu updates restricted to the
    // diagonal, learning rates scaled by (N + 2) / 3.
    int n;
    int lambda;
    int mu_sel;
    std::vector<double> weights;
    double mu_eff;
    double c_sigma, d_sigma, c_c, c_1, c_mu, chi_n;

    Eigen::VectorXd mean;
    double sigma;
    Eigen::VectorXd diag_c;   // covariance diagonal
    Eigen::VectorXd p_sigma;
    Eigen::VectorXd p_c;
    int iteration = 0;

    SepCmaes(Eigen::VectorXd mean0, double sigma0, int lambda_)
        : n(static_cast<int>(mean0.size())),
          lambda(lambda_),
          mu_sel(lambda_ / 2),
          mean(std::move(mean0)),
          sigma(sigma0) {
        if (mu_sel < 1)
            throw std::invalid_argument("CMA-ES population too small");
        weights.resize(mu_sel);
        double sum = 0.0;
        for (int i = 0; i < mu_sel; ++i) {
            weights[i] = std::log(mu_sel + 0.5) - std::log(i + 1.0);
            sum += weights[i];
        }
        double sq = 0.0;
        for (double& w : weights) {
            w /= sum;
            sq += w * w;
        }
        mu_eff = 1.0 / sq;
        c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        d_sigma = 1.0 +
                  2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) +
                  c_sigma;
        c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
        c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                       ((n + 2.0) * (n + 2.0) + mu_eff));
        const double sep_boost = (n + 2.0) / 3.0;
        c_1 = std::min(1.0, c_1 * sep_boost);
        c_mu = std::min(1.0 - c_1, c_mu * sep_boost);
        chi_n = std::sqrt(static_cast<double>(n)) *
                (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
        diag_c = Eigen::VectorXd::Ones(n);
        p_sigma = Eigen::VectorXd::Zero(n);
        p_c = Eigen::VectorXd::Zero(n);
    }

    // One ask-tell cycle; fitness is maximized.
    void step(const std::function<double(const Eigen::VectorXd&)>& fitness,
              Rng& rng) {
        const Eigen::VectorXd scale = diag_c.cwiseSqrt();
        std::vector<Eigen::VectorXd> zs(lambda), ys(lambda);
        std::vector<double> fit(lambda);
        for (int i = 0; i < lambda; ++i) {
            zs[i] = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) {
                return rng.gaussian();
            });
            ys[i] = scale.cwiseProduct(zs[i]);
            fit[i] = fitness(mean + sigma * ys[i]);
        }
        std::vector<int> order(lambda);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return fit[a] > fit[b];
        });

        Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd z_w = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < mu_sel; ++i) {
            y_w += weights[i] * ys[order[i]];
            z_w += weights[i] * zs[order[i]];
        }
        mean += sigma * y_w;

        p_sigma = (1.0 - c_sigma) * p_sigma +
                  std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * z_w;
        ++iteration;
        const double expected_decay =
            std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * iteration));
        const bool h_sigma =
            p_sigma.norm() / expected_decay < (1.4 + 2.0 / (n + 1.0)) * chi_n;
        p_c = (1.0 - c_c) * p_c +
              (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * y_w;

        Eigen::VectorXd rank_mu = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < mu_sel; ++i)
            rank_mu += weights[i] * ys[order[i]].cwiseProduct(ys[order[i]]);
        const double hs_fix = h_sigma ? 0.0 : c_c * (2.0 - c_c);
        diag_c = (1.0 - c_1 - c_mu) * diag_c +
                 c_1 * (p_c.cwiseProduct(p_c) + hs_fix * diag_c) +
                 c_mu * rank_mu;
        diag_c = diag_c.cwiseMax(1e-20);

        sigma *= std::exp((c_sigma / d_sigma) * (p_sigma.norm() / chi_n - 1.0));
        sigma = std::min(sigma, 1e6);
    }
};

}  // namespace

CmaesResult cmaes_weighted(const PreferenceLandscape& landscape,
                           const std::vector<double>& weights,
                           std::int64_t budget, std::uint64_t seed,
                           const std::vector<LayerShape>& shape,
                           double init_sigma, double alpha,
                           const CmaesOptions& options) {
    if (budget < options.lambda)
        throw std::invalid_argument(
            "CMA-ES budget below one iteration of lambda evaluations");

    const LowRankGenome start = random_init(
        shape, init_sigma, derive_seed({stream::cmaes, seed, 0}), alpha);
    SepCmaes es(start.flatten(), options.initial_step, options.lambda);
    Rng rng(derive_seed({stream::cmaes, seed, 1}));

    CmaesResult result;
    result.best_fitness = -std::numeric_limits<double>::infinity();

    std::vector<Eigen::VectorXd> last_points;
    const std::int64_t iterations = budget / options.lambda;
    for (std::int64_t it = 0; it < iterations; ++it) {
        const std::uint64_t gen_seed =
            generation_eval_seed(static_cast<int>(seed), static_cast<int>(it));
        // Capture this iteration's points and values through the callback.
        std::vector<Eigen::VectorXd> points;
        std::vector<double> values;
        auto fitness = [&](const Eigen::VectorXd& x) {
            const ObjectiveVector f =
                landscape.evaluate_features(landscape.project_flat(x), gen_seed);
            const double v = weighted_sum(f, weights);
            points.push_back(x);
            values.push_back(v);
            return v;
        };
        es.step(fitness, rng);
        result.evaluations += options.lambda;

        double it_best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (values[i] > it_best)
                it_best = values[i];
            if (values[i] > result.best_fitness) {
                result.best_fitness = values[i];
                result.best_genome = LowRankGenome::from_flat(
                    shape, points[i], alpha,
                    derive_seed({stream::cmaes, seed, 2,
                                 static_cast<std::uint64_t>(it),
                                 static_cast<std::uint64_t>(i)}));
            }
        }
        result.iteration_best.push_back(it_best);
        last_points = std::move(points);
    }
    for (std::size_t i = 0; i < last_points.size(); ++i)
        result.final_population.push_back(LowRankGenome::from_flat(
            shape, last_points[i], alpha,
            derive_seed({stream::cmaes, seed, 3, static_cast<std::uint64_t>(i)})));
    return result;
}

RunRecord run_cmaes(const ExperimentConfig& config,
                    const PreferenceLandscape& landscape, int seed) {
    const auto start_time = std::chrono::steady_clock::now();
    const auto shape = config.genome_shape();
    EvalBudget budget(config.effective_budget());
    const std::uint64_t run_seed =
        derive_seed({stream::cmaes, static_cast<std::uint64_t>(seed)});

    RunRecord record;
    record.algorithm = "cmaes";
    record.config_hash = config.hash();
    record.seed = seed;

    const LowRankGenome start = random_init(
        shape, config.init_sigma, derive_seed({run_seed, stream::init}),
        config.alpha);
    CmaesOptions options;
    options.lambda = config.mu;
    SepCmaes es(start.flatten(), options.initial_step, options.lambda);
    Rng rng(derive_seed({run_seed, 1}));

    double best_fitness = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = start.flatten();
    std::vector<Eigen::VectorXd> last_points;
    std::vector<ObjectiveVector> last_objs;

    int t = 0;
    while (budget.can_consume(options.lambda)) {
        const std::uint64_t gen_seed = generation_eval_seed(seed, t);
        std::vector<Eigen::VectorXd> points;
        std::vector<ObjectiveVector> objs;
        std::vector<double> values;
        auto fitness = [&](const Eigen::VectorXd& x) {
            ObjectiveVector f =
                landscape.evaluate_features(landscape.project_flat(x), gen_seed);
            const double v = weighted_sum(f, config.scalar_weights);
            points.push_back(x);
            objs.push_back(std::move(f));
            values.push_back(v);
            return v;
        };
        es.step(fitness, rng);
        budget.consume(options.lambda);

        for (std::size_t i = 0; i < points.size(); ++i) {
            if (values[i] > best_fitness) {
                best_fitness = values[i];
                best_x = points[i];
            }
        }
        std::vector<int> modes;
        modes.reserve(points.size());
        for (const auto& x : points)
            modes.push_back(
                landscape.mode_of_feature(landscape.project_flat(x)).value_or(-1));
        record.rows.push_back(solution_set_row(t, objs, modes,
                                               landscape.num_modes(), es.sigma,
                                               budget.used(), best_fitness));
        last_points = std::move(points);
        last_objs = std::move(objs);
        ++t;
    }

    std::vector<ArchiveEntry> final_set;
    for (std::size_t i = 0; i < last_points.size(); ++i) {
        LowRankGenome g = LowRankGenome::from_flat(
            shape, last_points[i], config.alpha,
            derive_seed({run_seed, 2, static_cast<std::uint64_t>(i)}));
        const int mode =
            landscape.mode_of_feature(landscape.project_flat(last_points[i]))
                .value_or(-1);
        final_set.push_back(ArchiveEntry{std::move(g), last_objs[i], t, mode});
    }
    finalize_record(record, std::move(final_set), landscape.num_modes());
    record.evaluations_used = budget.used();
    record.wall_clock_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start_time)
                               .count();
    return record;
}

}  // namespace evopref
