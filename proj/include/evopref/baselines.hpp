#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evopref/config.hpp"
#include "evopref/genome.hpp"
#include "evopref/landscape.hpp"
#include "evopref/record.hpp"
#include "evopref/rng.hpp"
#include "evopref/types.hpp"

namespace evopref {

// ---------------------------------------------------------------- MOEA/D --

/// Weight vectors on the probability simplex with per-vector lists of the
/// t_nb nearest vectors (Euclidean, self included).
struct WeightVectorSet {
    std::vector<std::vector<double>> vectors;
    std::vector<std::vector<int>> neighborhoods;

    /// Simplex-lattice vectors subsampled to `count`: the smallest lattice
    /// with at least `count` points is generated and greedily thinned to
    /// maximize the minimum pairwise distance.
    static WeightVectorSet uniform(int count, int objectives, int t_nb);
};

/// Tchebycheff aggregation max_j lambda_j * |z*_j - f_j| (smaller is better).
double tchebycheff(const ObjectiveVector& f, const std::vector<double>& lambda,
                   const ObjectiveVector& z_star);

struct MoeadState {
    WeightVectorSet weights;
    std::vector<LowRankGenome> incumbents;
    std::vector<ObjectiveVector> incumbent_f;
    ObjectiveVector z_star;  // componentwise best seen (maximization ideal)
    double sigma = 0.01;
    int replace_bound = 2;  // n_r
};

void moead_update_ideal(MoeadState& state, const ObjectiveVector& f);

/// Offers a child to one subproblem's neighborhood: scans the neighborhood in
/// a seeded random order and replaces incumbents whose Tchebycheff value is
/// worse, up to the replacement bound. Returns the replacement count.
int moead_update_neighborhood(MoeadState& state, int subproblem,
                              const LowRankGenome& child,
                              const ObjectiveVector& child_f, Rng& rng);

/// One generation: every subproblem mates within its neighborhood and offers
/// the offspring back. Consumes one evaluation per subproblem.
void moead_generation(MoeadState& state, const PreferenceLandscape& landscape,
                      std::uint64_t run_seed, int generation, EvalBudget& budget);

RunRecord run_moead(const ExperimentConfig& config,
                    const PreferenceLandscape& landscape, int seed);

// -------------------------------------------------------------- SMS-EMOA --

/// HV(front) - HV(front minus member) for every member.
std::vector<double> hypervolume_contributions(
    const std::vector<ObjectiveVector>& front, const ObjectiveVector& reference);

/// Index removed by the steady-state step: the minimal-contribution member
/// (ties by input order) of the worst non-dominated front.
int smsemoa_removal_index(const std::vector<ObjectiveVector>& objs,
                          const ObjectiveVector& reference);

RunRecord run_smsemoa(const ExperimentConfig& config,
                      const PreferenceLandscape& landscape, int seed);

// ----------------------------------------------------- CMA-ES (weighted) --

struct CmaesOptions {
    int lambda = 32;
    double initial_step = 0.1;
    bool diagonal = true;  // separable update; full covariance for small D
};

struct CmaesResult {
    LowRankGenome best_genome;
    double best_fitness = 0.0;
    std::vector<double> iteration_best;      // best weighted fitness per iter
    std::vector<LowRankGenome> final_population;
    std::int64_t evaluations = 0;
};

/// Separable CMA-ES maximizing the weighted sum of objectives over the flat
/// genome vector. Deterministic given (seed, options).
CmaesResult cmaes_weighted(const PreferenceLandscape& landscape,
                           const std::vector<double>& weights,
                           std::int64_t budget, std::uint64_t seed,
                           const std::vector<LayerShape>& shape,
                           double init_sigma, double alpha,
                           const CmaesOptions& options = {});

RunRecord run_cmaes(const ExperimentConfig& config,
                    const PreferenceLandscape& landscape, int seed);

// --------------------------------------------------------- Random search --

RunRecord run_random_search(const ExperimentConfig& config,
                            const PreferenceLandscape& landscape, int seed);

// ------------------------------------------- Gradient-ascent surrogate ----

struct GradientTrajectory {
    LowRankGenome final_genome;
    std::vector<double> values;  // smoothed weighted objective per step
    std::optional<int> final_mode;
    bool stalled = false;   // gradient vanished numerically
    bool diverged = false;  // non-finite parameters (aborts the run)
};

/// Single-trajectory ascent on the smoothed weighted objective from a
/// random_init start. Steps use the normalized gradient direction with a
/// fixed learning rate (optional cosine decay); the raw gradient spans many
/// orders of magnitude across the landscape, so fixed-size directional steps
/// are the stable realization of idealized ascent.
GradientTrajectory gradient_descent_run(const PreferenceLandscape& landscape,
                                        const std::vector<double>& weights,
                                        int steps, double learning_rate,
                                        bool cosine_decay, std::uint64_t seed,
                                        const std::vector<LayerShape>& shape,
                                        double init_sigma, double alpha,
                                        const Eigen::VectorXd* start = nullptr);

/// Multi-start battery: `gradient_restarts` trajectories split the budget;
/// the run's solution set is the pooled final points.
RunRecord run_gradient(const ExperimentConfig& config,
                       const PreferenceLandscape& landscape, int seed);

}  // namespace evopref
