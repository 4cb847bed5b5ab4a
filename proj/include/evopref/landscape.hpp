#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "evopref/genome.hpp"
#include "evopref/types.hpp"

namespace evopref {

/// One preference mode: a Gaussian basin in feature space whose peak attains
/// the given per-objective score profile.
struct PreferenceMode {
    Eigen::VectorXd center;  // in R^p
    double width = 0.5;
    ObjectiveVector scores;  // componentwise in (0, 1)
};

struct LandscapeConfig {
    int modes = 20;        // k
    int feature_dim = 8;   // p
    int genome_dim = 512;  // D, must match the genome shape in use
    int objectives = 3;    // m
    double width = 0.5;
    double noise_scale = 0.01;
    double floor_value = 0.05;
    double capture_factor = 2.0;
    // Mode centers are sampled uniformly in [-center_box, center_box]^p with
    // rejection until all pairwise distances are >= 3 * width.
    double center_box = 2.0;
    // Projection rows are orthonormal scaled by feature_gain, so an isotropic
    // Gaussian step of size sigma in genome space is exactly an isotropic
    // Gaussian step of size feature_gain * sigma in feature space.
    double feature_gain = 10.0;
    // Score profiles: base + amp * dir with dir zero-mean and unit norm, so
    // all profiles share the same component sum and none dominates another.
    double score_base = 0.5;
    double score_amp_min = 0.25;
    double score_amp_max = 0.45;
    double lse_temperature = 0.05;  // smoothing used only for gradients
    std::uint64_t seed = 0;
    int max_center_retries = 100000;
};

/// Seeded synthetic preference landscape: m objectives over a k-mode
/// max-of-Gaussians surface in a p-dimensional projection of genome space.
///
/// For objective j,
///   f_j(x) = clamp(floor + max_i scores_ij * exp(-|Px - c_i|^2 / (2 w_i^2))
///                        + eps_j, 0, 1)
/// where eps_j ~ N(0, noise_scale^2) is drawn from a stream keyed solely by
/// (landscape seed, gen_seed, j) — common to every genome evaluated within a
/// generation, so within-generation comparisons are noise-free.
///
/// Immutable after construction; evaluate() is safe to call concurrently and
/// its result is independent of call order.
class PreferenceLandscape {
 public:
    static PreferenceLandscape build(const LandscapeConfig& config);

    const LandscapeConfig& config() const { return config_; }
    int num_modes() const { return static_cast<int>(modes_.size()); }
    int feature_dim() const { return config_.feature_dim; }
    int genome_dim() const { return config_.genome_dim; }
    int num_objectives() const { return config_.objectives; }
    const std::vector<PreferenceMode>& modes() const { return modes_; }
    const Eigen::MatrixXd& projection() const { return projection_; }

    /// P * flatten(g). Throws on dimension mismatch.
    Eigen::VectorXd project(const LowRankGenome& g) const;
    Eigen::VectorXd project_flat(const Eigen::VectorXd& x) const;

    ObjectiveVector evaluate(const LowRankGenome& g, std::uint64_t gen_seed) const;
    ObjectiveVector evaluate_features(const Eigen::VectorXd& z,
                                      std::uint64_t gen_seed) const;
    /// Sharp (max-of-Gaussians) objective values without noise or clamping
    /// artifacts beyond [0,1]; values lie in [floor, 1).
    ObjectiveVector evaluate_noiseless(const Eigen::VectorXd& z) const;

    /// Per-generation noise vector shared by all genomes of that generation.
    std::vector<double> generation_noise(std::uint64_t gen_seed) const;

    /// Index of the nearest mode if within width * capture_factor, else none.
    /// Distance ties broken by lowest index.
    std::optional<int> mode_of(const LowRankGenome& g) const;
    std::optional<int> mode_of_feature(const Eigen::VectorXd& z) const;

    /// Analytic gradient (in genome space) of sum_j weights_j * f~_j where
    /// f~ replaces the max over modes by a log-sum-exp with the configured
    /// temperature and ignores noise.
    Eigen::VectorXd weighted_gradient(const LowRankGenome& g,
                                      const std::vector<double>& weights) const;
    Eigen::VectorXd weighted_gradient_flat(const Eigen::VectorXd& x,
                                           const std::vector<double>& weights) const;

    /// Value of the smoothed noiseless weighted objective at flat point x.
    double smoothed_weighted_value(const Eigen::VectorXd& x,
                                   const std::vector<double>& weights) const;

 private:
    PreferenceLandscape() = default;

    void check_flat_dim(const Eigen::VectorXd& x) const;

    LandscapeConfig config_;
    std::vector<PreferenceMode> modes_;
    Eigen::MatrixXd projection_;  // p x D
};

}  // namespace evopref
