#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "evopref/rng.hpp"

namespace evopref {

/// Shape of one low-rank layer update: B is d x r, A is r x k_cols.
/// The input dimension is named k_cols to keep k free for the mode count.
struct LayerShape {
    int d = 0;
    int k_cols = 0;
    int r = 0;

    int param_count() const { return (d + k_cols) * r; }
    bool valid() const;
    bool operator==(const LayerShape&) const = default;
};

/// A low-rank factorized genome: an ordered list of (B, A) factor pairs plus
/// the LoRA scaling alpha. The effective update of layer i is
/// (alpha / r) * B_i * A_i, whose rank is at most r by construction.
///
/// Parameters are stored in one flat contiguous vector (per layer: B
/// column-major, then A column-major) so single-vector optimizers can treat
/// a genome as a point in R^D, D = sum (d + k_cols) * r. Structured access
/// goes through Eigen maps into that vector. Instances are immutable after
/// construction; variation operators return fresh genomes.
class LowRankGenome {
 public:
    LowRankGenome() = default;
    LowRankGenome(std::vector<LayerShape> shape, double alpha);

    static LowRankGenome from_flat(std::vector<LayerShape> shape,
                                   Eigen::VectorXd params, double alpha,
                                   std::uint64_t id = 0);

    const std::vector<LayerShape>& shape() const { return shape_; }
    std::size_t num_layers() const { return shape_.size(); }
    double alpha() const { return alpha_; }
    std::uint64_t id() const { return id_; }
    int param_count() const { return static_cast<int>(params_.size()); }

    /// Flat contiguous view of all parameters.
    const Eigen::VectorXd& flatten() const { return params_; }

    Eigen::Map<const Eigen::MatrixXd> layer_b(std::size_t layer) const;
    Eigen::Map<const Eigen::MatrixXd> layer_a(std::size_t layer) const;

    /// (alpha / r) * B * A for the given layer. Throws on bad index.
    Eigen::MatrixXd effective_delta(std::size_t layer) const;

    bool same_shape(const LowRankGenome& other) const;
    bool all_finite() const;

 private:
    friend LowRankGenome random_init(const std::vector<LayerShape>&, double,
                                     std::uint64_t, double);
    friend LowRankGenome gaussian_mutate(const LowRankGenome&, double,
                                         std::uint64_t);
    friend LowRankGenome rank_preserving_crossover(const LowRankGenome&,
                                                   const LowRankGenome&,
                                                   double);

    std::vector<LayerShape> shape_;
    std::vector<int> b_offset_;  // start of layer's B block in params_
    std::vector<int> a_offset_;  // start of layer's A block in params_
    Eigen::VectorXd params_;
    double alpha_ = 32.0;
    std::uint64_t id_ = 0;
};

/// Entries of every B and A drawn i.i.d. Gaussian(0, sigma_init^2).
LowRankGenome random_init(const std::vector<LayerShape>& shape,
                          double sigma_init, std::uint64_t seed,
                          double alpha = 32.0);

/// child = parent + elementwise Gaussian(0, sigma^2); parent untouched.
LowRankGenome gaussian_mutate(const LowRankGenome& parent, double sigma,
                              std::uint64_t seed);

/// Per layer: A' = gamma*A1 + (1-gamma)*A2, B' = gamma*B1 + (1-gamma)*B2.
/// Operating on the factors keeps the child's per-layer product at rank <= r,
/// which naive averaging of the products B*A would not.
LowRankGenome rank_preserving_crossover(const LowRankGenome& p1,
                                        const LowRankGenome& p2, double gamma);

/// Crossover mixing weight, uniform on [0.3, 0.7].
double sample_gamma(std::uint64_t seed);

/// Numerical rank: count of singular values > tol * largest.
int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-8);

}  // namespace evopref
