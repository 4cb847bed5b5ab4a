#include "evopref/genome.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace evopref {

bool LayerShape::valid() const {
    return d >= 1 && k_cols >= 1 && r >= 1 && r <= std::min(d, k_cols);
}

namespace {

void check_shape(const std::vector<LayerShape>& shape) {
    if (shape.empty())
        throw std::invalid_argument("genome shape must have at least one layer");
    for (const auto& s : shape) {
        if (!s.valid())
            throw std::invalid_argument(
                "invalid layer shape d=" + std::to_string(s.d) +
                " k_cols=" + std::to_string(s.k_cols) +
                " r=" + std::to_string(s.r) + " (need 1 <= r <= min(d, k_cols))");
    }
}

}  // namespace

LowRankGenome::LowRankGenome(std::vector<LayerShape> shape, double alpha)
    : shape_(std::move(shape)), alpha_(alpha) {
    check_shape(shape_);
    int total = 0;
    b_offset_.reserve(shape_.size());
    a_offset_.reserve(shape_.size());
    for (const auto& s : shape_) {
        b_offset_.push_back(total);
        a_offset_.push_back(total + s.d * s.r);
        total += s.param_count();
    }
    params_ = Eigen::VectorXd::Zero(total);
}

LowRankGenome LowRankGenome::from_flat(std::vector<LayerShape> shape,
                                       Eigen::VectorXd params, double alpha,
                                       std::uint64_t id) {
    LowRankGenome g(std::move(shape), alpha);
    if (params.size() != g.params_.size())
        throw std::invalid_argument(
            "flat parameter vector has length " + std::to_string(params.size()) +
            ", shape requires " + std::to_string(g.params_.size()));
    g.params_ = std::move(params);
    g.id_ = id;
    return g;
}

Eigen::Map<const Eigen::MatrixXd> LowRankGenome::layer_b(std::size_t layer) const {
    if (layer >= shape_.size())
        throw std::out_of_range("layer index out of range");
    const auto& s = shape_[layer];
    return {params_.data() + b_offset_[layer], s.d, s.r};
}

Eigen::Map<const Eigen::MatrixXd> LowRankGenome::layer_a(std::size_t layer) const {
    if (layer >= shape_.size())
        throw std::out_of_range("layer index out of range");
    const auto& s = shape_[layer];
    return {params_.data() + a_offset_[layer], s.r, s.k_cols};
}

Eigen::MatrixXd LowRankGenome::effective_delta(std::size_t layer) const {
    if (layer >= shape_.size())
        throw std::out_of_range("layer index out of range");
    const double scale = alpha_ / shape_[layer].r;
    return scale * (layer_b(layer) * layer_a(layer));
}

bool LowRankGenome::same_shape(const LowRankGenome& other) const {
    return shape_ == other.shape_;
}

bool LowRankGenome::all_finite() const {
    return params_.allFinite();
}

LowRankGenome random_init(const std::vector<LayerShape>& shape,
                          double sigma_init, std::uint64_t seed, double alpha) {
    if (!(sigma_init > 0.0) || !std::isfinite(sigma_init))
        throw std::invalid_argument("sigma_init must be positive and finite");
    LowRankGenome g(shape, alpha);
    Rng rng(derive_seed({stream::init, seed}));
    for (int i = 0; i < g.params_.size(); ++i)
        g.params_[i] = sigma_init * rng.gaussian();
    g.id_ = derive_seed({stream::genome_id, seed});
    return g;
}

LowRankGenome gaussian_mutate(const LowRankGenome& parent, double sigma,
                              std::uint64_t seed) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("mutation sigma must be positive and finite");
    LowRankGenome child = parent;
    Rng rng(derive_seed({stream::mutate, seed}));
    for (int i = 0; i < child.params_.size(); ++i)
        child.params_[i] += sigma * rng.gaussian();
    child.id_ = derive_seed({stream::genome_id, parent.id(), seed});
    return child;
}

LowRankGenome rank_preserving_crossover(const LowRankGenome& p1,
                                        const LowRankGenome& p2, double gamma) {
    if (!p1.same_shape(p2))
        throw std::invalid_argument("crossover parents have different shapes");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("gamma must lie in [0, 1]");
    LowRankGenome child = p1;
    // Convex combination of the factor matrices equals the same combination
    // of the flat parameter vectors, since B and A entries are the parameters.
    child.params_ = gamma * p1.params_ + (1.0 - gamma) * p2.params_;
    std::uint64_t gamma_bits;
    static_assert(sizeof(gamma_bits) == sizeof(gamma));
    std::memcpy(&gamma_bits, &gamma, sizeof(gamma_bits));
    child.id_ = derive_seed({stream::genome_id, p1.id(), p2.id(), gamma_bits});
    return child;
}

double sample_gamma(std::uint64_t seed) {
    Rng rng(derive_seed({stream::crossover_gamma, seed}));
    return rng.uniform(0.3, 0.7);
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0)
        return 0;
    const double cutoff = rel_tol * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff)
            ++rank;
    return rank;
}

}  // namespace evopref
