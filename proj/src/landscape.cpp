#include "evopref/landscape.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "evopref/selection.hpp"

namespace evopref {

namespace {

Eigen::MatrixXd orthonormal_rows(int p, int d, double gain, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd g(d, p);
    for (int c = 0; c < p; ++c)
        for (int r = 0; r < d; ++r)
            g(r, c) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, p);
    // Fix the sign convention so the result is unambiguous.
    Eigen::MatrixXd r_mat =
        qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    for (int c = 0; c < p; ++c)
        if (r_mat(c, c) < 0.0)
            q.col(c) = -q.col(c);
    return gain * q.transpose();  // p x d, rows orthogonal with norm `gain`
}

std::vector<double> sample_score_profile(const LandscapeConfig& cfg, Rng& rng) {
    const int m = cfg.objectives;
    const double amp = rng.uniform(cfg.score_amp_min, cfg.score_amp_max);
    std::vector<double> dir(m);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double mean = 0.0;
        for (int j = 0; j < m; ++j) {
            dir[j] = rng.gaussian();
            mean += dir[j];
        }
        mean /= m;
        double norm2 = 0.0;
        for (int j = 0; j < m; ++j) {
            dir[j] -= mean;
            norm2 += dir[j] * dir[j];
        }
        if (norm2 < 1e-12)
            continue;
        const double inv = 1.0 / std::sqrt(norm2);
        std::vector<double> s(m);
        bool ok = true;
        for (int j = 0; j < m; ++j) {
            s[j] = cfg.score_base + amp * dir[j] * inv;
            if (s[j] <= 0.02 || s[j] >= 0.98)
                ok = false;
        }
        if (ok)
            return s;
    }
    throw std::runtime_error(
        "could not sample a score profile inside (0,1); "
        "check score_base/score_amp settings");
}

}  // namespace

PreferenceLandscape PreferenceLandscape::build(const LandscapeConfig& config) {
    if (config.modes < 1)
        throw std::invalid_argument("landscape needs at least one mode");
    if (config.feature_dim < 1 || config.feature_dim > config.genome_dim)
        throw std::invalid_argument("need 1 <= feature_dim <= genome_dim");
    if (config.objectives < 2)
        throw std::invalid_argument("need at least two objectives");
    if (config.width <= 0.0)
        throw std::invalid_argument("mode width must be positive");
    if (config.noise_scale < 0.0)
        throw std::invalid_argument("noise_scale must be nonnegative");

    PreferenceLandscape land;
    land.config_ = config;
    land.projection_ = orthonormal_rows(
        config.feature_dim, config.genome_dim, config.feature_gain,
        derive_seed({stream::landscape_projection, config.seed}));

    // Rejection-sample centers with pairwise separation >= 3 * max width.
    const double min_sep = 3.0 * config.width;
    Rng center_rng(derive_seed({stream::landscape_centers, config.seed}));
    std::vector<Eigen::VectorXd> centers;
    centers.reserve(config.modes);
    int retries = 0;
    while (static_cast<int>(centers.size()) < config.modes) {
        Eigen::VectorXd c(config.feature_dim);
        for (int i = 0; i < config.feature_dim; ++i)
            c[i] = center_rng.uniform(-config.center_box, config.center_box);
        bool ok = true;
        for (const auto& prev : centers) {
            if ((c - prev).norm() < min_sep) {
                ok = false;
                break;
            }
        }
        if (ok) {
            centers.push_back(std::move(c));
        } else if (++retries > config.max_center_retries) {
            throw std::runtime_error(
                "could not place " + std::to_string(config.modes) +
                " mode centers with separation >= " + std::to_string(min_sep) +
                " in the sampling box; reduce the mode count or width, or "
                "enlarge center_box");
        }
    }

    Rng score_rng(derive_seed({stream::landscape_scores, config.seed}));
    land.modes_.reserve(config.modes);
    for (int i = 0; i < config.modes; ++i) {
        PreferenceMode mode;
        mode.center = centers[i];
        mode.width = config.width;
        mode.scores = sample_score_profile(config, score_rng);
        land.modes_.push_back(std::move(mode));
    }

    // Equal component sums make profiles mutually non-dominating; verify.
    for (int a = 0; a < config.modes; ++a)
        for (int b = 0; b < config.modes; ++b)
            if (a != b && dominates(land.modes_[a].scores, land.modes_[b].scores))
                throw std::runtime_error("internal error: dominated score profile");

    return land;
}

void PreferenceLandscape::check_flat_dim(const Eigen::VectorXd& x) const {
    if (x.size() != config_.genome_dim)
        throw std::invalid_argument(
            "genome has " + std::to_string(x.size()) +
            " parameters, landscape expects " + std::to_string(config_.genome_dim));
}

Eigen::VectorXd PreferenceLandscape::project(const LowRankGenome& g) const {
    return project_flat(g.flatten());
}

Eigen::VectorXd PreferenceLandscape::project_flat(const Eigen::VectorXd& x) const {
    check_flat_dim(x);
    return projection_ * x;
}

std::vector<double> PreferenceLandscape::generation_noise(
    std::uint64_t gen_seed) const {
    std::vector<double> eps(config_.objectives, 0.0);
    if (config_.noise_scale > 0.0) {
        for (int j = 0; j < config_.objectives; ++j) {
            Rng rng(derive_seed({stream::eval_noise, config_.seed, gen_seed,
                                 static_cast<std::uint64_t>(j)}));
            eps[j] = config_.noise_scale * rng.gaussian();
        }
    }
    return eps;
}

ObjectiveVector PreferenceLandscape::evaluate_noiseless(
    const Eigen::VectorXd& z) const {
    ObjectiveVector f(config_.objectives, 0.0);
    std::vector<double> gauss(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const double d2 = (z - modes_[i].center).squaredNorm();
        gauss[i] = std::exp(-d2 / (2.0 * modes_[i].width * modes_[i].width));
    }
    for (int j = 0; j < config_.objectives; ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < modes_.size(); ++i)
            best = std::max(best, modes_[i].scores[j] * gauss[i]);
        f[j] = config_.floor_value + best;
    }
    return f;
}

ObjectiveVector PreferenceLandscape::evaluate_features(
    const Eigen::VectorXd& z, std::uint64_t gen_seed) const {
    ObjectiveVector f = evaluate_noiseless(z);
    const std::vector<double> eps = generation_noise(gen_seed);
    for (int j = 0; j < config_.objectives; ++j)
        f[j] = std::clamp(f[j] + eps[j], 0.0, 1.0);
    return f;
}

ObjectiveVector PreferenceLandscape::evaluate(const LowRankGenome& g,
                                              std::uint64_t gen_seed) const {
    return evaluate_features(project(g), gen_seed);
}

std::optional<int> PreferenceLandscape::mode_of_feature(
    const Eigen::VectorXd& z) const {
    int best = -1;
    double best_dist = 0.0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const double dist = (z - modes_[i].center).norm();
        if (best < 0 || dist < best_dist) {
            best = static_cast<int>(i);
            best_dist = dist;
        }
    }
    if (best >= 0 &&
        best_dist <= modes_[best].width * config_.capture_factor)
        return best;
    return std::nullopt;
}

std::optional<int> PreferenceLandscape::mode_of(const LowRankGenome& g) const {
    return mode_of_feature(project(g));
}

Eigen::VectorXd PreferenceLandscape::weighted_gradient(
    const LowRankGenome& g, const std::vector<double>& weights) const {
    return weighted_gradient_flat(g.flatten(), weights);
}

namespace {

void check_weights(const std::vector<double>& w, int m) {
    if (static_cast<int>(w.size()) != m)
        throw std::invalid_argument("weight vector has wrong length");
    double sum = 0.0;
    for (double x : w) {
        if (x < 0.0 || !std::isfinite(x))
            throw std::invalid_argument("weights must be nonnegative and finite");
        sum += x;
    }
    if (!(sum > 0.0))
        throw std::invalid_argument("weights must not all be zero");
}

}  // namespace

Eigen::VectorXd PreferenceLandscape::weighted_gradient_flat(
    const Eigen::VectorXd& x, const std::vector<double>& weights) const {
    check_flat_dim(x);
    check_weights(weights, config_.objectives);
    const Eigen::VectorXd z = projection_ * x;
    const double tau = config_.lse_temperature;

    const std::size_t k = modes_.size();
    std::vector<double> gauss(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double d2 = (z - modes_[i].center).squaredNorm();
        gauss[i] = std::exp(-d2 / (2.0 * modes_[i].width * modes_[i].width));
    }

    // d/dz of tau * log sum_i exp(a_ij / tau) with a_ij = s_ij * gauss_i is
    // sum_i softmax_i(a_j/tau) * a_ij * (c_i - z) / w_i^2.
    Eigen::VectorXd pull = Eigen::VectorXd::Zero(config_.feature_dim);
    std::vector<double> act(k);
    for (int j = 0; j < config_.objectives; ++j) {
        double amax = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            act[i] = modes_[i].scores[j] * gauss[i];
            amax = std::max(amax, act[i]);
        }
        double zsum = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            zsum += std::exp((act[i] - amax) / tau);
        for (std::size_t i = 0; i < k; ++i) {
            const double soft = std::exp((act[i] - amax) / tau) / zsum;
            const double w2 = modes_[i].width * modes_[i].width;
            pull += (weights[j] * soft * act[i] / w2) * (modes_[i].center - z);
        }
    }
    return projection_.transpose() * pull;
}

double PreferenceLandscape::smoothed_weighted_value(
    const Eigen::VectorXd& x, const std::vector<double>& weights) const {
    check_flat_dim(x);
    check_weights(weights, config_.objectives);
    const Eigen::VectorXd z = projection_ * x;
    const double tau = config_.lse_temperature;

    const std::size_t k = modes_.size();
    std::vector<double> gauss(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double d2 = (z - modes_[i].center).squaredNorm();
        gauss[i] = std::exp(-d2 / (2.0 * modes_[i].width * modes_[i].width));
    }
    double total = 0.0;
    for (int j = 0; j < config_.objectives; ++j) {
        double amax = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            amax = std::max(amax, modes_[i].scores[j] * gauss[i]);
        double zsum = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            zsum += std::exp((modes_[i].scores[j] * gauss[i] - amax) / tau);
        total += weights[j] * (config_.floor_value + amax + tau * std::log(zsum));
    }
    return total;
}

}  // namespace evopref
