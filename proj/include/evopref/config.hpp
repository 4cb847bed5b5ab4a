#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evopref/genome.hpp"
#include "evopref/landscape.hpp"

namespace evopref {

/// Full experiment configuration. Defaults follow the standard setup:
/// mu = 32, G = 50, grid g = 10, tournament size 2, sigma0 = 0.01,
/// p_c = 0.3, seeds 1..30, budget = mu * G evaluations.
struct ExperimentConfig {
    std::string algorithm = "evopref";
    std::string label;  // battery/output grouping; empty derives from algorithm

    int mu = 32;
    int generations = 50;
    int grid = 10;
    int tournament_size = 2;
    double sigma0 = 0.01;
    double sigma_min = 1e-6;
    double sigma_max = 1.0;
    int adapt_window = 10;
    double crossover_prob = 0.3;
    double init_sigma = 0.15;

    // Genome shape: `layers` layers of layer_dim x layer_dim rank-r updates.
    int layers = 2;
    int layer_dim = 32;
    int rank = 4;
    double alpha = 32.0;

    LandscapeConfig landscape;

    std::vector<int> seeds = [] {
        std::vector<int> s;
        for (int i = 1; i <= 30; ++i)
            s.push_back(i);
        return s;
    }();
    std::int64_t budget = 0;  // 0 -> mu * generations

    std::string output_dir = "out";
    int snapshot_every = 0;  // archive snapshot every s generations (0 = off)
    int threads = 1;

    // Ablation switches.
    bool no_archive = false;
    bool no_crossover = false;
    bool no_crowding = false;
    bool generational = false;  // (mu,mu): offspring replace parents wholesale

    // Scalarizing baselines (CMA-ES, random search, gradient surrogate).
    std::vector<double> scalar_weights = {0.4, 0.3, 0.3};
    int gradient_restarts = 30;
    double learning_rate = 0.1;
    bool cosine_decay = true;

    std::int64_t effective_budget() const {
        return budget > 0 ? budget
                          : static_cast<std::int64_t>(mu) * generations;
    }

    std::vector<LayerShape> genome_shape() const;
    int genome_dim() const;

    /// Throws std::invalid_argument describing the first inconsistency.
    void validate() const;

    /// Canonical key=value dump (sorted keys); basis of the config hash.
    std::string canonical_text() const;
    std::uint64_t hash() const;
};

/// Parses a flat key=value config document ('#' comments, blank lines ok).
/// Unknown keys are errors so sweep configs cannot silently drift.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

std::vector<std::string> known_config_keys();

/// Applies "key=value" to one field; throws on unknown key or bad value.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

}  // namespace evopref
