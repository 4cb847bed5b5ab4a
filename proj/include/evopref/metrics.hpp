#pragma once

#include <cstdint>
#include <vector>

#include "evopref/genome.hpp"
#include "evopref/landscape.hpp"
#include "evopref/types.hpp"

namespace evopref {

/// Exact hypervolume dominated by `points` relative to `reference`
/// (maximization: boxes [reference, point]). Supports m in {2, 3}; points
/// with any component below the reference are discarded with a warning to
/// stderr. Dominated points contribute nothing.
double hypervolume(const std::vector<ObjectiveVector>& points,
                   const ObjectiveVector& reference);

struct HypervolumeEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimator for any m >= 2 (intended for m > 3 where the exact
/// sweep is unsupported, and as an independent oracle in tests).
HypervolumeEstimate hypervolume_monte_carlo(
    const std::vector<ObjectiveVector>& points, const ObjectiveVector& reference,
    std::int64_t samples, std::uint64_t seed);

struct CoverageReport {
    std::vector<int> covered_modes;  // sorted distinct mode ids
    double coverage_fraction = 0.0;
    bool collapsed = true;  // |covered| < 0.7 k, strictly
    int total_modes = 0;

    int covered_count() const { return static_cast<int>(covered_modes.size()); }
};

CoverageReport mode_coverage(const std::vector<LowRankGenome>& solutions,
                             const PreferenceLandscape& landscape);

/// Report from precomputed mode ids (negative = outside every basin).
CoverageReport coverage_from_modes(const std::vector<int>& modes, int total_modes);

/// Expected covered modes k * (1 - exp(-mu*T / (g^m * c))), the archive
/// coupon-collector bound, evaluated exactly as printed.
double coverage_prediction(int mu, int generations, int grid, int objectives,
                           double cells_per_mode, int modes);

}  // namespace evopref
