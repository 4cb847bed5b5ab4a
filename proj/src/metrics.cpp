#include "evopref/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "evopref/rng.hpp"

namespace evopref {

namespace {

// Keep only points componentwise >= reference; warn about the rest.
std::vector<ObjectiveVector> admissible_points(
    const std::vector<ObjectiveVector>& points, const ObjectiveVector& ref) {
    std::vector<ObjectiveVector> kept;
    kept.reserve(points.size());
    int dropped = 0;
    for (const auto& p : points) {
        if (p.size() != ref.size())
            throw std::invalid_argument("point dimension differs from reference");
        bool ok = true;
        for (std::size_t j = 0; j < p.size(); ++j)
            if (p[j] < ref[j]) {
                ok = false;
                break;
            }
        if (ok)
            kept.push_back(p);
        else
            ++dropped;
    }
    if (dropped > 0)
        std::fprintf(stderr,
                     "hypervolume: discarded %d point(s) below the reference\n",
                     dropped);
    return kept;
}

// Union area of 2D boxes [ref, p], points need not be sorted or distinct.
double union_area_2d(std::vector<ObjectiveVector> pts, const double ref0,
                     const double ref1) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        if (a[0] != b[0])
            return a[0] > b[0];
        return a[1] > b[1];
    });
    double area = 0.0;
    double top = ref1;
    for (const auto& p : pts) {
        if (p[1] > top) {
            area += (p[0] - ref0) * (p[1] - top);
            top = p[1];
        }
    }
    return area;
}

// 3D: sweep slabs in decreasing f3; each slab's cross-section is the union of
// the (f1, f2) boxes of points at or above the slab.
double hv3d(std::vector<ObjectiveVector> pts, const ObjectiveVector& ref) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a[2] > b[2];
    });
    std::vector<ObjectiveVector> active;
    double volume = 0.0;
    double level = pts.front()[2];
    for (const auto& p : pts) {
        if (p[2] < level) {
            if (!active.empty())
                volume += union_area_2d(active, ref[0], ref[1]) * (level - p[2]);
            level = p[2];
        }
        active.push_back({p[0], p[1]});
    }
    volume += union_area_2d(active, ref[0], ref[1]) * (level - ref[2]);
    return volume;
}

}  // namespace

double hypervolume(const std::vector<ObjectiveVector>& points,
                   const ObjectiveVector& reference) {
    const std::size_t m = reference.size();
    if (m != 2 && m != 3)
        throw std::invalid_argument(
            "exact hypervolume supports 2 or 3 objectives; use "
            "hypervolume_monte_carlo for more");
    std::vector<ObjectiveVector> pts = admissible_points(points, reference);
    if (pts.empty())
        return 0.0;
    if (m == 2)
        return union_area_2d(std::move(pts), reference[0], reference[1]);
    return hv3d(std::move(pts), reference);
}

HypervolumeEstimate hypervolume_monte_carlo(
    const std::vector<ObjectiveVector>& points, const ObjectiveVector& reference,
    std::int64_t samples, std::uint64_t seed) {
    if (samples <= 0)
        throw std::invalid_argument("need a positive sample count");
    const std::size_t m = reference.size();
    std::vector<ObjectiveVector> pts = admissible_points(points, reference);
    HypervolumeEstimate est;
    if (pts.empty())
        return est;

    ObjectiveVector hi(m);
    for (std::size_t j = 0; j < m; ++j) {
        hi[j] = reference[j];
        for (const auto& p : pts)
            hi[j] = std::max(hi[j], p[j]);
    }
    double box = 1.0;
    for (std::size_t j = 0; j < m; ++j)
        box *= hi[j] - reference[j];
    if (box <= 0.0)
        return est;

    Rng rng(seed);
    std::vector<double> u(m);
    std::int64_t hits = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < m; ++j)
            u[j] = reference[j] + (hi[j] - reference[j]) * rng.uniform01();
        for (const auto& p : pts) {
            bool inside = true;
            for (std::size_t j = 0; j < m; ++j)
                if (u[j] > p[j]) {
                    inside = false;
                    break;
                }
            if (inside) {
                ++hits;
                break;
            }
        }
    }
    const double frac = static_cast<double>(hits) / samples;
    est.value = box * frac;
    est.std_error = box * std::sqrt(frac * (1.0 - frac) / samples);
    return est;
}

CoverageReport coverage_from_modes(const std::vector<int>& modes,
                                   int total_modes) {
    CoverageReport report;
    report.total_modes = total_modes;
    report.covered_modes.reserve(modes.size());
    for (int m : modes)
        if (m >= 0)
            report.covered_modes.push_back(m);
    std::sort(report.covered_modes.begin(), report.covered_modes.end());
    report.covered_modes.erase(
        std::unique(report.covered_modes.begin(), report.covered_modes.end()),
        report.covered_modes.end());
    const int covered = report.covered_count();
    report.coverage_fraction =
        total_modes > 0 ? static_cast<double>(covered) / total_modes : 0.0;
    // Collapse when Cov(S) < 0.7 k, compared in integers to keep the
    // boundary (e.g. 7 of 10) exact.
    report.collapsed = 10 * covered < 7 * total_modes;
    return report;
}

CoverageReport mode_coverage(const std::vector<LowRankGenome>& solutions,
                             const PreferenceLandscape& landscape) {
    std::vector<int> modes;
    modes.reserve(solutions.size());
    for (const auto& g : solutions)
        modes.push_back(landscape.mode_of(g).value_or(-1));
    return coverage_from_modes(modes, landscape.num_modes());
}

double coverage_prediction(int mu, int generations, int grid, int objectives,
                           double cells_per_mode, int modes) {
    if (mu <= 0 || generations <= 0 || grid <= 0 || objectives <= 0 ||
        cells_per_mode <= 0.0 || modes <= 0)
        throw std::invalid_argument("coverage prediction needs positive inputs");
    const double cells = std::pow(static_cast<double>(grid), objectives);
    const double exponent =
        static_cast<double>(mu) * generations / (cells * cells_per_mode);
    return modes * (1.0 - std::exp(-exponent));
}

}  // namespace evopref
