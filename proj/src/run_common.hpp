#pragma once

// Shared helpers for algorithm drivers: per-generation metric rows and
// record finalization over a current solution set.

#include <cstdint>
#include <vector>

#include "evopref/archive.hpp"
#include "evopref/metrics.hpp"
#include "evopref/record.hpp"
#include "evopref/selection.hpp"
#include "evopref/types.hpp"

namespace evopref {

// Evaluation noise stream is keyed by (seed, generation) only, never by the
// algorithm, so paired comparisons across algorithms share noise.
inline std::uint64_t generation_eval_seed(int seed, int t) {
    return derive_seed({stream::generation, static_cast<std::uint64_t>(seed),
                        static_cast<std::uint64_t>(t)});
}

inline double front_hypervolume(const std::vector<ObjectiveVector>& objs) {
    if (objs.empty())
        return 0.0;
    const auto fronts = fast_nondominated_sort(objs);
    std::vector<ObjectiveVector> front;
    front.reserve(fronts[0].size());
    for (int i : fronts[0])
        front.push_back(objs[i]);
    return hypervolume(front, ObjectiveVector(objs[0].size(), 0.0));
}

inline GenerationRow solution_set_row(int generation,
                                      const std::vector<ObjectiveVector>& objs,
                                      const std::vector<int>& modes,
                                      int total_modes, double sigma,
                                      std::int64_t evals_used,
                                      double best_weighted) {
    GenerationRow row;
    row.generation = generation;
    row.hypervolume = front_hypervolume(objs);
    const CoverageReport cov = coverage_from_modes(modes, total_modes);
    row.covered_modes = cov.covered_count();
    row.coverage_fraction = cov.coverage_fraction;
    row.collapsed = cov.collapsed;
    row.sigma = sigma;
    row.evaluations_used = evals_used;
    row.archive_occupied = static_cast<int>(objs.size());
    row.best_weighted = best_weighted;
    return row;
}

inline void finalize_record(RunRecord& record,
                            std::vector<ArchiveEntry> final_set,
                            int total_modes) {
    record.final_set = std::move(final_set);
    std::vector<ObjectiveVector> objs;
    std::vector<int> modes;
    objs.reserve(record.final_set.size());
    modes.reserve(record.final_set.size());
    for (const auto& e : record.final_set) {
        objs.push_back(e.objectives);
        modes.push_back(e.mode);
    }
    const CoverageReport cov = coverage_from_modes(modes, total_modes);
    record.final_covered = cov.covered_count();
    record.final_coverage_fraction = cov.coverage_fraction;
    record.final_collapsed = cov.collapsed;
    record.final_hypervolume = front_hypervolume(objs);
}

}  // namespace evopref
