#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "evopref/archive.hpp"
#include "evopref/types.hpp"

namespace evopref {

struct GenerationRow {
    int generation = 0;
    double hypervolume = 0.0;
    int covered_modes = 0;
    double coverage_fraction = 0.0;
    double sigma = 0.0;
    std::int64_t evaluations_used = 0;
    int archive_occupied = 0;
    bool collapsed = true;
    double best_weighted = 0.0;
};

/// One (config, seed) execution: per-generation metric rows plus the final
/// solution set. Replaying the same (config, seed) reproduces every row.
struct RunRecord {
    std::string algorithm;
    std::uint64_t config_hash = 0;
    int seed = 0;
    std::vector<GenerationRow> rows;
    std::vector<ArchiveEntry> final_set;  // archive contents or final solutions
    std::int64_t evaluations_used = 0;
    double wall_clock_ms = 0.0;

    int final_covered = 0;
    double final_coverage_fraction = 0.0;
    bool final_collapsed = true;
    double final_hypervolume = 0.0;

    const GenerationRow& last_row() const {
        if (rows.empty())
            throw std::runtime_error("run record has no generation rows");
        return rows.back();
    }
};

/// Covered-mode count per logged generation. Throws if rows are missing,
/// naming the generations without data.
std::vector<int> empirical_coverage_curve(const RunRecord& run);

/// Budget accounting shared by all algorithms. Consuming more than the
/// configured maximum is a hard error.
class EvalBudget {
 public:
    explicit EvalBudget(std::int64_t max_evaluations)
        : max_(max_evaluations) {
        if (max_ <= 0)
            throw std::invalid_argument("evaluation budget must be positive");
    }

    bool can_consume(std::int64_t n) const { return used_ + n <= max_; }
    void consume(std::int64_t n) {
        if (!can_consume(n))
            throw std::runtime_error("evaluation budget exceeded");
        used_ += n;
    }
    std::int64_t used() const { return used_; }
    std::int64_t remaining() const { return max_ - used_; }
    std::int64_t max() const { return max_; }

 private:
    std::int64_t max_;
    std::int64_t used_ = 0;
};

}  // namespace evopref
