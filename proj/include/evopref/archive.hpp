#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "evopref/genome.hpp"
#include "evopref/rng.hpp"
#include "evopref/types.hpp"

namespace evopref {

enum class InsertResult { inserted, replaced, rejected };

struct ArchiveEntry {
    LowRankGenome genome;
    ObjectiveVector objectives;
    int generation = 0;
    int mode = -1;  // caller-supplied mode id, -1 when unknown / outside basins
};

struct OccupancyStats {
    int occupied = 0;
    double fraction = 0.0;
    std::vector<int> per_mode;  // counts per mode id, when a classifier given
    int outside_modes = 0;
};

/// Objective-space grid archive: g cells per axis over [0,1]^m, at most one
/// solution per cell. A newcomer takes an empty cell, replaces an occupant it
/// dominates, and is rejected otherwise (incomparable keeps the incumbent).
/// Full genome copies are stored so evolution cannot mutate archived elites.
/// Storage is a sparse ordered map; the dense grid is never materialized.
class GridArchive {
 public:
    GridArchive(int cells_per_axis, int objectives);

    /// Componentwise floor(g * f_j); f_j == 1 clamps to the top cell.
    /// Throws std::out_of_range if any component leaves [0,1].
    static std::vector<int> cell_index(const ObjectiveVector& f, int g);

    InsertResult try_insert(const LowRankGenome& genome, const ObjectiveVector& f,
                            int generation, int mode = -1);

    /// Uniform over occupied cells; nullptr when empty.
    const ArchiveEntry* sample_partner(Rng& rng) const;
    const ArchiveEntry* sample_partner(std::uint64_t seed) const;

    OccupancyStats occupancy_stats(
        const std::function<std::optional<int>(const LowRankGenome&)>&
            mode_classifier = nullptr,
        int num_modes = 0) const;

    /// Count of distinct cached mode ids among entries (ignores -1).
    std::vector<int> covered_mode_ids() const;

    int size() const { return static_cast<int>(cells_.size()); }
    bool empty() const { return cells_.empty(); }
    int cells_per_axis() const { return g_; }
    int objectives() const { return m_; }
    std::int64_t capacity() const;

    const std::map<std::vector<int>, ArchiveEntry>& cells() const { return cells_; }

 private:
    int g_ = 10;
    int m_ = 3;
    std::map<std::vector<int>, ArchiveEntry> cells_;
};

}  // namespace evopref
