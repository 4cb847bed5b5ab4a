#include "evopref/archive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "evopref/selection.hpp"

namespace evopref {

GridArchive::GridArchive(int cells_per_axis, int objectives)
    : g_(cells_per_axis), m_(objectives) {
    if (g_ < 1)
        throw std::invalid_argument("archive needs at least one cell per axis");
    if (m_ < 1)
        throw std::invalid_argument("archive needs at least one objective");
}

std::int64_t GridArchive::capacity() const {
    std::int64_t c = 1;
    for (int j = 0; j < m_; ++j)
        c *= g_;
    return c;
}

std::vector<int> GridArchive::cell_index(const ObjectiveVector& f, int g) {
    std::vector<int> idx(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (!(f[j] >= 0.0 && f[j] <= 1.0))
            throw std::out_of_range("objective component " + std::to_string(j) +
                                    " = " + std::to_string(f[j]) +
                                    " outside [0,1]");
        idx[j] = std::min(static_cast<int>(std::floor(g * f[j])), g - 1);
    }
    return idx;
}

InsertResult GridArchive::try_insert(const LowRankGenome& genome,
                                     const ObjectiveVector& f, int generation,
                                     int mode) {
    if (static_cast<int>(f.size()) != m_)
        throw std::invalid_argument("objective vector has wrong length");
    std::vector<int> key = cell_index(f, g_);
    auto it = cells_.find(key);
    if (it == cells_.end()) {
        cells_.emplace(std::move(key),
                       ArchiveEntry{genome, f, generation, mode});
        return InsertResult::inserted;
    }
    if (dominates(f, it->second.objectives)) {
        it->second = ArchiveEntry{genome, f, generation, mode};
        return InsertResult::replaced;
    }
    return InsertResult::rejected;  // occupant dominates, equal, or incomparable
}

const ArchiveEntry* GridArchive::sample_partner(Rng& rng) const {
    if (cells_.empty())
        return nullptr;
    auto it = cells_.begin();
    std::advance(it, rng.uniform_int(0, static_cast<std::int64_t>(cells_.size()) - 1));
    return &it->second;
}

const ArchiveEntry* GridArchive::sample_partner(std::uint64_t seed) const {
    Rng rng(derive_seed({stream::archive_partner, seed}));
    return sample_partner(rng);
}

OccupancyStats GridArchive::occupancy_stats(
    const std::function<std::optional<int>(const LowRankGenome&)>& mode_classifier,
    int num_modes) const {
    OccupancyStats stats;
    stats.occupied = size();
    stats.fraction = static_cast<double>(stats.occupied) /
                     static_cast<double>(capacity());
    if (mode_classifier) {
        stats.per_mode.assign(std::max(num_modes, 0), 0);
        for (const auto& [key, entry] : cells_) {
            const auto mode = mode_classifier(entry.genome);
            if (!mode.has_value()) {
                ++stats.outside_modes;
            } else {
                if (*mode >= static_cast<int>(stats.per_mode.size()))
                    stats.per_mode.resize(*mode + 1, 0);
                ++stats.per_mode[*mode];
            }
        }
    }
    return stats;
}

std::vector<int> GridArchive::covered_mode_ids() const {
    std::vector<int> ids;
    for (const auto& [key, entry] : cells_)
        if (entry.mode >= 0)
            ids.push_back(entry.mode);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace evopref
