#pragma once

#include <cstdint>
#include <vector>

#include "evopref/rng.hpp"
#include "evopref/types.hpp"

namespace evopref {

/// Pareto dominance under maximization: a >= b everywhere, > somewhere.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// Deb-style fast non-dominated sort. Front 0 is the non-dominated set;
/// within-front order equals input order. Empty input gives empty fronts.
std::vector<std::vector<int>> fast_nondominated_sort(
    const std::vector<ObjectiveVector>& objs);

/// Crowding distance within one front. Fronts of size <= 2 get +infinity
/// everywhere; objectives with zero range contribute nothing.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front);

/// Population annotated with fronts, per-member rank and crowding.
struct RankedPopulation {
    std::vector<ObjectiveVector> objectives;
    std::vector<std::vector<int>> fronts;
    std::vector<int> rank;
    std::vector<double> crowding;

    static RankedPopulation rank_of(std::vector<ObjectiveVector> objs);
};

/// Winner of a k-way tournament: lower rank, then higher crowding, remaining
/// ties decided by a draw from the same stream (never by index comparison).
int tournament_select(const RankedPopulation& pop, int size, Rng& rng);
int binary_tournament(const RankedPopulation& pop, Rng& rng);
int binary_tournament(const RankedPopulation& pop, std::uint64_t seed);

/// NSGA-II (mu+mu)-style truncation: fill by whole fronts in rank order and
/// truncate the splitting front by descending crowding (ties by input order).
/// Returns the surviving indices in input order, so an input of size mu maps
/// to the identity.
std::vector<int> environmental_selection(const std::vector<ObjectiveVector>& objs,
                                         int mu);

/// Ablation variant: the splitting front is truncated by uniform random
/// tie-break values from `rng` instead of crowding distance.
std::vector<int> environmental_selection_random_ties(
    const std::vector<ObjectiveVector>& objs, int mu, Rng& rng);

}  // namespace evopref
