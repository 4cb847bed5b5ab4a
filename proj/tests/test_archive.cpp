#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "evopref/archive.hpp"
#include "evopref/selection.hpp"

using namespace evopref;

namespace {
const std::vector<LayerShape> kTinyShape = {{4, 4, 1}};

LowRankGenome tiny_genome(std::uint64_t seed) {
    return random_init(kTinyShape, 0.1, seed);
}
}  // namespace

TEST_CASE("cell_index floors componentwise and clamps the upper boundary") {
    CHECK(GridArchive::cell_index({0.0, 0.0, 0.0}, 10) ==
          std::vector<int>{0, 0, 0});
    CHECK(GridArchive::cell_index({1.0, 1.0, 1.0}, 10) ==
          std::vector<int>{9, 9, 9});
    CHECK(GridArchive::cell_index({0.825, 0.297, 0.11}, 10) ==
          std::vector<int>{8, 2, 1});
    CHECK_THROWS_AS(GridArchive::cell_index({1.2, 0.0, 0.0}, 10),
                    std::out_of_range);
    CHECK_THROWS_AS(GridArchive::cell_index({-0.1, 0.0, 0.0}, 10),
                    std::out_of_range);
}

TEST_CASE("try_insert: empty, dominated, incomparable") {
    GridArchive arch(10, 3);
    CHECK(arch.try_insert(tiny_genome(1), {0.82, 0.25, 0.11}, 0) ==
          InsertResult::inserted);
    CHECK(arch.size() == 1);
    // Same cell, dominating newcomer replaces.
    CHECK(arch.try_insert(tiny_genome(2), {0.85, 0.27, 0.15}, 1) ==
          InsertResult::replaced);
    CHECK(arch.size() == 1);
    // Incomparable newcomer is rejected; incumbent kept.
    CHECK(arch.try_insert(tiny_genome(3), {0.89, 0.21, 0.15}, 2) ==
          InsertResult::rejected);
    const auto& entry = arch.cells().begin()->second;
    CHECK(entry.objectives == ObjectiveVector{0.85, 0.27, 0.15});
    // Equal objectives are rejected too.
    CHECK(arch.try_insert(tiny_genome(4), {0.85, 0.27, 0.15}, 3) ==
          InsertResult::rejected);
    // Dominated newcomer is rejected.
    CHECK(arch.try_insert(tiny_genome(5), {0.84, 0.26, 0.14}, 4) ==
          InsertResult::rejected);
}

TEST_CASE("sample_partner: none when empty, uniform over occupied cells") {
    GridArchive arch(10, 3);
    Rng rng(1);
    CHECK(arch.sample_partner(rng) == nullptr);

    arch.try_insert(tiny_genome(1), {0.05, 0.05, 0.05}, 0);
    for (int i = 0; i < 20; ++i)
        CHECK(arch.sample_partner(static_cast<std::uint64_t>(i))
                  ->objectives[0] == doctest::Approx(0.05));

    arch.try_insert(tiny_genome(2), {0.15, 0.05, 0.05}, 0);
    arch.try_insert(tiny_genome(3), {0.25, 0.05, 0.05}, 0);
    arch.try_insert(tiny_genome(4), {0.35, 0.05, 0.05}, 0);
    REQUIRE(arch.size() == 4);
    std::map<double, int> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
        ++counts[arch.sample_partner(static_cast<std::uint64_t>(i))->objectives[0]];
    REQUIRE(counts.size() == 4);
    for (const auto& [key, count] : counts)
        CHECK(std::abs(count / static_cast<double>(draws) - 0.25) < 0.02);
}

TEST_CASE("occupancy stats") {
    GridArchive arch(10, 3);
    auto stats = arch.occupancy_stats();
    CHECK(stats.occupied == 0);
    CHECK(stats.fraction == 0.0);

    for (int i = 0; i < 7; ++i)
        arch.try_insert(tiny_genome(i), {0.05 + 0.1 * i, 0.5, 0.5}, 0, i % 3);
    stats = arch.occupancy_stats();
    CHECK(stats.occupied == 7);
    CHECK(stats.fraction == doctest::Approx(7.0 / 1000.0));

    // Classifier-based per-mode counts.
    int calls = 0;
    auto classifier = [&](const LowRankGenome&) -> std::optional<int> {
        return calls++ % 2 == 0 ? std::optional<int>(0) : std::nullopt;
    };
    stats = arch.occupancy_stats(classifier, 1);
    CHECK(stats.per_mode.size() == 1);
    CHECK(stats.per_mode[0] + stats.outside_modes == 7);

    const auto covered = arch.covered_mode_ids();
    CHECK(covered == std::vector<int>{0, 1, 2});
}

TEST_CASE("randomized stress: capacity, key consistency, monotone replacement") {
    GridArchive arch(5, 3);
    Rng rng(777);
    const LowRankGenome g = tiny_genome(0);
    for (int i = 0; i < 10000; ++i) {
        ObjectiveVector f = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
        const auto key = GridArchive::cell_index(f, 5);
        const auto it = arch.cells().find(key);
        const bool occupied = it != arch.cells().end();
        const ObjectiveVector before = occupied ? it->second.objectives
                                                : ObjectiveVector{};
        const InsertResult result = arch.try_insert(g, f, i);
        if (result == InsertResult::replaced) {
            REQUIRE(occupied);
            CHECK(dominates(f, before));  // never replaced by a non-dominator
        }
        if (result == InsertResult::inserted)
            CHECK(!occupied);
    }
    CHECK(arch.size() <= 125);
    for (const auto& [key, entry] : arch.cells())
        CHECK(GridArchive::cell_index(entry.objectives, 5) == key);
}

TEST_CASE("insertion order does not matter when same-cell pairs are comparable") {
    // All points in a cell sit on its diagonal, so any two within a cell are
    // comparable; the final content must be permutation independent.
    Rng rng(42);
    std::vector<ObjectiveVector> points;
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform01();
        points.push_back({t, t, t});
    }
    auto fill = [&](const std::vector<ObjectiveVector>& seq) {
        GridArchive arch(10, 3);
        for (std::size_t i = 0; i < seq.size(); ++i)
            arch.try_insert(tiny_genome(i), seq[i], static_cast<int>(i));
        std::vector<ObjectiveVector> contents;
        for (const auto& [key, entry] : arch.cells())
            contents.push_back(entry.objectives);
        return contents;
    };
    const auto forward = fill(points);
    std::vector<ObjectiveVector> shuffled = points;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1],
                  shuffled[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
    CHECK(fill(shuffled) == forward);
}

TEST_CASE("archive stores copies, not references") {
    GridArchive arch(10, 3);
    LowRankGenome g = tiny_genome(5);
    const Eigen::VectorXd original = g.flatten();
    arch.try_insert(g, {0.5, 0.5, 0.5}, 0);
    g = gaussian_mutate(g, 1.0, 99);  // rebind the local; archive must not move
    CHECK(arch.cells().begin()->second.genome.flatten() == original);
}
