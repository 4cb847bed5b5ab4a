#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "evopref/metrics.hpp"
#include "evopref/rng.hpp"

using namespace evopref;

namespace {

// Inclusion-exclusion oracle, exact for small point counts.
double hv_inclusion_exclusion(const std::vector<ObjectiveVector>& pts,
                              const ObjectiveVector& ref) {
    const std::size_t n = pts.size();
    const std::size_t m = ref.size();
    double total = 0.0;
    for (std::size_t mask = 1; mask < (1u << n); ++mask) {
        double vol = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            double lo = 1e300;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i))
                    lo = std::min(lo, pts[i][j]);
            vol *= std::max(0.0, lo - ref[j]);
        }
        total += (__builtin_popcount(mask) % 2 == 1) ? vol : -vol;
    }
    return total;
}

std::vector<ObjectiveVector> random_front(Rng& rng, int n, int m) {
    std::vector<ObjectiveVector> pts(n, ObjectiveVector(m));
    for (auto& p : pts)
        for (double& v : p)
            v = rng.uniform01();
    return pts;
}

}  // namespace

TEST_CASE("hypervolume worked examples") {
    CHECK(hypervolume({{1, 1, 1}}, {0, 0, 0}) == doctest::Approx(1.0));
    CHECK(hypervolume({{1, 0.5}, {0.5, 1}}, {0, 0}) == doctest::Approx(0.75));
    CHECK(hypervolume({}, {0, 0}) == 0.0);
    CHECK_THROWS_AS(hypervolume({{0.5, 0.5, 0.5, 0.5}}, {0, 0, 0, 0}),
                    std::invalid_argument);
}

TEST_CASE("dominated points contribute nothing") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        auto pts = random_front(rng, 8, 3);
        const double full = hypervolume(pts, {0, 0, 0});
        // Drop every dominated point.
        std::vector<ObjectiveVector> nd;
        for (const auto& p : pts) {
            bool dominated = false;
            for (const auto& q : pts)
                if (q != p) {
                    bool all_ge = true, any_gt = false;
                    for (std::size_t j = 0; j < 3; ++j) {
                        if (q[j] < p[j])
                            all_ge = false;
                        if (q[j] > p[j])
                            any_gt = true;
                    }
                    if (all_ge && any_gt) {
                        dominated = true;
                        break;
                    }
                }
            if (!dominated)
                nd.push_back(p);
        }
        CHECK(hypervolume(nd, {0, 0, 0}) == doctest::Approx(full).epsilon(1e-12));
    }
}

TEST_CASE("3D exact equals inclusion-exclusion on small fronts") {
    Rng rng(2025);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
        const auto pts = random_front(rng, n, 3);
        const double sweep = hypervolume(pts, {0, 0, 0});
        const double oracle = hv_inclusion_exclusion(pts, {0, 0, 0});
        CHECK(sweep == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("2D exact equals inclusion-exclusion on small fronts") {
    Rng rng(2026);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
        const auto pts = random_front(rng, n, 2);
        CHECK(hypervolume(pts, {0, 0}) ==
              doctest::Approx(hv_inclusion_exclusion(pts, {0, 0})).epsilon(1e-9));
    }
}

TEST_CASE("exact 3D agrees with the Monte Carlo estimator") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(0, 20));
        const auto pts = random_front(rng, n, 3);
        const double exact = hypervolume(pts, {0, 0, 0});
        const auto mc = hypervolume_monte_carlo(pts, {0, 0, 0}, 200000,
                                                900 + trial);
        CHECK(std::abs(exact - mc.value) <= 3.0 * mc.std_error + 1e-12);
    }
}

TEST_CASE("hypervolume is monotone under adding points") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        auto pts = random_front(rng, 6, 3);
        const double before = hypervolume(pts, {0, 0, 0});
        pts.push_back(random_front(rng, 1, 3)[0]);
        CHECK(hypervolume(pts, {0, 0, 0}) >= before - 1e-12);
    }
}

TEST_CASE("points below the reference are discarded with a warning") {
    const double hv = hypervolume({{0.5, 0.5}, {-0.1, 0.9}}, {0, 0});
    CHECK(hv == doctest::Approx(0.25));
}

TEST_CASE("coverage report basics") {
    SUBCASE("empty solution set is collapsed at zero coverage") {
        const CoverageReport r = coverage_from_modes({}, 10);
        CHECK(r.covered_count() == 0);
        CHECK(r.coverage_fraction == 0.0);
        CHECK(r.collapsed);
    }
    SUBCASE("all modes covered") {
        std::vector<int> modes;
        for (int i = 0; i < 10; ++i)
            modes.push_back(i);
        const CoverageReport r = coverage_from_modes(modes, 10);
        CHECK(r.coverage_fraction == 1.0);
        CHECK(!r.collapsed);
    }
    SUBCASE("exactly 0.7k is not collapsed (strict inequality)") {
        const CoverageReport r =
            coverage_from_modes({0, 1, 2, 3, 4, 5, 6}, 10);
        CHECK(r.covered_count() == 7);
        CHECK(r.coverage_fraction == doctest::Approx(0.7));
        CHECK(!r.collapsed);
        const CoverageReport below =
            coverage_from_modes({0, 1, 2, 3, 4, 5}, 10);
        CHECK(below.collapsed);
    }
    SUBCASE("duplicates and out-of-basin markers are ignored") {
        const CoverageReport r = coverage_from_modes({3, 3, -1, 3, 7}, 10);
        CHECK(r.covered_modes == std::vector<int>{3, 7});
    }
}

TEST_CASE("coverage_prediction evaluates the bound exactly as printed") {
    CHECK(coverage_prediction(32, 50, 10, 3, 4.0, 50) ==
          doctest::Approx(16.484).epsilon(1e-4));
    CHECK(coverage_prediction(32, 50, 10, 3, 4.0, 50) / 50.0 ==
          doctest::Approx(0.3297).epsilon(1e-3));
    // The c-free reading of the exponent reproduces ~0.80.
    CHECK(coverage_prediction(32, 50, 10, 3, 1.0, 50) / 50.0 ==
          doctest::Approx(0.7981).epsilon(1e-3));
    // Saturation.
    CHECK(coverage_prediction(32, 1000000, 10, 3, 4.0, 50) ==
          doctest::Approx(50.0).epsilon(1e-6));
    CHECK_THROWS_AS(coverage_prediction(0, 50, 10, 3, 4.0, 50),
                    std::invalid_argument);
}

TEST_CASE("coverage_prediction monotonicity") {
    const double base = coverage_prediction(32, 50, 10, 3, 4.0, 50);
    CHECK(coverage_prediction(64, 50, 10, 3, 4.0, 50) > base);
    CHECK(coverage_prediction(32, 100, 10, 3, 4.0, 50) > base);
    CHECK(coverage_prediction(32, 50, 12, 3, 4.0, 50) < base);
    CHECK(coverage_prediction(32, 50, 10, 3, 6.0, 50) < base);
}
