#include <doctest.h>

#include <Eigen/Core>

#include <cmath>
#include <limits>

#include "evopref/genome.hpp"

using namespace evopref;

namespace {
const std::vector<LayerShape> kDeskShape = {{32, 32, 4}, {32, 32, 4}};
}

TEST_CASE("random_init draws bounded small entries") {
    const LowRankGenome g = random_init(kDeskShape, 0.01, 7);
    CHECK(g.param_count() == 512);
    CHECK(g.all_finite());
    // 10-sigma bound: essentially impossible to exceed.
    CHECK(g.flatten().cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("random_init is deterministic and seed-sensitive") {
    const LowRankGenome a = random_init(kDeskShape, 0.01, 1);
    const LowRankGenome b = random_init(kDeskShape, 0.01, 1);
    const LowRankGenome c = random_init(kDeskShape, 0.01, 2);
    CHECK(a.flatten() == b.flatten());
    CHECK((a.flatten() - c.flatten()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("random_init rejects invalid shapes and sigma") {
    CHECK_THROWS_AS(random_init({{4, 4, 5}}, 0.01, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_init({{0, 4, 1}}, 0.01, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_init(kDeskShape, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_init(kDeskShape, -1.0, 1), std::invalid_argument);
}

TEST_CASE("gaussian_mutate perturbs without touching the parent") {
    const LowRankGenome parent = random_init(kDeskShape, 0.01, 3);
    const Eigen::VectorXd before = parent.flatten();
    const LowRankGenome child = gaussian_mutate(parent, 1e-9, 11);
    CHECK(parent.flatten() == before);
    CHECK(child.shape() == parent.shape());
    // Near-zero sigma: child converges to the parent.
    CHECK((child.flatten() - parent.flatten()).cwiseAbs().maxCoeff() < 1e-7);
    CHECK_THROWS_AS(gaussian_mutate(parent, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(
        gaussian_mutate(parent, std::numeric_limits<double>::quiet_NaN(), 1),
        std::invalid_argument);
}

TEST_CASE("gaussian_mutate mean squared displacement matches sigma^2") {
    const std::vector<LayerShape> shape = {{32, 32, 4}};
    const LowRankGenome parent = random_init(shape, 0.01, 5);
    const double sigma = 0.01;
    double sum_sq = 0.0;
    std::int64_t count = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const LowRankGenome child = gaussian_mutate(parent, sigma, 1000 + trial);
        sum_sq += (child.flatten() - parent.flatten()).squaredNorm();
        count += parent.param_count();
    }
    const double msd = sum_sq / static_cast<double>(count);
    CHECK(msd == doctest::Approx(1e-4).epsilon(0.2));
}

TEST_CASE("crossover endpoints and self-crossover") {
    const LowRankGenome p1 = random_init(kDeskShape, 0.05, 21);
    const LowRankGenome p2 = random_init(kDeskShape, 0.05, 22);
    CHECK(rank_preserving_crossover(p1, p1, 0.37).flatten() == p1.flatten());
    CHECK(rank_preserving_crossover(p1, p2, 1.0).flatten() == p1.flatten());
    CHECK(rank_preserving_crossover(p1, p2, 0.0).flatten() == p2.flatten());

    const LowRankGenome other = random_init({{32, 32, 2}, {32, 32, 2}}, 0.05, 3);
    CHECK_THROWS_AS(rank_preserving_crossover(p1, other, 0.5),
                    std::invalid_argument);
}

TEST_CASE("factor crossover preserves rank where delta averaging does not") {
    const std::vector<LayerShape> shape = {{16, 16, 4}};
    int child_ok = 0;
    int naive_inflated = 0;
    const int trials = 100;
    for (int i = 0; i < trials; ++i) {
        const LowRankGenome p1 = random_init(shape, 0.1, 500 + 2 * i);
        const LowRankGenome p2 = random_init(shape, 0.1, 501 + 2 * i);
        const LowRankGenome child = rank_preserving_crossover(p1, p2, 0.5);
        const Eigen::MatrixXd child_delta = child.layer_b(0) * child.layer_a(0);
        if (numerical_rank(child_delta) <= 4)
            ++child_ok;
        const Eigen::MatrixXd naive = 0.5 * (p1.layer_b(0) * p1.layer_a(0)) +
                                      0.5 * (p2.layer_b(0) * p2.layer_a(0));
        if (numerical_rank(naive) > 4)
            ++naive_inflated;
    }
    CHECK(child_ok == trials);
    CHECK(naive_inflated >= 90);
}

TEST_CASE("sample_gamma lies in [0.3, 0.7] with mean 0.5") {
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double g = sample_gamma(i);
        CHECK(g >= 0.3);
        CHECK(g <= 0.7);
        sum += g;
    }
    CHECK(sum / 10000.0 == doctest::Approx(0.5).epsilon(0.02));
    CHECK(sample_gamma(123) == sample_gamma(123));
}

TEST_CASE("effective_delta applies alpha/r scaling") {
    SUBCASE("zero factors give the zero matrix") {
        const LowRankGenome g({{8, 6, 2}}, 32.0);
        CHECK(g.effective_delta(0).isZero(0.0));
    }
    SUBCASE("rank-1 outer product with alpha == r") {
        // B = e1 (column), A = e1^T (row), alpha = r = 1: a single 1 at (0,0).
        std::vector<LayerShape> shape = {{4, 5, 1}};
        Eigen::VectorXd params = Eigen::VectorXd::Zero(9);
        params[0] = 1.0;  // B(0,0)
        params[4] = 1.0;  // A(0,0)
        const LowRankGenome g =
            LowRankGenome::from_flat(shape, params, /*alpha=*/1.0);
        const Eigen::MatrixXd delta = g.effective_delta(0);
        CHECK(delta(0, 0) == doctest::Approx(1.0));
        CHECK(delta.cwiseAbs().sum() == doctest::Approx(1.0));
    }
    SUBCASE("matches an independent matmul oracle") {
        const LowRankGenome g = random_init({{7, 9, 3}}, 0.5, 77, 32.0);
        const Eigen::MatrixXd delta = g.effective_delta(0);
        const auto b = g.layer_b(0);
        const auto a = g.layer_a(0);
        const double scale = 32.0 / 3.0;
        for (int r = 0; r < 7; ++r)
            for (int c = 0; c < 9; ++c) {
                double acc = 0.0;
                for (int t = 0; t < 3; ++t)
                    acc += b(r, t) * a(t, c);
                CHECK(delta(r, c) == doctest::Approx(scale * acc).epsilon(1e-12));
            }
    }
    SUBCASE("index out of range") {
        const LowRankGenome g = random_init(kDeskShape, 0.01, 1);
        CHECK_THROWS_AS(g.effective_delta(2), std::out_of_range);
    }
}

TEST_CASE("flatten / from_flat round trip is exact") {
    for (int i = 0; i < 20; ++i) {
        const LowRankGenome g = random_init(kDeskShape, 0.3, 900 + i);
        const LowRankGenome back =
            LowRankGenome::from_flat(g.shape(), g.flatten(), g.alpha(), g.id());
        CHECK(back.flatten() == g.flatten());
        CHECK(back.shape() == g.shape());
        for (std::size_t l = 0; l < g.num_layers(); ++l) {
            CHECK(back.layer_b(l) == g.layer_b(l));
            CHECK(back.layer_a(l) == g.layer_a(l));
        }
    }
}

TEST_CASE("crossover child product rank stays within r across random pairs") {
    const std::vector<LayerShape> shape = {{12, 10, 3}};
    for (int i = 0; i < 200; ++i) {
        const LowRankGenome p1 = random_init(shape, 0.2, 3000 + 2 * i);
        const LowRankGenome p2 = random_init(shape, 0.2, 3001 + 2 * i);
        const double gamma = sample_gamma(i);
        const LowRankGenome child = rank_preserving_crossover(p1, p2, gamma);
        CHECK(numerical_rank(child.layer_b(0) * child.layer_a(0)) <= 3);
        CHECK(child.shape() == shape);
    }
}
