#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evopref/rng.hpp"
#include "evopref/stats.hpp"

using namespace evopref;

namespace {

// Full 2^n enumeration oracle for the two-sided exact signed-rank p-value,
// sharing only the rank definition with the implementation.
double wilcoxon_oracle_p(const std::vector<double>& a,
                         const std::vector<double>& b) {
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i])
            diffs.push_back(a[i] - b[i]);
    const int n = static_cast<int>(diffs.size());
    std::vector<double> abs_d(n);
    for (int i = 0; i < n; ++i)
        abs_d[i] = std::abs(diffs[i]);
    // Average ranks.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return abs_d[x] < abs_d[y]; });
    std::vector<double> rank(n);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]])
            ++j;
        const double shared = 0.5 * (i + j) + 1.0;
        for (int t = i; t <= j; ++t)
            rank[order[t]] = shared;
        i = j + 1;
    }
    double w_plus = 0.0, total = 0.0;
    for (int t = 0; t < n; ++t) {
        total += rank[t];
        if (diffs[t] > 0)
            w_plus += rank[t];
    }
    const double w_obs = std::min(w_plus, total - w_plus);
    long hits = 0;
    const long combos = 1L << n;
    for (long mask = 0; mask < combos; ++mask) {
        double w = 0.0;
        for (int t = 0; t < n; ++t)
            if (mask & (1L << t))
                w += rank[t];
        if (w <= w_obs + 1e-9 || w >= total - w_obs - 1e-9)
            ++hits;
    }
    return std::min(1.0, static_cast<double>(hits) / combos);
}

}  // namespace

TEST_CASE("wilcoxon worked examples") {
    SUBCASE("n=5, all positive differences") {
        const PairedSamples s{{2, 3, 4, 5, 6}, {1, 2, 3, 4, 5}};
        const WilcoxonResult r = wilcoxon_signed_rank(s);
        CHECK(r.exact);
        CHECK(r.p_value == doctest::Approx(0.0625).epsilon(1e-12));
        CHECK(r.statistic == 0.0);
    }
    SUBCASE("identical samples degenerate to p = 1") {
        const PairedSamples s{{1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}};
        const WilcoxonResult r = wilcoxon_signed_rank(s);
        CHECK(r.degenerate);
        CHECK(r.p_value == 1.0);
        CHECK(r.n_zero == 5);
    }
    SUBCASE("swapping the samples keeps p, flips the smaller side") {
        const PairedSamples s{{5, 1, 7, 3, 9, 2}, {4, 2, 5, 1, 6, 4}};
        const WilcoxonResult fwd = wilcoxon_signed_rank(s);
        const WilcoxonResult rev = wilcoxon_signed_rank({s.b, s.a});
        CHECK(fwd.p_value == doctest::Approx(rev.p_value).epsilon(1e-12));
        CHECK(fwd.w_plus == doctest::Approx(rev.w_minus).epsilon(1e-12));
        CHECK(fwd.w_minus == doctest::Approx(rev.w_plus).epsilon(1e-12));
    }
    SUBCASE("fewer than 5 nonzero differences is an error") {
        CHECK_THROWS_AS(
            wilcoxon_signed_rank({{1, 2, 3, 4}, {2, 3, 4, 5}}),
            std::invalid_argument);
    }
}

TEST_CASE("wilcoxon exact matches the 2^n enumeration oracle") {
    Rng rng(13331);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform_int(0, 7));  // n <= 12
        std::vector<double> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            // Coarse grid so ties between |differences| actually occur.
            a[i] = rng.uniform_int(0, 8) / 4.0;
            b[i] = rng.uniform_int(0, 8) / 4.0;
        }
        bool any_diff = false;
        int nonzero = 0;
        for (int i = 0; i < n; ++i)
            if (a[i] != b[i]) {
                any_diff = true;
                ++nonzero;
            }
        if (!any_diff || nonzero < 5)
            continue;
        const WilcoxonResult r = wilcoxon_signed_rank({a, b});
        REQUIRE(r.exact);
        CHECK(r.p_value ==
              doctest::Approx(wilcoxon_oracle_p(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("wilcoxon normal approximation is sane for n > 25") {
    Rng rng(555);
    const int n = 40;
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        b[i] = rng.uniform01();
        a[i] = b[i] + rng.uniform01() - 0.25;  // shifted: should reject
    }
    const WilcoxonResult r = wilcoxon_signed_rank({a, b});
    CHECK(!r.exact);
    CHECK(r.p_value < 0.01);

    // Unshifted pairs: large p expected.
    for (int i = 0; i < n; ++i) {
        b[i] = rng.uniform01();
        a[i] = b[i] + (rng.uniform01() - 0.5) * 0.01;
    }
    const WilcoxonResult r2 = wilcoxon_signed_rank({a, b});
    CHECK(r2.p_value > 0.05);
}

TEST_CASE("friedman hand example reproduces chi2 = 8, df = 2") {
    // Algo A best in every block, C worst: ranks are identical per block.
    const std::vector<std::vector<double>> matrix = {
        {3.0, 2.0, 1.0}, {30.0, 20.0, 10.0}, {0.3, 0.2, 0.1}, {9.0, 8.0, 7.0}};
    const FriedmanResult r = friedman_test(matrix);
    CHECK(r.chi2 == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(r.df == 2);
    CHECK(r.p_value == doctest::Approx(std::exp(-4.0)).epsilon(1e-9));
}

TEST_CASE("friedman is invariant to column permutations and monotone maps") {
    Rng rng(99);
    std::vector<std::vector<double>> matrix(8, std::vector<double>(4));
    for (auto& row : matrix)
        for (double& v : row)
            v = rng.uniform01();
    const double base = friedman_test(matrix).chi2;

    std::vector<std::vector<double>> permuted = matrix;
    for (auto& row : permuted)
        std::rotate(row.begin(), row.begin() + 1, row.end());
    CHECK(friedman_test(permuted).chi2 == doctest::Approx(base).epsilon(1e-12));

    std::vector<std::vector<double>> mapped = matrix;
    for (auto& row : mapped)
        for (double& v : row)
            v = std::exp(3.0 * v) + 7.0;  // strictly monotone
    CHECK(friedman_test(mapped).chi2 == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("friedman degenerate and error cases") {
    const std::vector<std::vector<double>> equal_rows = {
        {1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}};
    const FriedmanResult r = friedman_test(equal_rows);
    CHECK(r.chi2 == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK_THROWS_AS(friedman_test({{1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(friedman_test({{1.0, 2.0}, {2.0, 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("holm correction worked examples") {
    CHECK(holm_correction({0.2}) == std::vector<double>{0.2});
    const auto adj = holm_correction({0.01, 0.04, 0.03});
    REQUIRE(adj.size() == 3);
    CHECK(adj[0] == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(adj[1] == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(adj[2] == doctest::Approx(0.06).epsilon(1e-12));
    const auto capped = holm_correction({1.0, 0.5});
    CHECK(capped[0] == 1.0);
    CHECK_THROWS_AS(holm_correction({1.5}), std::invalid_argument);
}

TEST_CASE("holm adjusted values dominate raw values and stay capped") {
    Rng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + static_cast<int>(rng.uniform_int(0, 9));
        std::vector<double> p(m);
        for (double& v : p)
            v = rng.uniform01();
        const auto adj = holm_correction(p);
        for (int i = 0; i < m; ++i) {
            CHECK(adj[i] >= p[i]);
            CHECK(adj[i] <= 1.0);
        }
    }
}

TEST_CASE("vargha-delaney worked examples") {
    const EffectSize same = vargha_delaney_a12({1, 2, 3}, {1, 2, 3});
    CHECK(same.a12 == doctest::Approx(0.5));
    CHECK(same.magnitude == EffectMagnitude::negligible);

    const EffectSize all = vargha_delaney_a12({10, 11}, {1, 2});
    CHECK(all.a12 == 1.0);
    CHECK(all.magnitude == EffectMagnitude::large);

    const EffectSize ties = vargha_delaney_a12({1, 2, 3}, {2, 2, 2});
    CHECK(ties.a12 == doctest::Approx(0.5));
}

TEST_CASE("a12 magnitude thresholds") {
    auto mag = [](double a12) {
        // Build samples achieving the target A12 exactly: x has a12*100
        // wins out of 100 comparisons.
        std::vector<double> x, y{0.5};
        const int wins = static_cast<int>(std::round(a12 * 100));
        for (int i = 0; i < wins; ++i)
            x.push_back(1.0);
        for (int i = wins; i < 100; ++i)
            x.push_back(0.0);
        return vargha_delaney_a12(x, y).magnitude;
    };
    CHECK(mag(0.72) == EffectMagnitude::large);
    CHECK(mag(0.28) == EffectMagnitude::large);
    CHECK(mag(0.65) == EffectMagnitude::medium);
    CHECK(mag(0.36 - 0.01) == EffectMagnitude::medium);
    CHECK(mag(0.57) == EffectMagnitude::small);
    CHECK(mag(0.5) == EffectMagnitude::negligible);
}

TEST_CASE("a12 symmetry: A(x,y) + A(y,x) = 1") {
    Rng rng(321);
    for (int trial = 0; trial < 300; ++trial) {
        const int nx = 1 + static_cast<int>(rng.uniform_int(0, 20));
        const int ny = 1 + static_cast<int>(rng.uniform_int(0, 20));
        std::vector<double> x(nx), y(ny);
        for (double& v : x)
            v = rng.uniform_int(0, 6) / 3.0;  // ties likely
        for (double& v : y)
            v = rng.uniform_int(0, 6) / 3.0;
        const double fwd = vargha_delaney_a12(x, y).a12;
        const double rev = vargha_delaney_a12(y, x).a12;
        CHECK(fwd + rev == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("median and inclusive quartiles") {
    const MedianIqr r = median_iqr({1, 2, 3, 4, 5});
    CHECK(r.median == 3.0);
    CHECK(r.q1 == 2.0);
    CHECK(r.q3 == 4.0);

    const MedianIqr one = median_iqr({7.5});
    CHECK(one.median == 7.5);
    CHECK(one.q1 == 7.5);
    CHECK(one.q3 == 7.5);

    const MedianIqr flat = median_iqr({2, 2, 2, 2});
    CHECK(flat.median == 2.0);
    CHECK(flat.q1 == 2.0);
    CHECK(flat.q3 == 2.0);

    const MedianIqr even = median_iqr({4, 1, 3, 2});
    CHECK(even.median == 2.5);
    CHECK(even.q1 == 1.5);
    CHECK(even.q3 == 3.5);

    CHECK_THROWS_AS(median_iqr({}), std::invalid_argument);
    CHECK(median_iqr({3, 1, 2}).q1 <= median_iqr({3, 1, 2}).median);
}

TEST_CASE("chi-square survival sanity values") {
    CHECK(chi_square_survival(8.0, 2) == doctest::Approx(std::exp(-4.0)).epsilon(1e-10));
    // df=1: P(X > x) = erfc(sqrt(x/2)).
    CHECK(chi_square_survival(3.841, 1) ==
          doctest::Approx(std::erfc(std::sqrt(3.841 / 2.0))).epsilon(1e-10));
    CHECK(chi_square_survival(0.0, 3) == 1.0);
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-6));
}
