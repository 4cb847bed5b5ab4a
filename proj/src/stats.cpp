#include "evopref/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace evopref {

namespace {

// Regularized lower incomplete gamma P(a, x) by series expansion (x < a + 1).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Average ranks of |values|; ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]])
            ++j;
        const double shared = 0.5 * (i + j) + 1.0;  // mean of 1-based positions
        for (std::size_t t = i; t <= j; ++t)
            ranks[order[t]] = shared;
        i = j + 1;
    }
    return ranks;
}

// Exact tail P(W+ <= w) for the signed-rank statistic over the observed
// ranks. Ranks are doubled so average ranks become integers; the count of
// sign assignments reaching each doubled sum is built by convolution.
double exact_signed_rank_tail(const std::vector<double>& ranks, double w) {
    std::vector<int> scaled(ranks.size());
    int total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        scaled[i] = static_cast<int>(std::llround(2.0 * ranks[i]));
        total += scaled[i];
    }
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    int reach = 0;
    for (int s : scaled) {
        reach = std::min(total, reach + s);
        for (int v = reach; v >= s; --v)
            count[v] += count[v - s];
    }
    const double cutoff = 2.0 * w + 1e-9;
    double below = 0.0;
    double all = 0.0;
    for (int v = 0; v <= total; ++v) {
        all += count[v];
        if (v <= cutoff)
            below += count[v];
    }
    return below / all;
}

}  // namespace

double chi_square_survival(double x, int df) {
    if (df <= 0)
        throw std::invalid_argument("chi-square needs positive df");
    if (x <= 0.0)
        return 1.0;
    const double a = 0.5 * df;
    const double half = 0.5 * x;
    if (half < a + 1.0)
        return 1.0 - gamma_p_series(a, half);
    return gamma_q_cf(a, half);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

WilcoxonResult wilcoxon_signed_rank(const PairedSamples& samples) {
    if (samples.a.size() != samples.b.size())
        throw std::invalid_argument("paired samples differ in length");
    WilcoxonResult res;
    std::vector<double> diffs;
    diffs.reserve(samples.a.size());
    for (std::size_t i = 0; i < samples.a.size(); ++i) {
        const double d = samples.a[i] - samples.b[i];
        if (!std::isfinite(d))
            throw std::invalid_argument("non-finite values in paired samples");
        if (d == 0.0)
            ++res.n_zero;
        else
            diffs.push_back(d);
    }
    res.n_used = static_cast<int>(diffs.size());
    if (res.n_used == 0) {
        res.degenerate = true;
        res.p_value = 1.0;
        return res;
    }
    if (res.n_used < 5)
        throw std::invalid_argument(
            "need at least 5 nonzero differences for the signed-rank test");

    std::vector<double> abs_d(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i)
        abs_d[i] = std::abs(diffs[i]);
    const std::vector<double> ranks = average_ranks(abs_d);
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        if (diffs[i] > 0.0)
            res.w_plus += ranks[i];
        else
            res.w_minus += ranks[i];
    }
    res.statistic = std::min(res.w_plus, res.w_minus);

    const int n = res.n_used;
    if (n <= 25) {
        res.exact = true;
        res.p_value = std::min(1.0, 2.0 * exact_signed_rank_tail(ranks, res.statistic));
    } else {
        const double mean = n * (n + 1) / 4.0;
        // Tie correction: sum over tie groups of (t^3 - t) / 48.
        double tie_term = 0.0;
        std::vector<double> sorted_abs = abs_d;
        std::sort(sorted_abs.begin(), sorted_abs.end());
        std::size_t i = 0;
        while (i < sorted_abs.size()) {
            std::size_t j = i;
            while (j + 1 < sorted_abs.size() && sorted_abs[j + 1] == sorted_abs[i])
                ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += (t * t * t - t) / 48.0;
            i = j + 1;
        }
        const double var = n * (n + 1) * (2.0 * n + 1) / 24.0 - tie_term;
        if (var <= 0.0) {
            res.degenerate = true;
            res.p_value = 1.0;
            return res;
        }
        const double z = (res.statistic - mean + 0.5) / std::sqrt(var);
        res.p_value = std::min(1.0, 2.0 * normal_cdf(z));
    }
    return res;
}

FriedmanResult friedman_test(const std::vector<std::vector<double>>& matrix) {
    const int n = static_cast<int>(matrix.size());
    if (n < 2)
        throw std::invalid_argument("Friedman test needs at least 2 blocks");
    const int k = static_cast<int>(matrix.front().size());
    if (k < 3)
        throw std::invalid_argument("Friedman test needs at least 3 algorithms");
    for (const auto& row : matrix)
        if (static_cast<int>(row.size()) != k)
            throw std::invalid_argument("ragged Friedman matrix");

    std::vector<double> mean_rank(k, 0.0);
    for (const auto& row : matrix) {
        const std::vector<double> r = average_ranks(row);
        for (int j = 0; j < k; ++j)
            mean_rank[j] += r[j];
    }
    for (double& r : mean_rank)
        r /= n;

    double sum_sq = 0.0;
    const double center = (k + 1) / 2.0;
    for (int j = 0; j < k; ++j)
        sum_sq += (mean_rank[j] - center) * (mean_rank[j] - center);

    FriedmanResult res;
    res.chi2 = 12.0 * n / (k * (k + 1.0)) * sum_sq;
    res.df = k - 1;
    res.p_value = res.chi2 > 0.0 ? chi_square_survival(res.chi2, res.df) : 1.0;
    return res;
}

std::vector<double> holm_correction(const std::vector<double>& pvals) {
    const int m = static_cast<int>(pvals.size());
    for (double p : pvals)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("p-values must lie in [0,1]");
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return pvals[a] < pvals[b];
    });
    std::vector<double> adjusted(m, 0.0);
    double running = 0.0;
    for (int i = 0; i < m; ++i) {
        const double scaled = std::min(1.0, (m - i) * pvals[order[i]]);
        running = std::max(running, scaled);
        adjusted[order[i]] = running;
    }
    return adjusted;
}

const char* to_string(EffectMagnitude m) {
    switch (m) {
        case EffectMagnitude::negligible: return "negligible";
        case EffectMagnitude::small: return "small";
        case EffectMagnitude::medium: return "medium";
        case EffectMagnitude::large: return "large";
    }
    return "unknown";
}

EffectSize vargha_delaney_a12(const std::vector<double>& x,
                              const std::vector<double>& y) {
    if (x.empty() || y.empty())
        throw std::invalid_argument("effect size needs nonempty samples");
    double wins = 0.0;
    for (double xi : x)
        for (double yj : y) {
            if (xi > yj)
                wins += 1.0;
            else if (xi == yj)
                wins += 0.5;
        }
    EffectSize e;
    e.a12 = wins / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
    const double d = std::abs(e.a12 - 0.5);
    if (d > 0.21)
        e.magnitude = EffectMagnitude::large;
    else if (d > 0.14)
        e.magnitude = EffectMagnitude::medium;
    else if (d > 0.06)
        e.magnitude = EffectMagnitude::small;
    else
        e.magnitude = EffectMagnitude::negligible;
    return e;
}

MedianIqr median_iqr(std::vector<double> values) {
    if (values.empty())
        throw std::invalid_argument("median of an empty list");
    std::sort(values.begin(), values.end());
    const auto median_of = [](const std::vector<double>& v, std::size_t lo,
                              std::size_t hi) {  // inclusive range
        const std::size_t len = hi - lo + 1;
        const std::size_t mid = lo + len / 2;
        if (len % 2 == 1)
            return v[mid];
        return 0.5 * (v[mid - 1] + v[mid]);
    };
    const std::size_t n = values.size();
    MedianIqr r;
    r.median = median_of(values, 0, n - 1);
    if (n == 1) {
        r.q1 = r.q3 = values[0];
        return r;
    }
    // Inclusive method: halves include the middle element when n is odd.
    const std::size_t lower_hi = (n % 2 == 1) ? n / 2 : n / 2 - 1;
    const std::size_t upper_lo = n / 2;
    r.q1 = median_of(values, 0, lower_hi);
    r.q3 = median_of(values, upper_lo, n - 1);
    return r;
}

}  // namespace evopref
