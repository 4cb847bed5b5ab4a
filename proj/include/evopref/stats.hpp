#pragma once

#include <string>
#include <vector>

namespace evopref {

/// Per-seed metric values of two algorithms on the same problem instances.
struct PairedSamples {
    std::vector<double> a;
    std::vector<double> b;
};

struct WilcoxonResult {
    double w_plus = 0.0;
    double w_minus = 0.0;
    double statistic = 0.0;  // min(W+, W-)
    double p_value = 1.0;    // two-sided
    int n_used = 0;          // pairs after dropping zero differences
    int n_zero = 0;          // dropped pairs
    bool exact = false;      // exact distribution (n_used <= 25) vs normal approx
    bool degenerate = false; // all differences were zero
};

/// Two-sided Wilcoxon signed-rank test. Zero differences are dropped (count
/// reported); ties in |difference| get average ranks. Exact p by signed-rank
/// distribution recursion for n <= 25, normal approximation with continuity
/// and tie correction beyond.
WilcoxonResult wilcoxon_signed_rank(const PairedSamples& samples);

struct FriedmanResult {
    double chi2 = 0.0;
    int df = 0;
    double p_value = 1.0;
};

/// Friedman rank test over an n_blocks x k_algos matrix (blocks = seeds).
FriedmanResult friedman_test(const std::vector<std::vector<double>>& matrix);

/// Holm step-down adjustment; result in the original order.
std::vector<double> holm_correction(const std::vector<double>& pvals);

enum class EffectMagnitude { negligible, small, medium, large };

struct EffectSize {
    double a12 = 0.5;
    EffectMagnitude magnitude = EffectMagnitude::negligible;
};

const char* to_string(EffectMagnitude m);

/// Vargha-Delaney A12: P(x > y) + 0.5 P(x == y) for random draws.
EffectSize vargha_delaney_a12(const std::vector<double>& x,
                              const std::vector<double>& y);

struct MedianIqr {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

/// Median and quartiles by the inclusive method (quartile = median of the
/// half including the middle element when n is odd).
MedianIqr median_iqr(std::vector<double> values);

/// Upper-tail probability of the chi-square distribution.
double chi_square_survival(double x, int df);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace evopref
