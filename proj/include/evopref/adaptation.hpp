#pragma once

namespace evopref {

/// Rechenberg 1/5 success rule step-size controller. Offspring outcomes are
/// recorded over a window of generations; adapt() then grows sigma by 1.2
/// when more than 20% improved, shrinks it by 1.2^(-1/4) when fewer than 20%
/// did, and leaves it unchanged at exactly 20% (or on an empty window).
class SigmaController {
 public:
    explicit SigmaController(double sigma0, double sigma_min = 1e-6,
                             double sigma_max = 1.0);

    void record_offspring(bool improved);
    void adapt();

    double sigma() const { return sigma_; }
    int successes() const { return successes_; }
    int trials() const { return trials_; }
    double success_rate() const {
        return trials_ > 0 ? static_cast<double>(successes_) / trials_ : 0.0;
    }

    static constexpr double kGrow = 1.2;
    static constexpr double kThreshold = 0.2;

 private:
    double sigma_;
    double sigma_min_;
    double sigma_max_;
    int successes_ = 0;
    int trials_ = 0;
};

}  // namespace evopref
