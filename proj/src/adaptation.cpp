#include "evopref/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evopref {

SigmaController::SigmaController(double sigma0, double sigma_min,
                                 double sigma_max)
    : sigma_(sigma0), sigma_min_(sigma_min), sigma_max_(sigma_max) {
    if (!(sigma0 > 0.0) || !(sigma_min > 0.0) || !(sigma_max >= sigma_min))
        throw std::invalid_argument("sigma bounds must satisfy 0 < min <= max");
    sigma_ = std::clamp(sigma_, sigma_min_, sigma_max_);
}

void SigmaController::record_offspring(bool improved) {
    ++trials_;
    if (improved)
        ++successes_;
}

void SigmaController::adapt() {
    if (trials_ > 0) {
        const double rate = static_cast<double>(successes_) / trials_;
        if (rate > kThreshold)
            sigma_ *= kGrow;
        else if (rate < kThreshold)
            sigma_ *= std::pow(kGrow, -0.25);
        // rate == 0.2 exactly: unchanged
    }
    sigma_ = std::clamp(sigma_, sigma_min_, sigma_max_);
    successes_ = 0;
    trials_ = 0;
}

}  // namespace evopref
