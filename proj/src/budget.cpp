#include "dptraj/budget.hpp"

#include <cmath>
#include <stdexcept>

namespace dptraj {

bool PrivacyBudget::noise_disabled() const { return std::isinf(epsilon_total); }

bool PrivacyBudget::conserved() const {
    if (noise_disabled()) {
        return std::isinf(epsilon1) && std::isinf(epsilon2) && std::isinf(epsilon3);
    }
    const double sum = epsilon1 + epsilon2 + epsilon3;
    return std::abs(sum - epsilon_total) <= 1e-12 * epsilon_total;
}

PrivacyBudget split_budget(double epsilon_total, const std::array<double, 3>& ratios) {
    if (!(epsilon_total > 0.0)) {
        throw std::invalid_argument("epsilon_total must be positive");
    }
    double ratio_sum = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw std::invalid_argument("budget ratios must be positive and finite");
        }
        ratio_sum += r;
    }
    if (std::abs(ratio_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("budget ratios must sum to 1");
    }
    PrivacyBudget b;
    b.epsilon_total = epsilon_total;
    b.epsilon1 = ratios[0] * epsilon_total;
    b.epsilon2 = ratios[1] * epsilon_total;
    b.epsilon3 = ratios[2] * epsilon_total;
    return b;
}

}  // namespace dptraj
