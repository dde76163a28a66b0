#include "dptraj/laplace.hpp"

#include <cmath>
#include <stdexcept>

namespace dptraj {

double laplace_from_uniform(double scale, double u) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("laplace scale must be positive and finite");
    }
    if (!(u > 0.0) || !(u < 1.0)) {
        throw std::invalid_argument("laplace uniform input must lie in (0, 1)");
    }
    const double centered = u - 0.5;
    const double sign = centered > 0.0 ? 1.0 : (centered < 0.0 ? -1.0 : 0.0);
    return -scale * sign * std::log(1.0 - 2.0 * std::abs(centered));
}

double laplace_sample(double scale, Rng& rng) {
    return laplace_from_uniform(scale, rng.uniform01());
}

}  // namespace dptraj
