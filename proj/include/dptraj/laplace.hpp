#pragma once

#include "dptraj/rng.hpp"

namespace dptraj {

/// Zero-mean Laplace variate from a single uniform draw u in (0,1):
///   x = -scale * sgn(u - 0.5) * ln(1 - 2|u - 0.5|)
/// Inverse-CDF form keeps noise streams reproducible across platforms.
double laplace_from_uniform(double scale, double u);

/// Samples Laplace(0, scale). Throws std::invalid_argument for scale <= 0
/// or non-finite scale.
double laplace_sample(double scale, Rng& rng);

}  // namespace dptraj
