#pragma once

#include <array>

namespace dptraj {

/// Privacy budget ledger. The three stage budgets must sum to the total
/// (sequential composition); everything downstream of the three noise
/// injections is post-processing and consumes nothing.
///
/// epsilon_total may be +infinity, which disables noise everywhere (debug
/// mode); the parts are then +infinity as well.
struct PrivacyBudget {
    double epsilon_total = 0.0;
    double epsilon1 = 0.0;  // discretization densities
    double epsilon2 = 0.0;  // first-order model
    double epsilon3 = 0.0;  // second-order model

    bool noise_disabled() const;

    /// True when epsilon1 + epsilon2 + epsilon3 equals epsilon_total to
    /// 1e-12 relative tolerance.
    bool conserved() const;
};

inline constexpr std::array<double, 3> kDefaultBudgetRatios = {0.2, 0.4, 0.4};

/// Splits epsilon_total proportionally to ratios (r1, r2, r3).
/// Ratios must be positive and sum to 1 within 1e-9; epsilon_total must be
/// positive (+infinity allowed). Throws std::invalid_argument otherwise.
PrivacyBudget split_budget(double epsilon_total,
                           const std::array<double, 3>& ratios = kDefaultBudgetRatios);

}  // namespace dptraj
