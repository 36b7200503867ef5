#pragma once

#include "dropcol/learners/spec.hpp"
#include "dropcol/matrix.hpp"
#include "dropcol/regime.hpp"

#include <array>
#include <span>
#include <vector>

namespace dropcol {

/// Gaussian naive Bayes. Every class variance is inflated by
/// var_smoothing * (largest per-feature variance of the training data).
class GaussianNB {
public:
    struct ClassStats {
        bool present = false;
        double log_prior = 0.0;
        std::vector<double> mean;
        std::vector<double> var;
        bool operator==(const ClassStats&) const = default;
    };

    GaussianNB() = default;
    explicit GaussianNB(std::array<ClassStats, kNumRegimes> classes) : classes_(std::move(classes)) {}

    /// Classes with no training rows get zero posterior.
    static GaussianNB fit(const Matrix& x, std::span<const RegimeLabel> y, const GaussianNBSpec& spec);

    /// Joint log-likelihood per class; -inf for absent classes.
    ClassVector log_joint(std::span<const double> row) const;
    ClassVector proba_row(std::span<const double> row) const;
    RegimeLabel predict_row(std::span<const double> row) const;

    const std::array<ClassStats, kNumRegimes>& classes() const noexcept { return classes_; }
    bool operator==(const GaussianNB&) const = default;

private:
    std::array<ClassStats, kNumRegimes> classes_{};
};

} // namespace dropcol
