#pragma once

#include "dropcol/learners/spec.hpp"
#include "dropcol/matrix.hpp"
#include "dropcol/regime.hpp"

#include <array>
#include <span>
#include <vector>

namespace dropcol {

/// One-vs-rest linear SVM trained by averaged stochastic sub-gradient descent
/// on the L2-regularized hinge loss
///   lambda/2 |w_c|^2 + mean_i max(0, 1 - y_ic (w_c . x_i + b_c)),
/// step size 1 / (1 + lambda t). The stored weights are the running average
/// of the iterates.
class LinearSvm {
public:
    LinearSvm() = default;
    LinearSvm(std::array<std::vector<double>, kNumRegimes> weights, ClassVector bias)
        : weights_(std::move(weights)), bias_(bias) {}

    static LinearSvm fit(const Matrix& x, std::span<const RegimeLabel> y, const LinearSvmSpec& spec,
                         std::uint64_t seed);

    ClassVector scores(std::span<const double> row) const;
    /// Softmax of the scores; monotone in them, so argmax matches predict.
    ClassVector proba_row(std::span<const double> row) const;
    /// argmax of the (softmaxed) per-class scores, ties toward the lower class code.
    RegimeLabel predict_row(std::span<const double> row) const;

    /// Summed one-vs-rest objective of the averaged iterate after each epoch.
    const std::vector<double>& objective_trace() const noexcept { return trace_; }

    /// Summed one-vs-rest objective of this model on (x, y).
    double objective(const Matrix& x, std::span<const RegimeLabel> y, double lambda) const;

    const std::array<std::vector<double>, kNumRegimes>& weights() const noexcept { return weights_; }
    const ClassVector& bias() const noexcept { return bias_; }

    bool operator==(const LinearSvm& o) const { return weights_ == o.weights_ && bias_ == o.bias_; }

private:
    std::array<std::vector<double>, kNumRegimes> weights_;
    ClassVector bias_{};
    std::vector<double> trace_;
};

} // namespace dropcol
