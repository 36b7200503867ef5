#pragma once

#include "dropcol/learners/spec.hpp"
#include "dropcol/matrix.hpp"
#include "dropcol/regime.hpp"

#include <span>
#include <vector>

namespace dropcol {

/// Feed-forward network: ReLU hidden layers, softmax output over the four regimes.
class Mlp {
public:
    struct Layer {
        std::size_t inputs = 0;
        std::size_t outputs = 0;
        std::vector<double> weights; ///< inputs x outputs, row-major
        std::vector<double> bias;    ///< outputs
        bool operator==(const Layer&) const = default;
    };

    struct Gradient {
        double loss = 0.0;
        std::vector<Layer> layers; ///< same shapes as the network
    };

    Mlp() = default;
    explicit Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {}

    /// He-normal weights, zero biases.
    static Mlp initialize(std::size_t n_inputs, std::span<const int> hidden_layers, std::uint64_t seed);

    /// Mini-batch gradient descent on mean cross-entropy for spec.max_iterations
    /// epochs, reshuffling every epoch. Throws FitError if the loss stops being finite.
    static Mlp fit(const Matrix& x, std::span<const RegimeLabel> y, const MlpSpec& spec, std::uint64_t seed);

    /// Mean cross-entropy over the rows and its gradient.
    Gradient loss_and_gradient(const Matrix& x, std::span<const RegimeLabel> y) const;

    /// Softmax outputs, one row per input row.
    Matrix forward(const Matrix& x) const;
    ClassVector proba_row(std::span<const double> row) const;
    RegimeLabel predict_row(std::span<const double> row) const;

    std::vector<Layer>& layers() noexcept { return layers_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    /// Mean training loss after each epoch.
    const std::vector<double>& loss_trace() const noexcept { return trace_; }

    bool operator==(const Mlp& o) const { return layers_ == o.layers_; }

private:
    std::vector<Layer> layers_;
    std::vector<double> trace_;
};

} // namespace dropcol
