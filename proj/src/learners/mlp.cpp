#include "dropcol/learners/mlp.hpp"

#include "dropcol/error.hpp"
#include "dropcol/kernels/kernels.hpp"
#include "dropcol/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dropcol {

namespace {

// Activations of every layer for one batch; acts[0] is the input.
struct Workspace {
    std::vector<std::vector<double>> acts;
    std::vector<double> delta, delta_prev, w_t;
};

void forward_batch(const std::vector<Mlp::Layer>& layers, const double* x, std::size_t m, Workspace& ws) {
    ws.acts.resize(layers.size() + 1);
    ws.acts[0].assign(x, x + m * layers.front().inputs);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        auto& out = ws.acts[l + 1];
        out.resize(m * layer.outputs);
        for (std::size_t i = 0; i < m; ++i) std::copy(layer.bias.begin(), layer.bias.end(), out.begin() + i * layer.outputs);
        kernels::gemm_nn(ws.acts[l].data(), layer.weights.data(), out.data(), m, layer.outputs, layer.inputs, true);
        if (l + 1 < layers.size()) {
            for (auto& v : out) v = v > 0.0 ? v : 0.0;
        }
    }
}

// Replaces logits with softmax rows; returns summed cross-entropy when labels are given.
double softmax_rows(std::vector<double>& logits, std::size_t m, std::span<const RegimeLabel> y) {
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double* z = logits.data() + i * kNumRegimes;
        const double top = *std::max_element(z, z + kNumRegimes);
        double total = 0.0;
        for (std::size_t c = 0; c < kNumRegimes; ++c) total += std::exp(z[c] - top);
        const double log_total = std::log(total);
        if (!y.empty()) loss += log_total - (z[code(y[i])] - top);
        for (std::size_t c = 0; c < kNumRegimes; ++c) z[c] = std::exp(z[c] - top - log_total);
    }
    return loss;
}

// Gradient of mean cross-entropy for rows x[0..m). grad layers must be shaped like the network.
double backprop(const std::vector<Mlp::Layer>& layers, const double* x, std::span<const RegimeLabel> y,
                std::size_t m, std::vector<Mlp::Layer>& grad, Workspace& ws) {
    forward_batch(layers, x, m, ws);
    auto& probs = ws.acts.back();
    const double loss = softmax_rows(probs, m, y) / static_cast<double>(m);

    ws.delta = probs;
    for (std::size_t i = 0; i < m; ++i) ws.delta[i * kNumRegimes + code(y[i])] -= 1.0;
    for (auto& v : ws.delta) v /= static_cast<double>(m);

    for (std::size_t l = layers.size(); l-- > 0;) {
        const auto& layer = layers[l];
        auto& g = grad[l];
        kernels::gemm_tn(ws.acts[l].data(), ws.delta.data(), g.weights.data(), layer.inputs, layer.outputs, m);
        std::fill(g.bias.begin(), g.bias.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < layer.outputs; ++j) g.bias[j] += ws.delta[i * layer.outputs + j];
        if (l == 0) break;

        ws.w_t.resize(layer.inputs * layer.outputs);
        for (std::size_t p = 0; p < layer.inputs; ++p)
            for (std::size_t j = 0; j < layer.outputs; ++j) ws.w_t[j * layer.inputs + p] = layer.weights[p * layer.outputs + j];
        ws.delta_prev.resize(m * layer.inputs);
        kernels::gemm_nn(ws.delta.data(), ws.w_t.data(), ws.delta_prev.data(), m, layer.inputs, layer.outputs);
        const auto& a = ws.acts[l];
        for (std::size_t i = 0; i < ws.delta_prev.size(); ++i)
            if (!(a[i] > 0.0)) ws.delta_prev[i] = 0.0;
        std::swap(ws.delta, ws.delta_prev);
    }
    return loss;
}

std::vector<Mlp::Layer> zeros_like(const std::vector<Mlp::Layer>& layers) {
    auto out = layers;
    for (auto& l : out) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    return out;
}

} // namespace

Mlp Mlp::initialize(std::size_t n_inputs, std::span<const int> hidden_layers, std::uint64_t seed) {
    if (n_inputs == 0) throw ConfigError("MLP needs at least one input feature");
    Rng rng(seed);
    std::vector<Layer> layers;
    std::size_t inputs = n_inputs;
    auto add = [&](std::size_t outputs) {
        Layer l;
        l.inputs = inputs;
        l.outputs = outputs;
        l.weights.resize(inputs * outputs);
        const double scale = std::sqrt(2.0 / static_cast<double>(inputs));
        for (auto& w : l.weights) w = scale * rng.normal();
        l.bias.assign(outputs, 0.0);
        layers.push_back(std::move(l));
        inputs = outputs;
    };
    for (int width : hidden_layers) {
        if (width < 1) throw ConfigError("MLP layer widths must be positive");
        add(static_cast<std::size_t>(width));
    }
    add(kNumRegimes);
    return Mlp(std::move(layers));
}

Mlp Mlp::fit(const Matrix& x, std::span<const RegimeLabel> y, const MlpSpec& spec, std::uint64_t seed) {
    if (spec.max_iterations < 0) throw ConfigError("MLP max_iterations must be >= 0");
    if (!(spec.learning_rate > 0.0)) throw ConfigError("MLP learning_rate must be > 0");
    if (spec.batch_size < 1) throw ConfigError("MLP batch_size must be >= 1");
    if (x.rows() == 0) throw FitError("MLP: empty training set");

    Rng rng(seed);
    Mlp net = initialize(x.cols(), spec.hidden_layers, rng.next_u64());
    auto grad = zeros_like(net.layers_);
    Workspace ws;

    const std::size_t n = x.rows();
    const std::size_t f = x.cols();
    const auto batch = static_cast<std::size_t>(spec.batch_size);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> xb(batch * f);
    std::vector<RegimeLabel> yb(batch);

    for (int epoch = 0; epoch < spec.max_iterations; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t m = std::min(batch, n - start);
            for (std::size_t i = 0; i < m; ++i) {
                const auto r = x.row(order[start + i]);
                std::copy(r.begin(), r.end(), xb.begin() + i * f);
                yb[i] = y[order[start + i]];
            }
            const double loss = backprop(net.layers_, xb.data(), std::span(yb).first(m), m, grad, ws);
            epoch_loss += loss * static_cast<double>(m);
            for (std::size_t l = 0; l < net.layers_.size(); ++l) {
                auto& layer = net.layers_[l];
                for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= spec.learning_rate * grad[l].weights[i];
                for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= spec.learning_rate * grad[l].bias[i];
            }
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss))
            throw FitError("MLP training diverged (non-finite loss) at epoch " + std::to_string(epoch + 1));
        net.trace_.push_back(epoch_loss);
    }
    return net;
}

Mlp::Gradient Mlp::loss_and_gradient(const Matrix& x, std::span<const RegimeLabel> y) const {
    Gradient g;
    g.layers = zeros_like(layers_);
    Workspace ws;
    g.loss = backprop(layers_, x.data().data(), y, x.rows(), g.layers, ws);
    return g;
}

Matrix Mlp::forward(const Matrix& x) const {
    if (x.cols() != layers_.front().inputs) throw ConfigError("MLP: input has wrong feature count");
    Workspace ws;
    forward_batch(layers_, x.data().data(), x.rows(), ws);
    softmax_rows(ws.acts.back(), x.rows(), {});
    return Matrix(x.rows(), kNumRegimes, std::move(ws.acts.back()));
}

ClassVector Mlp::proba_row(std::span<const double> row) const {
    const Matrix one(1, row.size(), std::vector<double>(row.begin(), row.end()));
    const auto out = forward(one);
    ClassVector p{};
    std::copy(out.data().begin(), out.data().end(), p.begin());
    return p;
}

RegimeLabel Mlp::predict_row(std::span<const double> row) const { return regime_from_code(argmax_low(proba_row(row))); }

} // namespace dropcol
