#include "dropcol/learners/linear_svm.hpp"

#include "dropcol/error.hpp"
#include "dropcol/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dropcol {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

double LinearSvm::objective(const Matrix& x, std::span<const RegimeLabel> y, double lambda) const {
    double total = 0.0;
    for (std::size_t c = 0; c < kNumRegimes; ++c) {
        const auto& w = weights_[c];
        double hinge = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double t = code(y[i]) == c ? 1.0 : -1.0;
            hinge += std::max(0.0, 1.0 - t * (dot(w, x.row(i)) + bias_[c]));
        }
        total += 0.5 * lambda * dot(w, w) + hinge / static_cast<double>(x.rows());
    }
    return total;
}

LinearSvm LinearSvm::fit(const Matrix& x, std::span<const RegimeLabel> y, const LinearSvmSpec& spec,
                         std::uint64_t seed) {
    if (spec.epochs < 1) throw ConfigError("SVM epochs must be >= 1");
    if (!(spec.regularization > 0.0)) throw ConfigError("SVM regularization must be > 0");
    if (x.rows() == 0) throw FitError("SVM: empty training set");
    const double lambda = spec.regularization;
    const std::size_t f = x.cols();
    const std::size_t n = x.rows();

    std::array<std::vector<double>, kNumRegimes> w, w_avg;
    ClassVector b{}, b_avg{};
    for (std::size_t c = 0; c < kNumRegimes; ++c) {
        w[c].assign(f, 0.0);
        w_avg[c].assign(f, 0.0);
    }

    LinearSvm model;
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    double t = 0.0;
    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (auto i : order) {
            t += 1.0;
            const double eta = 1.0 / (1.0 + lambda * t);
            const auto row = x.row(i);
            for (std::size_t c = 0; c < kNumRegimes; ++c) {
                const double target = code(y[i]) == c ? 1.0 : -1.0;
                const double margin = target * (dot(w[c], row) + b[c]);
                const double shrink = 1.0 - eta * lambda;
                for (auto& v : w[c]) v *= shrink;
                if (margin < 1.0) {
                    for (std::size_t j = 0; j < f; ++j) w[c][j] += eta * target * row[j];
                    b[c] += eta * target;
                }
                const double mix = 1.0 / t;
                for (std::size_t j = 0; j < f; ++j) w_avg[c][j] += (w[c][j] - w_avg[c][j]) * mix;
                b_avg[c] += (b[c] - b_avg[c]) * mix;
            }
        }
        model.weights_ = w_avg;
        model.bias_ = b_avg;
        model.trace_.push_back(model.objective(x, y, lambda));
    }
    return model;
}

ClassVector LinearSvm::scores(std::span<const double> row) const {
    if (row.size() != weights_[0].size()) throw ConfigError("SVM: query has wrong feature count");
    ClassVector s{};
    for (std::size_t c = 0; c < kNumRegimes; ++c) s[c] = dot(weights_[c], row) + bias_[c];
    return s;
}

ClassVector LinearSvm::proba_row(std::span<const double> row) const {
    auto s = scores(row);
    const double top = *std::max_element(s.begin(), s.end());
    double total = 0.0;
    for (auto& v : s) {
        v = std::exp(v - top);
        total += v;
    }
    for (auto& v : s) v /= total;
    return s;
}

// Taken on the softmax so predict and predict_proba share one argmax.
RegimeLabel LinearSvm::predict_row(std::span<const double> row) const {
    return regime_from_code(argmax_low(proba_row(row)));
}

} // namespace dropcol
