#include "dropcol/learners/naive_bayes.hpp"

#include "dropcol/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dropcol {

GaussianNB GaussianNB::fit(const Matrix& x, std::span<const RegimeLabel> y, const GaussianNBSpec& spec) {
    if (!(spec.var_smoothing > 0.0)) throw ConfigError("naive Bayes var_smoothing must be > 0");
    if (x.rows() == 0) throw FitError("naive Bayes: empty training set");
    const std::size_t n = x.rows();
    const std::size_t f = x.cols();

    // epsilon = var_smoothing * max_j Var(x_j)
    double max_var = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
        max_var = std::max(max_var, ss / static_cast<double>(n));
    }
    const double epsilon = spec.var_smoothing * (max_var > 0.0 ? max_var : 1.0);

    std::array<ClassStats, kNumRegimes> classes{};
    std::array<std::size_t, kNumRegimes> counts{};
    for (auto& c : classes) {
        c.mean.assign(f, 0.0);
        c.var.assign(f, 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = classes[code(y[i])];
        ++counts[code(y[i])];
        for (std::size_t j = 0; j < f; ++j) c.mean[j] += x(i, j);
    }
    for (std::size_t k = 0; k < kNumRegimes; ++k)
        if (counts[k]) for (auto& m : classes[k].mean) m /= static_cast<double>(counts[k]);
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = classes[code(y[i])];
        for (std::size_t j = 0; j < f; ++j) c.var[j] += (x(i, j) - c.mean[j]) * (x(i, j) - c.mean[j]);
    }
    for (std::size_t k = 0; k < kNumRegimes; ++k) {
        auto& c = classes[k];
        c.present = counts[k] > 0;
        if (!c.present) continue;
        c.log_prior = std::log(static_cast<double>(counts[k]) / static_cast<double>(n));
        for (auto& v : c.var) v = v / static_cast<double>(counts[k]) + epsilon;
    }
    return GaussianNB(std::move(classes));
}

ClassVector GaussianNB::log_joint(std::span<const double> row) const {
    ClassVector out;
    out.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < kNumRegimes; ++k) {
        const auto& c = classes_[k];
        if (!c.present) continue;
        if (row.size() != c.mean.size()) throw ConfigError("naive Bayes: query has wrong feature count");
        double ll = c.log_prior;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double d = row[j] - c.mean[j];
            ll -= 0.5 * std::log(2.0 * std::numbers::pi * c.var[j]) + 0.5 * d * d / c.var[j];
        }
        out[k] = ll;
    }
    return out;
}

ClassVector GaussianNB::proba_row(std::span<const double> row) const {
    const auto lj = log_joint(row);
    const double top = *std::max_element(lj.begin(), lj.end());
    ClassVector p{};
    double total = 0.0;
    for (std::size_t k = 0; k < kNumRegimes; ++k) {
        p[k] = classes_[k].present ? std::exp(lj[k] - top) : 0.0;
        total += p[k];
    }
    for (auto& v : p) v /= total;
    return p;
}

RegimeLabel GaussianNB::predict_row(std::span<const double> row) const {
    return regime_from_code(argmax_low(proba_row(row)));
}

} // namespace dropcol
