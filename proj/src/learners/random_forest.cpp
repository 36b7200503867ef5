#include "dropcol/learners/random_forest.hpp"

#include "dropcol/error.hpp"
#include "dropcol/parallel.hpp"

#include <cmath>

namespace dropcol {

std::uint64_t RandomForest::tree_seed(std::uint64_t seed, std::size_t tree_index) noexcept {
    return derive_seed(seed, tree_index);
}

std::vector<std::size_t> RandomForest::bootstrap_sample(std::size_t n, Rng& rng) {
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_index(n));
    return sample;
}

int RandomForest::features_per_split(const RandomForestSpec& spec, std::size_t n_features) {
    if (spec.max_features > 0) return spec.max_features;
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_features))));
}

RandomForest RandomForest::fit(const Matrix& x, std::span<const RegimeLabel> y, const RandomForestSpec& spec,
                               std::uint64_t seed, unsigned jobs) {
    if (spec.n_estimators < 1) throw ConfigError("random forest n_estimators must be >= 1");
    const TreeParams params{spec.criterion, spec.max_depth, features_per_split(spec, x.cols())};
    std::vector<DecisionTree> trees(static_cast<std::size_t>(spec.n_estimators));
    parallel_for(trees.size(), jobs, [&](std::size_t t) {
        Rng rng(tree_seed(seed, t));
        const auto sample = bootstrap_sample(x.rows(), rng);
        trees[t] = DecisionTree::fit(x, y, sample, params, &rng);
    });
    return RandomForest(std::move(trees), x.cols());
}

ClassVector RandomForest::vote_fractions(std::span<const double> row) const {
    ClassVector votes{};
    for (const auto& t : trees_) votes[code(t.predict_row(row))] += 1.0;
    for (auto& v : votes) v /= static_cast<double>(trees_.size());
    return votes;
}

RegimeLabel RandomForest::predict_row(std::span<const double> row) const {
    std::array<std::size_t, kNumRegimes> votes{};
    for (const auto& t : trees_) ++votes[code(t.predict_row(row))];
    return regime_from_code(argmax_low(votes));
}

} // namespace dropcol
