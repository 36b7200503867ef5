#pragma once

#include "dropcol/learners/decision_tree.hpp"

namespace dropcol {

/// Bootstrap-aggregated decision trees with per-split feature subsampling.
class RandomForest {
public:
    RandomForest() = default;
    RandomForest(std::vector<DecisionTree> trees, std::size_t n_features)
        : trees_(std::move(trees)), n_features_(n_features) {}

    /// Tree t draws its bootstrap sample and split features from
    /// Rng(tree_seed(seed, t)), so results do not depend on `jobs`.
    static RandomForest fit(const Matrix& x, std::span<const RegimeLabel> y, const RandomForestSpec& spec,
                            std::uint64_t seed, unsigned jobs = 1);

    static std::uint64_t tree_seed(std::uint64_t seed, std::size_t tree_index) noexcept;
    /// n draws with replacement from [0, n).
    static std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng);
    /// ceil(sqrt(F)) unless the spec overrides it.
    static int features_per_split(const RandomForestSpec& spec, std::size_t n_features);

    /// Votes of the individual trees (hard voting).
    ClassVector vote_fractions(std::span<const double> row) const;
    /// Plurality vote, ties toward the lower class code.
    RegimeLabel predict_row(std::span<const double> row) const;

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    std::size_t n_features() const noexcept { return n_features_; }
    bool operator==(const RandomForest&) const = default;

private:
    std::vector<DecisionTree> trees_;
    std::size_t n_features_ = 0;
};

} // namespace dropcol
