#pragma once

#include "dropcol/learners/spec.hpp"
#include "dropcol/matrix.hpp"
#include "dropcol/regime.hpp"
#include "dropcol/rng.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace dropcol {

using ClassCounts = std::array<std::uint32_t, kNumRegimes>;

/// Gini (1 - sum p^2) or entropy (-sum p log2 p) of a class histogram.
double impurity(const ClassCounts& counts, std::uint32_t total, SplitCriterion criterion);

struct TreeParams {
    SplitCriterion criterion = SplitCriterion::Gini;
    int max_depth = 20;
    /// Features examined per split (only non-constant ones count); 0 or >= F means all.
    int max_features = 0;
};

/// Axis-aligned binary tree. A row goes left when row[feature] <= threshold.
class DecisionTree {
public:
    struct Node {
        int feature = -1; ///< -1 for a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        ClassCounts counts{};

        bool is_leaf() const noexcept { return feature < 0; }
        bool operator==(const Node&) const = default;
    };

    DecisionTree() = default;
    DecisionTree(std::vector<Node> nodes, std::size_t n_features) : nodes_(std::move(nodes)), n_features_(n_features) {}

    /// Greedy top-down induction over the rows listed in `sample` (repeats
    /// allowed, e.g. a bootstrap draw). Each node takes the (feature,
    /// threshold) with the lowest weighted child impurity, scanning features
    /// in index order and thresholds ascending, keeping the first strict
    /// minimum. Thresholds are midpoints of consecutive distinct values. A node
    /// becomes a leaf when pure, at max_depth, or when every candidate feature
    /// is constant on it. `rng` is used only when max_features < F.
    static DecisionTree fit(const Matrix& x, std::span<const RegimeLabel> y, std::span<const std::size_t> sample,
                            const TreeParams& params, Rng* rng = nullptr);
    static DecisionTree fit(const Matrix& x, std::span<const RegimeLabel> y, const TreeParams& params);

    const Node& leaf_for(std::span<const double> row) const;
    RegimeLabel predict_row(std::span<const double> row) const;
    ClassVector proba_row(std::span<const double> row) const;

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    std::size_t n_features() const noexcept { return n_features_; }
    int depth() const;
    std::size_t leaf_count() const;

    bool operator==(const DecisionTree&) const = default;

    /// Nested-node JSON ({"leaf": counts} or {"feature", "threshold", "left", "right", "counts"}).
    nlohmann::json to_json() const;
    static DecisionTree from_json(const nlohmann::json& j, std::size_t n_features);

private:
    std::vector<Node> nodes_;
    std::size_t n_features_ = 0;
};

/// Majority label of a histogram, ties toward the lower class code.
RegimeLabel majority(const ClassCounts& counts);

} // namespace dropcol
