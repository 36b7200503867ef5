#include "dropcol/learners/decision_tree.hpp"

#include "dropcol/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dropcol {

double impurity(const ClassCounts& counts, std::uint32_t total, SplitCriterion criterion) {
    if (total == 0) return 0.0;
    const double n = static_cast<double>(total);
    double acc = 0.0;
    if (criterion == SplitCriterion::Gini) {
        for (auto c : counts) {
            const double p = static_cast<double>(c) / n;
            acc += p * p;
        }
        return 1.0 - acc;
    }
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        acc -= p * std::log2(p);
    }
    return acc;
}

RegimeLabel majority(const ClassCounts& counts) { return regime_from_code(argmax_low(counts)); }

namespace {

struct Builder {
    const Matrix& x;
    std::span<const RegimeLabel> y;
    const TreeParams& params;
    Rng* rng;
    std::vector<DecisionTree::Node> nodes;
    std::vector<std::pair<double, RegimeLabel>> scratch;
    std::vector<std::size_t> feature_order;

    int build(std::vector<std::size_t>& rows, int depth) {
        DecisionTree::Node node;
        for (auto r : rows) ++node.counts[code(y[r])];
        const auto total = static_cast<std::uint32_t>(rows.size());
        const int index = static_cast<int>(nodes.size());
        nodes.push_back(node);

        const bool pure = std::any_of(node.counts.begin(), node.counts.end(), [&](auto c) { return c == total; });
        if (pure || depth >= params.max_depth || total < 2) return index;

        const std::size_t n_features = x.cols();
        std::size_t budget = n_features;
        if (params.max_features > 0 && static_cast<std::size_t>(params.max_features) < n_features) {
            budget = static_cast<std::size_t>(params.max_features);
            rng->shuffle(std::span<std::size_t>(feature_order));
        }

        double best_score = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;
        std::size_t visited = 0;
        for (std::size_t fi = 0; fi < n_features && visited < budget; ++fi) {
            const std::size_t f = feature_order[fi];
            scratch.clear();
            for (auto r : rows) scratch.emplace_back(x(r, f), y[r]);
            std::sort(scratch.begin(), scratch.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (scratch.front().first == scratch.back().first) continue;
            ++visited;

            ClassCounts left{};
            ClassCounts right = node.counts;
            for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
                ++left[code(scratch[i].second)];
                --right[code(scratch[i].second)];
                const double lo = scratch[i].first;
                const double hi = scratch[i + 1].first;
                if (lo == hi) continue;
                const auto nl = static_cast<std::uint32_t>(i + 1);
                const auto nr = total - nl;
                const double score = (static_cast<double>(nl) * impurity(left, nl, params.criterion) +
                                      static_cast<double>(nr) * impurity(right, nr, params.criterion)) /
                                     static_cast<double>(total);
                if (score < best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    double mid = lo + (hi - lo) / 2.0;
                    if (!(mid < hi)) mid = lo;
                    best_threshold = mid;
                }
            }
        }
        if (best_feature < 0) return index;

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : rows) {
            (x(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        nodes[index].feature = best_feature;
        nodes[index].threshold = best_threshold;
        const int l = build(left_rows, depth + 1);
        nodes[index].left = l;
        const int r = build(right_rows, depth + 1);
        nodes[index].right = r;
        return index;
    }
};

} // namespace

DecisionTree DecisionTree::fit(const Matrix& x, std::span<const RegimeLabel> y, std::span<const std::size_t> sample,
                               const TreeParams& params, Rng* rng) {
    if (params.max_depth < 1) throw ConfigError("decision tree max_depth must be >= 1");
    if (sample.empty()) throw FitError("decision tree: empty training sample");
    const bool subsampling = params.max_features > 0 && static_cast<std::size_t>(params.max_features) < x.cols();
    if (subsampling && rng == nullptr) throw ConfigError("decision tree: feature subsampling needs an Rng");
    Builder b{x, y, params, rng, {}, {}, std::vector<std::size_t>(x.cols())};
    std::iota(b.feature_order.begin(), b.feature_order.end(), std::size_t{0});
    std::vector<std::size_t> rows(sample.begin(), sample.end());
    b.build(rows, 0);
    return DecisionTree(std::move(b.nodes), x.cols());
}

DecisionTree DecisionTree::fit(const Matrix& x, std::span<const RegimeLabel> y, const TreeParams& params) {
    std::vector<std::size_t> all(x.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return fit(x, y, all, params, nullptr);
}

const DecisionTree::Node& DecisionTree::leaf_for(std::span<const double> row) const {
    const Node* n = &nodes_.front();
    while (!n->is_leaf()) n = &nodes_[static_cast<std::size_t>(row[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right)];
    return *n;
}

RegimeLabel DecisionTree::predict_row(std::span<const double> row) const { return majority(leaf_for(row).counts); }

ClassVector DecisionTree::proba_row(std::span<const double> row) const {
    const auto& counts = leaf_for(row).counts;
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    ClassVector p{};
    for (std::size_t c = 0; c < kNumRegimes; ++c) p[c] = counts[c] / total;
    return p;
}

int DecisionTree::depth() const {
    std::vector<int> d(nodes_.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes_[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
        }
    }
    return best;
}

std::size_t DecisionTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

namespace {

nlohmann::json node_json(const std::vector<DecisionTree::Node>& nodes, int i) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    nlohmann::json j;
    j["counts"] = n.counts;
    if (n.is_leaf()) return j;
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_json(nodes, n.left);
    j["right"] = node_json(nodes, n.right);
    return j;
}

int node_from_json(const nlohmann::json& j, std::vector<DecisionTree::Node>& nodes, std::size_t n_features) {
    DecisionTree::Node n;
    n.counts = j.at("counts").get<ClassCounts>();
    const int index = static_cast<int>(nodes.size());
    nodes.push_back(n);
    if (!j.contains("feature")) return index;
    const int f = j.at("feature").get<int>();
    if (f < 0 || static_cast<std::size_t>(f) >= n_features) throw ConfigError("tree node feature out of range");
    nodes[static_cast<std::size_t>(index)].feature = f;
    nodes[static_cast<std::size_t>(index)].threshold = j.at("threshold").get<double>();
    const int l = node_from_json(j.at("left"), nodes, n_features);
    nodes[static_cast<std::size_t>(index)].left = l;
    const int r = node_from_json(j.at("right"), nodes, n_features);
    nodes[static_cast<std::size_t>(index)].right = r;
    return index;
}

} // namespace

nlohmann::json DecisionTree::to_json() const { return node_json(nodes_, 0); }

DecisionTree DecisionTree::from_json(const nlohmann::json& j, std::size_t n_features) {
    std::vector<Node> nodes;
    node_from_json(j, nodes, n_features);
    return DecisionTree(std::move(nodes), n_features);
}

} // namespace dropcol
