#include "dropcol/learners/knn.hpp"

#include "dropcol/error.hpp"
#include "dropcol/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dropcol {

KnnModel::KnnModel(KnnSpec spec, Matrix train, std::vector<RegimeLabel> labels)
    : spec_(spec), train_(std::move(train)), labels_(std::move(labels)) {
    if (spec_.k < 1) throw ConfigError("k-NN k must be >= 1");
    if (train_.rows() == 0) throw FitError("k-NN: empty training set");
    if (labels_.size() != train_.rows()) throw ConfigError("k-NN: label count does not match rows");
    const auto n = train_.rows();
    const auto d = train_.cols();
    columns_.resize(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) columns_[j * n + i] = train_(i, j);
}

void KnnModel::neighbor_distances(std::span<const double> row, std::vector<double>& dist) const {
    dist.resize(train_.rows());
    const kernels::PointsSoA points{columns_.data(), train_.rows(), train_.cols()};
    if (spec_.metric == DistanceMetric::L1) {
        kernels::l1_distances(row, points, dist);
    } else {
        kernels::l2sq_distances(row, points, dist);
    }
}

std::vector<std::size_t> KnnModel::nearest(std::span<const double> row, std::vector<double>& dist) const {
    if (row.size() != train_.cols()) throw ConfigError("k-NN: query has wrong feature count");
    neighbor_distances(row, dist);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(spec_.k), dist.size());
    std::vector<std::size_t> idx(dist.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto closer = [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
    idx.resize(k);
    return idx;
}

std::vector<std::size_t> KnnModel::neighbors(std::span<const double> row) const {
    std::vector<double> dist;
    return nearest(row, dist);
}

ClassVector KnnModel::scores(std::span<const double> row) const {
    std::vector<double> dist;
    const auto idx = nearest(row, dist);
    ClassVector s{};
    for (auto i : idx) {
        double w = 1.0;
        if (spec_.weighting == NeighborWeighting::DistanceWeighted) {
            const double d = spec_.metric == DistanceMetric::L1 ? dist[i] : std::sqrt(dist[i]);
            w = 1.0 / (d + kDistanceEpsilon);
        }
        s[code(labels_[i])] += w;
    }
    return s;
}

ClassVector KnnModel::proba_row(std::span<const double> row) const {
    auto s = scores(row);
    const double total = std::accumulate(s.begin(), s.end(), 0.0);
    for (auto& v : s) v /= total;
    return s;
}

// Decided on the normalized scores so that predict and predict_proba agree exactly.
RegimeLabel KnnModel::predict_row(std::span<const double> row) const { return regime_from_code(argmax_low(proba_row(row))); }

} // namespace dropcol
