#pragma once

#include "dropcol/learners/spec.hpp"
#include "dropcol/matrix.hpp"
#include "dropcol/regime.hpp"

#include <span>
#include <vector>

namespace dropcol {

/// Added to neighbor distances before inverting them for distance weighting.
inline constexpr double kDistanceEpsilon = 1e-12;

/// Lazy learner: keeps the training matrix verbatim plus a column-major copy
/// for the distance kernels.
class KnnModel {
public:
    KnnModel() = default;
    KnnModel(KnnSpec spec, Matrix train, std::vector<RegimeLabel> labels);

    /// Neighbor scores: counts (uniform) or summed 1/(d + eps) (distance
    /// weighted) over the k nearest training rows, nearest-first with ties in
    /// distance going to the lower training index.
    ClassVector scores(std::span<const double> row) const;
    ClassVector proba_row(std::span<const double> row) const;
    RegimeLabel predict_row(std::span<const double> row) const;

    /// Indices of the k nearest training rows, nearest first.
    std::vector<std::size_t> neighbors(std::span<const double> row) const;

    const KnnSpec& spec() const noexcept { return spec_; }
    const Matrix& train() const noexcept { return train_; }
    const std::vector<RegimeLabel>& labels() const noexcept { return labels_; }

    bool operator==(const KnnModel& o) const { return spec_ == o.spec_ && train_ == o.train_ && labels_ == o.labels_; }

private:
    void neighbor_distances(std::span<const double> row, std::vector<double>& dist) const;
    std::vector<std::size_t> nearest(std::span<const double> row, std::vector<double>& dist) const;

    KnnSpec spec_;
    Matrix train_;
    std::vector<RegimeLabel> labels_;
    std::vector<double> columns_;
};

} // namespace dropcol
