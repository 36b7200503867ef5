#pragma once

#include "dropcol/dataset.hpp"
#include "dropcol/learners/model.hpp"
#include "dropcol/learners/spec.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace dropcol {

using ConfusionCounts = std::array<std::array<std::size_t, kNumRegimes>, kNumRegimes>;

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Shuffles 0..n-1 with Rng(seed) and cuts it into k contiguous test folds;
/// the first n % k folds get one extra index. With `stratify`, the shuffled
/// indices are grouped by label before being dealt round-robin.
std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);
std::vector<Fold> kfold_split_stratified(std::span<const RegimeLabel> labels, std::size_t k, std::uint64_t seed);

/// Additive Gaussian noise N(0, n^2) per entry of the standardized features.
struct NoiseSpec {
    double stddev = 0.0;
    std::uint64_t seed = 42;
};

struct CrossValOptions {
    std::size_t k = 10;
    bool stratify = false;
    /// Standardize once on the full matrix instead of per training fold.
    bool global_standardize = false;
    std::optional<NoiseSpec> noise;
    unsigned jobs = 1;
    ClassPolicy class_policy = ClassPolicy::RequireAll;
};

struct CrossValResult {
    ClassifierSpec spec;
    FeatureSet feature_set = FeatureSet::BaseOnly;
    std::uint64_t seed = 0;
    std::size_t k = 10;
    std::vector<double> fold_accuracies;
    std::vector<std::size_t> fold_sizes;
    double mean_accuracy = 0.0; ///< mean of the fold accuracies
    double std_accuracy = 0.0;  ///< population std of the fold accuracies
    double pooled_accuracy = 0.0;
    ConfusionCounts confusion_raw{}; ///< rows = true label, columns = predicted, pooled over folds
    std::vector<Standardization> fold_standardization;
    std::optional<NoiseSpec> noise;
    bool stratified = false;
    bool global_standardize = false;
};

/// k-fold cross-validation of `spec` on raw (unstandardized) features. Per
/// fold: fit standardization on the training part, apply to both parts, add
/// noise if requested (train then test, fresh draws from
/// Rng(derive_seed(noise.seed, fold))), fit with derive_seed(seed, fold),
/// score the test part. Fit errors are rethrown tagged with the fold index.
CrossValResult cross_validate(const ClassifierSpec& spec, const FeatureMatrix& matrix, std::uint64_t seed,
                              const CrossValOptions& options = {});

double accuracy(std::span<const RegimeLabel> truth, std::span<const RegimeLabel> predicted);
ConfusionCounts confusion_counts(std::span<const RegimeLabel> truth, std::span<const RegimeLabel> predicted);

struct ConfusionMatrixNormalized {
    std::array<ClassVector, kNumRegimes> rows{};
    std::array<bool, kNumRegimes> zero_support{};
};

/// Row-normalizes raw counts; rows without support stay zero and are flagged.
ConfusionMatrixNormalized confusion_normalize(const ConfusionCounts& raw);

/// Largest off-diagonal normalized entry as (true, predicted).
std::pair<RegimeLabel, RegimeLabel> largest_confusion(const ConfusionMatrixNormalized& m);

inline constexpr int kCrossValSchemaVersion = 1;

nlohmann::json to_json(const CrossValResult& r);
nlohmann::json to_json(const ConfusionMatrixNormalized& m);
nlohmann::json confusion_json(const ConfusionCounts& c);

} // namespace dropcol
