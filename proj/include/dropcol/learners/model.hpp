#pragma once

#include "dropcol/dataset.hpp"
#include "dropcol/learners/decision_tree.hpp"
#include "dropcol/learners/knn.hpp"
#include "dropcol/learners/linear_svm.hpp"
#include "dropcol/learners/mlp.hpp"
#include "dropcol/learners/naive_bayes.hpp"
#include "dropcol/learners/random_forest.hpp"
#include "dropcol/learners/spec.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dropcol {

struct TrainedModel;

struct EnsembleModel {
    std::vector<TrainedModel> members;
    bool operator==(const EnsembleModel& o) const;
};

/// A fitted classifier of any family plus its training metadata.
struct TrainedModel {
    using Variant = std::variant<DecisionTree, RandomForest, KnnModel, GaussianNB, LinearSvm, Mlp, EnsembleModel>;

    Variant model;
    ClassifierSpec spec;
    std::uint64_t seed = 0;
    FeatureSet feature_set = FeatureSet::BaseOnly;
    std::size_t n_features = 0;
    std::size_t train_rows = 0;
    /// Standardization the training rows were put through; predict expects
    /// rows transformed the same way.
    std::optional<Standardization> standardization;

    bool operator==(const TrainedModel&) const = default;
};

/// Whether families that keep per-class statistics (naive Bayes, MLP) must
/// see every regime in the training data.
enum class ClassPolicy { Observed, RequireAll };

struct FitOptions {
    ClassPolicy class_policy = ClassPolicy::Observed;
    unsigned jobs = 1;
};

/// Seed handed to the family trainer: derive_seed(spec seed, fit seed) for
/// families with a spec seed, the fit seed otherwise.
TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& train, std::uint64_t seed,
                 const FitOptions& options = {});

std::vector<RegimeLabel> predict(const TrainedModel& model, const FeatureMatrix& rows);
std::vector<RegimeLabel> predict(const TrainedModel& model, const Matrix& rows);
/// Rows are probability vectors summing to 1; argmax (with the family's tie
/// rule) agrees with predict.
std::vector<ClassVector> predict_proba(const TrainedModel& model, const Matrix& rows);

RegimeLabel predict_row(const TrainedModel& model, std::span<const double> row);
ClassVector proba_row(const TrainedModel& model, std::span<const double> row);

/// Plurality vote; a tie goes to the label cast by the earliest member among
/// the tied labels. Throws ConfigError for an empty member list.
std::vector<RegimeLabel> ensemble_predict(std::span<const TrainedModel> members, const Matrix& rows);
RegimeLabel ensemble_vote(std::span<const RegimeLabel> votes);

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

} // namespace dropcol
