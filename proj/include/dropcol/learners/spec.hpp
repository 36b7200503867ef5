#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace dropcol {

enum class SplitCriterion : std::uint8_t { Gini, Entropy };
enum class DistanceMetric : std::uint8_t { L1, L2 };
enum class NeighborWeighting : std::uint8_t { Uniform, DistanceWeighted };

struct DecisionTreeSpec {
    SplitCriterion criterion = SplitCriterion::Gini;
    int max_depth = 20;
    bool operator==(const DecisionTreeSpec&) const = default;
};

struct RandomForestSpec {
    int n_estimators = 50;
    int max_depth = 16;
    SplitCriterion criterion = SplitCriterion::Gini;
    std::uint64_t seed = 42;
    /// Features examined per split; 0 selects ceil(sqrt(F)).
    int max_features = 0;
    bool operator==(const RandomForestSpec&) const = default;
};

struct KnnSpec {
    int k = 1;
    DistanceMetric metric = DistanceMetric::L2;
    NeighborWeighting weighting = NeighborWeighting::Uniform;
    bool operator==(const KnnSpec&) const = default;
};

struct GaussianNBSpec {
    double var_smoothing = 1e-9;
    bool operator==(const GaussianNBSpec&) const = default;
};

struct LinearSvmSpec {
    double regularization = 1e-4;
    int epochs = 20;
    std::uint64_t seed = 42;
    bool operator==(const LinearSvmSpec&) const = default;
};

struct MlpSpec {
    std::vector<int> hidden_layers{40, 40, 40, 40, 8};
    int max_iterations = 300;
    double learning_rate = 0.01;
    std::uint64_t seed = 42;
    int batch_size = 32;
    bool operator==(const MlpSpec&) const = default;
};

/// Vote ties go to the label of the earliest-listed member among the tied labels.
enum class EnsembleTieRule : std::uint8_t { FirstMember };

struct ClassifierSpec;

struct EnsembleSpec {
    std::vector<ClassifierSpec> members;
    EnsembleTieRule tie_rule = EnsembleTieRule::FirstMember;
    bool operator==(const EnsembleSpec& other) const;
};

struct ClassifierSpec {
    using Variant = std::variant<DecisionTreeSpec, RandomForestSpec, KnnSpec, GaussianNBSpec, LinearSvmSpec, MlpSpec,
                                 EnsembleSpec>;
    Variant value;

    ClassifierSpec() = default;
    template <typename T>
        requires std::is_constructible_v<Variant, T>
    ClassifierSpec(T v) : value(std::move(v)) {}

    bool operator==(const ClassifierSpec&) const = default;
};

/// Short family tag: dt, rf, knn, nb, svm, mlp, ensemble.
std::string family_name(const ClassifierSpec& spec);
/// Human-readable label with the hyperparameters, e.g. "rf(n=50,depth=16,gini)".
std::string describe(const ClassifierSpec& spec);

nlohmann::json to_json(const ClassifierSpec& spec);
/// Strict: unknown keys and out-of-range values raise ConfigError.
/// Missing keys take the defaults above.
ClassifierSpec spec_from_json(const nlohmann::json& j);

/// The ensemble compared in the tuned-model study: random forest, MLP, SVM and k-NN.
EnsembleSpec default_ensemble();

} // namespace dropcol
