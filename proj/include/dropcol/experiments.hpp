#pragma once

#include "dropcol/dataset.hpp"
#include "dropcol/evaluation.hpp"
#include "dropcol/learners/spec.hpp"
#include "dropcol/physics.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dropcol {

enum class ExperimentKind { Sweep, Compare, LearningCurve, Noise };

std::string_view to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_experiment_kind(std::string_view text);

/// Everything that determines an experiment's results. Fields not used by a
/// kind are rejected when parsing that kind.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Compare;
    std::string corpus;
    std::uint64_t seed = 42;
    unsigned jobs = 1;
    std::string out;
    std::vector<FeatureSet> feature_sets;
    PhysicsModelParams physics;
    std::size_t folds = 10;
    bool global_standardize = false;
    bool stratify = false;
    std::vector<std::string> sources; ///< empty = every source

    // sweep
    std::string family;
    nlohmann::json grid; ///< object: parameter name -> list of values

    // compare / learning-curve / noise
    std::vector<ClassifierSpec> models;
    std::vector<std::size_t> sizes;
    std::vector<double> levels;
    int repeats = 1;
};

/// Per-parameter value lists for a family's default sweep.
nlohmann::json default_grid(std::string_view family);
/// Cartesian product over the grid (keys in sorted order, last key varying
/// fastest) applied to the family's default spec. Every point is validated.
std::vector<ClassifierSpec> expand_grid(std::string_view family, const nlohmann::json& grid);

/// Tuned hyperparameters used by the comparison, learning-curve and noise studies.
ClassifierSpec tuned_spec(std::string_view family);
std::vector<ClassifierSpec> default_compare_models();

/// Fills unset fields with the kind's defaults. `corpus_rows` bounds the
/// default learning-curve sizes.
ExperimentConfig resolve_defaults(ExperimentConfig config, std::size_t corpus_rows);
/// Fails with ConfigError on anything that would only surface mid-run.
void validate(const ExperimentConfig& config, std::size_t corpus_rows);

nlohmann::json to_json(const ExperimentConfig& config);
/// Strict: unknown keys raise ConfigError. "physics" may be an object or a
/// path to a parameter file.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentKind kind);

using ProgressLog = std::function<void(const std::string&)>;

struct ExperimentInputs {
    const std::vector<CollisionRecord>* records = nullptr;
    std::string corpus_sha256;
    ProgressLog log;
};

inline constexpr int kReportFormatVersion = 1;

nlohmann::json run_sweep(const ExperimentConfig& config, const ExperimentInputs& inputs);
nlohmann::json run_model_comparison(const ExperimentConfig& config, const ExperimentInputs& inputs);
nlohmann::json run_learning_curve(const ExperimentConfig& config, const ExperimentInputs& inputs);
nlohmann::json run_noise_study(const ExperimentConfig& config, const ExperimentInputs& inputs);
/// Dispatches on config.kind after resolving defaults and validating.
nlohmann::json run_experiment(const ExperimentConfig& config, const ExperimentInputs& inputs);

/// One row per result entry, for plotting.
std::string report_csv(const nlohmann::json& report);

/// Physics baseline over the whole record set plus one entry per source.
nlohmann::json baseline_report(std::span<const CollisionRecord> records, const PhysicsModelParams& physics);

} // namespace dropcol
