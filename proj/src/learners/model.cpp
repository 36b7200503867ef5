#include "dropcol/learners/model.hpp"

#include "dropcol/error.hpp"
#include "dropcol/rng.hpp"

#include <cmath>
#include <fstream>

namespace dropcol {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_finite(const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (double v : m.row(r))
            if (!std::isfinite(v)) throw FitError("non-finite feature value in training row " + std::to_string(r));
}

void require_all_classes(std::span<const RegimeLabel> y, const std::string& family) {
    std::array<bool, kNumRegimes> seen{};
    for (auto l : y) seen[code(l)] = true;
    for (std::size_t c = 0; c < kNumRegimes; ++c)
        if (!seen[c])
            throw FitError(family + ": class '" + std::string(to_string(regime_from_code(c))) +
                           "' has no training rows");
}

void check_dims(const TrainedModel& model, std::size_t cols) {
    if (cols != model.n_features)
        throw Error("dimension_mismatch", "model expects " + std::to_string(model.n_features) +
                                              " features, got " + std::to_string(cols));
}

} // namespace

bool EnsembleModel::operator==(const EnsembleModel& o) const { return members == o.members; }

TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& train, std::uint64_t seed, const FitOptions& options) {
    if (train.rows() == 0) throw FitError("empty training set");
    if (train.labels.size() != train.rows()) throw ConfigError("label count does not match rows");
    require_finite(train.values);
    const auto& x = train.values;
    const std::span<const RegimeLabel> y = train.labels;

    TrainedModel out;
    out.spec = spec;
    out.seed = seed;
    out.feature_set = train.feature_set;
    out.n_features = train.cols();
    out.train_rows = train.rows();
    out.standardization = train.standardization;

    out.model = std::visit(
        overloaded{
            [&](const DecisionTreeSpec& s) -> TrainedModel::Variant {
                return DecisionTree::fit(x, y, TreeParams{s.criterion, s.max_depth, 0});
            },
            [&](const RandomForestSpec& s) -> TrainedModel::Variant {
                return RandomForest::fit(x, y, s, derive_seed(s.seed, seed), options.jobs);
            },
            [&](const KnnSpec& s) -> TrainedModel::Variant {
                return KnnModel(s, x, std::vector<RegimeLabel>(y.begin(), y.end()));
            },
            [&](const GaussianNBSpec& s) -> TrainedModel::Variant {
                if (options.class_policy == ClassPolicy::RequireAll) require_all_classes(y, "naive Bayes");
                return GaussianNB::fit(x, y, s);
            },
            [&](const LinearSvmSpec& s) -> TrainedModel::Variant {
                return LinearSvm::fit(x, y, s, derive_seed(s.seed, seed));
            },
            [&](const MlpSpec& s) -> TrainedModel::Variant {
                if (options.class_policy == ClassPolicy::RequireAll) require_all_classes(y, "MLP");
                return Mlp::fit(x, y, s, derive_seed(s.seed, seed));
            },
            [&](const EnsembleSpec& s) -> TrainedModel::Variant {
                if (s.members.empty()) throw ConfigError("ensemble needs at least one member");
                EnsembleModel e;
                for (std::size_t i = 0; i < s.members.size(); ++i)
                    e.members.push_back(fit(s.members[i], train, derive_seed(seed, i), options));
                return e;
            },
        },
        spec.value);
    return out;
}

RegimeLabel ensemble_vote(std::span<const RegimeLabel> votes) {
    if (votes.empty()) throw ConfigError("ensemble vote over no members");
    std::array<std::size_t, kNumRegimes> counts{};
    std::array<std::size_t, kNumRegimes> first{votes.size(), votes.size(), votes.size(), votes.size()};
    for (std::size_t i = 0; i < votes.size(); ++i) {
        const auto c = code(votes[i]);
        ++counts[c];
        if (first[c] == votes.size()) first[c] = i;
    }
    std::size_t best = code(votes[0]);
    for (std::size_t c = 0; c < kNumRegimes; ++c) {
        if (counts[c] > counts[best] || (counts[c] == counts[best] && first[c] < first[best])) best = c;
    }
    return regime_from_code(best);
}

RegimeLabel predict_row(const TrainedModel& model, std::span<const double> row) {
    check_dims(model, row.size());
    return std::visit(overloaded{
                          [&](const EnsembleModel& e) {
                              std::vector<RegimeLabel> votes;
                              votes.reserve(e.members.size());
                              for (const auto& m : e.members) votes.push_back(predict_row(m, row));
                              return ensemble_vote(votes);
                          },
                          [&](const auto& m) { return m.predict_row(row); },
                      },
                      model.model);
}

ClassVector proba_row(const TrainedModel& model, std::span<const double> row) {
    check_dims(model, row.size());
    return std::visit(overloaded{
                          [&](const RandomForest& f) { return f.vote_fractions(row); },
                          [&](const EnsembleModel& e) {
                              ClassVector p{};
                              for (const auto& m : e.members) p[code(predict_row(m, row))] += 1.0;
                              for (auto& v : p) v /= static_cast<double>(e.members.size());
                              return p;
                          },
                          [&](const auto& m) { return m.proba_row(row); },
                      },
                      model.model);
}

std::vector<RegimeLabel> predict(const TrainedModel& model, const Matrix& rows) {
    check_dims(model, rows.cols());
    std::vector<RegimeLabel> out;
    out.reserve(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(predict_row(model, rows.row(r)));
    return out;
}

std::vector<RegimeLabel> predict(const TrainedModel& model, const FeatureMatrix& rows) {
    return predict(model, rows.values);
}

std::vector<ClassVector> predict_proba(const TrainedModel& model, const Matrix& rows) {
    check_dims(model, rows.cols());
    std::vector<ClassVector> out;
    out.reserve(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(proba_row(model, rows.row(r)));
    return out;
}

std::vector<RegimeLabel> ensemble_predict(std::span<const TrainedModel> members, const Matrix& rows) {
    if (members.empty()) throw ConfigError("ensemble_predict: empty member list");
    for (const auto& m : members) check_dims(m, rows.cols());
    std::vector<RegimeLabel> out;
    out.reserve(rows.rows());
    std::vector<RegimeLabel> votes(members.size());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        for (std::size_t i = 0; i < members.size(); ++i) votes[i] = predict_row(members[i], rows.row(r));
        out.push_back(ensemble_vote(votes));
    }
    return out;
}

// --- serialization -----------------------------------------------------------------------------

namespace {

nlohmann::json labels_json(std::span<const RegimeLabel> labels) {
    auto j = nlohmann::json::array();
    for (auto l : labels) j.push_back(code(l));
    return j;
}

std::vector<RegimeLabel> labels_from_json(const nlohmann::json& j) {
    std::vector<RegimeLabel> out;
    for (const auto& v : j) {
        const auto c = v.get<std::size_t>();
        if (c >= kNumRegimes) throw ConfigError("label code out of range in model file");
        out.push_back(regime_from_code(c));
    }
    return out;
}

nlohmann::json matrix_json(const Matrix& m) { return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.storage()}}; }

Matrix matrix_from_json(const nlohmann::json& j) {
    auto data = j.at("data").get<std::vector<double>>();
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    if (data.size() != rows * cols) throw ConfigError("matrix shape mismatch in model file");
    return Matrix(rows, cols, std::move(data));
}

nlohmann::json body_json(const TrainedModel::Variant& v) {
    return std::visit(
        overloaded{
            [](const DecisionTree& t) { return nlohmann::json{{"tree", t.to_json()}}; },
            [](const RandomForest& f) {
                auto trees = nlohmann::json::array();
                for (const auto& t : f.trees()) trees.push_back(t.to_json());
                return nlohmann::json{{"trees", trees}};
            },
            [](const KnnModel& k) { return nlohmann::json{{"train", matrix_json(k.train())}, {"labels", labels_json(k.labels())}}; },
            [](const GaussianNB& nb) {
                auto classes = nlohmann::json::array();
                for (const auto& c : nb.classes())
                    classes.push_back({{"present", c.present}, {"log_prior", c.log_prior}, {"mean", c.mean}, {"var", c.var}});
                return nlohmann::json{{"classes", classes}};
            },
            [](const LinearSvm& s) { return nlohmann::json{{"weights", s.weights()}, {"bias", s.bias()}}; },
            [](const Mlp& m) {
                auto layers = nlohmann::json::array();
                for (const auto& l : m.layers())
                    layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", l.weights}, {"bias", l.bias}});
                return nlohmann::json{{"layers", layers}};
            },
            [](const EnsembleModel& e) {
                auto members = nlohmann::json::array();
                for (const auto& m : e.members) members.push_back(to_json(m));
                return nlohmann::json{{"members", members}};
            },
        },
        v);
}

TrainedModel::Variant body_from_json(const ClassifierSpec& spec, const nlohmann::json& j, std::size_t n_features) {
    return std::visit(
        overloaded{
            [&](const DecisionTreeSpec&) -> TrainedModel::Variant { return DecisionTree::from_json(j.at("tree"), n_features); },
            [&](const RandomForestSpec&) -> TrainedModel::Variant {
                std::vector<DecisionTree> trees;
                for (const auto& t : j.at("trees")) trees.push_back(DecisionTree::from_json(t, n_features));
                return RandomForest(std::move(trees), n_features);
            },
            [&](const KnnSpec& s) -> TrainedModel::Variant {
                return KnnModel(s, matrix_from_json(j.at("train")), labels_from_json(j.at("labels")));
            },
            [&](const GaussianNBSpec&) -> TrainedModel::Variant {
                std::array<GaussianNB::ClassStats, kNumRegimes> classes{};
                const auto& arr = j.at("classes");
                if (arr.size() != kNumRegimes) throw ConfigError("naive Bayes model needs 4 classes");
                for (std::size_t c = 0; c < kNumRegimes; ++c) {
                    classes[c].present = arr[c].at("present").get<bool>();
                    classes[c].log_prior = arr[c].at("log_prior").get<double>();
                    classes[c].mean = arr[c].at("mean").get<std::vector<double>>();
                    classes[c].var = arr[c].at("var").get<std::vector<double>>();
                }
                return GaussianNB(std::move(classes));
            },
            [&](const LinearSvmSpec&) -> TrainedModel::Variant {
                return LinearSvm(j.at("weights").get<std::array<std::vector<double>, kNumRegimes>>(),
                                 j.at("bias").get<ClassVector>());
            },
            [&](const MlpSpec&) -> TrainedModel::Variant {
                std::vector<Mlp::Layer> layers;
                for (const auto& l : j.at("layers")) {
                    Mlp::Layer layer;
                    layer.inputs = l.at("inputs").get<std::size_t>();
                    layer.outputs = l.at("outputs").get<std::size_t>();
                    layer.weights = l.at("weights").get<std::vector<double>>();
                    layer.bias = l.at("bias").get<std::vector<double>>();
                    if (layer.weights.size() != layer.inputs * layer.outputs || layer.bias.size() != layer.outputs)
                        throw ConfigError("MLP layer shape mismatch in model file");
                    layers.push_back(std::move(layer));
                }
                return Mlp(std::move(layers));
            },
            [&](const EnsembleSpec&) -> TrainedModel::Variant {
                EnsembleModel e;
                for (const auto& m : j.at("members")) e.members.push_back(model_from_json(m));
                return e;
            },
        },
        spec.value);
}

} // namespace

nlohmann::json to_json(const TrainedModel& model) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["family"] = family_name(model.spec);
    j["spec"] = to_json(model.spec);
    j["seed"] = model.seed;
    j["feature_set"] = std::string(to_string(model.feature_set));
    j["n_features"] = model.n_features;
    j["train_rows"] = model.train_rows;
    if (model.standardization) j["standardization"] = to_json(*model.standardization, model.feature_set);
    j["model"] = body_json(model.model);
    return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion)
            throw ConfigError("unsupported model format_version " + j.at("format_version").dump());
        TrainedModel m;
        m.spec = spec_from_json(j.at("spec"));
        m.seed = j.at("seed").get<std::uint64_t>();
        const auto fs = parse_feature_set(j.at("feature_set").get<std::string>());
        if (!fs) throw ConfigError("unknown feature_set in model file");
        m.feature_set = *fs;
        m.n_features = j.at("n_features").get<std::size_t>();
        m.train_rows = j.at("train_rows").get<std::size_t>();
        if (j.contains("standardization")) m.standardization = standardization_from_json(j.at("standardization"), m.feature_set);
        m.model = body_from_json(m.spec, j.at("model"), m.n_features);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed model JSON: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write model file '" + path + "'");
    out << to_json(model).dump() << '\n';
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("model file '" + path + "': " + e.what());
    }
    return model_from_json(j);
}

} // namespace dropcol
