#include "dropcol/learners/spec.hpp"

#include "dropcol/error.hpp"

#include <algorithm>
#include <sstream>

namespace dropcol {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string criterion_name(SplitCriterion c) { return c == SplitCriterion::Gini ? "gini" : "entropy"; }

SplitCriterion parse_criterion(const nlohmann::json& j) {
    const auto s = j.get<std::string>();
    if (s == "gini") return SplitCriterion::Gini;
    if (s == "entropy") return SplitCriterion::Entropy;
    throw ConfigError("unknown split criterion '" + s + "'");
}

class Reader {
public:
    Reader(const nlohmann::json& j, std::string family, std::initializer_list<const char*> keys) : j_(j), family_(std::move(family)) {
        for (const auto& [key, _] : j.items()) {
            if (key == "family") continue;
            if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
                throw ConfigError("spec '" + family_ + "': unknown key '" + key + "'");
        }
    }

    int positive_int(const char* key, int fallback) const {
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 1)
            throw ConfigError("spec '" + family_ + "': '" + key + "' must be a positive integer");
        return v.get<int>();
    }

    int non_negative_int(const char* key, int fallback) const {
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError("spec '" + family_ + "': '" + key + "' must be a non-negative integer");
        return v.get<int>();
    }

    double positive_real(const char* key, double fallback) const {
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number() || !(v.get<double>() > 0.0))
            throw ConfigError("spec '" + family_ + "': '" + key + "' must be a positive number");
        return v.get<double>();
    }

    std::uint64_t seed(std::uint64_t fallback) const {
        if (!j_.contains("seed")) return fallback;
        const auto& v = j_.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw ConfigError("spec '" + family_ + "': 'seed' must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    const nlohmann::json* get(const char* key) const { return j_.contains(key) ? &j_.at(key) : nullptr; }

private:
    const nlohmann::json& j_;
    std::string family_;
};

} // namespace

bool EnsembleSpec::operator==(const EnsembleSpec& other) const {
    return members == other.members && tie_rule == other.tie_rule;
}

std::string family_name(const ClassifierSpec& spec) {
    return std::visit(overloaded{
                          [](const DecisionTreeSpec&) { return std::string("dt"); },
                          [](const RandomForestSpec&) { return std::string("rf"); },
                          [](const KnnSpec&) { return std::string("knn"); },
                          [](const GaussianNBSpec&) { return std::string("nb"); },
                          [](const LinearSvmSpec&) { return std::string("svm"); },
                          [](const MlpSpec&) { return std::string("mlp"); },
                          [](const EnsembleSpec&) { return std::string("ensemble"); },
                      },
                      spec.value);
}

std::string describe(const ClassifierSpec& spec) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const DecisionTreeSpec& s) { os << "dt(depth=" << s.max_depth << "," << criterion_name(s.criterion) << ")"; },
                   [&](const RandomForestSpec& s) {
                       os << "rf(n=" << s.n_estimators << ",depth=" << s.max_depth << "," << criterion_name(s.criterion) << ")";
                   },
                   [&](const KnnSpec& s) {
                       os << "knn(k=" << s.k << "," << (s.metric == DistanceMetric::L1 ? "l1" : "l2") << ","
                          << (s.weighting == NeighborWeighting::Uniform ? "uniform" : "distance") << ")";
                   },
                   [&](const GaussianNBSpec& s) { os << "nb(var_smoothing=" << s.var_smoothing << ")"; },
                   [&](const LinearSvmSpec& s) { os << "svm(lambda=" << s.regularization << ",epochs=" << s.epochs << ")"; },
                   [&](const MlpSpec& s) {
                       os << "mlp(";
                       for (std::size_t i = 0; i < s.hidden_layers.size(); ++i) os << (i ? "-" : "") << s.hidden_layers[i];
                       os << ",iter=" << s.max_iterations << ")";
                   },
                   [&](const EnsembleSpec& s) {
                       os << "ensemble(";
                       for (std::size_t i = 0; i < s.members.size(); ++i) os << (i ? "+" : "") << family_name(s.members[i]);
                       os << ")";
                   },
               },
               spec.value);
    return os.str();
}

nlohmann::json to_json(const ClassifierSpec& spec) {
    nlohmann::json j;
    j["family"] = family_name(spec);
    std::visit(overloaded{
                   [&](const DecisionTreeSpec& s) {
                       j["criterion"] = criterion_name(s.criterion);
                       j["max_depth"] = s.max_depth;
                   },
                   [&](const RandomForestSpec& s) {
                       j["n_estimators"] = s.n_estimators;
                       j["max_depth"] = s.max_depth;
                       j["criterion"] = criterion_name(s.criterion);
                       j["seed"] = s.seed;
                       j["max_features"] = s.max_features;
                   },
                   [&](const KnnSpec& s) {
                       j["k"] = s.k;
                       j["metric"] = s.metric == DistanceMetric::L1 ? "l1" : "l2";
                       j["weighting"] = s.weighting == NeighborWeighting::Uniform ? "uniform" : "distance";
                   },
                   [&](const GaussianNBSpec& s) { j["var_smoothing"] = s.var_smoothing; },
                   [&](const LinearSvmSpec& s) {
                       j["regularization"] = s.regularization;
                       j["epochs"] = s.epochs;
                       j["seed"] = s.seed;
                   },
                   [&](const MlpSpec& s) {
                       j["hidden_layers"] = s.hidden_layers;
                       j["max_iterations"] = s.max_iterations;
                       j["learning_rate"] = s.learning_rate;
                       j["seed"] = s.seed;
                       j["batch_size"] = s.batch_size;
                   },
                   [&](const EnsembleSpec& s) {
                       j["members"] = nlohmann::json::array();
                       for (const auto& m : s.members) j["members"].push_back(to_json(m));
                       j["tie_rule"] = "first_member";
                   },
               },
               spec.value);
    return j;
}

ClassifierSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        throw ConfigError("classifier spec must be an object with a string 'family'");
    const auto family = j.at("family").get<std::string>();
    if (family == "dt") {
        Reader r(j, family, {"criterion", "max_depth"});
        DecisionTreeSpec s;
        if (auto* c = r.get("criterion")) s.criterion = parse_criterion(*c);
        s.max_depth = r.positive_int("max_depth", s.max_depth);
        return s;
    }
    if (family == "rf") {
        Reader r(j, family, {"n_estimators", "max_depth", "criterion", "seed", "max_features"});
        RandomForestSpec s;
        s.n_estimators = r.positive_int("n_estimators", s.n_estimators);
        s.max_depth = r.positive_int("max_depth", s.max_depth);
        if (auto* c = r.get("criterion")) s.criterion = parse_criterion(*c);
        s.seed = r.seed(s.seed);
        s.max_features = r.non_negative_int("max_features", s.max_features);
        return s;
    }
    if (family == "knn") {
        Reader r(j, family, {"k", "metric", "weighting"});
        KnnSpec s;
        s.k = r.positive_int("k", s.k);
        if (auto* m = r.get("metric")) {
            const auto v = m->get<std::string>();
            if (v == "l1") s.metric = DistanceMetric::L1;
            else if (v == "l2") s.metric = DistanceMetric::L2;
            else throw ConfigError("unknown k-NN metric '" + v + "'");
        }
        if (auto* w = r.get("weighting")) {
            const auto v = w->get<std::string>();
            if (v == "uniform") s.weighting = NeighborWeighting::Uniform;
            else if (v == "distance") s.weighting = NeighborWeighting::DistanceWeighted;
            else throw ConfigError("unknown k-NN weighting '" + v + "'");
        }
        return s;
    }
    if (family == "nb") {
        Reader r(j, family, {"var_smoothing"});
        GaussianNBSpec s;
        s.var_smoothing = r.positive_real("var_smoothing", s.var_smoothing);
        return s;
    }
    if (family == "svm") {
        Reader r(j, family, {"regularization", "epochs", "seed"});
        LinearSvmSpec s;
        s.regularization = r.positive_real("regularization", s.regularization);
        s.epochs = r.positive_int("epochs", s.epochs);
        s.seed = r.seed(s.seed);
        return s;
    }
    if (family == "mlp") {
        Reader r(j, family, {"hidden_layers", "max_iterations", "learning_rate", "seed", "batch_size"});
        MlpSpec s;
        if (auto* h = r.get("hidden_layers")) {
            if (!h->is_array()) throw ConfigError("spec 'mlp': 'hidden_layers' must be an array");
            s.hidden_layers.clear();
            for (const auto& w : *h) {
                if (!w.is_number_integer() || w.get<long long>() < 1)
                    throw ConfigError("spec 'mlp': layer widths must be positive integers");
                s.hidden_layers.push_back(w.get<int>());
            }
        }
        s.max_iterations = r.non_negative_int("max_iterations", s.max_iterations);
        s.learning_rate = r.positive_real("learning_rate", s.learning_rate);
        s.seed = r.seed(s.seed);
        s.batch_size = r.positive_int("batch_size", s.batch_size);
        return s;
    }
    if (family == "ensemble") {
        Reader r(j, family, {"members", "tie_rule"});
        EnsembleSpec s;
        if (auto* m = r.get("members")) {
            if (!m->is_array()) throw ConfigError("spec 'ensemble': 'members' must be an array");
            for (const auto& member : *m) s.members.push_back(spec_from_json(member));
        } else {
            s = default_ensemble();
        }
        if (s.members.empty()) throw ConfigError("spec 'ensemble': needs at least one member");
        if (auto* t = r.get("tie_rule"); t && t->get<std::string>() != "first_member")
            throw ConfigError("spec 'ensemble': unknown tie_rule '" + t->get<std::string>() + "'");
        return s;
    }
    throw ConfigError("unknown classifier family '" + family + "'");
}

EnsembleSpec default_ensemble() {
    EnsembleSpec e;
    e.members.emplace_back(RandomForestSpec{});
    e.members.emplace_back(MlpSpec{});
    e.members.emplace_back(LinearSvmSpec{});
    e.members.emplace_back(KnnSpec{10, DistanceMetric::L2, NeighborWeighting::DistanceWeighted});
    return e;
}

} // namespace dropcol
