#include "dropcol/experiments.hpp"

#include "dropcol/error.hpp"
#include "dropcol/kernels/kernels.hpp"
#include "dropcol/parallel.hpp"
#include "dropcol/rng.hpp"
#include "dropcol/version.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace dropcol {

namespace {

constexpr std::array<std::string_view, 4> kKindNames{"sweep", "compare", "learning-curve", "noise"};

std::vector<FeatureSet> both_feature_sets() { return {FeatureSet::BaseOnly, FeatureSet::WithDomainKnowledge}; }

nlohmann::json environment(const ExperimentConfig&, const ExperimentInputs& in) {
    return {
        {"corpus_sha256", in.corpus_sha256},
        {"corpus_rows", in.records ? in.records->size() : 0},
        {"rng", std::string(Rng::kAlgorithm)},
        {"simd_backend", std::string(kernels::to_string(kernels::active_backend()))},
        {"physics_decision_order", std::string(kDecisionOrder)},
        {"artifact_version", std::string(kVersion)},
    };
}

nlohmann::json report_header(const ExperimentConfig& config, const ExperimentInputs& in) {
    // Output location and worker count do not affect results, so they stay out of the report.
    auto embedded = to_json(config);
    embedded.erase("out");
    embedded.erase("jobs");
    return {{"format_version", kReportFormatVersion},
            {"kind", std::string(to_string(config.kind))},
            {"config", embedded},
            {"environment", environment(config, in)},
            {"results", nlohmann::json::array()}};
}

CrossValOptions cv_options(const ExperimentConfig& c) {
    CrossValOptions o;
    o.k = c.folds;
    o.stratify = c.stratify;
    o.global_standardize = c.global_standardize;
    return o;
}

const std::vector<CollisionRecord>& records_of(const ExperimentInputs& in) {
    if (!in.records || in.records->empty()) throw ConfigError("experiment needs a non-empty corpus");
    return *in.records;
}

std::map<FeatureSet, FeatureMatrix> build_all(const std::vector<CollisionRecord>& records,
                                               const std::vector<FeatureSet>& sets, const PhysicsModelParams& physics) {
    std::map<FeatureSet, FeatureMatrix> out;
    for (auto fs : sets) out.emplace(fs, build_features(records, fs, physics));
    return out;
}

nlohmann::json cv_entry(std::size_t index, const CrossValResult& r) {
    nlohmann::json e;
    e["index"] = index;
    e["feature_set"] = std::string(to_string(r.feature_set));
    e["model"] = describe(r.spec);
    e["family"] = family_name(r.spec);
    e["spec"] = to_json(r.spec);
    e["cv"] = to_json(r);
    e["mean_accuracy"] = r.mean_accuracy;
    return e;
}

void log_line(const ExperimentInputs& in, const std::string& line) {
    if (in.log) in.log(line);
}

std::string fmt_acc(double v) {
    std::ostringstream os;
    os.precision(4);
    os << std::fixed << v;
    return os.str();
}

std::string grid_params(const nlohmann::json& spec, std::string_view family) {
    // Flattened "key=value" list of the spec minus the family tag.
    std::string out;
    for (const auto& [k, v] : spec.items()) {
        if (k == "family" || (family != "rf" && family != "svm" && family != "mlp" && k == "seed")) continue;
        if (!out.empty()) out += ';';
        out += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    }
    return out;
}

} // namespace

std::string_view to_string(ExperimentKind kind) noexcept { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == text) return static_cast<ExperimentKind>(i);
    return std::nullopt;
}

nlohmann::json default_grid(std::string_view family) {
    auto range = [](int lo, int hi) {
        std::vector<int> v;
        for (int i = lo; i <= hi; ++i) v.push_back(i);
        return v;
    };
    if (family == "dt") return {{"criterion", {"gini", "entropy"}}, {"max_depth", range(1, 32)}};
    if (family == "rf") return {{"max_depth", {16, 32}}, {"n_estimators", {1, 2, 5, 10, 20, 30, 50, 100}}};
    if (family == "knn")
        return {{"k", range(1, 50)}, {"metric", {"l1", "l2"}}, {"weighting", {"uniform", "distance"}}};
    if (family == "mlp") return {{"max_iterations", {10, 30, 100, 300, 500}}};
    if (family == "nb") return {{"var_smoothing", {1e-9, 1e-6, 1e-3}}};
    if (family == "svm") return {{"regularization", {1e-5, 1e-4, 1e-3, 1e-2}}};
    throw ConfigError("no default sweep grid for family '" + std::string(family) + "'");
}

std::vector<ClassifierSpec> expand_grid(std::string_view family, const nlohmann::json& grid) {
    if (!grid.is_object() || grid.empty()) throw ConfigError("sweep grid must be a non-empty object");
    const auto base = to_json(tuned_spec(family));
    std::vector<std::pair<std::string, nlohmann::json>> axes;
    for (const auto& [k, v] : grid.items()) {
        if (!v.is_array() || v.empty()) throw ConfigError("sweep grid '" + k + "' must be a non-empty list");
        axes.emplace_back(k, v);
    }
    std::vector<ClassifierSpec> out;
    std::vector<std::size_t> pos(axes.size(), 0);
    while (true) {
        auto spec = base;
        for (std::size_t a = 0; a < axes.size(); ++a) spec[axes[a].first] = axes[a].second[pos[a]];
        out.push_back(spec_from_json(spec));
        std::size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++pos[a] < axes[a].second.size()) break;
            pos[a] = 0;
            if (a == 0) return out;
        }
        if (axes.empty()) return out;
    }
}

ClassifierSpec tuned_spec(std::string_view family) {
    if (family == "dt") return DecisionTreeSpec{SplitCriterion::Gini, 20};
    if (family == "rf") return RandomForestSpec{};
    if (family == "knn") return KnnSpec{10, DistanceMetric::L2, NeighborWeighting::DistanceWeighted};
    if (family == "nb") return GaussianNBSpec{};
    if (family == "svm") return LinearSvmSpec{};
    if (family == "mlp") return MlpSpec{};
    if (family == "ensemble") return default_ensemble();
    throw ConfigError("unknown classifier family '" + std::string(family) + "'");
}

std::vector<ClassifierSpec> default_compare_models() {
    std::vector<ClassifierSpec> out;
    for (auto f : {"dt", "rf", "knn", "nb", "svm", "mlp", "ensemble"}) out.push_back(tuned_spec(f));
    return out;
}

ExperimentConfig resolve_defaults(ExperimentConfig c, std::size_t corpus_rows) {
    switch (c.kind) {
    case ExperimentKind::Sweep:
        if (c.feature_sets.empty()) c.feature_sets = both_feature_sets();
        if (c.grid.is_null()) c.grid = default_grid(c.family);
        break;
    case ExperimentKind::Compare:
        if (c.feature_sets.empty()) c.feature_sets = both_feature_sets();
        if (c.models.empty()) c.models = default_compare_models();
        break;
    case ExperimentKind::LearningCurve:
        if (c.feature_sets.empty()) c.feature_sets = both_feature_sets();
        if (c.models.empty()) c.models = {tuned_spec("dt"), tuned_spec("knn")};
        if (c.sizes.empty()) {
            for (std::size_t s : {100, 200, 500, 1000, 2000, 4000})
                if (s < corpus_rows) c.sizes.push_back(s);
            c.sizes.push_back(corpus_rows);
        }
        break;
    case ExperimentKind::Noise:
        if (c.feature_sets.empty()) c.feature_sets = {FeatureSet::BaseOnly};
        if (c.models.empty()) c.models = {tuned_spec("dt"), tuned_spec("knn"), tuned_spec("mlp"), tuned_spec("rf")};
        if (c.levels.empty()) c.levels = {0.0, 0.05, 0.1, 0.2, 0.3, 0.5};
        break;
    }
    return c;
}

void validate(const ExperimentConfig& c, std::size_t corpus_rows) {
    if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (c.folds < 2) throw ConfigError("folds must be >= 2");
    if (corpus_rows < c.folds) throw ConfigError("corpus has fewer rows than folds");
    if (c.feature_sets.empty()) throw ConfigError("no feature sets selected");
    switch (c.kind) {
    case ExperimentKind::Sweep: (void)expand_grid(c.family, c.grid); break;
    case ExperimentKind::Compare:
        if (c.models.empty()) throw ConfigError("compare needs at least one model");
        break;
    case ExperimentKind::LearningCurve:
        if (c.sizes.empty()) throw ConfigError("learning curve needs sizes");
        if (!std::is_sorted(c.sizes.begin(), c.sizes.end())) throw ConfigError("learning-curve sizes must be ascending");
        if (c.sizes.front() < c.folds) throw ConfigError("learning-curve sizes must be >= folds");
        if (c.sizes.back() > corpus_rows) throw ConfigError("learning-curve size exceeds corpus rows");
        break;
    case ExperimentKind::Noise:
        if (c.levels.empty()) throw ConfigError("noise study needs levels");
        if (c.levels.front() < 0.0 || !std::is_sorted(c.levels.begin(), c.levels.end()))
            throw ConfigError("noise levels must be non-negative and ascending");
        if (c.repeats < 1) throw ConfigError("repeats must be >= 1");
        break;
    }
}

// --- config JSON -------------------------------------------------------------------------------

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["kind"] = std::string(to_string(c.kind));
    j["corpus"] = c.corpus;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["out"] = c.out;
    auto fs = nlohmann::json::array();
    for (auto f : c.feature_sets) fs.push_back(std::string(to_string(f)));
    j["feature_sets"] = fs;
    j["physics"] = to_json(c.physics);
    j["folds"] = c.folds;
    j["global_standardize"] = c.global_standardize;
    j["stratify"] = c.stratify;
    j["sources"] = c.sources;
    auto models = [&] {
        auto m = nlohmann::json::array();
        for (const auto& s : c.models) m.push_back(to_json(s));
        return m;
    };
    switch (c.kind) {
    case ExperimentKind::Sweep:
        j["family"] = c.family;
        j["grid"] = c.grid;
        break;
    case ExperimentKind::Compare: j["models"] = models(); break;
    case ExperimentKind::LearningCurve:
        j["models"] = models();
        j["sizes"] = c.sizes;
        break;
    case ExperimentKind::Noise:
        j["models"] = models();
        j["levels"] = c.levels;
        j["repeats"] = c.repeats;
        break;
    }
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j, ExperimentKind kind) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    std::vector<std::string> allowed{"kind", "corpus", "seed", "jobs", "out", "feature_sets", "physics",
                                     "folds", "global_standardize", "stratify", "sources"};
    switch (kind) {
    case ExperimentKind::Sweep: allowed.insert(allowed.end(), {"family", "grid"}); break;
    case ExperimentKind::Compare: allowed.push_back("models"); break;
    case ExperimentKind::LearningCurve: allowed.insert(allowed.end(), {"models", "sizes"}); break;
    case ExperimentKind::Noise: allowed.insert(allowed.end(), {"models", "levels", "repeats"}); break;
    }
    for (const auto& [k, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError("config: unknown key '" + k + "' for " + std::string(to_string(kind)));

    ExperimentConfig c;
    c.kind = kind;
    try {
        if (j.contains("kind") && j.at("kind").get<std::string>() != to_string(kind))
            throw ConfigError("config kind '" + j.at("kind").get<std::string>() + "' does not match command");
        if (j.contains("corpus")) c.corpus = j.at("corpus").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("jobs")) c.jobs = j.at("jobs").get<unsigned>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("feature_sets")) {
            for (const auto& f : j.at("feature_sets")) {
                const auto fs = parse_feature_set(f.get<std::string>());
                if (!fs) throw ConfigError("config: unknown feature set '" + f.get<std::string>() + "'");
                c.feature_sets.push_back(*fs);
            }
        }
        if (j.contains("physics")) {
            const auto& p = j.at("physics");
            c.physics = p.is_string() ? load_physics_params(p.get<std::string>()) : physics_params_from_json(p);
        }
        if (j.contains("folds")) c.folds = j.at("folds").get<std::size_t>();
        if (j.contains("global_standardize")) c.global_standardize = j.at("global_standardize").get<bool>();
        if (j.contains("stratify")) c.stratify = j.at("stratify").get<bool>();
        if (j.contains("sources")) {
            c.sources = j.at("sources").get<std::vector<std::string>>();
            for (const auto& s : c.sources)
                if (!is_registered_source(s)) throw ConfigError("config: unregistered source '" + s + "'");
        }
        if (j.contains("family")) c.family = j.at("family").get<std::string>();
        if (j.contains("grid")) c.grid = j.at("grid");
        if (j.contains("models"))
            for (const auto& m : j.at("models")) c.models.push_back(spec_from_json(m));
        if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
        if (j.contains("levels")) c.levels = j.at("levels").get<std::vector<double>>();
        if (j.contains("repeats")) c.repeats = j.at("repeats").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (kind == ExperimentKind::Sweep && c.family.empty()) throw ConfigError("sweep config needs 'family'");
    return c;
}

// --- runners -----------------------------------------------------------------------------------

nlohmann::json run_sweep(const ExperimentConfig& config, const ExperimentInputs& in) {
    const auto& records = records_of(in);
    const auto specs = expand_grid(config.family, config.grid);
    const auto matrices = build_all(records, config.feature_sets, config.physics);

    struct Job {
        std::size_t spec;
        FeatureSet fs;
    };
    std::vector<Job> jobs;
    for (auto fs : config.feature_sets)
        for (std::size_t s = 0; s < specs.size(); ++s) jobs.push_back({s, fs});

    std::vector<CrossValResult> results(jobs.size());
    const auto opts = cv_options(config);
    parallel_for(jobs.size(), config.jobs, [&](std::size_t i) {
        results[i] = cross_validate(specs[jobs[i].spec], matrices.at(jobs[i].fs), config.seed, opts);
        log_line(in, "sweep " + std::to_string(i + 1) + "/" + std::to_string(jobs.size()) + " " +
                         describe(specs[jobs[i].spec]) + " [" + std::string(to_string(jobs[i].fs)) +
                         "] acc=" + fmt_acc(results[i].mean_accuracy));
    });

    auto report = report_header(config, in);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto e = cv_entry(i, results[i]);
        e["params"] = grid_params(e["spec"], config.family);
        report["results"].push_back(std::move(e));
    }
    return report;
}

nlohmann::json run_model_comparison(const ExperimentConfig& config, const ExperimentInputs& in) {
    const auto& records = records_of(in);
    const auto matrices = build_all(records, config.feature_sets, config.physics);

    struct Job {
        std::size_t spec;
        FeatureSet fs;
    };
    std::vector<Job> jobs;
    for (auto fs : config.feature_sets)
        for (std::size_t s = 0; s < config.models.size(); ++s) jobs.push_back({s, fs});

    std::vector<CrossValResult> results(jobs.size());
    const auto opts = cv_options(config);
    parallel_for(jobs.size(), config.jobs, [&](std::size_t i) {
        results[i] = cross_validate(config.models[jobs[i].spec], matrices.at(jobs[i].fs), config.seed, opts);
        log_line(in, "compare " + std::to_string(i + 1) + "/" + std::to_string(jobs.size()) + " " +
                         describe(config.models[jobs[i].spec]) + " [" + std::string(to_string(jobs[i].fs)) +
                         "] acc=" + fmt_acc(results[i].mean_accuracy));
    });

    auto report = report_header(config, in);
    std::size_t best = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        report["results"].push_back(cv_entry(i, results[i]));
        if (results[i].mean_accuracy > results[best].mean_accuracy) best = i;
    }
    const auto base = baseline_accuracy(records, config.physics);
    report["baseline"] = {{"model", "physics"},
                          {"accuracy", base.accuracy},
                          {"confusion_raw", confusion_json(base.confusion)},
                          {"clamped_b", base.clamped}};
    report["best"] = {{"index", best},
                      {"model", describe(results[best].spec)},
                      {"feature_set", std::string(to_string(results[best].feature_set))},
                      {"mean_accuracy", results[best].mean_accuracy},
                      {"confusion_normalized", to_json(confusion_normalize(results[best].confusion_raw))}};
    return report;
}

nlohmann::json run_learning_curve(const ExperimentConfig& config, const ExperimentInputs& in) {
    const auto& records = records_of(in);
    const auto full = build_all(records, config.feature_sets, config.physics);

    struct Job {
        std::size_t size;
        std::size_t spec;
        FeatureSet fs;
    };
    std::vector<Job> jobs;
    for (auto size : config.sizes)
        for (std::size_t s = 0; s < config.models.size(); ++s)
            for (auto fs : config.feature_sets) jobs.push_back({size, s, fs});

    std::vector<CrossValResult> results(jobs.size());
    const auto opts = cv_options(config);
    parallel_for(jobs.size(), config.jobs, [&](std::size_t i) {
        // Same seed for every size: the first m rows of one permutation, so subsets are nested.
        const auto idx = subsample_indices(records.size(), jobs[i].size, config.seed);
        const auto subset = full.at(jobs[i].fs).select(idx);
        results[i] = cross_validate(config.models[jobs[i].spec], subset, config.seed, opts);
        log_line(in, "learning-curve " + std::to_string(i + 1) + "/" + std::to_string(jobs.size()) + " n=" +
                         std::to_string(jobs[i].size) + " " + describe(config.models[jobs[i].spec]) + " [" +
                         std::string(to_string(jobs[i].fs)) + "] acc=" + fmt_acc(results[i].mean_accuracy));
    });

    auto report = report_header(config, in);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto e = cv_entry(i, results[i]);
        e["size"] = jobs[i].size;
        report["results"].push_back(std::move(e));
    }
    return report;
}

nlohmann::json run_noise_study(const ExperimentConfig& config, const ExperimentInputs& in) {
    const auto& records = records_of(in);
    const auto matrices = build_all(records, config.feature_sets, config.physics);

    struct Job {
        std::size_t spec;
        FeatureSet fs;
        std::size_t level;
        int repeat;
    };
    std::vector<Job> jobs;
    for (auto fs : config.feature_sets)
        for (std::size_t s = 0; s < config.models.size(); ++s)
            for (std::size_t l = 0; l < config.levels.size(); ++l)
                for (int r = 0; r < config.repeats; ++r) jobs.push_back({s, fs, l, r});

    std::vector<CrossValResult> results(jobs.size());
    parallel_for(jobs.size(), config.jobs, [&](std::size_t i) {
        const auto& job = jobs[i];
        // Repeat 0 uses the experiment seed so a zero-noise run matches the comparison study.
        const auto cv_seed = job.repeat == 0 ? config.seed : derive_seed(config.seed, static_cast<std::uint64_t>(job.repeat));
        auto opts = cv_options(config);
        opts.noise = NoiseSpec{config.levels[job.level], derive_seed(cv_seed, 0x6e6f697365ULL)};
        results[i] = cross_validate(config.models[job.spec], matrices.at(job.fs), cv_seed, opts);
        log_line(in, "noise " + std::to_string(i + 1) + "/" + std::to_string(jobs.size()) + " n=" +
                         fmt_acc(config.levels[job.level]) + " rep=" + std::to_string(job.repeat) + " " +
                         describe(config.models[job.spec]) + " [" + std::string(to_string(job.fs)) +
                         "] acc=" + fmt_acc(results[i].mean_accuracy));
    });

    auto report = report_header(config, in);
    const auto reps = static_cast<std::size_t>(config.repeats);
    for (std::size_t g = 0; g * reps < jobs.size(); ++g) {
        const auto& first = jobs[g * reps];
        nlohmann::json e;
        e["index"] = g;
        e["feature_set"] = std::string(to_string(first.fs));
        e["model"] = describe(config.models[first.spec]);
        e["family"] = family_name(config.models[first.spec]);
        e["spec"] = to_json(config.models[first.spec]);
        e["noise"] = config.levels[first.level];
        e["repeats"] = nlohmann::json::array();
        double mean = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& res = results[g * reps + r];
            e["repeats"].push_back(to_json(res));
            mean += res.mean_accuracy;
        }
        e["mean_accuracy"] = mean / static_cast<double>(reps);
        report["results"].push_back(std::move(e));
    }
    return report;
}

nlohmann::json run_experiment(const ExperimentConfig& raw, const ExperimentInputs& in) {
    const auto& records = records_of(in);
    const auto config = resolve_defaults(raw, records.size());
    validate(config, records.size());
    switch (config.kind) {
    case ExperimentKind::Sweep: return run_sweep(config, in);
    case ExperimentKind::Compare: return run_model_comparison(config, in);
    case ExperimentKind::LearningCurve: return run_learning_curve(config, in);
    case ExperimentKind::Noise: return run_noise_study(config, in);
    }
    throw ConfigError("unknown experiment kind");
}

std::string report_csv(const nlohmann::json& report) {
    std::ostringstream os;
    os.precision(17);
    os << "kind,index,feature_set,family,model,params,size,noise,mean_accuracy,std_accuracy,pooled_accuracy\n";
    const auto kind = report.at("kind").get<std::string>();
    for (const auto& e : report.at("results")) {
        double std_acc = 0.0, pooled = 0.0;
        if (e.contains("cv")) {
            std_acc = e["cv"]["std_accuracy"].get<double>();
            pooled = e["cv"]["pooled_accuracy"].get<double>();
        } else if (e.contains("repeats")) {
            for (const auto& r : e["repeats"]) pooled += r["pooled_accuracy"].get<double>();
            pooled /= static_cast<double>(e["repeats"].size());
        }
        os << kind << ',' << e["index"].get<std::size_t>() << ',' << e["feature_set"].get<std::string>() << ','
           << e["family"].get<std::string>() << ',' << '"' << e["model"].get<std::string>() << '"' << ','
           << '"' << (e.contains("params") ? e["params"].get<std::string>() : "") << '"' << ','
           << (e.contains("size") ? std::to_string(e["size"].get<std::size_t>()) : "") << ',';
        if (e.contains("noise")) os << e["noise"].get<double>();
        os << ',' << e["mean_accuracy"].get<double>() << ',' << std_acc << ',' << pooled << '\n';
    }
    if (report.contains("baseline"))
        os << kind << ",baseline,,physics,\"physics\",\"\",,," << report["baseline"]["accuracy"].get<double>() << ",0,"
           << report["baseline"]["accuracy"].get<double>() << '\n';
    return os.str();
}

nlohmann::json baseline_report(std::span<const CollisionRecord> records, const PhysicsModelParams& physics) {
    const auto overall = baseline_accuracy(records, physics);
    nlohmann::json j;
    j["format_version"] = kReportFormatVersion;
    j["kind"] = "baseline";
    j["physics"] = to_json(physics);
    j["decision_order"] = std::string(kDecisionOrder);
    j["overall"] = {{"accuracy", overall.accuracy},
                    {"count", overall.count},
                    {"clamped_b", overall.clamped},
                    {"confusion_raw", confusion_json(overall.confusion)}};
    j["per_source"] = nlohmann::json::object();
    for (auto src : kRegisteredSources) {
        std::vector<CollisionRecord> subset;
        for (const auto& r : records)
            if (r.source_id == src) subset.push_back(r);
        if (subset.empty()) continue;
        const auto b = baseline_accuracy(subset, physics);
        j["per_source"][std::string(src)] = {{"accuracy", b.accuracy}, {"count", b.count}};
    }
    return j;
}

} // namespace dropcol
