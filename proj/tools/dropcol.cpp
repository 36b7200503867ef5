#include "dropcol/dataset.hpp"
#include "dropcol/error.hpp"
#include "dropcol/experiments.hpp"
#include "dropcol/hash.hpp"
#include "dropcol/kernels/kernels.hpp"
#include "dropcol/learners/model.hpp"
#include "dropcol/physics.hpp"
#include "dropcol/rng.hpp"
#include "dropcol/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dropcol;

namespace {

struct Options {
    std::string corpus;
    std::string config;
    std::string manifest;
    std::string out;
    std::string physics;
    std::string features;
    std::string sources;
    std::string family;
    std::string models;
    std::string levels;
    std::string sizes;
    std::string model;
    std::string input;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::optional<std::size_t> folds;
    std::optional<int> repeats;
    bool global_standardize = false;
    bool stratify = false;
    bool dry_run = false;
    bool quiet = false;
};

/// Non-zero exit with a reason already reported on stderr.
struct Exit {
    int code;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

template <class T>
std::vector<T> parse_numbers(const std::string& text, const char* flag) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) {
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !is.eof()) throw ConfigError(std::string(flag) + ": bad value '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<FeatureSet> parse_features(const std::string& text) {
    if (text == "both") return {FeatureSet::BaseOnly, FeatureSet::WithDomainKnowledge};
    auto fs = parse_feature_set(text);
    if (!fs) throw ConfigError("--features must be base, domain or both");
    return {*fs};
}

std::vector<std::string> parse_sources(const std::string& text) {
    auto out = split_list(text);
    for (const auto& s : out)
        if (!is_registered_source(s)) throw ConfigError("--sources: unregistered source '" + s + "'");
    return out;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path.string());
    out << text;
    if (!out) throw Error("io", "write failed: " + path.string());
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string resolve_corpus(const Options& o, const std::string& from_config) {
    if (!o.corpus.empty()) return o.corpus;
    if (!from_config.empty()) return from_config;
    if (const char* env = std::getenv("DR_CORPUS"); env && *env) return env;
    throw ConfigError("no corpus: pass --corpus or set DR_CORPUS");
}

std::string out_dir(const Options& o, const std::string& from_config, const std::string& fallback) {
    if (!o.out.empty()) return o.out;
    if (!from_config.empty()) return from_config;
    return fallback;
}

struct Corpus {
    std::vector<CollisionRecord> records;
    std::string sha256;
};

Corpus load(const std::string& path, const std::vector<std::string>& sources) {
    Corpus c;
    c.sha256 = sha256_file(path);
    c.records = filter_sources(load_corpus(path), sources);
    if (c.records.empty()) throw ConfigError("no records left after source filter");
    return c;
}

json manifest_base(const std::vector<std::string>& argv, const std::string& command) {
    return {{"format_version", 1},
            {"command", command},
            {"argv", argv},
            {"artifact_version", std::string(kVersion)},
            {"rng", std::string(Rng::kAlgorithm)},
            {"simd_backend", std::string(kernels::to_string(kernels::active_backend()))},
            {"timestamp", utc_timestamp()}};
}

void write_manifest(const fs::path& dir, json manifest, const std::vector<fs::path>& outputs) {
    auto paths = json::array();
    for (const auto& p : outputs) paths.push_back(p.string());
    const auto self = dir / "manifest.json";
    paths.push_back(self.string());
    manifest["outputs"] = paths;
    write_text(self, manifest.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- commands ----------------------------------------------------------------------------------

int cmd_validate(const Options& o) {
    const auto path = resolve_corpus(o, "");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open " + path);
    const auto v = validate_corpus(in);

    std::array<std::size_t, kNumRegimes> per_class{};
    std::map<std::string, std::size_t> per_source;
    for (const auto& r : v.records) {
        ++per_class[code(r.label)];
        ++per_source[r.source_id];
    }
    json summary{{"corpus", path}, {"records", v.records.size()}, {"valid", v.ok()}};
    for (auto label : kAllRegimes) summary["per_class"][std::string(to_string(label))] = per_class[code(label)];
    summary["per_source"] = per_source;
    auto issues = json::array();
    for (const auto& i : v.issues) issues.push_back({{"line", i.line}, {"field", i.field}, {"message", i.message}});
    if (v.records.empty() && v.issues.empty()) issues.push_back({{"line", 0}, {"field", ""}, {"message", "no records"}});
    summary["issues"] = issues;

    std::cout << v.records.size() << " records\n";
    for (auto label : kAllRegimes) std::cout << "  " << to_string(label) << ": " << per_class[code(label)] << "\n";
    for (const auto& [src, n] : per_source) std::cout << "  " << src << ": " << n << "\n";
    if (!o.out.empty()) write_text(fs::path(o.out) / "validation.json", summary.dump(2) + "\n");

    if (!issues.empty()) {
        std::cerr << json{{"error", {{"kind", "validation_error"}, {"issues", issues}}}}.dump() << "\n";
        return 1;
    }
    return 0;
}

int cmd_baseline(const Options& o, const std::vector<std::string>& argv) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto corpus_path = resolve_corpus(o, "");
    const auto sources = parse_sources(o.sources);
    const auto physics = o.physics.empty() ? PhysicsModelParams{} : load_physics_params(o.physics);
    const auto corpus = load(corpus_path, sources);

    auto report = baseline_report(corpus.records, physics);
    report["sources"] = sources;
    report["environment"] = {{"corpus_sha256", corpus.sha256}, {"corpus", corpus_path}, {"timestamp", utc_timestamp()}};
    const fs::path dir = out_dir(o, "", "out/baseline");
    const auto report_path = dir / "baseline.json";
    write_text(report_path, report.dump(2) + "\n");

    auto manifest = manifest_base(argv, "baseline");
    manifest["config"] = {{"corpus", corpus_path}, {"sources", sources}, {"physics", to_json(physics)}};
    manifest["corpus_sha256"] = corpus.sha256;
    manifest["elapsed_seconds"] = seconds_since(t0);
    write_manifest(dir, manifest, {report_path});

    const auto& overall = report["overall"];
    std::cout << "baseline accuracy " << overall["accuracy"].get<double>() << " over " << overall["count"].get<std::size_t>()
              << " records";
    if (const auto clamped = overall["clamped_b"].get<std::size_t>(); clamped > 0)
        std::cout << " (" << clamped << " with b clamped below 1)";
    std::cout << "\n";
    for (const auto& [src, entry] : report["per_source"].items())
        std::cout << "  " << src << ": " << entry["accuracy"].get<double>() << " (" << entry["count"].get<std::size_t>()
                  << ")\n";
    return 0;
}

ExperimentConfig build_config(ExperimentKind kind, const Options& o) {
    ExperimentConfig c;
    c.kind = kind;
    if (!o.manifest.empty()) {
        const auto m = read_json(o.manifest);
        if (!m.contains("command") || m.at("command") != to_string(kind))
            throw ConfigError("manifest was not written by '" + std::string(to_string(kind)) + "'");
        c = experiment_config_from_json(m.at("config"), kind);
    } else if (!o.config.empty()) {
        c = experiment_config_from_json(read_json(o.config), kind);
    }
    c.corpus = resolve_corpus(o, c.corpus);
    c.out = out_dir(o, c.out, "out/" + std::string(to_string(kind)));
    if (o.seed) c.seed = *o.seed;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.folds) c.folds = *o.folds;
    if (o.repeats) c.repeats = *o.repeats;
    if (!o.features.empty()) c.feature_sets = parse_features(o.features);
    if (!o.sources.empty()) c.sources = parse_sources(o.sources);
    if (!o.physics.empty()) c.physics = load_physics_params(o.physics);
    if (o.global_standardize) c.global_standardize = true;
    if (o.stratify) c.stratify = true;
    if (!o.family.empty()) {
        if (kind != ExperimentKind::Sweep) throw ConfigError("--family only applies to sweep");
        if (c.family != o.family) c.grid = nullptr;
        c.family = o.family;
    }
    if (!o.models.empty()) {
        if (kind == ExperimentKind::Sweep) throw ConfigError("--models does not apply to sweep");
        c.models.clear();
        for (const auto& f : split_list(o.models)) c.models.push_back(tuned_spec(f));
    }
    if (!o.levels.empty()) {
        if (kind != ExperimentKind::Noise) throw ConfigError("--levels only applies to noise");
        c.levels = parse_numbers<double>(o.levels, "--levels");
    }
    if (!o.sizes.empty()) {
        if (kind != ExperimentKind::LearningCurve) throw ConfigError("--sizes only applies to learning-curve");
        c.sizes = parse_numbers<std::size_t>(o.sizes, "--sizes");
    }
    if (kind == ExperimentKind::Sweep && c.family.empty()) throw ConfigError("sweep needs --family");
    return c;
}

int cmd_experiment(ExperimentKind kind, const Options& o, const std::vector<std::string>& argv) {
    const auto t0 = std::chrono::steady_clock::now();
    auto config = build_config(kind, o);
    const auto corpus = load(config.corpus, config.sources);
    config = resolve_defaults(config, corpus.records.size());
    validate(config, corpus.records.size());

    if (o.dry_run) {
        std::cout << to_json(config).dump(2) << "\n";
        return 0;
    }

    ExperimentInputs inputs;
    inputs.records = &corpus.records;
    inputs.corpus_sha256 = corpus.sha256;
    if (!o.quiet) inputs.log = [](const std::string& line) { std::cerr << line << "\n"; };
    auto report = run_experiment(config, inputs);
    report["environment"]["timestamp"] = utc_timestamp();

    const fs::path dir = config.out;
    const std::string stem(to_string(kind));
    const auto json_path = dir / (stem + ".json");
    const auto csv_path = dir / (stem + ".csv");
    write_text(json_path, report.dump(2) + "\n");
    write_text(csv_path, report_csv(report));

    auto manifest = manifest_base(argv, stem);
    manifest["config"] = to_json(config);
    manifest["corpus_sha256"] = corpus.sha256;
    auto seeds = json{{"experiment", config.seed}};
    for (const auto& m : config.models) {
        const auto spec = to_json(m);
        if (spec.contains("seed")) seeds["models"][describe(m)] = spec["seed"];
    }
    manifest["seeds"] = seeds;
    manifest["elapsed_seconds"] = seconds_since(t0);
    write_manifest(dir, manifest, {json_path, csv_path});

    std::cout << "wrote " << json_path.string() << " (" << report["results"].size() << " results)\n";
    return 0;
}

int cmd_train(const Options& o, const std::vector<std::string>& argv) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto corpus_path = resolve_corpus(o, "");
    const auto sources = parse_sources(o.sources);
    if (o.family.empty()) throw ConfigError("train needs --family");
    const auto spec = tuned_spec(o.family);
    const auto sets = parse_features(o.features.empty() ? "domain" : o.features);
    if (sets.size() != 1) throw ConfigError("train takes a single feature set");
    const auto physics = o.physics.empty() ? PhysicsModelParams{} : load_physics_params(o.physics);
    const auto seed = o.seed.value_or(42);
    const auto corpus = load(corpus_path, sources);

    const auto features = build_features(corpus.records, sets.front(), physics);
    const auto [train, standardization] = standardize_fit_transform(features);
    FitOptions fit_options;
    fit_options.jobs = o.jobs.value_or(1);
    const auto model = fit(spec, train, seed, fit_options);

    const fs::path dir = out_dir(o, "", "out/model");
    const auto model_path = dir / "model.json";
    fs::create_directories(dir);
    save_model(model, model_path.string());

    auto manifest = manifest_base(argv, "train");
    manifest["config"] = {{"corpus", corpus_path},
                          {"sources", sources},
                          {"spec", to_json(spec)},
                          {"feature_set", std::string(to_string(sets.front()))},
                          {"physics", to_json(physics)},
                          {"seed", seed}};
    manifest["corpus_sha256"] = corpus.sha256;
    manifest["seeds"] = {{"fit", seed}};
    manifest["elapsed_seconds"] = seconds_since(t0);
    write_manifest(dir, manifest, {model_path});
    std::cout << "wrote " << model_path.string() << "\n";
    return 0;
}

/// Reads rows whose header names the model's features, in order.
Matrix read_feature_rows(const std::string& path, const TrainedModel& model) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    const auto names = feature_names(model.feature_set);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const auto header = split_list(line);
    if (header.size() != names.size() || !std::equal(header.begin(), header.end(), names.begin()))
        throw ParseError(1, "header must list the model's features: " + [&] {
            std::string s;
            for (auto n : names) s += (s.empty() ? "" : ",") + std::string(n);
            return s;
        }());
    std::vector<double> values;
    std::size_t line_no = 1, rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto cells = split_list(line);
        if (cells.size() != names.size()) throw ParseError(line_no, "expected " + std::to_string(names.size()) + " fields");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str() || *end != '\0' || !std::isfinite(v))
                throw ValidationError(line_no, std::string(names[c]), "is not a finite number");
            values.push_back(v);
        }
        ++rows;
    }
    Matrix m(rows, names.size());
    std::copy(values.begin(), values.end(), m.data().begin());
    return m;
}

int cmd_predict(const Options& o, const std::vector<std::string>& argv) {
    if (o.model.empty() || o.input.empty()) throw ConfigError("predict needs --model and --input");
    const auto model = load_model(o.model);
    auto rows = read_feature_rows(o.input, model);
    if (model.standardization) model.standardization->apply(rows);
    const auto labels = predict(model, rows);
    const auto probs = predict_proba(model, rows);

    std::ostringstream csv;
    csv.precision(17);
    csv << "row,label,p_coalescence,p_bouncing,p_stretching,p_reflexive\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        csv << i << ',' << to_string(labels[i]);
        for (double p : probs[i]) csv << ',' << p;
        csv << '\n';
    }
    if (o.out.empty()) {
        std::cout << csv.str();
        return 0;
    }
    const fs::path dir = o.out;
    const auto path = dir / "predictions.csv";
    write_text(path, csv.str());
    auto manifest = manifest_base(argv, "predict");
    manifest["config"] = {{"model", o.model}, {"input", o.input}};
    manifest["model_sha256"] = sha256_file(o.model);
    manifest["input_sha256"] = sha256_file(o.input);
    write_manifest(dir, manifest, {path});
    std::cout << "wrote " << path.string() << " (" << labels.size() << " rows)\n";
    return 0;
}

void report_error(const std::string& kind, const std::string& message, json extra = json::object()) {
    json e{{"kind", kind}, {"message", message}};
    e.update(extra);
    std::cerr << json{{"error", e}}.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Droplet collision regime classification toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Options o;

    auto add_corpus = [&](CLI::App* c) {
        c->add_option("--corpus", o.corpus, "Corpus CSV (default: $DR_CORPUS)");
    };
    auto add_common = [&](CLI::App* c) {
        add_corpus(c);
        c->add_option("--out", o.out, "Output directory");
        c->add_option("--sources", o.sources, "Comma-separated source ids to keep");
        c->add_option("--physics", o.physics, "Physics parameter JSON");
    };
    auto add_experiment = [&](CLI::App* c) {
        add_common(c);
        c->add_option("--config", o.config, "Experiment config JSON");
        c->add_option("--manifest", o.manifest, "Re-run the config recorded in a manifest");
        c->add_option("--seed", o.seed, "Experiment seed (default 42)");
        c->add_option("--jobs", o.jobs, "Work-queue width")->check(CLI::PositiveNumber);
        c->add_option("--features", o.features, "base, domain or both");
        c->add_option("--folds", o.folds, "Cross-validation folds (default 10)");
        c->add_flag("--global-standardize", o.global_standardize, "Standardize once over the whole corpus");
        c->add_flag("--stratify", o.stratify, "Stratified folds");
        c->add_flag("--dry-run", o.dry_run, "Print the resolved config and exit");
        c->add_flag("--quiet", o.quiet, "No per-job log lines");
    };

    auto* validate_cmd = app.add_subcommand("validate", "Parse and range-check a corpus");
    add_corpus(validate_cmd);
    validate_cmd->add_option("--out", o.out, "Write validation.json here");

    auto* baseline_cmd = app.add_subcommand("baseline", "Physics regime-map accuracy");
    add_common(baseline_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "Hyperparameter sweep");
    add_experiment(sweep_cmd);
    sweep_cmd->add_option("--family", o.family, "dt, rf, knn, nb, svm or mlp");

    auto* compare_cmd = app.add_subcommand("compare", "Tuned-model comparison with baseline");
    add_experiment(compare_cmd);
    compare_cmd->add_option("--models", o.models, "Comma-separated families");

    auto* curve_cmd = app.add_subcommand("learning-curve", "Accuracy against corpus size");
    add_experiment(curve_cmd);
    curve_cmd->add_option("--models", o.models, "Comma-separated families");
    curve_cmd->add_option("--sizes", o.sizes, "Comma-separated subset sizes");

    auto* noise_cmd = app.add_subcommand("noise", "Accuracy against feature noise");
    add_experiment(noise_cmd);
    noise_cmd->add_option("--models", o.models, "Comma-separated families");
    noise_cmd->add_option("--levels", o.levels, "Comma-separated noise standard deviations");
    noise_cmd->add_option("--repeats", o.repeats, "Repeats per level");

    auto* train_cmd = app.add_subcommand("train", "Fit a tuned model on the whole corpus");
    add_common(train_cmd);
    train_cmd->add_option("--family", o.family, "dt, rf, knn, nb, svm, mlp or ensemble")->required();
    train_cmd->add_option("--features", o.features, "base or domain (default domain)");
    train_cmd->add_option("--seed", o.seed, "Fit seed (default 42)");
    train_cmd->add_option("--jobs", o.jobs, "Threads for forest training")->check(CLI::PositiveNumber);

    auto* predict_cmd = app.add_subcommand("predict", "Apply a serialized model to feature rows");
    predict_cmd->add_option("--model", o.model, "Model JSON")->required();
    predict_cmd->add_option("--input", o.input, "CSV with a header of the model's feature names")->required();
    predict_cmd->add_option("--out", o.out, "Output directory (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage_error", e.what());
        return 2;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(o);
        if (baseline_cmd->parsed()) return cmd_baseline(o, args);
        if (sweep_cmd->parsed()) return cmd_experiment(ExperimentKind::Sweep, o, args);
        if (compare_cmd->parsed()) return cmd_experiment(ExperimentKind::Compare, o, args);
        if (curve_cmd->parsed()) return cmd_experiment(ExperimentKind::LearningCurve, o, args);
        if (noise_cmd->parsed()) return cmd_experiment(ExperimentKind::Noise, o, args);
        if (train_cmd->parsed()) return cmd_train(o, args);
        if (predict_cmd->parsed()) return cmd_predict(o, args);
    } catch (const ParseError& e) {
        report_error(e.kind(), e.what(), {{"line", e.line()}});
    } catch (const ValidationError& e) {
        report_error(e.kind(), e.what(), {{"line", e.line()}, {"field", e.field()}});
    } catch (const Error& e) {
        report_error(e.kind(), e.what());
    } catch (const fs::filesystem_error& e) {
        report_error("io", e.what());
    } catch (const std::exception& e) {
        report_error("internal", e.what());
    }
    return 1;
}
