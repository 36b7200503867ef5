// Acceptance report: one line per primary criterion.
//
// Criteria that need the published corpus read it from --corpus or DR_CORPUS.
// Without it they print BLOCKED and run their synthetic-data fallback instead;
// --require-corpus turns BLOCKED into a failure.

#include "oracles.hpp"
#include "synthetic.hpp"

#include "dropcol/dataset.hpp"
#include "dropcol/evaluation.hpp"
#include "dropcol/experiments.hpp"
#include "dropcol/hash.hpp"
#include "dropcol/learners/knn.hpp"
#include "dropcol/learners/model.hpp"
#include "dropcol/physics.hpp"
#include "dropcol/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dropcol;

namespace {

// Tolerances and thresholds.
constexpr double kBaselineOverall = 0.43;
constexpr double kBaselineOlder = 0.64;
constexpr double kBaselineTolerance = 0.05;
constexpr double kBaselineSeconds = 5.0;
constexpr double kForestMin = 0.93;
constexpr double kEveryFamilyMin = 0.85;
constexpr double kStrongFamilyMin = 0.90;
constexpr double kCompareSeconds = 600.0;
constexpr double kPlateauTolerance = 0.02;
constexpr int kPlateauDepth = 20;
constexpr double kLargeSizeGap = 0.01;
constexpr std::size_t kSmallSizeMax = 1000;
constexpr std::size_t kLargeSizeMin = 2000;
constexpr int kNoiseRepeats = 3;
constexpr double kGradientRelError = 1e-4;
constexpr double kGradientStep = 1e-5;
constexpr double kStandardizationTolerance = 1e-9;
constexpr double kConfusionRowTolerance = 1e-9;
constexpr double kOracleSeconds = 60.0;
const std::vector<std::string> kOlderSources{"ashgriz1990", "estrade1999", "qian1997"};

enum class Status { Pass, Fail, Blocked };

struct Outcome {
    Status status = Status::Pass;
    std::vector<std::string> notes;

    void fail(const std::string& why) {
        status = Status::Fail;
        notes.push_back("FAILED: " + why);
    }
    void check(bool ok, const std::string& what) {
        if (!ok) fail(what);
        else notes.push_back(what);
    }
    void block() {
        if (status == Status::Pass) status = Status::Blocked;
    }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << std::fixed << v;
    return os.str();
}

struct Context {
    std::optional<std::vector<CollisionRecord>> corpus;
    std::string corpus_sha;
    unsigned jobs = 1;
    bool verbose = false;
};

ExperimentInputs inputs_for(const std::vector<CollisionRecord>& records, const Context& ctx) {
    ExperimentInputs in;
    in.records = &records;
    in.corpus_sha256 = ctx.corpus_sha;
    if (ctx.verbose) in.log = [](const std::string& line) { std::cerr << "  " << line << "\n"; };
    return in;
}

const std::vector<CollisionRecord>& synthetic(std::size_t rows) {
    static std::map<std::size_t, std::vector<CollisionRecord>> cache;
    auto it = cache.find(rows);
    if (it == cache.end()) it = cache.emplace(rows, testing::synthetic_corpus({rows, 2024})).first;
    return it->second;
}

/// Mean accuracy of result entries keyed by (feature_set, model) for a given extra key.
double entry_accuracy(const json& report, const std::string& fs, const std::string& family,
                      const std::function<bool(const json&)>& match = nullptr) {
    for (const auto& e : report["results"])
        if (e["feature_set"] == fs && e["family"] == family && (!match || match(e))) return e["mean_accuracy"].get<double>();
    throw std::runtime_error("missing result entry for " + family + " [" + fs + "]");
}

// --- criteria ---------------------------------------------------------------------------------

Outcome physics_baseline(const Context& ctx) {
    Outcome o;
    if (ctx.corpus) {
        const auto t0 = Clock::now();
        const auto overall = baseline_accuracy(*ctx.corpus, {});
        const auto older = baseline_accuracy(filter_sources(*ctx.corpus, kOlderSources), {});
        const double secs = seconds_since(t0);
        o.check(std::fabs(overall.accuracy - kBaselineOverall) <= kBaselineTolerance,
                "overall " + fmt(overall.accuracy) + " vs " + fmt(kBaselineOverall, 2) + "±" + fmt(kBaselineTolerance, 2));
        o.check(std::fabs(older.accuracy - kBaselineOlder) <= kBaselineTolerance,
                "pre-2016 sources " + fmt(older.accuracy) + " vs " + fmt(kBaselineOlder, 2) + "±" + fmt(kBaselineTolerance, 2));
        o.check(secs < kBaselineSeconds, "runtime " + fmt(secs, 3) + " s");
        return o;
    }
    o.block();
    const PhysicsModelParams p;
    struct Point {
        double we, b, delta;
        RegimeLabel expect;
    };
    const std::vector<Point> points{
        {1.0, 0.0, 1.0, RegimeLabel::Bouncing},       {2.0, 0.2, 0.9, RegimeLabel::Bouncing},
        {5.0, 0.9, 0.7, RegimeLabel::Bouncing},       {10.0, 0.0, 1.0, RegimeLabel::Coalescence},
        {15.0, 0.1, 1.0, RegimeLabel::Coalescence},   {12.0, 0.2, 0.8, RegimeLabel::Coalescence},
        {100.0, 0.0, 1.0, RegimeLabel::Reflexive},    {60.0, 0.05, 1.0, RegimeLabel::Reflexive},
        {150.0, 0.1, 0.9, RegimeLabel::Reflexive},    {100.0, 0.8, 1.0, RegimeLabel::Stretching},
        {60.0, 0.6, 1.0, RegimeLabel::Stretching},    {120.0, 0.5, 0.75, RegimeLabel::Stretching},
    };
    std::size_t ok = 0;
    for (const auto& pt : points) ok += classify_physics(pt.we, pt.b, pt.delta, p) == pt.expect;
    o.check(ok == points.size(), "fallback: region points " + std::to_string(ok) + "/" + std::to_string(points.size()));
    return o;
}

Outcome tuned_models(const Context& ctx) {
    Outcome o;
    ExperimentConfig c;
    c.kind = ExperimentKind::Compare;
    c.jobs = ctx.jobs;
    if (ctx.corpus) {
        const auto t0 = Clock::now();
        const auto report = run_experiment(c, inputs_for(*ctx.corpus, ctx));
        const double secs = seconds_since(t0);
        for (const std::string fs : {"base", "domain"}) {
            for (const std::string fam : {"dt", "rf", "knn", "nb", "svm", "mlp", "ensemble"}) {
                const double acc = entry_accuracy(report, fs, fam);
                const bool strong = fam == "dt" || fam == "rf" || fam == "knn" || fam == "mlp";
                const double need = fam == "rf" ? kForestMin : strong ? kStrongFamilyMin : kEveryFamilyMin;
                o.check(acc >= need, fam + "[" + fs + "] " + fmt(acc) + " >= " + fmt(need, 2));
            }
        }
        o.check(secs < kCompareSeconds, "runtime " + fmt(secs, 1) + " s");
        return o;
    }
    o.block();
    const auto& records = synthetic(600);
    c.feature_sets = {FeatureSet::WithDomainKnowledge};
    const auto report = run_experiment(c, inputs_for(records, ctx));
    std::array<std::size_t, kNumRegimes> counts{};
    for (const auto& r : records) ++counts[code(r.label)];
    const double majority = static_cast<double>(*std::max_element(counts.begin(), counts.end())) / records.size();
    std::size_t above = 0;
    for (const auto& e : report["results"]) above += e["mean_accuracy"].get<double>() > majority;
    o.check(above == report["results"].size(),
            "fallback: " + std::to_string(above) + "/" + std::to_string(report["results"].size()) +
                " tuned families beat the majority rate " + fmt(majority) + " on synthetic data");
    return o;
}

void check_plateau(Outcome& o, const json& report, const std::string& tag) {
    for (const std::string fs : {"base", "domain"})
        for (const std::string crit : {"gini", "entropy"}) {
            auto at = [&](int depth) {
                return entry_accuracy(report, fs, "dt", [&](const json& e) {
                    return e["spec"]["max_depth"] == depth && e["spec"]["criterion"] == crit;
                });
            };
            const double ref = at(32);
            double worst = 0.0;
            for (int d = kPlateauDepth; d <= 32; ++d) worst = std::max(worst, std::fabs(at(d) - ref));
            o.check(worst <= kPlateauTolerance, tag + crit + "[" + fs + "] max |acc(d>=20) - acc(32)| = " + fmt(worst));
        }
}

Outcome dt_sweep(const Context& ctx) {
    Outcome o;
    ExperimentConfig c;
    c.kind = ExperimentKind::Sweep;
    c.family = "dt";
    c.jobs = ctx.jobs;
    if (ctx.corpus) {
        check_plateau(o, run_experiment(c, inputs_for(*ctx.corpus, ctx)), "");
        return o;
    }
    o.block();
    check_plateau(o, run_experiment(c, inputs_for(synthetic(2000), ctx)), "fallback (synthetic): ");
    return o;
}

Outcome knn_sweep(const Context& ctx) {
    Outcome o;
    // Exact-equality property, no corpus needed.
    std::size_t compared = 0, mismatches = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto m = testing::random_blobs(300, 5, 70 + seed, 4, seed % 2 ? 0.8 : 0.3);
        const auto q = testing::random_blobs(100, 5, 170 + seed);
        for (auto metric : {DistanceMetric::L1, DistanceMetric::L2}) {
            const KnnModel u(KnnSpec{1, metric, NeighborWeighting::Uniform}, m.values, m.labels);
            const KnnModel d(KnnSpec{1, metric, NeighborWeighting::DistanceWeighted}, m.values, m.labels);
            for (const Matrix* rows : {&m.values, &q.values})
                for (std::size_t i = 0; i < rows->rows(); ++i, ++compared)
                    mismatches += u.predict_row(rows->row(i)) != d.predict_row(rows->row(i));
        }
    }
    const auto syn = build_features(synthetic(1000), FeatureSet::WithDomainKnowledge, {});
    for (auto metric : {DistanceMetric::L1, DistanceMetric::L2}) {
        const auto a = cross_validate(KnnSpec{1, metric, NeighborWeighting::Uniform}, syn, 42);
        const auto b = cross_validate(KnnSpec{1, metric, NeighborWeighting::DistanceWeighted}, syn, 42);
        ++compared;
        mismatches += a.confusion_raw != b.confusion_raw || a.fold_accuracies != b.fold_accuracies;
    }
    o.check(mismatches == 0, "k=1 uniform vs distance identical on " + std::to_string(compared) + " comparisons");

    if (!ctx.corpus) {
        o.block();
        return o;
    }
    ExperimentConfig c;
    c.kind = ExperimentKind::Sweep;
    c.family = "knn";
    c.jobs = ctx.jobs;
    c.grid = default_grid("knn");
    c.grid["weighting"] = {"uniform"};
    const auto report = run_experiment(c, inputs_for(*ctx.corpus, ctx));
    for (const std::string fs : {"base", "domain"})
        for (const std::string metric : {"l1", "l2"}) {
            auto at = [&](int k) {
                return entry_accuracy(report, fs, "knn",
                                      [&](const json& e) { return e["spec"]["k"] == k && e["spec"]["metric"] == metric; });
            };
            const double k1 = at(1);
            double best_large = 0.0;
            for (int k = 6; k <= 50; ++k) best_large = std::max(best_large, at(k));
            o.check(k1 >= best_large, metric + "[" + fs + "] acc(k=1) " + fmt(k1) + " >= max acc(k>5) " + fmt(best_large));
        }
    return o;
}

Outcome learning_curve(const Context& ctx) {
    Outcome o;
    if (!ctx.corpus) {
        o.block();
        // Fallback: nested subsets and a complete, well-formed report on synthetic data.
        bool nested = true;
        std::vector<std::size_t> prev;
        for (std::size_t n : {100u, 200u, 500u, 1000u}) {
            const auto idx = subsample_indices(1000, n, 42);
            nested &= std::equal(prev.begin(), prev.end(), idx.begin());
            prev = idx;
        }
        ExperimentConfig c;
        c.kind = ExperimentKind::LearningCurve;
        c.jobs = ctx.jobs;
        const auto report = run_experiment(c, inputs_for(synthetic(1000), ctx));
        o.check(nested, "fallback: subsets nested across sizes");
        o.check(report["results"].size() == 4 * 2 * 2,
                "fallback: " + std::to_string(report["results"].size()) + " entries for 4 sizes x 2 models x 2 feature sets");
        return o;
    }
    ExperimentConfig c;
    c.kind = ExperimentKind::LearningCurve;
    c.jobs = ctx.jobs;
    const auto report = run_experiment(c, inputs_for(*ctx.corpus, ctx));
    for (const std::string fam : {"dt", "knn"}) {
        double small_gap = 0.0, large_gap = -1.0;
        int n_small = 0;
        std::set<std::size_t> sizes;
        for (const auto& e : report["results"]) sizes.insert(e["size"].get<std::size_t>());
        for (auto s : sizes) {
            auto at = [&](const std::string& fs) {
                return entry_accuracy(report, fs, fam, [&](const json& e) { return e["size"] == s; });
            };
            const double gap = at("domain") - at("base");
            if (s <= kSmallSizeMax) {
                small_gap += gap;
                ++n_small;
            }
            if (s >= kLargeSizeMin) large_gap = std::max(large_gap, gap);
        }
        small_gap /= std::max(n_small, 1);
        o.check(small_gap > 0.0, fam + " mean gap (sizes <= 1000) " + fmt(small_gap) + " > 0");
        o.check(large_gap < kLargeSizeGap, fam + " max gap (sizes >= 2000) " + fmt(large_gap) + " < " + fmt(kLargeSizeGap, 2));
    }
    return o;
}

Outcome noise_study(const Context& ctx) {
    Outcome o;
    ExperimentConfig c;
    c.kind = ExperimentKind::Noise;
    c.jobs = ctx.jobs;
    c.repeats = kNoiseRepeats;
    if (!ctx.corpus) {
        o.block();
        // Fallback: noise level 0 reproduces the noiseless comparison exactly.
        const auto& records = synthetic(500);
        c.levels = {0.0};
        c.models = {tuned_spec("dt"), tuned_spec("knn")};
        c.repeats = 1;
        const auto nr = run_experiment(c, inputs_for(records, ctx));
        ExperimentConfig cmp;
        cmp.kind = ExperimentKind::Compare;
        cmp.models = c.models;
        cmp.feature_sets = {FeatureSet::BaseOnly};
        const auto cr = run_experiment(cmp, inputs_for(records, ctx));
        bool same = true;
        for (std::size_t i = 0; i < 2; ++i)
            same &= nr["results"][i]["repeats"][0]["confusion_raw"] == cr["results"][i]["cv"]["confusion_raw"];
        o.check(same, "fallback: zero noise equals the noiseless run exactly");
        return o;
    }
    c.levels = {0.0, 0.05, 0.1, 0.2, 0.3, 0.5};
    const auto report = run_experiment(c, inputs_for(*ctx.corpus, ctx));
    auto at = [&](const std::string& fam, double level) {
        return entry_accuracy(report, "base", fam, [&](const json& e) { return e["noise"].get<double>() == level; });
    };
    const double dt_drop = at("dt", 0.0) - at("dt", 0.05);
    for (const std::string fam : {"knn", "mlp", "rf"}) {
        const double drop = at(fam, 0.0) - at(fam, 0.05);
        o.check(dt_drop > drop, "dt drop " + fmt(dt_drop) + " > " + fam + " drop " + fmt(drop));
    }
    const double top = c.levels.back();
    o.check(at("mlp", top) >= at("rf", top), "at n=" + fmt(top, 2) + " mlp " + fmt(at("mlp", top)) + " >= rf " + fmt(at("rf", top)));
    return o;
}

Outcome confusion(const Context& ctx) {
    Outcome o;
    if (!ctx.corpus) {
        o.block();
        // Fallback: the reported largest entry is the true off-diagonal argmax.
        const auto m = build_features(synthetic(800), FeatureSet::WithDomainKnowledge, {});
        const auto r = cross_validate(tuned_spec("rf"), m, 42);
        const auto norm = confusion_normalize(r.confusion_raw);
        const auto [t, p] = largest_confusion(norm);
        bool ok = true;
        for (std::size_t a = 0; a < kNumRegimes; ++a)
            for (std::size_t b = 0; b < kNumRegimes; ++b)
                if (a != b) ok &= norm.rows[a][b] <= norm.rows[code(t)][code(p)];
        o.check(ok, "fallback: largest off-diagonal entry (" + std::string(to_string(t)) + " -> " +
                        std::string(to_string(p)) + ") is the maximum");
        return o;
    }
    const auto m = build_features(*ctx.corpus, FeatureSet::WithDomainKnowledge, {});
    CrossValOptions opts;
    opts.jobs = ctx.jobs;
    const auto r = cross_validate(tuned_spec("rf"), m, 42, opts);
    const auto [t, p] = largest_confusion(confusion_normalize(r.confusion_raw));
    o.check(t == RegimeLabel::Reflexive && p == RegimeLabel::Coalescence,
            "largest off-diagonal at (true=" + std::string(to_string(t)) + ", predicted=" + std::string(to_string(p)) + ")");
    return o;
}

// --- oracle suite -----------------------------------------------------------------------------

int run_cli(const std::string& args) {
    const int status = std::system((DROPCOL_BIN " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json load_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

Outcome oracle_suite(const Context&) {
    Outcome o;
    const auto t0 = Clock::now();

    {
        std::size_t same = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(1000 + seed);
            Matrix x(30, 3);
            for (auto& v : x.data()) v = static_cast<double>(rng.uniform_index(12)) / 4.0;
            std::vector<RegimeLabel> y;
            for (int i = 0; i < 30; ++i) y.push_back(regime_from_code(rng.uniform_index(kNumRegimes)));
            bool all = true;
            for (auto crit : {SplitCriterion::Gini, SplitCriterion::Entropy})
                for (int depth : {2, 32})
                    all &= DecisionTree::fit(x, y, TreeParams{crit, depth, 0}).nodes() ==
                           testing::exhaustive_tree(x, y, crit, depth);
            same += all;
        }
        o.check(same == 20, "tree = exhaustive split search on " + std::to_string(same) + "/20 instances");
    }
    {
        std::size_t same = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(500 + seed);
            Matrix train(200, 5), queries(20, 5);
            auto draw = [&] { return seed % 2 ? static_cast<double>(rng.uniform_index(6)) : rng.normal(); };
            for (auto& v : train.data()) v = draw();
            for (auto& v : queries.data()) v = draw();
            std::vector<RegimeLabel> labels;
            for (int i = 0; i < 200; ++i) labels.push_back(regime_from_code(rng.uniform_index(kNumRegimes)));
            bool all = true;
            for (int k : {1, 3, 7})
                for (auto metric : {DistanceMetric::L1, DistanceMetric::L2})
                    for (auto w : {NeighborWeighting::Uniform, NeighborWeighting::DistanceWeighted}) {
                        const KnnModel model(KnnSpec{k, metric, w}, train, labels);
                        for (std::size_t q = 0; q < queries.rows(); ++q) {
                            const auto ref = testing::linear_scan_knn(train, labels, queries.row(q), k,
                                                                      metric == DistanceMetric::L1,
                                                                      w == NeighborWeighting::DistanceWeighted);
                            all &= model.neighbors(queries.row(q)) == ref.neighbors &&
                                   model.predict_row(queries.row(q)) == regime_from_code(argmax_low(ref.scores));
                        }
                    }
            same += all;
        }
        o.check(same == 20, "k-NN = linear scan on " + std::to_string(same) + "/20 instances");
    }
    {
        double worst = 0.0;
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto data = testing::random_blobs(3, 5, 30 + seed);
            const std::vector<int> hidden{40, 40, 40, 40, 8};
            const auto net = Mlp::initialize(5, hidden, seed);
            const auto g = net.loss_and_gradient(data.values, data.labels);
            const auto fd = testing::finite_difference_gradient(net, data.values, data.labels, kGradientStep);
            auto rel = [](double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-6}); };
            for (std::size_t l = 0; l < fd.size(); ++l) {
                for (std::size_t i = 0; i < fd[l].weights.size(); ++i)
                    worst = std::max(worst, rel(g.layers[l].weights[i], fd[l].weights[i]));
                for (std::size_t i = 0; i < fd[l].bias.size(); ++i) worst = std::max(worst, rel(g.layers[l].bias[i], fd[l].bias[i]));
            }
        }
        o.check(worst < kGradientRelError, "MLP gradient max relative error " + [&] {
            std::ostringstream os;
            os.precision(2);
            os << std::scientific << worst;
            return os.str();
        }());
    }
    {
        const auto m = build_features(synthetic(1000), FeatureSet::WithDomainKnowledge, {});
        const auto z = standardize_fit_transform(m).first;
        double worst = 0.0;
        for (std::size_t j = 0; j < z.cols(); ++j) {
            double mean = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < z.rows(); ++i) mean += z.values(i, j);
            mean /= static_cast<double>(z.rows());
            for (std::size_t i = 0; i < z.rows(); ++i) sq += (z.values(i, j) - mean) * (z.values(i, j) - mean);
            worst = std::max({worst, std::fabs(mean), std::fabs(std::sqrt(sq / z.rows()) - 1.0)});
        }
        o.check(worst <= kStandardizationTolerance, "standardized mean/std deviation " + [&] {
            std::ostringstream os;
            os.precision(2);
            os << std::scientific << worst;
            return os.str();
        }());
    }
    {
        Rng rng(9);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            ConfusionCounts raw{};
            for (auto& row : raw)
                for (auto& v : row) v = rng.uniform_index(5000);
            const auto n = confusion_normalize(raw);
            for (std::size_t a = 0; a < kNumRegimes; ++a)
                if (!n.zero_support[a]) worst = std::max(worst, std::fabs(n.rows[a][0] + n.rows[a][1] + n.rows[a][2] + n.rows[a][3] - 1.0));
        }
        o.check(worst <= kConfusionRowTolerance, "confusion row sums within 1e-9");
    }
    {
        bool ok = true;
        for (std::size_t n : {10u, 11u, 57u, 1000u, 7898u}) {
            const auto folds = kfold_split(n, 10, 42);
            std::vector<int> seen(n, 0);
            for (const auto& f : folds) {
                for (auto i : f.test) ++seen[i];
                std::set<std::size_t> test(f.test.begin(), f.test.end());
                for (auto i : f.train) ok &= test.count(i) == 0;
                ok &= f.train.size() + f.test.size() == n;
            }
            for (int s : seen) ok &= s == 1;
        }
        o.check(ok, "CV folds cover every index exactly once");
    }
    {
        const auto dir = fs::temp_directory_path() / ("dropcol_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        const auto corpus = (dir / "corpus.csv").string();
        save_corpus(corpus, synthetic(400));
        const int first = run_cli("sweep --family dt --corpus " + corpus + " --quiet --out " + (dir / "a").string());
        const int second = run_cli("sweep --manifest " + (dir / "a" / "manifest.json").string() + " --quiet --out " +
                                   (dir / "b").string());
        bool same = first == 0 && second == 0;
        if (same) {
            auto a = load_json(dir / "a" / "sweep.json");
            auto b = load_json(dir / "b" / "sweep.json");
            a["environment"].erase("timestamp");
            b["environment"].erase("timestamp");
            same = a.dump() == b.dump() && a["results"].size() == 128;
        }
        fs::remove_all(dir);
        o.check(same, "sweep re-run from its manifest is bit-identical");
    }
    const double secs = seconds_since(t0);
    o.check(secs < kOracleSeconds, "runtime " + fmt(secs, 1) + " s");
    return o;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string corpus_path;
    bool require_corpus = false;
    Context ctx;
    ctx.jobs = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--corpus", corpus_path, "Published corpus CSV (default: $DR_CORPUS)");
    app.add_flag("--require-corpus", require_corpus, "Treat BLOCKED criteria as failures");
    app.add_option("--jobs", ctx.jobs, "Work-queue width for experiment runs");
    app.add_flag("--verbose", ctx.verbose, "Per-job log lines");
    CLI11_PARSE(app, argc, argv);

    if (corpus_path.empty())
        if (const char* env = std::getenv("DR_CORPUS"); env && *env) corpus_path = env;
    if (!corpus_path.empty()) {
        try {
            ctx.corpus = load_corpus(corpus_path);
            ctx.corpus_sha = sha256_file(corpus_path);
        } catch (const std::exception& e) {
            std::cerr << "cannot load corpus: " << e.what() << "\n";
            return 2;
        }
    }

    const std::vector<std::pair<std::string, Outcome (*)(const Context&)>> criteria{
        {"physics baseline accuracy", physics_baseline},
        {"tuned model accuracies", tuned_models},
        {"decision-tree depth plateau", dt_sweep},
        {"k-NN sweep", knn_sweep},
        {"learning curve feature-set gap", learning_curve},
        {"noise robustness", noise_study},
        {"random-forest confusion structure", confusion},
        {"oracle suites", oracle_suite},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn(ctx);
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        if (o.status == Status::Blocked && require_corpus) o.status = Status::Fail;
        const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "BLOCKED (no corpus)";
        failures += o.status == Status::Fail;
        std::cout << tag << "  " << name;
        for (std::size_t i = 0; i < o.notes.size(); ++i) std::cout << (i ? "; " : " | ") << o.notes[i];
        std::cout << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
