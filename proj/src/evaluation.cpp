#include "dropcol/evaluation.hpp"

#include "dropcol/error.hpp"
#include "dropcol/parallel.hpp"
#include "dropcol/rng.hpp"

#include <cmath>
#include <numeric>

namespace dropcol {

namespace {

std::vector<Fold> folds_from_assignment(std::span<const std::size_t> order, std::span<const std::size_t> fold_of,
                                        std::size_t k) {
    std::vector<Fold> folds(k);
    for (std::size_t i = 0; i < order.size(); ++i) folds[fold_of[i]].test.push_back(order[i]);
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t i = 0; i < order.size(); ++i)
            if (fold_of[i] != f) folds[f].train.push_back(order[i]);
    }
    return folds;
}

void add_noise(Matrix& m, double stddev, Rng& rng) {
    for (auto& v : m.data()) v += stddev * rng.normal();
}

} // namespace

std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("k-fold split needs k >= 2");
    if (n < k) throw ConfigError("k-fold split needs n >= k (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> fold_of(n);
    const std::size_t base = n / k, extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) fold_of[pos++] = f;
    }
    return folds_from_assignment(order, fold_of, k);
}

std::vector<Fold> kfold_split_stratified(std::span<const RegimeLabel> labels, std::size_t k, std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (k < 2) throw ConfigError("k-fold split needs k >= 2");
    if (n < k) throw ConfigError("k-fold split needs n >= k");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return code(labels[a]) < code(labels[b]); });
    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) fold_of[i] = i % k;
    return folds_from_assignment(order, fold_of, k);
}

double accuracy(std::span<const RegimeLabel> truth, std::span<const RegimeLabel> predicted) {
    if (truth.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

ConfusionCounts confusion_counts(std::span<const RegimeLabel> truth, std::span<const RegimeLabel> predicted) {
    ConfusionCounts c{};
    for (std::size_t i = 0; i < truth.size(); ++i) ++c[code(truth[i])][code(predicted[i])];
    return c;
}

CrossValResult cross_validate(const ClassifierSpec& spec, const FeatureMatrix& matrix, std::uint64_t seed,
                              const CrossValOptions& options) {
    const auto folds = options.stratify ? kfold_split_stratified(matrix.labels, options.k, seed)
                                        : kfold_split(matrix.rows(), options.k, seed);

    FeatureMatrix base = matrix;
    if (options.global_standardize) base = standardize_fit_transform(matrix).first;

    struct FoldOutcome {
        std::size_t correct = 0;
        ConfusionCounts confusion{};
        Standardization standardization;
    };
    std::vector<FoldOutcome> outcomes(folds.size());

    parallel_for(folds.size(), options.jobs, [&](std::size_t f) {
        auto train = base.select(folds[f].train);
        auto test = base.select(folds[f].test);
        if (!options.global_standardize) {
            if (train.rows() < 2) throw ConfigError("fold " + std::to_string(f) + ": fewer than 2 training rows");
            auto s = fit_standardization(train.values);
            train = apply_standardization(train, s);
            test = apply_standardization(test, s);
        }
        outcomes[f].standardization = *train.standardization;
        if (options.noise && options.noise->stddev > 0.0) {
            Rng rng(derive_seed(options.noise->seed, f));
            add_noise(train.values, options.noise->stddev, rng);
            add_noise(test.values, options.noise->stddev, rng);
        }
        TrainedModel model;
        try {
            model = fit(spec, train, derive_seed(seed, f), FitOptions{options.class_policy, 1});
        } catch (const FitError& e) {
            throw FitError("fold " + std::to_string(f) + ": " + e.what());
        }
        const auto predicted = predict(model, test.values);
        outcomes[f].confusion = confusion_counts(test.labels, predicted);
        for (std::size_t i = 0; i < predicted.size(); ++i) outcomes[f].correct += predicted[i] == test.labels[i];
    });

    CrossValResult r;
    r.spec = spec;
    r.feature_set = matrix.feature_set;
    r.seed = seed;
    r.k = options.k;
    r.noise = options.noise;
    r.stratified = options.stratify;
    r.global_standardize = options.global_standardize;
    std::size_t correct = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto size = folds[f].test.size();
        r.fold_sizes.push_back(size);
        r.fold_accuracies.push_back(static_cast<double>(outcomes[f].correct) / static_cast<double>(size));
        r.fold_standardization.push_back(std::move(outcomes[f].standardization));
        correct += outcomes[f].correct;
        for (std::size_t a = 0; a < kNumRegimes; ++a)
            for (std::size_t b = 0; b < kNumRegimes; ++b) r.confusion_raw[a][b] += outcomes[f].confusion[a][b];
    }
    const double k = static_cast<double>(folds.size());
    r.mean_accuracy = std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) / k;
    double ss = 0.0;
    for (double a : r.fold_accuracies) ss += (a - r.mean_accuracy) * (a - r.mean_accuracy);
    r.std_accuracy = std::sqrt(ss / k);
    r.pooled_accuracy = static_cast<double>(correct) / static_cast<double>(matrix.rows());
    return r;
}

ConfusionMatrixNormalized confusion_normalize(const ConfusionCounts& raw) {
    ConfusionMatrixNormalized m;
    for (std::size_t a = 0; a < kNumRegimes; ++a) {
        const double total = static_cast<double>(std::accumulate(raw[a].begin(), raw[a].end(), std::size_t{0}));
        m.zero_support[a] = total == 0.0;
        if (m.zero_support[a]) continue;
        for (std::size_t b = 0; b < kNumRegimes; ++b) m.rows[a][b] = static_cast<double>(raw[a][b]) / total;
    }
    return m;
}

std::pair<RegimeLabel, RegimeLabel> largest_confusion(const ConfusionMatrixNormalized& m) {
    std::pair<std::size_t, std::size_t> best{0, 1};
    double top = -1.0;
    for (std::size_t a = 0; a < kNumRegimes; ++a)
        for (std::size_t b = 0; b < kNumRegimes; ++b)
            if (a != b && m.rows[a][b] > top) {
                top = m.rows[a][b];
                best = {a, b};
            }
    return {regime_from_code(best.first), regime_from_code(best.second)};
}

nlohmann::json confusion_json(const ConfusionCounts& c) { return c; }

nlohmann::json to_json(const ConfusionMatrixNormalized& m) {
    return {{"rows", m.rows}, {"zero_support", m.zero_support}};
}

nlohmann::json to_json(const CrossValResult& r) {
    nlohmann::json j;
    j["schema_version"] = kCrossValSchemaVersion;
    j["spec"] = to_json(r.spec);
    j["model"] = describe(r.spec);
    j["feature_set"] = std::string(to_string(r.feature_set));
    j["seed"] = r.seed;
    j["rng"] = std::string(Rng::kAlgorithm);
    j["k"] = r.k;
    auto fold_seeds = nlohmann::json::array();
    for (std::size_t f = 0; f < r.fold_sizes.size(); ++f) fold_seeds.push_back(derive_seed(r.seed, f));
    j["fold_fit_seeds"] = fold_seeds;
    j["stratified"] = r.stratified;
    j["global_standardize"] = r.global_standardize;
    j["noise"] = r.noise ? nlohmann::json{{"stddev", r.noise->stddev}, {"seed", r.noise->seed}} : nlohmann::json(nullptr);
    j["fold_sizes"] = r.fold_sizes;
    j["fold_accuracies"] = r.fold_accuracies;
    j["mean_accuracy"] = r.mean_accuracy;
    j["std_accuracy"] = r.std_accuracy;
    j["pooled_accuracy"] = r.pooled_accuracy;
    j["confusion_raw"] = confusion_json(r.confusion_raw);
    j["confusion_normalized"] = to_json(confusion_normalize(r.confusion_raw));
    return j;
}

} // namespace dropcol
