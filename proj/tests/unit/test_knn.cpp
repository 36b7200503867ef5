#include "oracles.hpp"

#include "dropcol/learners/knn.hpp"
#include "dropcol/rng.hpp"

#include <doctest.h>

using namespace dropcol;

namespace {

struct Instance {
    Matrix train;
    std::vector<RegimeLabel> labels;
    Matrix queries;
};

Instance random_instance(std::size_t rows, std::size_t cols, std::uint64_t seed, bool grid) {
    Rng rng(seed);
    Instance in{Matrix(rows, cols), {}, Matrix(25, cols)};
    auto draw = [&] { return grid ? static_cast<double>(rng.uniform_index(6)) : rng.normal(); };
    for (auto& v : in.train.data()) v = draw();
    for (auto& v : in.queries.data()) v = draw();
    for (std::size_t i = 0; i < rows; ++i) in.labels.push_back(regime_from_code(rng.uniform_index(kNumRegimes)));
    return in;
}

} // namespace

TEST_CASE("k-NN matches a linear scan on 20 random 200-point instances") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        // Odd seeds use integer coordinates so distance ties are common.
        const auto in = random_instance(200, 5, 500 + seed, seed % 2 == 1);
        for (int k : {1, 3, 7})
            for (auto metric : {DistanceMetric::L1, DistanceMetric::L2})
                for (auto weighting : {NeighborWeighting::Uniform, NeighborWeighting::DistanceWeighted}) {
                    const KnnModel model(KnnSpec{k, metric, weighting}, in.train, in.labels);
                    for (std::size_t q = 0; q < in.queries.rows(); ++q) {
                        const auto row = in.queries.row(q);
                        const auto ref = testing::linear_scan_knn(in.train, in.labels, row, k,
                                                                  metric == DistanceMetric::L1,
                                                                  weighting == NeighborWeighting::DistanceWeighted);
                        CAPTURE(seed);
                        CAPTURE(k);
                        CHECK(model.neighbors(row) == ref.neighbors);
                        const auto s = model.scores(row);
                        for (std::size_t c = 0; c < kNumRegimes; ++c)
                            CHECK(s[c] == doctest::Approx(ref.scores[c]).epsilon(1e-12));
                        CHECK(model.predict_row(row) == regime_from_code(argmax_low(ref.scores)));
                    }
                }
    }
}

TEST_CASE("k = 1 uniform and distance weighting predict identically") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto in = random_instance(150, 4, 900 + seed, seed % 2 == 0);
        for (auto metric : {DistanceMetric::L1, DistanceMetric::L2}) {
            const KnnModel u(KnnSpec{1, metric, NeighborWeighting::Uniform}, in.train, in.labels);
            const KnnModel d(KnnSpec{1, metric, NeighborWeighting::DistanceWeighted}, in.train, in.labels);
            for (std::size_t q = 0; q < in.queries.rows(); ++q)
                CHECK(u.predict_row(in.queries.row(q)) == d.predict_row(in.queries.row(q)));
            for (std::size_t q = 0; q < in.train.rows(); ++q)
                CHECK(u.predict_row(in.train.row(q)) == d.predict_row(in.train.row(q)));
        }
    }
}

TEST_CASE("k = 1 at a training point returns its label") {
    Matrix x(4, 2, std::vector<double>{0, 0, 1, 0, 0, 1, 5, 5});
    const std::vector<RegimeLabel> y{RegimeLabel::Coalescence, RegimeLabel::Bouncing, RegimeLabel::Stretching,
                                     RegimeLabel::Reflexive};
    const KnnModel m(KnnSpec{1, DistanceMetric::L2, NeighborWeighting::DistanceWeighted}, x, y);
    for (std::size_t i = 0; i < 4; ++i) CHECK(m.predict_row(x.row(i)) == y[i]);
    CHECK(m.train() == x);
    CHECK(m.labels() == y);
}

TEST_CASE("k larger than the training set uses every row") {
    Matrix x(3, 1, std::vector<double>{0, 1, 2});
    const std::vector<RegimeLabel> y{RegimeLabel::Bouncing, RegimeLabel::Bouncing, RegimeLabel::Reflexive};
    const KnnModel m(KnnSpec{10, DistanceMetric::L1, NeighborWeighting::Uniform}, x, y);
    const std::vector<double> q{2.0};
    CHECK(m.neighbors(q).size() == 3);
    CHECK(m.predict_row(q) == RegimeLabel::Bouncing);
    const auto p = m.proba_row(q);
    CHECK(p[code(RegimeLabel::Bouncing)] == doctest::Approx(2.0 / 3.0));
}
