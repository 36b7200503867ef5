#include "dropcol/kernels/kernels.hpp"
#include "dropcol/learners/model.hpp"
#include "dropcol/rng.hpp"

#include "synthetic.hpp"

#include <doctest.h>

#include <cstring>
#include <vector>

using namespace dropcol;
using namespace dropcol::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal() * 3.0;
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct BackendGuard {
    Backend saved = active_backend();
    ~BackendGuard() { set_backend(saved); }
};

} // namespace

TEST_CASE("scalar backend is always available") {
    CHECK(backend_supported(Backend::Scalar));
    CHECK(supported_backends().front() == Backend::Scalar);
}

TEST_CASE("distance kernels are bit-identical across backends") {
    const auto* avx = detail::avx2_table();
    if (!avx || !backend_supported(Backend::Avx2)) {
        MESSAGE("AVX2 not available; equivalence not exercised");
        return;
    }
    const auto& ref = detail::kScalarTable;
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 199u})
        for (std::size_t dim : {1u, 5u, 8u}) {
            const auto pts = random_values(n * dim, n * 31 + dim);
            const auto q = random_values(dim, n + 7);
            std::vector<double> a(n), b(n);
            ref.l1_distances(q.data(), pts.data(), n, dim, a.data());
            avx->l1_distances(q.data(), pts.data(), n, dim, b.data());
            CHECK(same_bits(a, b));
            ref.l2sq_distances(q.data(), pts.data(), n, dim, a.data());
            avx->l2sq_distances(q.data(), pts.data(), n, dim, b.data());
            CHECK(same_bits(a, b));
        }
}

TEST_CASE("gemm kernels are bit-identical across backends") {
    const auto* avx = detail::avx2_table();
    if (!avx || !backend_supported(Backend::Avx2)) {
        MESSAGE("AVX2 not available; equivalence not exercised");
        return;
    }
    const auto& ref = detail::kScalarTable;
    for (std::size_t m : {1u, 5u, 32u})
        for (std::size_t n : {1u, 4u, 8u, 13u, 40u})
            for (std::size_t k : {1u, 8u, 40u})
                for (bool acc : {false, true}) {
                    const auto a = random_values(m * k, m + n + k);
                    const auto b = random_values(k * n, m * n * k);
                    const auto c0 = random_values(m * n, 5);
                    auto c1 = c0, c2 = c0;
                    ref.gemm_nn(a.data(), b.data(), c1.data(), m, n, k, acc);
                    avx->gemm_nn(a.data(), b.data(), c2.data(), m, n, k, acc);
                    CHECK(same_bits(c1, c2));
                    c1 = c0;
                    c2 = c0;
                    ref.gemm_tn(a.data(), b.data(), c1.data(), m, n, k, acc);
                    avx->gemm_tn(a.data(), b.data(), c2.data(), m, n, k, acc);
                    CHECK(same_bits(c1, c2));
                }
}

TEST_CASE("gemm matches a naive product") {
    BackendGuard guard;
    for (auto backend : supported_backends()) {
        set_backend(backend);
        const std::size_t m = 6, n = 9, k = 5;
        const auto a = random_values(m * k, 1);
        const auto b = random_values(k * n, 2);
        std::vector<double> c(m * n), t(m * n);
        gemm_nn(a.data(), b.data(), c.data(), m, n, k);
        // a read as k x m for the transposed product
        gemm_tn(a.data(), b.data(), t.data(), m, n, k);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0, st = 0.0;
                for (std::size_t p = 0; p < k; ++p) {
                    s += a[i * k + p] * b[p * n + j];
                    st += a[p * m + i] * b[p * n + j];
                }
                CHECK(c[i * n + j] == doctest::Approx(s).epsilon(1e-13));
                CHECK(t[i * n + j] == doctest::Approx(st).epsilon(1e-13));
            }
    }
}

TEST_CASE("learners give identical models under every backend") {
    BackendGuard guard;
    const auto data = testing::random_blobs(150, 6, 13);
    std::vector<TrainedModel> models;
    std::vector<std::vector<RegimeLabel>> preds;
    for (auto backend : supported_backends()) {
        set_backend(backend);
        MlpSpec mlp;
        mlp.hidden_layers = {12, 7};
        mlp.max_iterations = 15;
        models.push_back(fit(mlp, data, 3));
        preds.push_back(predict(fit(KnnSpec{5, DistanceMetric::L1, NeighborWeighting::DistanceWeighted}, data, 0), data));
    }
    for (std::size_t i = 1; i < models.size(); ++i) {
        CHECK(models[i] == models[0]);
        CHECK(preds[i] == preds[0]);
    }
}
