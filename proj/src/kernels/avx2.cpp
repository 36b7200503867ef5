#include "dropcol/kernels/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace dropcol::kernels::detail {

namespace {

void l1_avx2(const double* query, const double* points, std::size_t n, std::size_t dim, double* out) {
    std::memset(out, 0, n * sizeof(double));
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    for (std::size_t j = 0; j < dim; ++j) {
        const double* col = points + j * n;
        const __m256d q = _mm256_set1_pd(query[j]);
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(col + i), q);
            const __m256d acc = _mm256_loadu_pd(out + i);
            _mm256_storeu_pd(out + i, _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, diff)));
        }
        for (; i < n; ++i) out[i] += std::fabs(col[i] - query[j]);
    }
}

void l2sq_avx2(const double* query, const double* points, std::size_t n, std::size_t dim, double* out) {
    std::memset(out, 0, n * sizeof(double));
    for (std::size_t j = 0; j < dim; ++j) {
        const double* col = points + j * n;
        const __m256d q = _mm256_set1_pd(query[j]);
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(col + i), q);
            const __m256d acc = _mm256_loadu_pd(out + i);
            _mm256_storeu_pd(out + i, _mm256_add_pd(acc, _mm256_mul_pd(diff, diff)));
        }
        for (; i < n; ++i) {
            const double d = col[i] - query[j];
            out[i] += d * d;
        }
    }
}

// c[i][j0..j0+16) accumulated over p in ascending order, held in registers.
// a_at(p) gives the multiplier for row p, b + p * ldb the row of B.
template <class AAt>
inline void block16(AAt a_at, const double* b, std::size_t ldb, double* crow, std::size_t k) {
    __m256d c0 = _mm256_loadu_pd(crow), c1 = _mm256_loadu_pd(crow + 4);
    __m256d c2 = _mm256_loadu_pd(crow + 8), c3 = _mm256_loadu_pd(crow + 12);
    for (std::size_t p = 0; p < k; ++p) {
        const __m256d av = _mm256_set1_pd(a_at(p));
        const double* brow = b + p * ldb;
        c0 = _mm256_add_pd(c0, _mm256_mul_pd(av, _mm256_loadu_pd(brow)));
        c1 = _mm256_add_pd(c1, _mm256_mul_pd(av, _mm256_loadu_pd(brow + 4)));
        c2 = _mm256_add_pd(c2, _mm256_mul_pd(av, _mm256_loadu_pd(brow + 8)));
        c3 = _mm256_add_pd(c3, _mm256_mul_pd(av, _mm256_loadu_pd(brow + 12)));
    }
    _mm256_storeu_pd(crow, c0);
    _mm256_storeu_pd(crow + 4, c1);
    _mm256_storeu_pd(crow + 8, c2);
    _mm256_storeu_pd(crow + 12, c3);
}

template <class AAt>
inline void block4(AAt a_at, const double* b, std::size_t ldb, double* crow, std::size_t k) {
    __m256d c0 = _mm256_loadu_pd(crow);
    for (std::size_t p = 0; p < k; ++p)
        c0 = _mm256_add_pd(c0, _mm256_mul_pd(_mm256_set1_pd(a_at(p)), _mm256_loadu_pd(b + p * ldb)));
    _mm256_storeu_pd(crow, c0);
}

template <class AAt>
inline void gemm_row(AAt a_at, const double* b, double* crow, std::size_t n, std::size_t k) {
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) block16(a_at, b + j, n, crow + j, k);
    for (; j + 4 <= n; j += 4) block4(a_at, b + j, n, crow + j, k);
    for (; j < n; ++j) {
        double acc = crow[j];
        for (std::size_t p = 0; p < k; ++p) acc += a_at(p) * b[p * n + j];
        crow[j] = acc;
    }
}

void gemm_nn_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
                  bool accumulate) {
    if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        gemm_row([arow](std::size_t p) { return arow[p]; }, b, c + i * n, n, k);
    }
}

void gemm_tn_avx2(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
                  bool accumulate) {
    if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i)
        gemm_row([a, i, m](std::size_t p) { return a[p * m + i]; }, b, c + i * n, n, k);
}

const KernelTable kAvx2Table{Backend::Avx2, l1_avx2, l2sq_avx2, gemm_nn_avx2, gemm_tn_avx2};

} // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2Table; }

} // namespace dropcol::kernels::detail

#else

namespace dropcol::kernels::detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
} // namespace dropcol::kernels::detail

#endif
