#include "dropcol/kernels/kernels.hpp"

#include <cmath>
#include <cstring>

namespace dropcol::kernels::detail {

namespace {

void l1_scalar(const double* query, const double* points, std::size_t n, std::size_t dim, double* out) {
    std::memset(out, 0, n * sizeof(double));
    for (std::size_t j = 0; j < dim; ++j) {
        const double q = query[j];
        const double* col = points + j * n;
        for (std::size_t i = 0; i < n; ++i) out[i] += std::fabs(col[i] - q);
    }
}

void l2sq_scalar(const double* query, const double* points, std::size_t n, std::size_t dim, double* out) {
    std::memset(out, 0, n * sizeof(double));
    for (std::size_t j = 0; j < dim; ++j) {
        const double q = query[j];
        const double* col = points + j * n;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = col[i] - q;
            out[i] += d * d;
        }
    }
}

void gemm_nn_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
                    bool accumulate) {
    if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_tn_scalar(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
                    bool accumulate) {
    if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t p = 0; p < k; ++p) {
        const double* arow = a + p * m;
        const double* brow = b + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

} // namespace

const KernelTable kScalarTable{Backend::Scalar, l1_scalar, l2sq_scalar, gemm_nn_scalar, gemm_tn_scalar};

} // namespace dropcol::kernels::detail
