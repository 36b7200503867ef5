#pragma once

// Data-parallel inner loops shared by the k-NN and MLP learners.
//
// Every kernel has a scalar reference and an AVX2 variant selected at
// runtime. Variants vectorize across independent outputs only and keep the
// reduction order of the scalar loop, with floating-point contraction
// disabled, so all backends produce bit-identical results.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace dropcol::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b) noexcept;

/// Backend in use. Chosen on first use: the DROPCOL_SIMD environment
/// variable ("scalar" or "avx2") if set, otherwise the best supported one.
Backend active_backend();
/// Throws ConfigError for a backend the CPU or build does not support.
void set_backend(Backend b);
bool backend_supported(Backend b) noexcept;
std::vector<Backend> supported_backends();

/// Column-major ("structure of arrays") view of n points in dim dimensions:
/// coordinate j of point i is at data[j * n + i].
struct PointsSoA {
    const double* data = nullptr;
    std::size_t n = 0;
    std::size_t dim = 0;
};

/// out[i] = sum_j |points[i][j] - query[j]|
void l1_distances(std::span<const double> query, PointsSoA points, std::span<double> out);
/// out[i] = sum_j (points[i][j] - query[j])^2
void l2sq_distances(std::span<const double> query, PointsSoA points, std::span<double> out);

/// C (m x n) = A (m x k) * B (k x n), all row-major; accumulates into C when `accumulate`.
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
             bool accumulate = false);
/// C (m x n) = A^T * B with A (k x m) and B (k x n) row-major; accumulates when `accumulate`.
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
             bool accumulate = false);

namespace detail {

struct KernelTable {
    Backend backend;
    void (*l1_distances)(const double* query, const double* points, std::size_t n, std::size_t dim, double* out);
    void (*l2sq_distances)(const double* query, const double* points, std::size_t n, std::size_t dim, double* out);
    void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
                    bool accumulate);
    void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
                    bool accumulate);
};

extern const KernelTable kScalarTable;
/// nullptr when the build has no AVX2 variant.
const KernelTable* avx2_table() noexcept;

} // namespace detail

} // namespace dropcol::kernels
