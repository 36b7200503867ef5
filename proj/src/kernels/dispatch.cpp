#include "dropcol/kernels/kernels.hpp"

#include "dropcol/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace dropcol::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const detail::KernelTable* table_for(Backend b) noexcept {
    switch (b) {
    case Backend::Scalar: return &detail::kScalarTable;
    case Backend::Avx2: return cpu_has_avx2() ? detail::avx2_table() : nullptr;
    }
    return nullptr;
}

const detail::KernelTable* initial_table() {
    if (const char* env = std::getenv("DROPCOL_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return &detail::kScalarTable;
        if (want == "avx2" && table_for(Backend::Avx2)) return table_for(Backend::Avx2);
    }
    if (const auto* t = table_for(Backend::Avx2)) return t;
    return &detail::kScalarTable;
}

std::atomic<const detail::KernelTable*>& current() {
    static std::atomic<const detail::KernelTable*> table{initial_table()};
    return table;
}

const detail::KernelTable& table() { return *current().load(std::memory_order_acquire); }

} // namespace

std::string_view to_string(Backend b) noexcept { return b == Backend::Scalar ? "scalar" : "avx2"; }

bool backend_supported(Backend b) noexcept { return table_for(b) != nullptr; }

std::vector<Backend> supported_backends() {
    std::vector<Backend> out{Backend::Scalar};
    if (backend_supported(Backend::Avx2)) out.push_back(Backend::Avx2);
    return out;
}

Backend active_backend() { return table().backend; }

void set_backend(Backend b) {
    const auto* t = table_for(b);
    if (!t) throw ConfigError("SIMD backend '" + std::string(to_string(b)) + "' is not supported on this machine");
    current().store(t, std::memory_order_release);
}

void l1_distances(std::span<const double> query, PointsSoA points, std::span<double> out) {
    table().l1_distances(query.data(), points.data, points.n, points.dim, out.data());
}

void l2sq_distances(std::span<const double> query, PointsSoA points, std::span<double> out) {
    table().l2sq_distances(query.data(), points.data, points.n, points.dim, out.data());
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
             bool accumulate) {
    table().gemm_nn(a, b, c, m, n, k, accumulate);
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t n, std::size_t k,
             bool accumulate) {
    table().gemm_tn(a, b, c, m, n, k, accumulate);
}

} // namespace dropcol::kernels
