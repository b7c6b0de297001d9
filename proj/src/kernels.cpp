#include "helmlod/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace helmlod::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    // Four independent accumulators; matches the AVX2 lane layout so both
    // backends agree bit-for-bit on lane-aligned lengths and closely otherwise.
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return ((s0 + s2) + (s1 + s3)) + tail;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void csr_matvec(std::size_t n_rows, const std::int32_t* row_ptr,
                const std::int32_t* col_idx, const double* vals,
                const double* x, double* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        double acc = 0.0;
        for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            acc += vals[k] * x[col_idx[k]];
        y[r] = acc;
    }
}

void gemm_at_b(std::size_t l, std::size_t m, std::size_t n, const double* a,
               const double* b, double* c, std::size_t ldc) {
    for (std::size_t j = 0; j < n; ++j) {
        const double* bj = b + j * l;
        double* cj = c + j * ldc;
        for (std::size_t i = 0; i < m; ++i)
            cj[i] += dot(a + i * l, bj, l);
    }
}

}  // namespace scalar

namespace {

Dispatch make_scalar() {
    return {scalar::dot, scalar::axpy, scalar::csr_matvec, scalar::gemm_at_b};
}

#if defined(__x86_64__) || defined(_M_X64)
Dispatch make_avx2() {
    return {avx2::dot, avx2::axpy, avx2::csr_matvec, avx2::gemm_at_b};
}
#endif

struct State {
    Backend backend;
    Dispatch dispatch;

    State() {
        Backend b = avx2_supported() ? Backend::avx2 : Backend::scalar;
        if (const char* env = std::getenv("HELMLOD_KERNELS")) {
            std::string v(env);
            if (v == "scalar") b = Backend::scalar;
            else if (v == "avx2" && avx2_supported()) b = Backend::avx2;
        }
        set(b);
    }

    void set(Backend b) {
        backend = b;
#if defined(__x86_64__) || defined(_M_X64)
        dispatch = (b == Backend::avx2) ? make_avx2() : make_scalar();
#else
        dispatch = make_scalar();
#endif
    }
};

State& state() {
    static State s;
    return s;
}

}  // namespace

const Dispatch& active() { return state().dispatch; }

Backend active_backend() { return state().backend; }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw std::invalid_argument("kernels: avx2 backend not supported on this CPU");
    state().set(b);
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::string backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

}  // namespace helmlod::kernels
