#pragma once

// Dense arithmetic inner loops used by the assembly, Galerkin projection and
// estimator code paths.  Each kernel has a portable scalar implementation and
// an AVX2 variant; the active backend is chosen once at startup from CPU
// capabilities and can be overridden for testing (HELMLOD_KERNELS=scalar|avx2
// in the environment, or set_backend()).

#include <cstddef>
#include <cstdint>
#include <string>

namespace helmlod::kernels {

enum class Backend { scalar, avx2 };

struct Dispatch {
    // dot = sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y = A * x for CSR A (row_ptr has n_rows + 1 entries)
    void (*csr_matvec)(std::size_t n_rows, const std::int32_t* row_ptr,
                       const std::int32_t* col_idx, const double* vals,
                       const double* x, double* y);
    // C (m x n, column-major, leading dimension ldc) += A^T * B where
    // A is (l x m) and B is (l x n), both column-major with leading
    // dimension l.  The transpose-product shape fits Galerkin projections
    // G = Phi^T (A Phi) where l is the fine dimension.
    void (*gemm_at_b)(std::size_t l, std::size_t m, std::size_t n,
                      const double* a, const double* b, double* c,
                      std::size_t ldc);
};

// Active dispatch table (initialized on first use).
const Dispatch& active();

Backend active_backend();
void set_backend(Backend b);  // throws std::invalid_argument if unsupported
bool avx2_supported();
std::string backend_name(Backend b);

// Convenience forwarding wrappers.
inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}
inline void csr_matvec(std::size_t n_rows, const std::int32_t* row_ptr,
                       const std::int32_t* col_idx, const double* vals,
                       const double* x, double* y) {
    active().csr_matvec(n_rows, row_ptr, col_idx, vals, x, y);
}
inline void gemm_at_b(std::size_t l, std::size_t m, std::size_t n,
                      const double* a, const double* b, double* c,
                      std::size_t ldc) {
    active().gemm_at_b(l, m, n, a, b, c, ldc);
}

// Scalar reference implementations, exposed for equivalence tests.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void csr_matvec(std::size_t n_rows, const std::int32_t* row_ptr,
                const std::int32_t* col_idx, const double* vals,
                const double* x, double* y);
void gemm_at_b(std::size_t l, std::size_t m, std::size_t n, const double* a,
               const double* b, double* c, std::size_t ldc);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void csr_matvec(std::size_t n_rows, const std::int32_t* row_ptr,
                const std::int32_t* col_idx, const double* vals,
                const double* x, double* y);
void gemm_at_b(std::size_t l, std::size_t m, std::size_t n, const double* a,
               const double* b, double* c, std::size_t ldc);
}  // namespace avx2
#endif

}  // namespace helmlod::kernels
