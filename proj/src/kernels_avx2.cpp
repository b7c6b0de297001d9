// AVX2/FMA variants of the dense kernels.  This translation unit is the only
// one compiled with -mavx2 -mfma; callers reach it through the dispatch table
// so the binary stays runnable on CPUs without AVX2.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "helmlod/kernels.hpp"

namespace helmlod::kernels::avx2 {

namespace {

inline double reduce4(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);  // (v0+v2, v1+v3)
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                               _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                               _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8),
                               _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12),
                               _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                               _mm256_loadu_pd(b + i), acc0);
    double s = reduce4(_mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                     _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void csr_matvec(std::size_t n_rows, const std::int32_t* row_ptr,
                const std::int32_t* col_idx, const double* vals,
                const double* x, double* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::int32_t k = row_ptr[r];
        const std::int32_t end = row_ptr[r + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            __m128i idx = _mm_loadu_si128(
                reinterpret_cast<const __m128i*>(col_idx + k));
            __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
        }
        double s = reduce4(acc);
        for (; k < end; ++k) s += vals[k] * x[col_idx[k]];
        y[r] = s;
    }
}

void gemm_at_b(std::size_t l, std::size_t m, std::size_t n, const double* a,
               const double* b, double* c, std::size_t ldc) {
    // Blocking: chunks of the summation index keep an 8-column slab of A in
    // L2 while a 64-column slab of B streams through it.
    constexpr std::size_t kc = 4096, jb = 64, ib = 8;
    for (std::size_t l0 = 0; l0 < l; l0 += kc) {
        const std::size_t lc = (l - l0 < kc) ? (l - l0) : kc;
        for (std::size_t j0 = 0; j0 < n; j0 += jb) {
            const std::size_t jc = (n - j0 < jb) ? (n - j0) : jb;
            std::size_t i = 0;
            for (; i + ib <= m; i += ib) {
                const double* ac[ib];
                for (std::size_t k = 0; k < ib; ++k)
                    ac[k] = a + (i + k) * l + l0;
                for (std::size_t j = j0; j < j0 + jc; ++j) {
                    const double* bj = b + j * l + l0;
                    __m256d acc[ib];
                    for (auto& v : acc) v = _mm256_setzero_pd();
                    std::size_t t = 0;
                    for (; t + 4 <= lc; t += 4) {
                        const __m256d bv = _mm256_loadu_pd(bj + t);
                        for (std::size_t k = 0; k < ib; ++k)
                            acc[k] = _mm256_fmadd_pd(
                                _mm256_loadu_pd(ac[k] + t), bv, acc[k]);
                    }
                    double* cj = c + j * ldc + i;
                    for (std::size_t k = 0; k < ib; ++k) {
                        double s = reduce4(acc[k]);
                        for (std::size_t t2 = t; t2 < lc; ++t2)
                            s += ac[k][t2] * bj[t2];
                        cj[k] += s;
                    }
                }
            }
            for (; i < m; ++i)
                for (std::size_t j = j0; j < j0 + jc; ++j)
                    c[j * ldc + i] += dot(a + i * l + l0, b + j * l + l0, lc);
        }
    }
}

}  // namespace helmlod::kernels::avx2

#endif  // x86_64
