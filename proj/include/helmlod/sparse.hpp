#pragma once

// Compressed sparse row storage plus direct-solver wrappers.  Assembly
// produces COO triplets which are compacted into deterministic CSR; the
// factorizations are delegated to Eigen's SparseLU behind a thin interface
// so callers only depend on factorize/solve semantics and residual checks.

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace helmlod::sparse {

using cplx = std::complex<double>;

struct Triplet {
    std::int32_t row;
    std::int32_t col;
    double value;
};

// Real CSR with sorted column indices per row and no duplicates.
struct CsrMatrix {
    std::int32_t rows = 0;
    std::int32_t cols = 0;
    std::vector<std::int32_t> row_ptr;  // size rows + 1
    std::vector<std::int32_t> col_idx;
    std::vector<double> vals;

    std::size_t nnz() const { return col_idx.size(); }
    void matvec(const double* x, double* y) const;
    std::vector<double> matvec(const std::vector<double>& x) const;
    double coeff(std::int32_t r, std::int32_t c) const;  // 0 if absent
    bool same_pattern(const CsrMatrix& other) const;
    bool is_symmetric(double tol) const;
    std::vector<std::vector<double>> to_dense() const;
};

// Deduplicating COO -> CSR compaction; duplicate entries are summed.
CsrMatrix csr_from_triplets(std::int32_t rows, std::int32_t cols,
                            std::vector<Triplet> triplets);

// result = sum_k scale[k] * term[k]; all terms must have entries inside the
// pattern of the first term, which defines the result pattern.
CsrMatrix csr_linear_combination(const std::vector<const CsrMatrix*>& terms,
                                 const std::vector<double>& scales);

CsrMatrix transpose(const CsrMatrix& a);

// Complex CSR assembled from real and imaginary parts sharing one pattern.
struct CsrComplexMatrix {
    std::int32_t rows = 0;
    std::int32_t cols = 0;
    std::vector<std::int32_t> row_ptr;
    std::vector<std::int32_t> col_idx;
    std::vector<cplx> vals;

    std::size_t nnz() const { return col_idx.size(); }
    void matvec(const cplx* x, cplx* y) const;
    std::vector<cplx> matvec(const std::vector<cplx>& x) const;
    bool is_symmetric(double tol) const;  // plain symmetry A == A^T
};

// real + i * imag; imag entries must lie inside real's pattern.
CsrComplexMatrix csr_complex_compose(const CsrMatrix& real_part,
                                     const CsrMatrix& imag_part,
                                     double imag_scale);

// Sparse LU factorization of a real square matrix (Eigen SparseLU).
class RealLu {
public:
    RealLu();
    ~RealLu();
    RealLu(RealLu&&) noexcept;
    RealLu& operator=(RealLu&&) noexcept;

    // Throws std::runtime_error with `context` on singular matrices.
    void factorize(const CsrMatrix& a, const std::string& context);
    void solve(const double* rhs, double* x) const;
    std::vector<double> solve(const std::vector<double>& rhs) const;
    // Column-major multi-RHS solve, rhs and x of shape n x nrhs.
    void solve_many(const double* rhs, double* x, std::int32_t nrhs) const;
    std::int32_t size() const { return n_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::int32_t n_ = 0;
};

// Sparse LU factorization of a complex square matrix.
class ComplexLu {
public:
    ComplexLu();
    ~ComplexLu();
    ComplexLu(ComplexLu&&) noexcept;
    ComplexLu& operator=(ComplexLu&&) noexcept;

    void factorize(const CsrComplexMatrix& a, const std::string& context);
    std::vector<cplx> solve(const std::vector<cplx>& rhs) const;
    std::int32_t size() const { return n_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::int32_t n_ = 0;
};

// Dense LU solve of a complex column-major system (Eigen PartialPivLU).
// Returns the solution; `context` labels failures.
std::vector<cplx> dense_solve(std::int32_t n, const std::vector<cplx>& a_colmajor,
                              const std::vector<cplx>& rhs,
                              const std::string& context);

// ||A x - b||_2 / ||b||_2 with the zero-b convention ||A x||_2.
double relative_residual(const CsrComplexMatrix& a, const std::vector<cplx>& x,
                         const std::vector<cplx>& b);
double relative_residual(const CsrMatrix& a, const std::vector<double>& x,
                         const std::vector<double>& b);

// Coordinate text export, one "row col real imag" line per entry, 17
// significant digits.  Real matrices write imag = 0.
void write_coordinate_text(const CsrComplexMatrix& a, const std::string& path);
void write_coordinate_text(const CsrMatrix& a, const std::string& path);

}  // namespace helmlod::sparse
