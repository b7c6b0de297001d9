#include "helmlod/sparse.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "helmlod/kernels.hpp"

namespace helmlod::sparse {

namespace {

template <typename Scalar>
using EigenCsc = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, std::int32_t>;

template <typename Scalar, typename Csr>
EigenCsc<Scalar> to_eigen(const Csr& a) {
    using T = Eigen::Triplet<Scalar, std::int32_t>;
    std::vector<T> trips;
    trips.reserve(a.nnz());
    for (std::int32_t r = 0; r < a.rows; ++r)
        for (std::int32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            trips.emplace_back(r, a.col_idx[k], a.vals[k]);
    EigenCsc<Scalar> m(a.rows, a.cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

}  // namespace

void CsrMatrix::matvec(const double* x, double* y) const {
    kernels::csr_matvec(static_cast<std::size_t>(rows), row_ptr.data(),
                        col_idx.data(), vals.data(), x, y);
}

std::vector<double> CsrMatrix::matvec(const std::vector<double>& x) const {
    if (static_cast<std::int32_t>(x.size()) != cols)
        throw std::invalid_argument("CsrMatrix::matvec: size mismatch");
    std::vector<double> y(rows);
    matvec(x.data(), y.data());
    return y;
}

double CsrMatrix::coeff(std::int32_t r, std::int32_t c) const {
    const auto* begin = col_idx.data() + row_ptr[r];
    const auto* end = col_idx.data() + row_ptr[r + 1];
    const auto* it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) return 0.0;
    return vals[static_cast<std::size_t>(it - col_idx.data())];
}

bool CsrMatrix::same_pattern(const CsrMatrix& other) const {
    return rows == other.rows && cols == other.cols &&
           row_ptr == other.row_ptr && col_idx == other.col_idx;
}

bool CsrMatrix::is_symmetric(double tol) const {
    if (rows != cols) return false;
    for (std::int32_t r = 0; r < rows; ++r)
        for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (std::abs(vals[k] - coeff(col_idx[k], r)) > tol) return false;
    return true;
}

std::vector<std::vector<double>> CsrMatrix::to_dense() const {
    std::vector<std::vector<double>> d(rows, std::vector<double>(cols, 0.0));
    for (std::int32_t r = 0; r < rows; ++r)
        for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            d[r][col_idx[k]] += vals[k];
    return d;
}

CsrMatrix csr_from_triplets(std::int32_t rows, std::int32_t cols,
                            std::vector<Triplet> triplets) {
    for (const auto& t : triplets)
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::invalid_argument("csr_from_triplets: index out of range");
    // Stable sort keeps duplicates in insertion (element) order so the
    // accumulated sums are deterministic.
    std::stable_sort(triplets.begin(), triplets.end(),
                     [](const Triplet& a, const Triplet& b) {
                         return a.row != b.row ? a.row < b.row : a.col < b.col;
                     });
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
    std::size_t i = 0;
    while (i < triplets.size()) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < triplets.size() && triplets[j].row == triplets[i].row &&
               triplets[j].col == triplets[i].col)
            sum += triplets[j++].value;
        m.col_idx.push_back(triplets[i].col);
        m.vals.push_back(sum);
        ++m.row_ptr[triplets[i].row + 1];
        i = j;
    }
    for (std::int32_t r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

CsrMatrix csr_linear_combination(const std::vector<const CsrMatrix*>& terms,
                                 const std::vector<double>& scales) {
    if (terms.empty() || terms.size() != scales.size())
        throw std::invalid_argument("csr_linear_combination: bad arguments");
    CsrMatrix out = *terms[0];
    for (auto& v : out.vals) v *= scales[0];
    for (std::size_t t = 1; t < terms.size(); ++t) {
        const CsrMatrix& m = *terms[t];
        if (m.rows != out.rows || m.cols != out.cols)
            throw std::invalid_argument("csr_linear_combination: shape mismatch");
        for (std::int32_t r = 0; r < m.rows; ++r) {
            for (std::int32_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
                const std::int32_t c = m.col_idx[k];
                const auto* begin = out.col_idx.data() + out.row_ptr[r];
                const auto* end = out.col_idx.data() + out.row_ptr[r + 1];
                const auto* it = std::lower_bound(begin, end, c);
                if (it == end || *it != c)
                    throw std::invalid_argument(
                        "csr_linear_combination: entry outside base pattern");
                out.vals[static_cast<std::size_t>(it - out.col_idx.data())] +=
                    scales[t] * m.vals[k];
            }
        }
    }
    return out;
}

CsrMatrix transpose(const CsrMatrix& a) {
    CsrMatrix t;
    t.rows = a.cols;
    t.cols = a.rows;
    t.row_ptr.assign(static_cast<std::size_t>(a.cols) + 1, 0);
    for (std::int32_t c : a.col_idx) ++t.row_ptr[c + 1];
    for (std::int32_t r = 0; r < t.rows; ++r) t.row_ptr[r + 1] += t.row_ptr[r];
    t.col_idx.resize(a.nnz());
    t.vals.resize(a.nnz());
    std::vector<std::int32_t> fill(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::int32_t r = 0; r < a.rows; ++r) {
        for (std::int32_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
            const std::int32_t pos = fill[a.col_idx[k]]++;
            t.col_idx[pos] = r;
            t.vals[pos] = a.vals[k];
        }
    }
    return t;
}

void CsrComplexMatrix::matvec(const cplx* x, cplx* y) const {
    for (std::int32_t r = 0; r < rows; ++r) {
        cplx acc = 0.0;
        for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            acc += vals[k] * x[col_idx[k]];
        y[r] = acc;
    }
}

std::vector<cplx> CsrComplexMatrix::matvec(const std::vector<cplx>& x) const {
    if (static_cast<std::int32_t>(x.size()) != cols)
        throw std::invalid_argument("CsrComplexMatrix::matvec: size mismatch");
    std::vector<cplx> y(rows);
    matvec(x.data(), y.data());
    return y;
}

bool CsrComplexMatrix::is_symmetric(double tol) const {
    if (rows != cols) return false;
    for (std::int32_t r = 0; r < rows; ++r) {
        for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            const std::int32_t c = col_idx[k];
            const auto* begin = col_idx.data() + row_ptr[c];
            const auto* end = col_idx.data() + row_ptr[c + 1];
            const auto* it = std::lower_bound(begin, end, r);
            cplx sym = 0.0;
            if (it != end && *it == r)
                sym = vals[static_cast<std::size_t>(it - col_idx.data())];
            if (std::abs(vals[k] - sym) > tol) return false;
        }
    }
    return true;
}

CsrComplexMatrix csr_complex_compose(const CsrMatrix& real_part,
                                     const CsrMatrix& imag_part,
                                     double imag_scale) {
    CsrComplexMatrix out;
    out.rows = real_part.rows;
    out.cols = real_part.cols;
    out.row_ptr = real_part.row_ptr;
    out.col_idx = real_part.col_idx;
    out.vals.assign(real_part.vals.begin(), real_part.vals.end());
    for (std::int32_t r = 0; r < imag_part.rows; ++r) {
        for (std::int32_t k = imag_part.row_ptr[r]; k < imag_part.row_ptr[r + 1];
             ++k) {
            const std::int32_t c = imag_part.col_idx[k];
            const auto* begin = out.col_idx.data() + out.row_ptr[r];
            const auto* end = out.col_idx.data() + out.row_ptr[r + 1];
            const auto* it = std::lower_bound(begin, end, c);
            if (it == end || *it != c)
                throw std::invalid_argument(
                    "csr_complex_compose: imaginary entry outside real pattern");
            out.vals[static_cast<std::size_t>(it - out.col_idx.data())] +=
                cplx(0.0, imag_scale * imag_part.vals[k]);
        }
    }
    return out;
}

struct RealLu::Impl {
    Eigen::SparseLU<EigenCsc<double>, Eigen::COLAMDOrdering<std::int32_t>> lu;
};

RealLu::RealLu() : impl_(new Impl) {}
RealLu::~RealLu() = default;
RealLu::RealLu(RealLu&&) noexcept = default;
RealLu& RealLu::operator=(RealLu&&) noexcept = default;

void RealLu::factorize(const CsrMatrix& a, const std::string& context) {
    if (a.rows != a.cols)
        throw std::invalid_argument("RealLu: matrix not square (" + context + ")");
    auto m = to_eigen<double>(a);
    impl_->lu.compute(m);
    if (impl_->lu.info() != Eigen::Success)
        throw std::runtime_error("RealLu: factorization failed (" + context + ")");
    n_ = a.rows;
}

void RealLu::solve(const double* rhs, double* x) const {
    Eigen::Map<const Eigen::VectorXd> b(rhs, n_);
    Eigen::VectorXd sol = impl_->lu.solve(b);
    std::copy(sol.data(), sol.data() + n_, x);
}

std::vector<double> RealLu::solve(const std::vector<double>& rhs) const {
    std::vector<double> x(rhs.size());
    solve(rhs.data(), x.data());
    return x;
}

void RealLu::solve_many(const double* rhs, double* x, std::int32_t nrhs) const {
    Eigen::Map<const Eigen::MatrixXd> b(rhs, n_, nrhs);
    Eigen::Map<Eigen::MatrixXd> sol(x, n_, nrhs);
    sol = impl_->lu.solve(b);
}

struct ComplexLu::Impl {
    Eigen::SparseLU<EigenCsc<cplx>, Eigen::COLAMDOrdering<std::int32_t>> lu;
};

ComplexLu::ComplexLu() : impl_(new Impl) {}
ComplexLu::~ComplexLu() = default;
ComplexLu::ComplexLu(ComplexLu&&) noexcept = default;
ComplexLu& ComplexLu::operator=(ComplexLu&&) noexcept = default;

void ComplexLu::factorize(const CsrComplexMatrix& a, const std::string& context) {
    if (a.rows != a.cols)
        throw std::invalid_argument("ComplexLu: matrix not square (" + context + ")");
    auto m = to_eigen<cplx>(a);
    impl_->lu.compute(m);
    if (impl_->lu.info() != Eigen::Success)
        throw std::runtime_error("ComplexLu: factorization failed (" + context + ")");
    n_ = a.rows;
}

std::vector<cplx> ComplexLu::solve(const std::vector<cplx>& rhs) const {
    Eigen::Map<const Eigen::VectorXcd> b(rhs.data(), n_);
    Eigen::VectorXcd sol = impl_->lu.solve(b);
    return std::vector<cplx>(sol.data(), sol.data() + n_);
}

std::vector<cplx> dense_solve(std::int32_t n, const std::vector<cplx>& a_colmajor,
                              const std::vector<cplx>& rhs,
                              const std::string& context) {
    if (a_colmajor.size() != static_cast<std::size_t>(n) * n ||
        rhs.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("dense_solve: size mismatch (" + context + ")");
    Eigen::Map<const Eigen::MatrixXcd> a(a_colmajor.data(), n, n);
    Eigen::Map<const Eigen::VectorXcd> b(rhs.data(), n);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::VectorXcd x = lu.solve(b);
    const double scale = b.norm();
    for (int it = 0; it < 2; ++it) {  // cheap refinement, n^2 per pass
        Eigen::VectorXcd r = b - a * x;
        if (r.norm() <= 1e-13 * (scale > 0 ? scale : 1.0)) break;
        x += lu.solve(r);
    }
    const double res = (a * x - b).norm();
    if (!(res <= 1e-8 * (scale > 0 ? scale : 1.0)))
        throw std::runtime_error("dense_solve: large residual, system near-singular (" +
                                 context + ")");
    return std::vector<cplx>(x.data(), x.data() + n);
}

double relative_residual(const CsrComplexMatrix& a, const std::vector<cplx>& x,
                         const std::vector<cplx>& b) {
    std::vector<cplx> r = a.matvec(x);
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        rn += std::norm(r[i] - b[i]);
        bn += std::norm(b[i]);
    }
    return std::sqrt(rn) / (bn > 0 ? std::sqrt(bn) : 1.0);
}

double relative_residual(const CsrMatrix& a, const std::vector<double>& x,
                         const std::vector<double>& b) {
    std::vector<double> r = a.matvec(x);
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        rn += (r[i] - b[i]) * (r[i] - b[i]);
        bn += b[i] * b[i];
    }
    return std::sqrt(rn) / (bn > 0 ? std::sqrt(bn) : 1.0);
}

namespace {

void write_entries(std::ofstream& out, std::int32_t rows,
                   const std::vector<std::int32_t>& row_ptr,
                   const std::vector<std::int32_t>& col_idx,
                   const double* re, const double* im, std::ptrdiff_t stride) {
    char buf[128];
    for (std::int32_t r = 0; r < rows; ++r) {
        for (std::int32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", r, col_idx[k],
                          re[k * stride], im ? im[k * stride] : 0.0);
            out << buf;
        }
    }
}

}  // namespace

void write_coordinate_text(const CsrComplexMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const double* base = reinterpret_cast<const double*>(a.vals.data());
    write_entries(out, a.rows, a.row_ptr, a.col_idx, base, base + 1, 2);
}

void write_coordinate_text(const CsrMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_entries(out, a.rows, a.row_ptr, a.col_idx, a.vals.data(), nullptr, 1);
}

}  // namespace helmlod::sparse
