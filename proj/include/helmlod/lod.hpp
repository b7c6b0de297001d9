#pragma once

// Boundary-corrected localized orthogonal decomposition: multiscale basis
// functions obtained from constrained quadratic stationary-point (KKT)
// problems on node patches, and the coarse Galerkin solve in that basis.
//
// The corrected functional splits into two real blocks acting on the real
// and imaginary parts of a basis function:
//   A_plus  = S_A - kappa^2 M_n + sigma * kappa * B   (real part)
//   A_minus = S_A - kappa^2 M_n - sigma * kappa * B   (imaginary part)
// with sigma = +1 by default (boundary-sign switch).  Without boundary
// correction B is dropped from both blocks.  Each basis function satisfies
// (Phi_j, phi_k^H) = alpha_j delta_jk per block, alpha_j = (1, phi_j^H).

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "helmlod/assembly.hpp"
#include "helmlod/helmholtz.hpp"
#include "helmlod/mesh.hpp"
#include "helmlod/sparse.hpp"

namespace helmlod::lod {

using cplx = std::complex<double>;

struct CorrectedForm {
    const sparse::CsrMatrix* S_A = nullptr;
    const sparse::CsrMatrix* M_n = nullptr;  // unscaled; kappa^2 applied here
    const sparse::CsrMatrix* B = nullptr;
    double kappa = 0.0;
    bool corrected = true;
    int sigma = +1;  // boundary-sign: plus (+1) or minus (-1)

    // block = +1: matrix for the real part; block = -1: imaginary part.
    sparse::CsrMatrix block_matrix(int block) const;
    bool blocks_identical() const { return !corrected || kappa == 0.0; }
};

struct LodOptions {
    bool one_one_constraint = true;  // constraint-mode one-one vs one-zero
    int threads = 0;                 // 0 = hardware concurrency
};

// Contiguous fine-node index run; column values are packed run by run.
struct Run {
    std::int32_t start = 0;
    std::int32_t len = 0;
};

struct BasisColumn {
    std::vector<Run> runs;     // disjoint, ascending
    std::vector<double> re;    // packed values, run by run
    std::vector<double> im;

    std::size_t size() const { return re.size(); }
    bool full_range(std::int32_t n_fine) const {
        return runs.size() == 1 && runs[0].start == 0 && runs[0].len == n_fine;
    }
    // Dense scatter: out[node] += scale * value.
    void scatter(cplx scale, cplx* out) const;
};

struct MultiscaleBasis {
    const mesh::TwoLevelMesh* pair = nullptr;
    int layers = -1;  // -1 = global basis
    bool corrected = true;
    int sigma = +1;
    bool one_one_constraint = true;
    double constraint_residual = 0.0;  // max |(Phi_j, phi_k) - alpha_j d_jk|
    double kkt_residual = 0.0;         // max relative bordered-system residual
    std::vector<BasisColumn> columns;
    // Fine-grid index bounding box per column (ix_min, ix_max, iy_min,
    // iy_max), used to prune disjoint column pairs in the Galerkin assembly.
    std::vector<std::array<std::int32_t, 4>> column_bbox;
};

// Single-node build, exposed for tests.  layers < 0 requests the global
// (whole-domain) stationary problem.
BasisColumn build_node_basis(const mesh::TwoLevelMesh& pair,
                             const CorrectedForm& form,
                             const assembly::QuasiInterpolation& qi,
                             std::int32_t node, int layers,
                             const LodOptions& opts);

// All-node build.  Patches that saturate the mesh share one factorization of
// the global KKT matrix per block; the result is identical to layers = -1.
MultiscaleBasis build_basis(const mesh::TwoLevelMesh& pair,
                            const CorrectedForm& form,
                            const assembly::QuasiInterpolation& qi, int layers,
                            const LodOptions& opts);

struct CoarseSolution {
    std::vector<cplx> coefficients;  // N_H
    std::vector<cplx> fine;          // prolonged to the fine mesh
    double galerkin_residual = 0.0;  // ||b - G c|| / ||b||
};

// Galerkin solve in the multiscale basis with the FULL sesquilinear form
// (S_A - kappa^2 M_n - i kappa B applied to fine representations); the
// boundary correction enters only through the basis.
CoarseSolution solve_coarse(const MultiscaleBasis& basis,
                            const helmholtz::AssembledParts& parts,
                            double kappa);

struct ErrorReport {
    double err_l2 = 0.0;
    double err_v = 0.0;
    double err_av = 0.0;  // A-weighted V-norm; equals err_v when A = 1
};

// Relative errors against a reference fine vector; throws on a zero
// reference (relative norms undefined).
ErrorReport error_report(const std::vector<cplx>& approx,
                         const std::vector<cplx>& reference,
                         const assembly::Norms& norms,
                         const sparse::CsrMatrix& s_weighted, double kappa);

// Per-column sparse text export: "node_j fine_index re im" lines.
void write_basis_text(const MultiscaleBasis& basis, const std::string& path);

}  // namespace helmlod::lod
