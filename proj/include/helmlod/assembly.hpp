#pragma once

// P1 finite element assembly on the dyadic meshes: stiffness, weighted mass,
// weighted boundary mass, load vectors, the coarse-from-fine prolongation,
// the weighted Clement quasi-interpolation, and discrete norms.
//
// Coefficients are sampled once per element at the barycenter (per facet at
// the midpoint), which is exact for coefficients that are piecewise constant
// on the mesh and O(h^2)-consistent for smooth ones.

#include <complex>
#include <functional>
#include <vector>

#include "helmlod/mesh.hpp"
#include "helmlod/sparse.hpp"

namespace helmlod::assembly {

using cplx = std::complex<double>;
using Field = std::function<double(mesh::Point)>;

inline Field unit_field() {
    return [](mesh::Point) { return 1.0; };
}

// Real symmetric stiffness with per-element coefficient; rejects coeff <= 0.
sparse::CsrMatrix assemble_stiffness(const mesh::Mesh& m, const Field& coeff);

// Real symmetric mass with per-element coefficient; rejects coeff <= 0.
sparse::CsrMatrix assemble_mass(const mesh::Mesh& m, const Field& coeff);

// Real symmetric boundary mass with per-facet coefficient; rejects coeff < 0.
// Supported only on boundary nodes.  1D facets carry unit measure (point
// evaluation), 2D facets are edge segments.
sparse::CsrMatrix assemble_boundary_mass(const mesh::Mesh& m, const Field& coeff);

// Load vector b[i] = integral of f * phi_i by the barycenter rule.
std::vector<double> assemble_load(const mesh::Mesh& m, const Field& f);

// P1 prolongation (N_fine x N_H): coarse hat values at fine nodes.
sparse::CsrMatrix prolongation(const mesh::TwoLevelMesh& pair);

// Weighted Clement quasi-interpolation I_H v = sum_k (v, phi_k^H)/(1, phi_k^H)
// phi_k^H.  C[k,i] = (phi_i^h, phi_k^H); w[k] = (1, phi_k^H).
struct QuasiInterpolation {
    sparse::CsrMatrix C;     // N_H x N_fine
    std::vector<double> w;   // N_H, all positive

    // Coarse coefficient vector of I_H v for a fine nodal vector v.
    std::vector<double> apply(const std::vector<double>& fine) const;
    std::vector<cplx> apply(const std::vector<cplx>& fine) const;
};

QuasiInterpolation build_quasi_interpolation(const mesh::TwoLevelMesh& pair);

// Unit-coefficient matrices reused by the norm evaluations.
struct Norms {
    sparse::CsrMatrix S1;
    sparse::CsrMatrix M1;
};

Norms build_norms(const mesh::Mesh& m);

double l2_norm(const Norms& n, const std::vector<cplx>& u);
// sqrt(|u|_{H1}^2 + kappa^2 ||u||^2)
double v_norm(const Norms& n, const std::vector<cplx>& u, double kappa);
// sqrt(u* S_w u + kappa^2 ||u||^2) for a weighted stiffness S_w
double weighted_v_norm(const sparse::CsrMatrix& s_weighted, const Norms& n,
                       const std::vector<cplx>& u, double kappa);
// Convenience: builds the unit matrices on the fly.
double v_norm(const mesh::Mesh& m, const std::vector<cplx>& u, double kappa);

// Real quadratic form x^T A x (A real CSR), complex planes handled by caller.
double quadratic_form(const sparse::CsrMatrix& a, const std::vector<double>& x);

}  // namespace helmlod::assembly
