#pragma once

// Deterministic Helmholtz problem instances (the built-in experiment catalog),
// assembly of the complex fine-scale system, and the direct reference solve.
//
// Weak form on [0,1]^d with the impedance (Robin) boundary condition:
//   a(u,v) = int A grad u . grad conj(v) - kappa^2 int n u conj(v)
//            - i kappa int_bd sqrt(n) u conj(v),
// discretized as S_A - kappa^2 M_n - i kappa B.

#include <complex>
#include <string>
#include <vector>

#include "helmlod/assembly.hpp"
#include "helmlod/mesh.hpp"
#include "helmlod/sparse.hpp"

namespace helmlod::helmholtz {

using cplx = std::complex<double>;
using assembly::Field;

struct ProblemInstance {
    std::string name;
    int dim = 1;
    double kappa = 1.0;
    Field index_n;      // refractive index n(x) > 0
    Field diffusion_a;  // A(x), unit for all but the heterogeneous example
    Field rhs_f;
    // Heterogeneous variant uses boundary condition grad u . nu - i kappa u = 0,
    // i.e. boundary weight 1 instead of sqrt(n).
    bool unit_boundary_weight = false;

    Field boundary_weight() const;  // sqrt(n) or 1
};

struct AssembledParts {
    sparse::CsrMatrix S_A;
    sparse::CsrMatrix M_n;  // mass with coefficient n, unscaled by kappa^2
    sparse::CsrMatrix B;    // boundary mass with the Robin weight
    std::vector<double> load;
};

AssembledParts assemble_parts(const ProblemInstance& p, const mesh::Mesh& m);

struct FullSystem {
    sparse::CsrComplexMatrix matrix;  // S_A - kappa^2 M_n - i kappa B
    std::vector<cplx> rhs;
};

FullSystem compose_full_system(const AssembledParts& parts, double kappa);
FullSystem assemble_full_system(const ProblemInstance& p, const mesh::Mesh& m);

struct ReferenceSolution {
    std::vector<cplx> u;
    double residual = 0.0;  // relative algebraic residual
    std::string factorization;
};

// Direct sparse solve with an enforced residual check (<= 1e-10 relative).
ReferenceSolution solve_reference(const ProblemInstance& p, const mesh::Mesh& m);

// Named catalog (see builtin_problem_names() or the README for the list);
// throws std::invalid_argument for unknown names.
ProblemInstance builtin_problem(const std::string& name);
std::vector<std::string> builtin_problem_names();

// The heterogeneous scatterer example with configurable parameters:
// A = eps^2 inside the eps-periodic scatterer within (0.25,0.75)^2, else 1;
// n = 1; f = Gaussian bump of amplitude 1e4 and radius 0.05 at (z1, z2).
ProblemInstance make_heterogeneous(double kappa, int eps_exponent, double z1,
                                   double z2);

// Plain-text solution export: header "dim H_exp h_exp kappa", then one
// "re im" line per fine node.
void write_solution_text(const std::vector<cplx>& u, int dim, int h_coarse_exp,
                         int h_fine_exp, double kappa, const std::string& path);

}  // namespace helmlod::helmholtz
