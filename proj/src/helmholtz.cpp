#include "helmlod/helmholtz.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace helmlod::helmholtz {

namespace {

constexpr double kPi = std::numbers::pi;

// Source of the 1D catalog: 2*sqrt(2) on [3/16, 5/16] and [11/16, 13/16],
// zero elsewhere.  Discontinuities sit on multiples of 2^-4, so barycenter
// sampling is exact for dyadic meshes with h <= 2^-4.
double pulse_pair(double x) {
    const bool inside = (x >= 3.0 / 16.0 && x <= 5.0 / 16.0) ||
                        (x >= 11.0 / 16.0 && x <= 13.0 / 16.0);
    return inside ? 2.0 * std::sqrt(2.0) : 0.0;
}

}  // namespace

Field ProblemInstance::boundary_weight() const {
    if (unit_boundary_weight)
        return assembly::unit_field();
    Field n = index_n;
    return [n](mesh::Point p) { return std::sqrt(n(p)); };
}

AssembledParts assemble_parts(const ProblemInstance& p, const mesh::Mesh& m) {
    if (p.dim != m.dim)
        throw std::invalid_argument("assemble_parts: problem/mesh dimension mismatch");
    if (m.n_elements() == 0)
        throw std::invalid_argument("assemble_parts: zero-measure mesh");
    if (!(p.kappa > 0.0))
        throw std::invalid_argument("assemble_parts: kappa must be positive");
    AssembledParts parts;
    parts.S_A = assembly::assemble_stiffness(m, p.diffusion_a);
    parts.M_n = assembly::assemble_mass(m, p.index_n);
    parts.B = assembly::assemble_boundary_mass(m, p.boundary_weight());
    parts.load = assembly::assemble_load(m, p.rhs_f);
    return parts;
}

FullSystem compose_full_system(const AssembledParts& parts, double kappa) {
    FullSystem sys;
    const sparse::CsrMatrix real_part = sparse::csr_linear_combination(
        {&parts.S_A, &parts.M_n}, {1.0, -kappa * kappa});
    sys.matrix = sparse::csr_complex_compose(real_part, parts.B, -kappa);
    sys.rhs.assign(parts.load.begin(), parts.load.end());
    return sys;
}

FullSystem assemble_full_system(const ProblemInstance& p, const mesh::Mesh& m) {
    return compose_full_system(assemble_parts(p, m), p.kappa);
}

ReferenceSolution solve_reference(const ProblemInstance& p, const mesh::Mesh& m) {
    const FullSystem sys = assemble_full_system(p, m);
    sparse::ComplexLu lu;
    lu.factorize(sys.matrix,
                 "reference solve: n=" + std::to_string(sys.matrix.rows) +
                     " nnz=" + std::to_string(sys.matrix.nnz()) +
                     " kappa=" + std::to_string(p.kappa));
    ReferenceSolution ref;
    ref.u = lu.solve(sys.rhs);
    ref.factorization = "sparse-lu";
    ref.residual = sparse::relative_residual(sys.matrix, ref.u, sys.rhs);
    if (!(ref.residual <= 1e-10))
        throw std::runtime_error(
            "solve_reference: residual " + std::to_string(ref.residual) +
            " exceeds 1e-10 (n=" + std::to_string(sys.matrix.rows) + ")");
    return ref;
}

ProblemInstance builtin_problem(const std::string& name) {
    ProblemInstance p;
    p.name = name;
    if (name == "ex1-cfg1") {
        p.dim = 1;
        p.kappa = 64.0;
        p.index_n = assembly::unit_field();
        p.rhs_f = [](mesh::Point q) { return pulse_pair(q.x); };
    } else if (name == "ex1-cfg2") {
        p.dim = 1;
        p.kappa = 64.0;
        p.index_n = [](mesh::Point q) {
            const double s = 1.0 + std::sin(kPi * q.x);
            return s * s;
        };
        p.rhs_f = [](mesh::Point q) { return pulse_pair(q.x); };
    } else if (name == "ex1-cfg3") {
        p.dim = 1;
        p.kappa = 64.0;
        p.index_n = [](mesh::Point q) {
            const double s = 1.0 + std::sin(kPi * q.x);
            return s * s;
        };
        p.rhs_f = assembly::unit_field();
    } else if (name == "ex1-cfg4" || name == "ex4-1d") {
        p.dim = 1;
        p.kappa = 64.0;
        p.index_n = [](mesh::Point q) { return std::exp(-2.0 * std::cos(kPi * q.x)); };
        p.rhs_f = assembly::unit_field();
    } else if (name == "ex2-i") {
        p.dim = 2;
        p.kappa = 8.0;
        p.index_n = [](mesh::Point q) {
            const double s = 1.0 + std::sin(kPi * q.x) * std::sin(kPi * q.y);
            return s * s;
        };
        p.rhs_f = assembly::unit_field();
    } else if (name == "ex2-ii") {
        p.dim = 2;
        p.kappa = 8.0;
        p.index_n = [](mesh::Point q) {
            return std::exp(-2.0 * std::sin(kPi * q.x) * std::cos(kPi * q.y));
        };
        p.rhs_f = assembly::unit_field();
    } else if (name == "ex4-2d") {
        p.dim = 2;
        p.kappa = 16.0;
        p.index_n = [](mesh::Point q) {
            return 1.0 + std::sin(kPi * q.x) * std::cos(kPi * q.y);
        };
        p.rhs_f = assembly::unit_field();
    } else if (name == "ex3-hetero") {
        return make_heterogeneous(32.0, 5, 0.125, 0.5);
    } else {
        std::string names;
        for (const auto& n : builtin_problem_names()) names += " " + n;
        throw std::invalid_argument("unknown problem '" + name + "'; known:" + names);
    }
    if (!p.diffusion_a) p.diffusion_a = assembly::unit_field();
    return p;
}

std::vector<std::string> builtin_problem_names() {
    return {"ex1-cfg1", "ex1-cfg2", "ex1-cfg3", "ex1-cfg4",
            "ex2-i",    "ex2-ii",   "ex3-hetero", "ex4-1d", "ex4-2d"};
}

ProblemInstance make_heterogeneous(double kappa, int eps_exponent, double z1,
                                   double z2) {
    if (eps_exponent < 1)
        throw std::invalid_argument("make_heterogeneous: eps exponent must be >= 1");
    ProblemInstance p;
    p.name = "ex3-hetero";
    p.dim = 2;
    p.kappa = kappa;
    p.unit_boundary_weight = true;
    p.index_n = assembly::unit_field();
    const double eps = std::ldexp(1.0, -eps_exponent);
    p.diffusion_a = [eps](mesh::Point q) {
        // periodic scatterer: inside (0.25,0.75)^2, cells of size eps with
        // the inner (0.25,0.75)-fraction filled by the eps^2 material
        if (q.x <= 0.25 || q.x >= 0.75 || q.y <= 0.25 || q.y >= 0.75) return 1.0;
        const double tx = q.x / eps - std::floor(q.x / eps);
        const double ty = q.y / eps - std::floor(q.y / eps);
        const bool inner = tx > 0.25 && tx < 0.75 && ty > 0.25 && ty < 0.75;
        return inner ? eps * eps : 1.0;
    };
    p.rhs_f = [z1, z2](mesh::Point q) {
        const double r2 = (q.x - z1) * (q.x - z1) + (q.y - z2) * (q.y - z2);
        const double rad2 = 0.05 * 0.05;
        if (r2 >= rad2) return 0.0;
        return 1e4 * std::exp(-1.0 / (1.0 - r2 / rad2));
    };
    return p;
}

void write_solution_text(const std::vector<cplx>& u, int dim, int h_coarse_exp,
                         int h_fine_exp, double kappa, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d %d %d %.17g\n", dim, h_coarse_exp,
                  h_fine_exp, kappa);
    out << buf;
    for (const cplx& v : u) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
        out << buf;
    }
}

}  // namespace helmlod::helmholtz
