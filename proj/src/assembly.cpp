#include "helmlod/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "helmlod/kernels.hpp"

namespace helmlod::assembly {

namespace {

using mesh::Mesh;
using sparse::CsrMatrix;
using sparse::Triplet;

// Gradients of the P1 hats on a triangle, scaled by 2*area:
// grad lambda_i = (b_i, c_i) / (2A) with cyclic vertex differences.
struct TriangleGrad {
    double b[3];
    double c[3];
    double area;
};

TriangleGrad triangle_grad(const Mesh& m, std::int32_t e) {
    const std::int32_t* en = m.element(e);
    const mesh::Point p0 = m.nodes[en[0]];
    const mesh::Point p1 = m.nodes[en[1]];
    const mesh::Point p2 = m.nodes[en[2]];
    TriangleGrad g;
    g.b[0] = p1.y - p2.y;
    g.b[1] = p2.y - p0.y;
    g.b[2] = p0.y - p1.y;
    g.c[0] = p2.x - p1.x;
    g.c[1] = p0.x - p2.x;
    g.c[2] = p1.x - p0.x;
    g.area = 0.5 * (g.c[2] * (-g.b[1]) - g.c[1] * (-g.b[2]));
    return g;
}

enum class CoeffSign { positive, nonnegative };

double sample_coeff(const Field& coeff, mesh::Point p, CoeffSign sign,
                    const char* op) {
    const double v = coeff(p);
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string(op) + ": coefficient not finite");
    if (sign == CoeffSign::positive && !(v > 0.0))
        throw std::invalid_argument(std::string(op) +
                                    ": non-positive coefficient rejected");
    if (sign == CoeffSign::nonnegative && v < 0.0)
        throw std::invalid_argument(std::string(op) +
                                    ": negative coefficient rejected");
    return v;
}

}  // namespace

CsrMatrix assemble_stiffness(const Mesh& m, const Field& coeff) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(m.n_elements()) * (m.dim + 1) * (m.dim + 1));
    if (m.dim == 1) {
        const double inv_h = 1.0 / m.h;
        for (std::int32_t e = 0; e < m.n_elements(); ++e) {
            const double c =
                sample_coeff(coeff, m.barycenter(e), CoeffSign::positive,
                             "assemble_stiffness") * inv_h;
            const std::int32_t* en = m.element(e);
            t.push_back({en[0], en[0], c});
            t.push_back({en[0], en[1], -c});
            t.push_back({en[1], en[0], -c});
            t.push_back({en[1], en[1], c});
        }
    } else {
        for (std::int32_t e = 0; e < m.n_elements(); ++e) {
            const double c = sample_coeff(coeff, m.barycenter(e),
                                          CoeffSign::positive,
                                          "assemble_stiffness");
            const TriangleGrad g = triangle_grad(m, e);
            const double scale = c / (4.0 * g.area);
            const std::int32_t* en = m.element(e);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    t.push_back({en[i], en[j],
                                 scale * (g.b[i] * g.b[j] + g.c[i] * g.c[j])});
        }
    }
    return sparse::csr_from_triplets(m.n_nodes(), m.n_nodes(), std::move(t));
}

CsrMatrix assemble_mass(const Mesh& m, const Field& coeff) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(m.n_elements()) * (m.dim + 1) * (m.dim + 1));
    const double meas = m.element_measure();
    // int_T lambda_i lambda_j = |T| (1 + delta_ij) / ((d+1)(d+2))
    const double off = meas / ((m.dim + 1) * (m.dim + 2));
    for (std::int32_t e = 0; e < m.n_elements(); ++e) {
        const double c = sample_coeff(coeff, m.barycenter(e),
                                      CoeffSign::positive, "assemble_mass");
        const std::int32_t* en = m.element(e);
        for (int i = 0; i <= m.dim; ++i)
            for (int j = 0; j <= m.dim; ++j)
                t.push_back({en[i], en[j], c * off * (i == j ? 2.0 : 1.0)});
    }
    return sparse::csr_from_triplets(m.n_nodes(), m.n_nodes(), std::move(t));
}

CsrMatrix assemble_boundary_mass(const Mesh& m, const Field& coeff) {
    std::vector<Triplet> t;
    for (const auto& f : m.boundary_facets) {
        const double c = sample_coeff(coeff, m.facet_midpoint(f),
                                      CoeffSign::nonnegative,
                                      "assemble_boundary_mass");
        if (m.dim == 1) {
            t.push_back({f.a, f.a, c});
        } else {
            const double s = c * m.facet_measure(f) / 6.0;
            t.push_back({f.a, f.a, 2.0 * s});
            t.push_back({f.a, f.b, s});
            t.push_back({f.b, f.a, s});
            t.push_back({f.b, f.b, 2.0 * s});
        }
    }
    return sparse::csr_from_triplets(m.n_nodes(), m.n_nodes(), std::move(t));
}

std::vector<double> assemble_load(const Mesh& m, const Field& f) {
    std::vector<double> b(m.n_nodes(), 0.0);
    const double w = m.element_measure() / (m.dim + 1);
    for (std::int32_t e = 0; e < m.n_elements(); ++e) {
        const double v = f(m.barycenter(e)) * w;
        const std::int32_t* en = m.element(e);
        for (int k = 0; k <= m.dim; ++k) b[en[k]] += v;
    }
    return b;
}

CsrMatrix prolongation(const mesh::TwoLevelMesh& pair) {
    std::vector<Triplet> t;
    const std::int32_t nf = pair.n_fine_nodes();
    t.reserve(static_cast<std::size_t>(nf) * (pair.fine.dim + 1));
    std::int32_t cn[3];
    double val[3];
    int count = 0;
    for (std::int32_t i = 0; i < nf; ++i) {
        pair.coarse_hat_values(i, cn, val, &count);
        for (int k = 0; k < count; ++k)
            if (val[k] != 0.0) t.push_back({i, cn[k], val[k]});
    }
    return sparse::csr_from_triplets(nf, pair.n_coarse_nodes(), std::move(t));
}

std::vector<double> QuasiInterpolation::apply(
    const std::vector<double>& fine) const {
    std::vector<double> c(C.rows);
    C.matvec(fine.data(), c.data());
    for (std::int32_t k = 0; k < C.rows; ++k) c[k] /= w[k];
    return c;
}

std::vector<cplx> QuasiInterpolation::apply(const std::vector<cplx>& fine) const {
    const std::size_t n = fine.size();
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = fine[i].real();
        im[i] = fine[i].imag();
    }
    std::vector<double> cre = apply(re), cim = apply(im);
    std::vector<cplx> c(cre.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = {cre[k], cim[k]};
    return c;
}

QuasiInterpolation build_quasi_interpolation(const mesh::TwoLevelMesh& pair) {
    const Mesh& cm = pair.coarse;
    const Mesh& fm = pair.fine;
    const int d = fm.dim;
    const double meas = fm.element_measure();
    const double scale = meas / ((d + 1) * (d + 2));
    std::vector<Triplet> t;

    // Per coarse element: accumulate (coarse hat x fine node) products over
    // the contained fine elements, then emit triplets.
    std::vector<std::int32_t> loc_nodes;
    std::vector<double> acc;  // (d+1) rows x loc_nodes columns
    std::int32_t cn[3];
    double cval[3];
    int count = 0;
    for (std::int32_t K = 0; K < cm.n_elements(); ++K) {
        const std::int32_t* kn = cm.element(K);
        const std::int32_t* fe = pair.fine_elements_of(K);
        loc_nodes.clear();
        for (std::int32_t q = 0; q < pair.fine_per_coarse; ++q) {
            const std::int32_t* en = fm.element(fe[q]);
            loc_nodes.insert(loc_nodes.end(), en, en + d + 1);
        }
        std::sort(loc_nodes.begin(), loc_nodes.end());
        loc_nodes.erase(std::unique(loc_nodes.begin(), loc_nodes.end()),
                        loc_nodes.end());
        acc.assign(static_cast<std::size_t>(d + 1) * loc_nodes.size(), 0.0);

        for (std::int32_t q = 0; q < pair.fine_per_coarse; ++q) {
            const std::int32_t* en = fm.element(fe[q]);
            // hat values of K's coarse vertices at this element's fine nodes
            double hv[3][3] = {};
            for (int v = 0; v <= d; ++v) {
                pair.coarse_hat_values(en[v], cn, cval, &count);
                for (int kk = 0; kk <= d; ++kk)
                    for (int c2 = 0; c2 < count; ++c2)
                        if (cn[c2] == kn[kk]) hv[kk][v] = cval[c2];
            }
            for (int kk = 0; kk <= d; ++kk) {
                double sum = 0.0;
                for (int v = 0; v <= d; ++v) sum += hv[kk][v];
                for (int v = 0; v <= d; ++v) {
                    const double integral = scale * (hv[kk][v] + sum);
                    const auto it = std::lower_bound(loc_nodes.begin(),
                                                     loc_nodes.end(), en[v]);
                    acc[static_cast<std::size_t>(kk) * loc_nodes.size() +
                        (it - loc_nodes.begin())] += integral;
                }
            }
        }
        for (int kk = 0; kk <= d; ++kk)
            for (std::size_t c2 = 0; c2 < loc_nodes.size(); ++c2) {
                const double v = acc[static_cast<std::size_t>(kk) * loc_nodes.size() + c2];
                if (v != 0.0) t.push_back({kn[kk], loc_nodes[c2], v});
            }
    }

    QuasiInterpolation qi;
    qi.C = sparse::csr_from_triplets(pair.n_coarse_nodes(), pair.n_fine_nodes(),
                                     std::move(t));
    // w[k] = (1, phi_k^H) computed from the coarse mesh directly; the row-sum
    // identity sum_i C[k,i] = w[k] is then a checkable property, not a
    // definition.
    qi.w.assign(pair.n_coarse_nodes(), 0.0);
    const double cw = cm.element_measure() / (cm.dim + 1);
    for (std::int32_t e = 0; e < cm.n_elements(); ++e)
        for (int k = 0; k <= cm.dim; ++k) qi.w[cm.element(e)[k]] += cw;
    for (double wk : qi.w)
        if (!(wk > 0.0))
            throw std::runtime_error("build_quasi_interpolation: nonpositive weight");
    return qi;
}

Norms build_norms(const Mesh& m) {
    return {assemble_stiffness(m, unit_field()), assemble_mass(m, unit_field())};
}

double quadratic_form(const sparse::CsrMatrix& a, const std::vector<double>& x) {
    std::vector<double> y(a.rows);
    a.matvec(x.data(), y.data());
    return kernels::dot(x.data(), y.data(), x.size());
}

namespace {

// u* A u for real symmetric A and complex u, via the two real planes.
double hermitian_form(const sparse::CsrMatrix& a, const std::vector<cplx>& u) {
    const std::size_t n = u.size();
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = u[i].real();
        im[i] = u[i].imag();
    }
    return quadratic_form(a, re) + quadratic_form(a, im);
}

}  // namespace

double l2_norm(const Norms& n, const std::vector<cplx>& u) {
    return std::sqrt(std::max(0.0, hermitian_form(n.M1, u)));
}

double v_norm(const Norms& n, const std::vector<cplx>& u, double kappa) {
    const double q = hermitian_form(n.S1, u) + kappa * kappa * hermitian_form(n.M1, u);
    return std::sqrt(std::max(0.0, q));
}

double weighted_v_norm(const sparse::CsrMatrix& s_weighted, const Norms& n,
                       const std::vector<cplx>& u, double kappa) {
    const double q =
        hermitian_form(s_weighted, u) + kappa * kappa * hermitian_form(n.M1, u);
    return std::sqrt(std::max(0.0, q));
}

double v_norm(const Mesh& m, const std::vector<cplx>& u, double kappa) {
    return v_norm(build_norms(m), u, kappa);
}

}  // namespace helmlod::assembly
