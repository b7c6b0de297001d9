#include "helmlod/lod.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include "helmlod/kernels.hpp"
#include "helmlod/parallel.hpp"

namespace helmlod::lod {

namespace {

using sparse::CsrMatrix;
using sparse::Triplet;

std::vector<Run> runs_from_sorted(const std::vector<std::int32_t>& nodes) {
    std::vector<Run> runs;
    std::size_t i = 0;
    while (i < nodes.size()) {
        std::size_t j = i + 1;
        while (j < nodes.size() && nodes[j] == nodes[j - 1] + 1) ++j;
        runs.push_back({nodes[i], static_cast<std::int32_t>(j - i)});
        i = j;
    }
    return runs;
}

// Scratch shared across per-node solves on one thread.
struct Workspace {
    std::vector<std::int32_t> g2l;      // global fine node -> local index
    std::vector<char> mark;             // coarse / fine marks
    std::vector<std::int32_t> touched;

    void ensure(std::size_t n) {
        if (g2l.size() < n) g2l.assign(n, -1);
        if (mark.size() < n) mark.assign(n, 0);
    }
};

Workspace& workspace() {
    thread_local Workspace ws;
    return ws;
}

// One constrained stationary-point solve: bordered system
//   [[A_FF, C_KF^T], [C_KF, 0]] [phi; lambda] = [0; alpha e_center]
struct BorderedSolve {
    std::vector<double> phi;     // |F| values
    double residual = 0.0;       // relative residual of the bordered system
};

CsrMatrix build_bordered(const CsrMatrix& a, const CsrMatrix& c,
                         const std::vector<std::int32_t>& free_nodes,
                         const std::vector<std::int32_t>& constraints,
                         Workspace& ws) {
    const std::int32_t nf = static_cast<std::int32_t>(free_nodes.size());
    const std::int32_t nk = static_cast<std::int32_t>(constraints.size());
    ws.ensure(a.rows);
    for (std::int32_t i = 0; i < nf; ++i) ws.g2l[free_nodes[i]] = i;

    std::vector<Triplet> t;
    t.reserve(free_nodes.size() * 8 + constraints.size() * 16);
    for (std::int32_t i = 0; i < nf; ++i) {
        const std::int32_t g = free_nodes[i];
        for (std::int32_t k = a.row_ptr[g]; k < a.row_ptr[g + 1]; ++k) {
            const std::int32_t j = ws.g2l[a.col_idx[k]];
            if (j >= 0) t.push_back({i, j, a.vals[k]});
        }
    }
    for (std::int32_t kk = 0; kk < nk; ++kk) {
        const std::int32_t row = constraints[kk];
        for (std::int32_t k = c.row_ptr[row]; k < c.row_ptr[row + 1]; ++k) {
            const std::int32_t j = ws.g2l[c.col_idx[k]];
            if (j >= 0) {
                t.push_back({nf + kk, j, c.vals[k]});
                t.push_back({j, nf + kk, c.vals[k]});
            }
        }
    }
    for (std::int32_t i = 0; i < nf; ++i) ws.g2l[free_nodes[i]] = -1;
    return sparse::csr_from_triplets(nf + nk, nf + nk, std::move(t));
}

BorderedSolve solve_bordered(const sparse::RealLu& lu, const CsrMatrix& bordered,
                             std::int32_t n_free, std::int32_t center_pos,
                             double alpha) {
    std::vector<double> rhs(bordered.rows, 0.0);
    rhs[n_free + center_pos] = alpha;
    BorderedSolve out;
    std::vector<double> sol = lu.solve(rhs);
    out.residual = sparse::relative_residual(bordered, sol, rhs);
    out.phi.assign(sol.begin(), sol.begin() + n_free);
    return out;
}

// Coarse constraint rows whose hat support intersects the free node set.
std::vector<std::int32_t> active_constraints(
    const CsrMatrix& ct, const std::vector<std::int32_t>& free_nodes,
    std::int32_t n_coarse, Workspace& ws) {
    ws.ensure(std::max<std::size_t>(ct.rows, n_coarse));
    std::vector<std::int32_t> rows;
    for (std::int32_t g : free_nodes) {
        for (std::int32_t k = ct.row_ptr[g]; k < ct.row_ptr[g + 1]; ++k) {
            const std::int32_t kc = ct.col_idx[k];
            if (!ws.mark[kc]) {
                ws.mark[kc] = 1;
                rows.push_back(kc);
            }
        }
    }
    for (std::int32_t kc : rows) ws.mark[kc] = 0;
    std::sort(rows.begin(), rows.end());
    return rows;
}

std::array<std::int32_t, 4> column_bbox_of(const std::vector<Run>& runs,
                                           std::int32_t grid_width) {
    std::array<std::int32_t, 4> bb = {INT32_MAX, INT32_MIN, INT32_MAX, INT32_MIN};
    for (const Run& r : runs) {
        const std::int32_t first = r.start, last = r.start + r.len - 1;
        const std::int32_t ry0 = first / grid_width, ry1 = last / grid_width;
        bb[2] = std::min(bb[2], ry0);
        bb[3] = std::max(bb[3], ry1);
        if (ry0 == ry1) {
            bb[0] = std::min(bb[0], first % grid_width);
            bb[1] = std::max(bb[1], last % grid_width);
        } else {  // run spans whole rows
            bb[0] = 0;
            bb[1] = grid_width - 1;
        }
    }
    return bb;
}

double runs_dot(const std::vector<Run>& ra, const double* va,
                const std::vector<Run>& rb, const double* vb) {
    double acc = 0.0;
    std::size_t ia = 0, ib = 0;
    std::int32_t offa = 0, offb = 0;
    while (ia < ra.size() && ib < rb.size()) {
        const std::int32_t sa = ra[ia].start, ea = sa + ra[ia].len;
        const std::int32_t sb = rb[ib].start, eb = sb + rb[ib].len;
        const std::int32_t lo = std::max(sa, sb), hi = std::min(ea, eb);
        if (lo < hi)
            acc += kernels::dot(va + offa + (lo - sa), vb + offb + (lo - sb),
                                static_cast<std::size_t>(hi - lo));
        if (ea <= eb) {
            offa += ra[ia].len;
            ++ia;
        }
        if (eb <= ea) {
            offb += rb[ib].len;
            ++ib;
        }
    }
    return acc;
}

double runs_dot_dense(const std::vector<Run>& runs, const double* vals,
                      const double* dense) {
    double acc = 0.0;
    std::int32_t off = 0;
    for (const Run& r : runs) {
        acc += kernels::dot(vals + off, dense + r.start,
                            static_cast<std::size_t>(r.len));
        off += r.len;
    }
    return acc;
}

}  // namespace

CsrMatrix CorrectedForm::block_matrix(int block) const {
    if (block != 1 && block != -1)
        throw std::invalid_argument("block_matrix: block must be +1 or -1");
    if (sigma != 1 && sigma != -1)
        throw std::invalid_argument("block_matrix: sigma must be +1 or -1");
    const double k2 = kappa * kappa;
    if (corrected && B != nullptr && kappa != 0.0)
        return sparse::csr_linear_combination(
            {S_A, M_n, B}, {1.0, -k2, block * sigma * kappa});
    return sparse::csr_linear_combination({S_A, M_n}, {1.0, -k2});
}

void BasisColumn::scatter(cplx scale, cplx* out) const {
    std::int32_t off = 0;
    for (const Run& r : runs) {
        for (std::int32_t k = 0; k < r.len; ++k)
            out[r.start + k] += scale * cplx(re[off + k], im[off + k]);
        off += r.len;
    }
}

namespace {

// Shared machinery for a basis build over one mesh pair.
struct BasisBuilder {
    const mesh::TwoLevelMesh& pair;
    const CorrectedForm& form;
    const assembly::QuasiInterpolation& qi;
    const LodOptions& opts;
    CsrMatrix a_plus;
    CsrMatrix a_minus;       // empty when identical to a_plus
    CsrMatrix ct;            // C transposed: fine x coarse
    bool blocks_same_global;

    // Lazily built whole-domain factorization (layers < 0 or saturated patch).
    std::once_flag global_once;
    CsrMatrix global_bordered_plus, global_bordered_minus;
    sparse::RealLu global_lu_plus, global_lu_minus;
    std::vector<std::int32_t> all_fine, all_coarse;

    BasisBuilder(const mesh::TwoLevelMesh& p, const CorrectedForm& f,
                 const assembly::QuasiInterpolation& q, const LodOptions& o)
        : pair(p), form(f), qi(q), opts(o) {
        a_plus = form.block_matrix(+1);
        blocks_same_global = form.blocks_identical();
        if (!blocks_same_global) a_minus = form.block_matrix(-1);
        ct = sparse::transpose(qi.C);
    }

    void ensure_global() {
        std::call_once(global_once, [this] {
            const std::int32_t nf = pair.n_fine_nodes();
            const std::int32_t nc = pair.n_coarse_nodes();
            all_fine.resize(nf);
            for (std::int32_t i = 0; i < nf; ++i) all_fine[i] = i;
            all_coarse.resize(nc);
            for (std::int32_t k = 0; k < nc; ++k) all_coarse[k] = k;
            Workspace& ws = workspace();
            global_bordered_plus = build_bordered(a_plus, qi.C, all_fine,
                                                  all_coarse, ws);
            global_lu_plus.factorize(global_bordered_plus, "global basis block +");
            if (!blocks_same_global) {
                global_bordered_minus = build_bordered(a_minus, qi.C, all_fine,
                                                       all_coarse, ws);
                global_lu_minus.factorize(global_bordered_minus,
                                          "global basis block -");
            }
        });
    }

    // Solve the whole-domain problem for a batch of nodes; imaginary block
    // handled per the constraint mode.  Returns per-node bordered residual.
    double solve_global_node(std::int32_t node, BasisColumn& col) {
        ensure_global();
        const std::int32_t nf = pair.n_fine_nodes();
        BorderedSolve re = solve_bordered(global_lu_plus, global_bordered_plus,
                                          nf, node, qi.w[node]);
        col.runs = {{0, nf}};
        col.re = std::move(re.phi);
        double resid = re.residual;
        if (!opts.one_one_constraint) {
            col.im.assign(nf, 0.0);
        } else if (blocks_same_global) {
            col.im = col.re;
        } else {
            BorderedSolve im = solve_bordered(global_lu_minus,
                                              global_bordered_minus, nf, node,
                                              qi.w[node]);
            col.im = std::move(im.phi);
            resid = std::max(resid, im.residual);
        }
        return resid;
    }

    double solve_patch_node(std::int32_t node, int layers, BasisColumn& col) {
        const mesh::Patch patch = mesh::node_patch(pair, node, layers);
        if (patch.covers_all) return solve_global_node(node, col);
        Workspace& ws = workspace();
        const std::vector<std::int32_t>& free = patch.free_fine_nodes;
        if (free.empty())
            throw std::runtime_error("build_node_basis: empty patch interior (node " +
                                     std::to_string(node) + ")");
        const std::vector<std::int32_t> cons =
            active_constraints(ct, free, pair.n_coarse_nodes(), ws);
        const auto center = std::lower_bound(cons.begin(), cons.end(), node);
        if (center == cons.end() || *center != node)
            throw std::runtime_error(
                "build_node_basis: center constraint not active (node " +
                std::to_string(node) + ")");
        const std::int32_t center_pos =
            static_cast<std::int32_t>(center - cons.begin());
        const std::int32_t n_free = static_cast<std::int32_t>(free.size());

        const std::string ctx = "node " + std::to_string(node) + " layers " +
                                std::to_string(layers) + " kappa " +
                                std::to_string(form.kappa) + " H 2^-" +
                                std::to_string(pair.coarse_exponent);
        const bool local_same =
            blocks_same_global || patch.fine_boundary_facets.empty();

        CsrMatrix bordered = build_bordered(a_plus, qi.C, free, cons, ws);
        sparse::RealLu lu;
        lu.factorize(bordered, "KKT block + (" + ctx + ")");
        BorderedSolve re = solve_bordered(lu, bordered, n_free, center_pos,
                                          qi.w[node]);
        double resid = re.residual;

        col.runs = runs_from_sorted(free);
        col.re = std::move(re.phi);
        if (!opts.one_one_constraint) {
            col.im.assign(free.size(), 0.0);
        } else if (local_same) {
            col.im = col.re;
        } else {
            CsrMatrix bordered_m = build_bordered(a_minus, qi.C, free, cons, ws);
            sparse::RealLu lu_m;
            lu_m.factorize(bordered_m, "KKT block - (" + ctx + ")");
            BorderedSolve im = solve_bordered(lu_m, bordered_m, n_free,
                                              center_pos, qi.w[node]);
            col.im = std::move(im.phi);
            resid = std::max(resid, im.residual);
        }
        return resid;
    }
};

// max_k |(C Phi)_k - alpha e_j| over both planes for one column.
double column_constraint_residual(const CsrMatrix& ct, const BasisColumn& col,
                                  std::int32_t node, double alpha,
                                  bool one_one, std::vector<double>& acc_re,
                                  std::vector<double>& acc_im,
                                  std::vector<std::int32_t>& touched) {
    touched.clear();
    std::int32_t off = 0;
    for (const Run& r : col.runs) {
        for (std::int32_t k = 0; k < r.len; ++k) {
            const std::int32_t g = r.start + k;
            const double vr = col.re[off + k], vi = col.im[off + k];
            if (vr == 0.0 && vi == 0.0) continue;
            for (std::int32_t p = ct.row_ptr[g]; p < ct.row_ptr[g + 1]; ++p) {
                const std::int32_t kc = ct.col_idx[p];
                if (acc_re[kc] == 0.0 && acc_im[kc] == 0.0) touched.push_back(kc);
                acc_re[kc] += ct.vals[p] * vr;
                acc_im[kc] += ct.vals[p] * vi;
            }
        }
        off += r.len;
    }
    double worst = 0.0;
    bool saw_center = false;
    for (std::int32_t kc : touched) {
        double er = acc_re[kc], ei = acc_im[kc];
        if (kc == node) {
            er -= alpha;
            if (one_one) ei -= alpha;
            saw_center = true;
        } else if (!one_one) {
            // imaginary plane constrained to zero everywhere
        }
        worst = std::max(worst, std::max(std::abs(er), std::abs(ei)));
        acc_re[kc] = 0.0;
        acc_im[kc] = 0.0;
    }
    if (!saw_center) worst = std::max(worst, alpha);  // center row missing
    return worst;
}

}  // namespace

BasisColumn build_node_basis(const mesh::TwoLevelMesh& pair,
                             const CorrectedForm& form,
                             const assembly::QuasiInterpolation& qi,
                             std::int32_t node, int layers,
                             const LodOptions& opts) {
    BasisBuilder builder(pair, form, qi, opts);
    BasisColumn col;
    if (layers < 0)
        builder.solve_global_node(node, col);
    else
        builder.solve_patch_node(node, layers, col);
    return col;
}

MultiscaleBasis build_basis(const mesh::TwoLevelMesh& pair,
                            const CorrectedForm& form,
                            const assembly::QuasiInterpolation& qi, int layers,
                            const LodOptions& opts) {
    if (form.S_A == nullptr || form.M_n == nullptr || form.B == nullptr)
        throw std::invalid_argument("build_basis: corrected form incomplete");
    const std::int32_t nc = pair.n_coarse_nodes();
    MultiscaleBasis basis;
    basis.pair = &pair;
    basis.layers = layers;
    basis.corrected = form.corrected;
    basis.sigma = form.sigma;
    basis.one_one_constraint = opts.one_one_constraint;
    basis.columns.resize(nc);
    basis.column_bbox.resize(nc);

    BasisBuilder builder(pair, form, qi, opts);
    std::vector<double> kkt_residuals(nc, 0.0);

    // Saturated patches reuse one whole-domain factorization; they are
    // solved sequentially (shared LU), everything else in the pool.
    std::vector<std::size_t> global_nodes, patch_nodes;
    for (std::int32_t j = 0; j < nc; ++j) {
        if (layers < 0 || mesh::patch_saturates(pair, j, layers))
            global_nodes.push_back(j);
        else
            patch_nodes.push_back(j);
    }
    for (std::size_t j : global_nodes)
        kkt_residuals[j] = builder.solve_global_node(static_cast<std::int32_t>(j),
                                                     basis.columns[j]);
    parallel_for:: ;
    parallel::parallel_for(patch_nodes.size(), opts.threads, [&](std::size_t idx) {
        const std::int32_t j = static_cast<std::int32_t>(patch_nodes[idx]);
        kkt_residuals[j] = builder.solve_patch_node(j, layers, basis.columns[j]);
    });

    const std::int32_t grid_width =
        pair.fine.dim == 1 ? pair.n_fine_nodes() : pair.fine.cells + 1;
    for (std::int32_t j = 0; j < nc; ++j)
        basis.column_bbox[j] = column_bbox_of(basis.columns[j].runs, grid_width);

    std::vector<double> acc_re(nc, 0.0), acc_im(nc, 0.0);
    std::vector<std::int32_t> touched;
    double worst_c = 0.0, worst_k = 0.0;
    for (std::int32_t j = 0; j < nc; ++j) {
        worst_c = std::max(
            worst_c, column_constraint_residual(builder.ct, basis.columns[j], j,
                                                qi.w[j], opts.one_one_constraint,
                                                acc_re, acc_im, touched));
        worst_k = std::max(worst_k, kkt_residuals[j]);
    }
    basis.constraint_residual = worst_c;
    basis.kkt_residual = worst_k;
    return basis;
}

CoarseSolution solve_coarse(const MultiscaleBasis& basis,
                            const helmholtz::AssembledParts& parts,
                            double kappa) {
    const mesh::TwoLevelMesh& pair = *basis.pair;
    const std::int32_t nh = static_cast<std::int32_t>(basis.columns.size());
    const std::int32_t nf = pair.n_fine_nodes();
    const CsrMatrix k_full = sparse::csr_linear_combination(
        {&parts.S_A, &parts.M_n}, {1.0, -kappa * kappa});
    const CsrMatrix& b_mat = parts.B;

    std::vector<cplx> g(static_cast<std::size_t>(nh) * nh, cplx(0.0));
    std::vector<cplx> rhs(nh, cplx(0.0));

    bool all_dense = true;
    for (const auto& col : basis.columns)
        if (!col.full_range(nf)) {
            all_dense = false;
            break;
        }

    if (all_dense) {
        // Pack the two real planes and project panel-by-panel with the
        // transpose-product kernel.
        const std::size_t nfz = static_cast<std::size_t>(nf);
        std::vector<double> xre(nfz * nh), xim(nfz * nh);
        for (std::int32_t j = 0; j < nh; ++j) {
            std::copy(basis.columns[j].re.begin(), basis.columns[j].re.end(),
                      xre.begin() + j * nfz);
            std::copy(basis.columns[j].im.begin(), basis.columns[j].im.end(),
                      xim.begin() + j * nfz);
        }
        for (std::int32_t j = 0; j < nh; ++j)
            rhs[j] = cplx(kernels::dot(xre.data() + j * nfz, parts.load.data(), nfz),
                          -kernels::dot(xim.data() + j * nfz, parts.load.data(), nfz));

        std::vector<double> gre(static_cast<std::size_t>(nh) * nh, 0.0);
        std::vector<double> gim(static_cast<std::size_t>(nh) * nh, 0.0);
        const std::int32_t panel = 128;
        std::vector<double> yre(nfz * panel), yim(nfz * panel), tmp(nfz),
            scratch(static_cast<std::size_t>(nh) * panel);
        for (std::int32_t p0 = 0; p0 < nh; p0 += panel) {
            const std::int32_t pc = std::min(panel, nh - p0);
            for (std::int32_t q = 0; q < pc; ++q) {
                const double* cre = xre.data() + (p0 + q) * nfz;
                const double* cim = xim.data() + (p0 + q) * nfz;
                double* ore = yre.data() + q * nfz;
                double* oim = yim.data() + q * nfz;
                k_full.matvec(cre, ore);
                b_mat.matvec(cim, tmp.data());
                kernels::axpy(kappa, tmp.data(), ore, nfz);
                k_full.matvec(cim, oim);
                b_mat.matvec(cre, tmp.data());
                kernels::axpy(-kappa, tmp.data(), oim, nfz);
            }
            double* gre_p = gre.data() + static_cast<std::size_t>(p0) * nh;
            double* gim_p = gim.data() + static_cast<std::size_t>(p0) * nh;
            kernels::gemm_at_b(nfz, nh, pc, xre.data(), yre.data(), gre_p, nh);
            kernels::gemm_at_b(nfz, nh, pc, xim.data(), yim.data(), gre_p, nh);
            kernels::gemm_at_b(nfz, nh, pc, xre.data(), yim.data(), gim_p, nh);
            std::fill(scratch.begin(),
                      scratch.begin() + static_cast<std::size_t>(nh) * pc, 0.0);
            kernels::gemm_at_b(nfz, nh, pc, xim.data(), yre.data(), scratch.data(),
                               nh);
            kernels::axpy(-1.0, scratch.data(), gim_p,
                          static_cast<std::size_t>(nh) * pc);
        }
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = cplx(gre[i], gim[i]);
    } else {
        // Sparse pair path: per column j form y_j = A Phi_j on the dilated
        // support, then intersect runs with every overlapping column m.
        struct YCol {
            std::vector<Run> runs;
            std::vector<double> re, im;
        };
        const std::int32_t grid_width =
            pair.fine.dim == 1 ? nf : pair.fine.cells + 1;
        (void)grid_width;
        std::vector<double> sre(nf, 0.0), sim(nf, 0.0);
        std::vector<char> row_mark(nf, 0);
        std::vector<std::int32_t> rows;
        for (std::int32_t j = 0; j < nh; ++j) {
            const BasisColumn& col = basis.columns[j];
            // scatter and mark adjacency-dilated rows
            rows.clear();
            std::int32_t off = 0;
            for (const Run& r : col.runs) {
                for (std::int32_t k = 0; k < r.len; ++k) {
                    const std::int32_t gnode = r.start + k;
                    sre[gnode] = col.re[off + k];
                    sim[gnode] = col.im[off + k];
                    for (std::int32_t p = k_full.row_ptr[gnode];
                         p < k_full.row_ptr[gnode + 1]; ++p) {
                        const std::int32_t c = k_full.col_idx[p];
                        if (!row_mark[c]) {
                            row_mark[c] = 1;
                            rows.push_back(c);
                        }
                    }
                }
                off += r.len;
            }
            std::sort(rows.begin(), rows.end());
            YCol y;
            y.runs = runs_from_sorted(rows);
            y.re.resize(rows.size());
            y.im.resize(rows.size());
            for (std::size_t t = 0; t < rows.size(); ++t) {
                const std::int32_t r = rows[t];
                double kre = 0.0, kim = 0.0;
                for (std::int32_t p = k_full.row_ptr[r]; p < k_full.row_ptr[r + 1];
                     ++p) {
                    kre += k_full.vals[p] * sre[k_full.col_idx[p]];
                    kim += k_full.vals[p] * sim[k_full.col_idx[p]];
                }
                double bre = 0.0, bim = 0.0;
                for (std::int32_t p = b_mat.row_ptr[r]; p < b_mat.row_ptr[r + 1];
                     ++p) {
                    bre += b_mat.vals[p] * sre[b_mat.col_idx[p]];
                    bim += b_mat.vals[p] * sim[b_mat.col_idx[p]];
                }
                y.re[t] = kre + kappa * bim;
                y.im[t] = kim - kappa * bre;
            }
            rhs[j] = cplx(runs_dot_dense(col.runs, col.re.data(), parts.load.data()),
                          -runs_dot_dense(col.runs, col.im.data(), parts.load.data()));

            const auto& bj = basis.column_bbox[j];
            for (std::int32_t m = 0; m < nh; ++m) {
                const auto& bm = basis.column_bbox[m];
                if (bm[0] > bj[1] + 1 || bj[0] > bm[1] + 1 || bm[2] > bj[3] + 1 ||
                    bj[2] > bm[3] + 1)
                    continue;
                const BasisColumn& cm = basis.columns[m];
                const double rr = runs_dot(cm.runs, cm.re.data(), y.runs, y.re.data());
                const double ii = runs_dot(cm.runs, cm.im.data(), y.runs, y.im.data());
                const double ri = runs_dot(cm.runs, cm.re.data(), y.runs, y.im.data());
                const double ir = runs_dot(cm.runs, cm.im.data(), y.runs, y.re.data());
                g[static_cast<std::size_t>(j) * nh + m] = cplx(rr + ii, ri - ir);
            }
            // reset scatter scratch
            off = 0;
            for (const Run& r : col.runs) {
                for (std::int32_t k = 0; k < r.len; ++k) {
                    sre[r.start + k] = 0.0;
                    sim[r.start + k] = 0.0;
                }
                off += r.len;
            }
            for (std::int32_t r : rows) row_mark[r] = 0;
        }
    }

    CoarseSolution sol;
    sol.coefficients = sparse::dense_solve(nh, g, rhs, "coarse Galerkin system");
    // residual before discarding G
    {
        double rn = 0.0, bn = 0.0;
        for (std::int32_t m = 0; m < nh; ++m) {
            cplx acc = 0.0;
            for (std::int32_t j = 0; j < nh; ++j)
                acc += g[static_cast<std::size_t>(j) * nh + m] * sol.coefficients[j];
            rn += std::norm(rhs[m] - acc);
            bn += std::norm(rhs[m]);
        }
        sol.galerkin_residual = std::sqrt(rn) / (bn > 0 ? std::sqrt(bn) : 1.0);
    }
    sol.fine.assign(nf, cplx(0.0));
    for (std::int32_t j = 0; j < nh; ++j)
        basis.columns[j].scatter(sol.coefficients[j], sol.fine.data());
    return sol;
}

ErrorReport error_report(const std::vector<cplx>& approx,
                         const std::vector<cplx>& reference,
                         const assembly::Norms& norms,
                         const sparse::CsrMatrix& s_weighted, double kappa) {
    if (approx.size() != reference.size())
        throw std::invalid_argument("error_report: size mismatch");
    const double ref_l2 = assembly::l2_norm(norms, reference);
    const double ref_v = assembly::v_norm(norms, reference, kappa);
    const double ref_av =
        assembly::weighted_v_norm(s_weighted, norms, reference, kappa);
    if (ref_l2 == 0.0 || ref_v == 0.0)
        throw std::invalid_argument("error_report: zero reference norm");
    std::vector<cplx> diff(approx.size());
    for (std::size_t i = 0; i < approx.size(); ++i)
        diff[i] = approx[i] - reference[i];
    ErrorReport r;
    r.err_l2 = assembly::l2_norm(norms, diff) / ref_l2;
    r.err_v = assembly::v_norm(norms, diff, kappa) / ref_v;
    r.err_av = assembly::weighted_v_norm(s_weighted, norms, diff, kappa) / ref_av;
    return r;
}

void write_basis_text(const MultiscaleBasis& basis, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[128];
    for (std::size_t j = 0; j < basis.columns.size(); ++j) {
        const BasisColumn& col = basis.columns[j];
        std::int32_t off = 0;
        for (const Run& r : col.runs) {
            for (std::int32_t k = 0; k < r.len; ++k) {
                std::snprintf(buf, sizeof buf, "%zu %d %.17g %.17g\n", j,
                              r.start + k, col.re[off + k], col.im[off + k]);
                out << buf;
            }
            off += r.len;
        }
    }
}

}  // namespace helmlod::lod
