#include "helmlod/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace helmlod::mesh {

double Mesh::element_measure() const {
    return dim == 1 ? h : 0.5 * h * h;
}

Point Mesh::barycenter(std::int32_t e) const {
    const std::int32_t* en = element(e);
    Point p;
    for (int k = 0; k <= dim; ++k) {
        p.x += nodes[en[k]].x;
        p.y += nodes[en[k]].y;
    }
    p.x /= (dim + 1);
    p.y /= (dim + 1);
    return p;
}

Point Mesh::facet_midpoint(const BoundaryFacet& f) const {
    if (dim == 1) return nodes[f.a];
    return {0.5 * (nodes[f.a].x + nodes[f.b].x),
            0.5 * (nodes[f.a].y + nodes[f.b].y)};
}

double Mesh::facet_measure(const BoundaryFacet& f) const {
    if (dim == 1) return 1.0;
    const double dx = nodes[f.b].x - nodes[f.a].x;
    const double dy = nodes[f.b].y - nodes[f.a].y;
    return std::sqrt(dx * dx + dy * dy);
}

void Mesh::build_node_to_element() const {
    if (!node_elem_ptr_.empty()) return;
    const std::int32_t nn = n_nodes();
    const std::int32_t ne = n_elements();
    node_elem_ptr_.assign(static_cast<std::size_t>(nn) + 1, 0);
    for (std::int32_t e = 0; e < ne; ++e)
        for (int k = 0; k <= dim; ++k) ++node_elem_ptr_[element(e)[k] + 1];
    for (std::int32_t i = 0; i < nn; ++i) node_elem_ptr_[i + 1] += node_elem_ptr_[i];
    node_elem_idx_.resize(node_elem_ptr_[nn]);
    std::vector<std::int32_t> fill(node_elem_ptr_.begin(), node_elem_ptr_.end() - 1);
    for (std::int32_t e = 0; e < ne; ++e)
        for (int k = 0; k <= dim; ++k) node_elem_idx_[fill[element(e)[k]]++] = e;
}

Mesh uniform_mesh(int dim, int exponent) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("uniform_mesh: dimension must be 1 or 2");
    if (exponent < 0)
        throw std::invalid_argument("uniform_mesh: exponent must be nonnegative");
    Mesh m;
    m.dim = dim;
    m.cells = std::int32_t{1} << exponent;
    m.h = 1.0 / static_cast<double>(m.cells);
    const std::int32_t n = m.cells;
    if (dim == 1) {
        m.nodes.resize(static_cast<std::size_t>(n) + 1);
        for (std::int32_t i = 0; i <= n; ++i) m.nodes[i] = {i * m.h, 0.0};
        m.element_nodes.reserve(2 * static_cast<std::size_t>(n));
        for (std::int32_t i = 0; i < n; ++i) {
            m.element_nodes.push_back(i);
            m.element_nodes.push_back(i + 1);
        }
        m.boundary_facets.push_back({0, -1, 0});
        m.boundary_facets.push_back({n, -1, n - 1});
        return m;
    }
    const std::int32_t w = n + 1;
    m.nodes.resize(static_cast<std::size_t>(w) * w);
    for (std::int32_t iy = 0; iy <= n; ++iy)
        for (std::int32_t ix = 0; ix <= n; ++ix)
            m.nodes[static_cast<std::size_t>(iy) * w + ix] = {ix * m.h, iy * m.h};
    m.element_nodes.reserve(static_cast<std::size_t>(n) * n * 6);
    for (std::int32_t iy = 0; iy < n; ++iy) {
        for (std::int32_t ix = 0; ix < n; ++ix) {
            const std::int32_t a = iy * w + ix;
            const std::int32_t b = a + 1;
            const std::int32_t c = a + w;
            const std::int32_t d = c + 1;
            // lower-left to upper-right diagonal: triangles (a,b,d), (a,d,c)
            m.element_nodes.insert(m.element_nodes.end(), {a, b, d});
            m.element_nodes.insert(m.element_nodes.end(), {a, d, c});
        }
    }
    for (std::int32_t ix = 0; ix < n; ++ix) {  // bottom, owned by lower triangle
        const std::int32_t s = 0 * n + ix;
        m.boundary_facets.push_back({ix, ix + 1, 2 * s});
    }
    for (std::int32_t iy = 0; iy < n; ++iy) {  // right
        const std::int32_t s = iy * n + (n - 1);
        m.boundary_facets.push_back({iy * w + n, (iy + 1) * w + n, 2 * s});
    }
    for (std::int32_t ix = 0; ix < n; ++ix) {  // top, owned by upper triangle
        const std::int32_t s = (n - 1) * n + ix;
        m.boundary_facets.push_back({n * w + ix, n * w + ix + 1, 2 * s + 1});
    }
    for (std::int32_t iy = 0; iy < n; ++iy) {  // left
        const std::int32_t s = iy * n + 0;
        m.boundary_facets.push_back({iy * w, (iy + 1) * w, 2 * s + 1});
    }
    return m;
}

TwoLevelMesh build_two_level(int dim, int coarse_exponent, int h_exponent) {
    if (coarse_exponent < 1)
        throw std::invalid_argument("build_two_level: coarse exponent must be >= 1");
    if (h_exponent <= coarse_exponent)
        throw std::invalid_argument(
            "build_two_level: fine exponent must exceed coarse exponent");
    TwoLevelMesh p;
    p.coarse = uniform_mesh(dim, coarse_exponent);
    p.fine = uniform_mesh(dim, h_exponent);
    p.coarse_exponent = coarse_exponent;
    p.h_exponent = h_exponent;
    p.ratio = std::int32_t{1} << (h_exponent - coarse_exponent);
    const std::int32_t r = p.ratio;
    const std::int32_t mc = p.coarse.cells;
    const std::int32_t mf = p.fine.cells;

    const std::int32_t n_fine = p.fine.n_elements();
    p.coarse_elem_of_fine.resize(n_fine);
    if (dim == 1) {
        p.fine_per_coarse = r;
        for (std::int32_t e = 0; e < n_fine; ++e) p.coarse_elem_of_fine[e] = e / r;
    } else {
        p.fine_per_coarse = r * r;
        for (std::int32_t e = 0; e < n_fine; ++e) {
            const std::int32_t sq = e / 2;
            const int u = static_cast<int>(e % 2);
            const std::int32_t fx = sq % mf, fy = sq / mf;
            const std::int32_t cx = fx / r, cy = fy / r;
            const std::int32_t lx = fx % r, ly = fy % r;
            // the coarse diagonal aligns with fine diagonals, so squares on
            // the diagonal split between the two coarse triangles
            int uc = (lx > ly) ? 0 : (lx < ly) ? 1 : u;
            p.coarse_elem_of_fine[e] = 2 * (cy * mc + cx) + uc;
        }
    }
    p.fine_elems_of_coarse.assign(
        static_cast<std::size_t>(p.coarse.n_elements()) * p.fine_per_coarse, -1);
    std::vector<std::int32_t> fill(p.coarse.n_elements(), 0);
    for (std::int32_t e = 0; e < n_fine; ++e) {
        const std::int32_t c = p.coarse_elem_of_fine[e];
        p.fine_elems_of_coarse[static_cast<std::size_t>(c) * p.fine_per_coarse +
                               fill[c]++] = e;
    }
    for (std::int32_t c = 0; c < p.coarse.n_elements(); ++c)
        if (fill[c] != p.fine_per_coarse)
            throw std::runtime_error("build_two_level: inconsistent refinement map");

    p.coarse_to_fine_node.resize(p.coarse.n_nodes());
    if (dim == 1) {
        for (std::int32_t i = 0; i <= mc; ++i) p.coarse_to_fine_node[i] = i * r;
    } else {
        for (std::int32_t iy = 0; iy <= mc; ++iy)
            for (std::int32_t ix = 0; ix <= mc; ++ix)
                p.coarse_to_fine_node[iy * (mc + 1) + ix] =
                    (iy * r) * (mf + 1) + ix * r;
    }
    return p;
}

void TwoLevelMesh::coarse_hat_values(std::int32_t fine_node,
                                     std::int32_t* coarse_nodes, double* values,
                                     int* count) const {
    const std::int32_t r = ratio;
    const std::int32_t mc = coarse.cells;
    if (coarse.dim == 1) {
        const std::int32_t j = fine_node;
        std::int32_t c = std::min(j / r, mc - 1);
        const double xi = static_cast<double>(j - c * r) / r;
        coarse_nodes[0] = c;
        coarse_nodes[1] = c + 1;
        values[0] = 1.0 - xi;
        values[1] = xi;
        *count = 2;
        return;
    }
    const std::int32_t wf = fine.cells + 1;
    const std::int32_t jx = fine_node % wf, jy = fine_node / wf;
    const std::int32_t cx = std::min(jx / r, mc - 1);
    const std::int32_t cy = std::min(jy / r, mc - 1);
    const double xi = static_cast<double>(jx - cx * r) / r;
    const double eta = static_cast<double>(jy - cy * r) / r;
    const std::int32_t a = cy * (mc + 1) + cx;
    if (xi >= eta) {  // lower triangle (a, b, d)
        coarse_nodes[0] = a;
        coarse_nodes[1] = a + 1;
        coarse_nodes[2] = a + mc + 2;
        values[0] = 1.0 - xi;
        values[1] = xi - eta;
        values[2] = eta;
    } else {  // upper triangle (a, d, c)
        coarse_nodes[0] = a;
        coarse_nodes[1] = a + mc + 2;
        coarse_nodes[2] = a + mc + 1;
        values[0] = 1.0 - eta;
        values[1] = xi;
        values[2] = eta - xi;
    }
    *count = 3;
}

namespace {

// Marks the coarse elements of the ell-layer patch around a coarse node.
std::vector<char> grow_coarse_patch(const Mesh& cm, std::int32_t coarse_node,
                                    int layers) {
    if (coarse_node < 0 || coarse_node >= cm.n_nodes())
        throw std::invalid_argument("node_patch: coarse node out of range");
    if (layers < 0) throw std::invalid_argument("node_patch: layers must be >= 0");
    cm.build_node_to_element();
    const std::int32_t ne = cm.n_elements();
    std::vector<char> elem_in(ne, 0);
    std::vector<char> node_in(cm.n_nodes(), 0);

    for (std::int32_t k = cm.node_elem_ptr()[coarse_node];
         k < cm.node_elem_ptr()[coarse_node + 1]; ++k)
        elem_in[cm.node_elem_idx()[k]] = 1;

    for (int layer = 0; layer < layers; ++layer) {
        std::fill(node_in.begin(), node_in.end(), 0);
        for (std::int32_t e = 0; e < ne; ++e)
            if (elem_in[e])
                for (int k = 0; k <= cm.dim; ++k) node_in[cm.element(e)[k]] = 1;
        bool grew = false;
        for (std::int32_t e = 0; e < ne; ++e) {
            if (elem_in[e]) continue;
            for (int k = 0; k <= cm.dim; ++k) {
                if (node_in[cm.element(e)[k]]) {
                    elem_in[e] = 1;
                    grew = true;
                    break;
                }
            }
        }
        if (!grew) break;  // saturated
    }
    return elem_in;
}

}  // namespace

bool patch_saturates(const TwoLevelMesh& pair, std::int32_t coarse_node,
                     int layers) {
    const std::vector<char> elem_in =
        grow_coarse_patch(pair.coarse, coarse_node, layers);
    for (char c : elem_in)
        if (!c) return false;
    return true;
}

Patch node_patch(const TwoLevelMesh& pair, std::int32_t coarse_node, int layers) {
    const Mesh& cm = pair.coarse;
    const std::vector<char> elem_in = grow_coarse_patch(cm, coarse_node, layers);
    const std::int32_t ne = cm.n_elements();

    Patch patch;
    patch.center_node = coarse_node;
    patch.layers = layers;
    for (std::int32_t e = 0; e < ne; ++e)
        if (elem_in[e]) patch.coarse_elements.push_back(e);
    patch.covers_all =
        static_cast<std::int32_t>(patch.coarse_elements.size()) == ne;

    patch.fine_elements.reserve(patch.coarse_elements.size() *
                                pair.fine_per_coarse);
    for (std::int32_t c : patch.coarse_elements) {
        const std::int32_t* fe = pair.fine_elements_of(c);
        patch.fine_elements.insert(patch.fine_elements.end(), fe,
                                   fe + pair.fine_per_coarse);
    }
    std::sort(patch.fine_elements.begin(), patch.fine_elements.end());

    const Mesh& fm = pair.fine;
    std::vector<char> fine_elem_in(fm.n_elements(), 0);
    for (std::int32_t e : patch.fine_elements) fine_elem_in[e] = 1;
    std::vector<char> fine_node_in(fm.n_nodes(), 0);
    for (std::int32_t e : patch.fine_elements)
        for (int k = 0; k <= fm.dim; ++k) fine_node_in[fm.element(e)[k]] = 1;
    for (std::int32_t i = 0; i < fm.n_nodes(); ++i)
        if (fine_node_in[i]) patch.fine_nodes.push_back(i);

    fm.build_node_to_element();
    for (std::int32_t i : patch.fine_nodes) {
        bool interior = true;
        for (std::int32_t k = fm.node_elem_ptr()[i]; k < fm.node_elem_ptr()[i + 1];
             ++k) {
            if (!fine_elem_in[fm.node_elem_idx()[k]]) {
                interior = false;
                break;
            }
        }
        if (interior) patch.free_fine_nodes.push_back(i);
    }

    for (std::size_t f = 0; f < fm.boundary_facets.size(); ++f)
        if (fine_elem_in[fm.boundary_facets[f].element])
            patch.fine_boundary_facets.push_back(static_cast<std::int32_t>(f));
    return patch;
}

void write_debug_text(const Mesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[96];
    for (const auto& p : m.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
        out << buf;
    }
    for (std::int32_t e = 0; e < m.n_elements(); ++e) {
        const std::int32_t* en = m.element(e);
        for (int k = 0; k <= m.dim; ++k) out << en[k] << (k == m.dim ? '\n' : ' ');
    }
}

}  // namespace helmlod::mesh
