#pragma once

// Uniform dyadic meshes on [0,1] and [0,1]^2, the coarse/fine pair used by
// the multiscale solver, and the element patches grown around coarse nodes.
// 2D meshes split every grid square along the lower-left to upper-right
// diagonal; nodes are ordered lexicographically by (y, x).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace helmlod::mesh {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Boundary facet: a node in 1D (b = -1), an edge in 2D.  `element` is the
// unique element owning the facet; the outward normal is recomputed from the
// geometry when needed.
struct BoundaryFacet {
    std::int32_t a = -1;
    std::int32_t b = -1;
    std::int32_t element = -1;
};

struct Mesh {
    int dim = 0;
    double h = 0.0;            // uniform mesh width
    std::int32_t cells = 0;    // cells per axis
    std::vector<Point> nodes;
    std::vector<std::int32_t> element_nodes;  // stride dim + 1
    std::vector<BoundaryFacet> boundary_facets;

    std::int32_t n_nodes() const { return static_cast<std::int32_t>(nodes.size()); }
    std::int32_t n_elements() const {
        return static_cast<std::int32_t>(element_nodes.size()) / (dim + 1);
    }
    const std::int32_t* element(std::int32_t e) const {
        return element_nodes.data() + static_cast<std::size_t>(e) * (dim + 1);
    }
    double element_measure() const;  // h in 1D, h^2/2 in 2D
    Point barycenter(std::int32_t e) const;
    Point facet_midpoint(const BoundaryFacet& f) const;
    double facet_measure(const BoundaryFacet& f) const;  // 1 in 1D, h in 2D

    // node -> incident elements adjacency (CSR layout), built on demand once.
    void build_node_to_element() const;
    const std::vector<std::int32_t>& node_elem_ptr() const { return node_elem_ptr_; }
    const std::vector<std::int32_t>& node_elem_idx() const { return node_elem_idx_; }

private:
    mutable std::vector<std::int32_t> node_elem_ptr_;
    mutable std::vector<std::int32_t> node_elem_idx_;
};

// exponent >= 0; mesh width 2^{-exponent}.
Mesh uniform_mesh(int dim, int exponent);

struct TwoLevelMesh {
    Mesh coarse;
    Mesh fine;
    int h_exponent = 0;
    int coarse_exponent = 0;
    std::int32_t ratio = 0;  // H / h
    // coarse element -> fine elements, flat CSR layout (uniform stride)
    std::vector<std::int32_t> fine_elems_of_coarse;
    std::int32_t fine_per_coarse = 0;
    std::vector<std::int32_t> coarse_elem_of_fine;   // inverse map
    std::vector<std::int32_t> coarse_to_fine_node;   // injection, total

    std::int32_t n_coarse_nodes() const { return coarse.n_nodes(); }
    std::int32_t n_fine_nodes() const { return fine.n_nodes(); }
    const std::int32_t* fine_elements_of(std::int32_t coarse_elem) const {
        return fine_elems_of_coarse.data() +
               static_cast<std::size_t>(coarse_elem) * fine_per_coarse;
    }
    // Coarse hat values at a fine node: barycentric coordinates within the
    // containing coarse element(s); piecewise-linear and continuous, so any
    // containing element gives the same values.
    void coarse_hat_values(std::int32_t fine_node, std::int32_t* coarse_nodes,
                           double* values, int* count) const;
};

// Throws std::invalid_argument unless h_exponent > coarse_exponent >= 1.
TwoLevelMesh build_two_level(int dim, int coarse_exponent, int h_exponent);

struct Patch {
    std::int32_t center_node = -1;
    int layers = 0;
    bool covers_all = false;
    std::vector<std::int32_t> coarse_elements;        // sorted
    std::vector<std::int32_t> fine_elements;          // sorted
    std::vector<std::int32_t> fine_nodes;             // sorted, all patch nodes
    std::vector<std::int32_t> free_fine_nodes;        // sorted; see below
    std::vector<std::int32_t> fine_boundary_facets;   // indices into fine.boundary_facets
};

// Layer-0 patch is the support of the coarse hat at node j; each increment
// adds every coarse element sharing at least one vertex with the current
// patch.  Free fine nodes are those whose incident fine elements all lie in
// the patch: the basis may be nonzero there and extends by zero elsewhere.
Patch node_patch(const TwoLevelMesh& pair, std::int32_t coarse_node, int layers);

// True when the ell-layer patch already covers every coarse element; cheap
// (coarse-level only), used to route saturated patches to the global solver.
bool patch_saturates(const TwoLevelMesh& pair, std::int32_t coarse_node,
                     int layers);

// Debug dump: node coordinates then element node tuples, one per line.
void write_debug_text(const Mesh& m, const std::string& path);

}  // namespace helmlod::mesh
