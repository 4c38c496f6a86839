#ifndef TORIC_POLYTOPE_HPP
#define TORIC_POLYTOPE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "toric/linalg.hpp"
#include "toric/rational.hpp"

namespace toric {

// Closed halfspace { p : <normal, p> >= -offset } with a primitive integer
// normal (gcd of entries 1). For a Fano moment polytope every offset is 1
// and the normal is the interior normal of the facet.
struct HalfSpace {
    IntVec normal;
    Rat offset;

    HalfSpace() = default;
    HalfSpace(IntVec n, Rat a);           // enforces primitivity, throws DegenerateInput on 0
    static HalfSpace from_rational(const RatVec& normal, const Rat& offset);

    Rat slack(const RatVec& p) const { return dot(normal, p) + offset; }
    bool operator==(const HalfSpace& o) const { return normal == o.normal && offset == o.offset; }
};

// Simplicial decomposition of a polytope: each simplex is an (n+1)-tuple of
// vertex indices, the first entry being the apex the cone construction used.
// Simplex volumes are positive and sum to Vol(P) exactly.
struct Triangulation {
    std::vector<std::vector<int>> simplices;
    bool apex_first = true;
};

// Bounded full-dimensional rational polytope in canonical form:
//  - vertices sorted lexicographically, irredundant;
//  - facets sorted lexicographically by (normal, offset), irredundant;
//  - facet_vertex_incidence[f] has bit v set iff vertex v lies on facet f.
// Canonical forms of equal sets are identical, so operator== is structural.
class Polytope {
public:
    static Polytope from_vertices(const std::vector<RatVec>& vertices);
    static Polytope from_facets(const std::vector<HalfSpace>& halfspaces);
    // Cartesian product; coordinates of q are appended to those of p.
    // Builds both representations directly, no hull enumeration.
    static Polytope product(const Polytope& p, const Polytope& q);

    int dim() const { return dim_; }
    const std::vector<RatVec>& vertices() const { return vertices_; }
    const std::vector<HalfSpace>& facets() const { return facets_; }
    const std::vector<std::vector<bool>>& incidence() const { return incidence_; }

    bool operator==(const Polytope& o) const {
        return dim_ == o.dim_ && vertices_ == o.vertices_ && facets_ == o.facets_;
    }

    Rat volume() const;
    RatVec barycenter() const;
    const Triangulation& triangulation() const;

    // sigma(F) = vol_{n-1}(F) / ||l_F||, the lattice-normalized facet measure.
    // Always rational; computed via coordinate projection, never through an
    // intermediate irrational.
    Rat facet_sigma(int facet_index) const;
    Rat boundary_measure() const;

    Polytope polar_dual() const;             // throws OriginNotInterior
    Polytope linear_image(const RatMat& a) const; // throws SingularMatrix
    Polytope translate(const RatVec& t) const;

    bool origin_interior() const;
    bool is_fano_normalized() const; // all offsets 1 and 0 interior

    struct LatticeClassification {
        bool is_lattice = false;
        bool is_reflexive = false;
        bool is_simplicial = false;
        std::vector<Int> vertex_deltas; // per vertex; 0 for non-simplicial vertices
        bool is_smooth = false;
    };
    // Requires all facet offsets equal to 1 (throws NotFanoNormalized).
    LatticeClassification classify_lattice() const;

    // Intersection of the axes with P: largest r such that the cross-polytope
    // r*conv{+-e_i} fits inside P. Needs 0 interior. Used for tail bounds.
    Rat inscribed_cross_radius() const;

    std::string describe() const;

private:
    Polytope() = default;
    static Polytope build_canonical(std::vector<RatVec> verts,
                                    std::vector<HalfSpace> facets);
    void triangulate_face(int d, const std::vector<int>& face_verts,
                          const std::vector<std::vector<int>>& subfaces,
                          std::vector<int>& prefix,
                          std::vector<std::vector<int>>& out) const;

    int dim_ = 0;
    std::vector<RatVec> vertices_;
    std::vector<HalfSpace> facets_;
    std::vector<std::vector<bool>> incidence_;
    mutable Triangulation tri_;
    mutable bool tri_ready_ = false;
};

// Named moment polytopes used throughout.
//   Pn(n)      P(-K_{P^n}) = (n+1)*Sigma_n - (1,...,1)
//   PnxP1(n)   P(-K_{P^{n-1} x P^1}), an n-dimensional product
//   Xpq(p,q)   polar dual of conv{(+-p,+-q)}; requires gcd(p,q)=1
//   hexagon    conv{+-e1,+-e2,+-(e1+e2)}  (del Pezzo of degree 6)
//   Bl1P2      P^2 blown up in one torus-fixed point (degree 8)
//   Bl2P2      P^2 blown up in two points (degree 7)
//   cube(n)    [-1,1]^n = P(-K_{(P^1)^n})
Polytope builtin_polytope(const std::string& name, const std::vector<long>& params);

Polytope make_pn(int n);
Polytope make_pn_x_p1(int n);
Polytope make_xpq(long p, long q);
Polytope make_hexagon();
Polytope make_bl1_p2();
Polytope make_bl2_p2();
Polytope make_bl1_p3();
Polytope make_cube(int n);

} // namespace toric

#endif
