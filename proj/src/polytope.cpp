#include "toric/polytope.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "toric/errors.hpp"

namespace toric {

namespace {

// Visits all k-subsets of {0,...,m-1}. Body returns false to abort.
template <typename F>
void for_each_subset(int m, int k, F body) {
    if (k > m || k < 0) return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        if (!body(idx)) return;
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

double binomial_estimate(int m, int k) {
    double r = 1;
    for (int i = 0; i < k; ++i) r *= double(m - i) / double(i + 1);
    return r;
}

int affine_rank(const std::vector<RatVec>& pts, const std::vector<int>& subset) {
    if (subset.empty()) return -1;
    RatMat rows;
    const RatVec& base = pts[subset[0]];
    for (std::size_t i = 1; i < subset.size(); ++i) {
        RatVec r(base.size());
        for (std::size_t c = 0; c < base.size(); ++c) r[c] = pts[subset[i]][c] - base[c];
        rows.push_back(std::move(r));
    }
    return rank(rows);
}

constexpr double kEnumerationBudget = 5e6;

} // namespace

HalfSpace::HalfSpace(IntVec n, Rat a) {
    RatVec as_rat(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) as_rat[i] = Rat(n[i]);
    Rat mult;
    normal = primitive_direction(as_rat, &mult);
    offset = a * mult;
}

HalfSpace HalfSpace::from_rational(const RatVec& n, const Rat& a) {
    HalfSpace h;
    Rat mult;
    h.normal = primitive_direction(n, &mult);
    h.offset = a * mult;
    return h;
}

Polytope Polytope::build_canonical(std::vector<RatVec> verts, std::vector<HalfSpace> facets) {
    Polytope p;
    p.dim_ = static_cast<int>(verts.empty() ? 0 : verts[0].size());
    std::sort(verts.begin(), verts.end(),
              [](const RatVec& a, const RatVec& b) { return compare_lex(a, b) < 0; });
    std::sort(facets.begin(), facets.end(), [](const HalfSpace& a, const HalfSpace& b) {
        int c = compare_lex(a.normal, b.normal);
        if (c != 0) return c < 0;
        return a.offset < b.offset;
    });
    p.vertices_ = std::move(verts);
    p.facets_ = std::move(facets);

    const int n = p.dim_;
    p.incidence_.assign(p.facets_.size(), std::vector<bool>(p.vertices_.size(), false));
    for (std::size_t f = 0; f < p.facets_.size(); ++f) {
        for (std::size_t v = 0; v < p.vertices_.size(); ++v) {
            Rat s = p.facets_[f].slack(p.vertices_[v]);
            if (s < 0)
                throw DegenerateInput("internal: vertex violates facet inequality");
            if (s == 0) p.incidence_[f][v] = true;
        }
    }
    // Cross-check: every vertex is extreme (active normals span R^n).
    for (std::size_t v = 0; v < p.vertices_.size(); ++v) {
        RatMat act;
        for (std::size_t f = 0; f < p.facets_.size(); ++f) {
            if (!p.incidence_[f][v]) continue;
            RatVec row(n);
            for (int c = 0; c < n; ++c) row[c] = Rat(p.facets_[f].normal[c]);
            act.push_back(std::move(row));
        }
        if (rank(act) != n)
            throw DegenerateInput("internal: listed vertex is not extreme");
    }
    return p;
}

Polytope Polytope::from_vertices(const std::vector<RatVec>& input) {
    if (input.empty()) throw DegenerateInput("from_vertices: no points");
    const std::size_t n = input[0].size();
    if (n == 0) throw DegenerateInput("from_vertices: zero-dimensional ambient space");
    for (const auto& v : input)
        if (v.size() != n) throw DimensionMismatch("from_vertices: ragged point list");

    std::vector<RatVec> pts = input;
    std::sort(pts.begin(), pts.end(),
              [](const RatVec& a, const RatVec& b) { return compare_lex(a, b) < 0; });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const int m = static_cast<int>(pts.size());

    if (m < static_cast<int>(n) + 1)
        throw DegenerateInput("from_vertices: fewer than n+1 distinct points");
    {
        std::vector<int> all(m);
        std::iota(all.begin(), all.end(), 0);
        if (affine_rank(pts, all) != static_cast<int>(n))
            throw DegenerateInput("from_vertices: points are not full-dimensional");
    }
    if (binomial_estimate(m, static_cast<int>(n)) > kEnumerationBudget)
        throw TooLarge("from_vertices: hull enumeration over " + std::to_string(m) +
                       " points in dimension " + std::to_string(n) +
                       " exceeds the desk-scale budget");

    // Supporting-hyperplane enumeration over all n-subsets.
    std::set<std::pair<IntVec, Rat>> facet_keys;
    std::vector<HalfSpace> facets;
    for_each_subset(m, static_cast<int>(n), [&](const std::vector<int>& idx) {
        RatMat rows;
        for (std::size_t i = 1; i < idx.size(); ++i) {
            RatVec r(n);
            for (std::size_t c = 0; c < n; ++c) r[c] = pts[idx[i]][c] - pts[idx[0]][c];
            rows.push_back(std::move(r));
        }
        auto dir = nullspace_direction(rows, n);
        if (!dir) return true;
        Rat c0 = dot(*dir, pts[idx[0]]);
        bool all_ge = true, all_le = true;
        for (const auto& p : pts) {
            Rat s = dot(*dir, p);
            if (s < c0) all_ge = false;
            if (s > c0) all_le = false;
            if (!all_ge && !all_le) return true;
        }
        RatVec h = *dir;
        Rat c = c0;
        if (!all_ge) {
            for (auto& x : h) x = -x;
            c = -c;
        }
        HalfSpace hs = HalfSpace::from_rational(h, -c);
        if (facet_keys.insert({hs.normal, hs.offset}).second) facets.push_back(hs);
        return true;
    });

    // A point is a vertex iff its active facet normals span R^n.
    std::vector<RatVec> verts;
    for (const auto& p : pts) {
        RatMat act;
        for (const auto& f : facets) {
            if (f.slack(p) != 0) continue;
            RatVec row(n);
            for (std::size_t c = 0; c < n; ++c) row[c] = Rat(f.normal[c]);
            act.push_back(std::move(row));
        }
        if (rank(act) == static_cast<int>(n)) verts.push_back(p);
    }
    return build_canonical(std::move(verts), std::move(facets));
}

Polytope Polytope::from_facets(const std::vector<HalfSpace>& input) {
    if (input.empty()) throw DegenerateInput("from_facets: no halfspaces");
    const std::size_t n = input[0].normal.size();
    for (const auto& h : input)
        if (h.normal.size() != n) throw DimensionMismatch("from_facets: ragged halfspace list");

    std::vector<HalfSpace> hs = input;
    std::sort(hs.begin(), hs.end(), [](const HalfSpace& a, const HalfSpace& b) {
        int c = compare_lex(a.normal, b.normal);
        if (c != 0) return c < 0;
        return a.offset < b.offset;
    });
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
    const int m = static_cast<int>(hs.size());

    // Boundedness: the recession cone {d : <l,d> >= 0 for all l} must be {0}.
    {
        RatMat normals;
        for (const auto& h : hs) {
            RatVec r(n);
            for (std::size_t c = 0; c < n; ++c) r[c] = Rat(h.normal[c]);
            normals.push_back(std::move(r));
        }
        if (rank(normals) != static_cast<int>(n))
            throw Unbounded("from_facets: facet normals do not span R^n");
        auto admits_ray = [&](const RatVec& d) {
            for (const auto& h : hs)
                if (dot(h.normal, d) < 0) return false;
            return true;
        };
        if (n == 1) {
            if (admits_ray({Rat(1)}) || admits_ray({Rat(-1)}))
                throw Unbounded("from_facets: recession direction exists");
        } else {
            if (binomial_estimate(m, static_cast<int>(n) - 1) > kEnumerationBudget)
                throw TooLarge("from_facets: boundedness scan over " + std::to_string(m) +
                               " halfspaces exceeds the desk-scale budget");
            bool unbounded = false;
            for_each_subset(m, static_cast<int>(n) - 1, [&](const std::vector<int>& idx) {
                RatMat rows;
                for (int i : idx) rows.push_back(normals[i]);
                auto d = nullspace_direction(rows, n);
                if (!d) return true;
                RatVec neg = *d;
                for (auto& x : neg) x = -x;
                if (admits_ray(*d) || admits_ray(neg)) {
                    unbounded = true;
                    return false;
                }
                return true;
            });
            if (unbounded) throw Unbounded("from_facets: recession direction exists");
        }
    }

    if (binomial_estimate(m, static_cast<int>(n)) > kEnumerationBudget)
        throw TooLarge("from_facets: vertex enumeration over " + std::to_string(m) +
                       " halfspaces exceeds the desk-scale budget");

    std::vector<RatVec> verts;
    std::set<RatVec> seen;
    for_each_subset(m, static_cast<int>(n), [&](const std::vector<int>& idx) {
        RatMat a;
        RatVec b;
        for (int i : idx) {
            RatVec row(n);
            for (std::size_t c = 0; c < n; ++c) row[c] = Rat(hs[i].normal[c]);
            a.push_back(std::move(row));
            b.push_back(-hs[i].offset);
        }
        auto x = solve(std::move(a), std::move(b));
        if (!x) return true;
        for (const auto& h : hs)
            if (h.slack(*x) < 0) return true;
        if (seen.insert(*x).second) verts.push_back(*x);
        return true;
    });

    if (verts.empty()) throw Empty("from_facets: no feasible vertex");
    {
        std::vector<int> all(static_cast<int>(verts.size()));
        std::iota(all.begin(), all.end(), 0);
        if (affine_rank(verts, all) != static_cast<int>(n))
            throw DegenerateInput("from_facets: intersection is not full-dimensional");
    }

    // Keep only binding halfspaces: a facet's active vertices span a hyperplane.
    std::vector<HalfSpace> facets;
    for (const auto& h : hs) {
        std::vector<int> active;
        for (std::size_t v = 0; v < verts.size(); ++v)
            if (h.slack(verts[v]) == 0) active.push_back(static_cast<int>(v));
        if (affine_rank(verts, active) == static_cast<int>(n) - 1) facets.push_back(h);
    }
    return build_canonical(std::move(verts), std::move(facets));
}

Polytope Polytope::product(const Polytope& p, const Polytope& q) {
    std::vector<RatVec> verts;
    verts.reserve(p.vertices_.size() * q.vertices_.size());
    for (const auto& vp : p.vertices_) {
        for (const auto& vq : q.vertices_) {
            RatVec v = vp;
            v.insert(v.end(), vq.begin(), vq.end());
            verts.push_back(std::move(v));
        }
    }
    std::vector<HalfSpace> facets;
    for (const auto& f : p.facets_) {
        HalfSpace h;
        h.normal = f.normal;
        h.normal.resize(p.dim_ + q.dim_, Int(0));
        h.offset = f.offset;
        facets.push_back(std::move(h));
    }
    for (const auto& f : q.facets_) {
        HalfSpace h;
        h.normal.assign(p.dim_, Int(0));
        h.normal.insert(h.normal.end(), f.normal.begin(), f.normal.end());
        h.offset = f.offset;
        facets.push_back(std::move(h));
    }
    return build_canonical(std::move(verts), std::move(facets));
}

void Polytope::triangulate_face(int d, const std::vector<int>& face_verts,
                                const std::vector<std::vector<int>>& subfaces,
                                std::vector<int>& prefix,
                                std::vector<std::vector<int>>& out) const {
    if (d == 0) {
        std::vector<int> s = prefix;
        s.push_back(face_verts[0]);
        out.push_back(std::move(s));
        return;
    }
    const int apex = face_verts[0];
    std::set<std::vector<int>> seen;
    prefix.push_back(apex);
    for (const auto& sf : subfaces) {
        if (std::binary_search(sf.begin(), sf.end(), apex)) continue;
        if (!seen.insert(sf).second) continue;
        // Ridges of this subface: cut it with every top-level facet.
        std::vector<std::vector<int>> ridges;
        if (d - 1 > 0) {
            for (std::size_t f = 0; f < facets_.size(); ++f) {
                std::vector<int> cut;
                for (int v : sf)
                    if (incidence_[f][v]) cut.push_back(v);
                if (cut.size() == sf.size() || cut.empty()) continue;
                if (affine_rank(vertices_, cut) == d - 2) ridges.push_back(std::move(cut));
            }
        }
        triangulate_face(d - 1, sf, ridges, prefix, out);
    }
    prefix.pop_back();
}

const Triangulation& Polytope::triangulation() const {
    if (tri_ready_) return tri_;
    std::vector<std::vector<int>> faces;
    std::vector<int> all(vertices_.size());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t f = 0; f < facets_.size(); ++f) {
        std::vector<int> fv;
        for (std::size_t v = 0; v < vertices_.size(); ++v)
            if (incidence_[f][v]) fv.push_back(static_cast<int>(v));
        faces.push_back(std::move(fv));
    }
    std::vector<int> prefix;
    tri_.simplices.clear();
    triangulate_face(dim_, all, faces, prefix, tri_.simplices);
    tri_ready_ = true;
    return tri_;
}

namespace {
Rat simplex_volume(const std::vector<RatVec>& pts, const std::vector<int>& s) {
    const std::size_t n = s.size() - 1;
    RatMat m;
    for (std::size_t i = 1; i <= n; ++i) {
        RatVec r(n);
        for (std::size_t c = 0; c < n; ++c) r[c] = pts[s[i]][c] - pts[s[0]][c];
        m.push_back(std::move(r));
    }
    Rat d = det(std::move(m));
    if (d < 0) d = -d;
    Int f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= Int(i);
    return d / Rat(f);
}
} // namespace

Rat Polytope::volume() const {
    const auto& t = triangulation();
    Rat v = 0;
    for (const auto& s : t.simplices) v += simplex_volume(vertices_, s);
    return v;
}

RatVec Polytope::barycenter() const {
    const auto& t = triangulation();
    RatVec acc(dim_, Rat(0));
    Rat total = 0;
    for (const auto& s : t.simplices) {
        Rat v = simplex_volume(vertices_, s);
        total += v;
        for (int c = 0; c < dim_; ++c) {
            Rat centroid = 0;
            for (int idx : s) centroid += vertices_[idx][c];
            acc[c] += v * centroid / Rat(dim_ + 1);
        }
    }
    for (auto& x : acc) x /= total;
    return acc;
}

Rat Polytope::facet_sigma(int facet_index) const {
    const HalfSpace& f = facets_[facet_index];
    if (dim_ == 1) return 1; // vol_0 = 1, |l| = 1
    std::vector<int> fv;
    for (std::size_t v = 0; v < vertices_.size(); ++v)
        if (incidence_[facet_index][v]) fv.push_back(static_cast<int>(v));
    // Drop a coordinate with nonzero normal component; the projection scales
    // (n-1)-measure by |l_j| / ||l||, so sigma = Vol(proj) / |l_j| exactly.
    int j = 0;
    while (f.normal[j] == 0) ++j;
    std::vector<RatVec> proj;
    proj.reserve(fv.size());
    for (int v : fv) {
        RatVec p;
        p.reserve(dim_ - 1);
        for (int c = 0; c < dim_; ++c)
            if (c != j) p.push_back(vertices_[v][c]);
        proj.push_back(std::move(p));
    }
    Rat vol = 0;
    if (dim_ - 1 == 1) {
        Rat lo = proj[0][0], hi = proj[0][0];
        for (const auto& p : proj) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        vol = hi - lo;
    } else {
        // Hull re-enumeration of the projected facet; exact and cheap at
        // facet scale (the projection is injective on the facet).
        vol = Polytope::from_vertices(proj).volume();
    }
    Int lj = f.normal[j];
    if (lj < 0) lj = -lj;
    return vol / Rat(lj);
}

Rat Polytope::boundary_measure() const {
    Rat s = 0;
    for (std::size_t f = 0; f < facets_.size(); ++f)
        s += facet_sigma(static_cast<int>(f));
    return s;
}

bool Polytope::origin_interior() const {
    for (const auto& f : facets_)
        if (f.offset <= 0) return false;
    return true;
}

bool Polytope::is_fano_normalized() const {
    for (const auto& f : facets_)
        if (f.offset != 1) return false;
    return true;
}

Polytope Polytope::polar_dual() const {
    if (!origin_interior())
        throw OriginNotInterior("polar_dual: origin is not in the interior");
    std::vector<HalfSpace> hs;
    hs.reserve(vertices_.size());
    for (const auto& v : vertices_) {
        RatVec neg(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
        hs.push_back(HalfSpace::from_rational(neg, 1));
    }
    return from_facets(hs);
}

Polytope Polytope::linear_image(const RatMat& a) const {
    if (a.size() != static_cast<std::size_t>(dim_))
        throw DimensionMismatch("linear_image: matrix size mismatch");
    for (const auto& row : a)
        if (row.size() != static_cast<std::size_t>(dim_))
            throw DimensionMismatch("linear_image: matrix size mismatch");
    if (det(a) == 0) throw SingularMatrix("linear_image: singular matrix");
    std::vector<RatVec> verts;
    verts.reserve(vertices_.size());
    for (const auto& v : vertices_) verts.push_back(mat_apply(a, v));
    return from_vertices(verts);
}

Polytope Polytope::translate(const RatVec& t) const {
    if (t.size() != static_cast<std::size_t>(dim_))
        throw DimensionMismatch("translate: vector size mismatch");
    std::vector<RatVec> verts = vertices_;
    for (auto& v : verts)
        for (int c = 0; c < dim_; ++c) v[c] += t[c];
    std::vector<HalfSpace> facets = facets_;
    for (auto& f : facets) f.offset -= dot(f.normal, t);
    return build_canonical(std::move(verts), std::move(facets));
}

Polytope::LatticeClassification Polytope::classify_lattice() const {
    for (const auto& f : facets_)
        if (f.offset != 1)
            throw NotFanoNormalized("classify_lattice: facet offsets must all equal 1");
    LatticeClassification r;
    r.is_lattice = true;
    for (const auto& v : vertices_)
        for (const auto& c : v)
            if (denominator(c) != 1) r.is_lattice = false;
    r.is_reflexive = r.is_lattice;
    r.is_simplicial = true;
    r.is_smooth = true;
    r.vertex_deltas.assign(vertices_.size(), Int(0));
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
        std::vector<int> act;
        for (std::size_t f = 0; f < facets_.size(); ++f)
            if (incidence_[f][v]) act.push_back(static_cast<int>(f));
        if (act.size() != static_cast<std::size_t>(dim_)) {
            r.is_simplicial = false;
            continue;
        }
        RatMat m;
        for (int f : act) {
            RatVec row(dim_);
            for (int c = 0; c < dim_; ++c) row[c] = Rat(facets_[f].normal[c]);
            m.push_back(std::move(row));
        }
        Rat d = det(std::move(m));
        if (d < 0) d = -d;
        r.vertex_deltas[v] = Int(numerator(d));
        if (r.vertex_deltas[v] != 1) r.is_smooth = false;
    }
    if (!r.is_simplicial) r.is_smooth = false;
    return r;
}

Rat Polytope::inscribed_cross_radius() const {
    if (!origin_interior())
        throw OriginNotInterior("inscribed_cross_radius: origin not interior");
    Rat r = 0;
    bool first = true;
    for (int j = 0; j < dim_; ++j) {
        for (int sign : {1, -1}) {
            Rat best = 0;
            bool bounded = false;
            for (const auto& f : facets_) {
                Int lj = f.normal[j] * sign;
                if (lj >= 0) continue;
                Rat t = f.offset / Rat(-lj);
                if (!bounded || t < best) best = t, bounded = true;
            }
            if (!bounded) throw Unbounded("inscribed_cross_radius: unbounded axis direction");
            if (first || best < r) r = best, first = false;
        }
    }
    return r;
}

std::string Polytope::describe() const {
    std::ostringstream os;
    os << "polytope dim=" << dim_ << " vertices=" << vertices_.size()
       << " facets=" << facets_.size();
    return os.str();
}

Polytope make_pn(int n) {
    if (n < 1 || n > 6) throw BadParams("Pn: need 1 <= n <= 6");
    std::vector<RatVec> verts;
    RatVec minus_one(n, Rat(-1));
    verts.push_back(minus_one);
    for (int i = 0; i < n; ++i) {
        RatVec v = minus_one;
        v[i] += n + 1;
        verts.push_back(v);
    }
    return Polytope::from_vertices(verts);
}

Polytope make_cube(int n) {
    if (n < 1 || n > 6) throw BadParams("cube: need 1 <= n <= 6");
    Polytope p = make_pn(1);
    for (int i = 1; i < n; ++i) p = Polytope::product(p, make_pn(1));
    return p;
}

Polytope make_pn_x_p1(int n) {
    if (n < 2 || n > 6) throw BadParams("PnxP1: need 2 <= n <= 6");
    return Polytope::product(make_pn(n - 1), make_pn(1));
}

Polytope make_xpq(long p, long q) {
    if (p < 1 || q < 1) throw BadParams("Xpq: need p,q >= 1");
    if (std::gcd(p, q) != 1) throw BadParams("Xpq: (p,q) must be coprime for primitive normals");
    std::vector<HalfSpace> hs;
    for (int sp : {1, -1})
        for (int sq : {1, -1})
            hs.push_back(HalfSpace({Int(sp * p), Int(sq * q)}, Rat(1)));
    return Polytope::from_facets(hs);
}

Polytope make_hexagon() {
    return Polytope::from_vertices({{Rat(1), Rat(0)},
                                    {Rat(0), Rat(1)},
                                    {Rat(-1), Rat(0)},
                                    {Rat(0), Rat(-1)},
                                    {Rat(1), Rat(1)},
                                    {Rat(-1), Rat(-1)}});
}

Polytope make_bl1_p2() {
    return Polytope::from_vertices({{Rat(-1), Rat(0)},
                                    {Rat(0), Rat(-1)},
                                    {Rat(2), Rat(-1)},
                                    {Rat(-1), Rat(2)}});
}

Polytope make_bl2_p2() {
    return Polytope::from_vertices({{Rat(1), Rat(0)},
                                    {Rat(0), Rat(1)},
                                    {Rat(-1), Rat(1)},
                                    {Rat(-1), Rat(-1)},
                                    {Rat(1), Rat(-1)}});
}

Polytope make_bl1_p3() {
    return Polytope::from_vertices({{Rat(3), Rat(-1), Rat(-1)},
                                    {Rat(-1), Rat(3), Rat(-1)},
                                    {Rat(-1), Rat(-1), Rat(3)},
                                    {Rat(1), Rat(-1), Rat(-1)},
                                    {Rat(-1), Rat(1), Rat(-1)},
                                    {Rat(-1), Rat(-1), Rat(1)}});
}

Polytope builtin_polytope(const std::string& name, const std::vector<long>& params) {
    auto need = [&](std::size_t k) {
        if (params.size() != k)
            throw BadParams("builtin " + name + ": expected " + std::to_string(k) +
                            " parameter(s), got " + std::to_string(params.size()));
    };
    if (name == "Pn") {
        need(1);
        return make_pn(static_cast<int>(params[0]));
    }
    if (name == "PnxP1") {
        need(1);
        return make_pn_x_p1(static_cast<int>(params[0]));
    }
    if (name == "Xpq") {
        need(2);
        return make_xpq(params[0], params[1]);
    }
    if (name == "hexagon") {
        need(0);
        return make_hexagon();
    }
    if (name == "Bl1P2") {
        need(0);
        return make_bl1_p2();
    }
    if (name == "Bl2P2") {
        need(0);
        return make_bl2_p2();
    }
    if (name == "cube") {
        need(1);
        return make_cube(static_cast<int>(params[0]));
    }
    throw BadParams("builtin: unknown polytope '" + name + "'");
}

} // namespace toric
