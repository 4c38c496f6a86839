#include "doctest.h"

#include <algorithm>
#include <set>

#include "toric/errors.hpp"
#include "toric/polytope.hpp"

using namespace toric;

namespace {

RatVec rv(std::initializer_list<long> xs) {
    RatVec v;
    for (long x : xs) v.push_back(Rat(x));
    return v;
}

// Independent brute-force oracle for planar hulls: a segment between two input
// points is a facet iff every point lies (weakly) on one side, and the facet
// set is the collection of such supporting segments.
std::set<std::pair<IntVec, Rat>> planar_facets_oracle(const std::vector<RatVec>& pts) {
    std::set<std::pair<IntVec, Rat>> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            RatVec d = {pts[j][1] - pts[i][1], pts[i][0] - pts[j][0]};
            if (is_zero(d)) continue;
            Rat c = dot(d, pts[i]);
            bool ge = true, le = true;
            for (const auto& p : pts) {
                Rat s = dot(d, p);
                if (s < c) ge = false;
                if (s > c) le = false;
            }
            if (!ge && !le) continue;
            if (le) {
                for (auto& x : d) x = -x;
                c = -c;
            }
            HalfSpace h = HalfSpace::from_rational(d, -c);
            out.insert({h.normal, h.offset});
        }
    }
    return out;
}

} // namespace

TEST_CASE("from_vertices: P(-K_P2) matches the brute-force facet oracle") {
    std::vector<RatVec> pts = {rv({-1, -1}), rv({2, -1}), rv({-1, 2})};
    Polytope p = Polytope::from_vertices(pts);
    CHECK(p.dim() == 2);
    CHECK(p.facets().size() == 3);
    auto oracle = planar_facets_oracle(pts);
    REQUIRE(oracle.size() == 3);
    for (const auto& f : p.facets()) {
        CHECK(oracle.count({f.normal, f.offset}) == 1);
        CHECK(f.offset == 1);
    }
    std::set<IntVec> normals;
    for (const auto& f : p.facets()) normals.insert(f.normal);
    CHECK(normals.count({Int(1), Int(0)}) == 1);
    CHECK(normals.count({Int(0), Int(1)}) == 1);
    CHECK(normals.count({Int(-1), Int(-1)}) == 1);
}

TEST_CASE("from_vertices: unit interval and square") {
    Polytope seg = Polytope::from_vertices({rv({-1}), rv({1})});
    REQUIRE(seg.facets().size() == 2);
    for (const auto& f : seg.facets()) CHECK(f.offset == 1);

    Polytope sq = Polytope::from_vertices({rv({1, 1}), rv({1, -1}), rv({-1, 1}), rv({-1, -1})});
    CHECK(sq.facets().size() == 4);
    for (const auto& f : sq.facets()) {
        CHECK(f.offset == 1);
        Int abs_sum = 0;
        for (const auto& c : f.normal) abs_sum += c < 0 ? -c : c;
        CHECK(abs_sum == 1); // axis normals only
    }
}

TEST_CASE("from_vertices: degenerate and ragged input") {
    CHECK_THROWS_AS(Polytope::from_vertices({rv({0, 0}), rv({1, 1}), rv({2, 2})}),
                    DegenerateInput);
    CHECK_THROWS_AS(Polytope::from_vertices({rv({0, 0}), rv({1})}), DimensionMismatch);
    CHECK_THROWS_AS(Polytope::from_vertices({rv({0}), rv({0})}), DegenerateInput);
}

TEST_CASE("from_facets: X_{2,3} rhombus") {
    Polytope p = make_xpq(2, 3);
    REQUIRE(p.vertices().size() == 4);
    std::set<RatVec> vs(p.vertices().begin(), p.vertices().end());
    CHECK(vs.count({Rat(1, 2), Rat(0)}) == 1);
    CHECK(vs.count({Rat(-1, 2), Rat(0)}) == 1);
    CHECK(vs.count({Rat(0), Rat(1, 3)}) == 1);
    CHECK(vs.count({Rat(0), Rat(-1, 3)}) == 1);
    CHECK(p.volume() == Rat(1, 3));
}

TEST_CASE("from_facets: interval and recovered P2 polytope") {
    Polytope seg = Polytope::from_facets(
        {HalfSpace({Int(1)}, Rat(1)), HalfSpace({Int(-1)}, Rat(1))});
    CHECK(seg.vertices().size() == 2);
    CHECK(seg.volume() == 2);

    Polytope p2 = Polytope::from_facets({HalfSpace({Int(1), Int(0)}, Rat(1)),
                                         HalfSpace({Int(0), Int(1)}, Rat(1)),
                                         HalfSpace({Int(-1), Int(-1)}, Rat(1))});
    CHECK(p2 == make_pn(2));
}

TEST_CASE("from_facets: unbounded and empty inputs are rejected") {
    CHECK_THROWS_AS(Polytope::from_facets({HalfSpace({Int(1), Int(0)}, Rat(1)),
                                           HalfSpace({Int(0), Int(1)}, Rat(1))}),
                    Unbounded);
    CHECK_THROWS_AS(Polytope::from_facets({HalfSpace({Int(1)}, Rat(1)),
                                           HalfSpace({Int(-1)}, Rat(-2))}),
                    Empty);
}

TEST_CASE("round-trip: facets of a hull reproduce the same vertex set") {
    for (const auto& p : {make_pn(2), make_hexagon(), make_bl2_p2(), make_xpq(2, 3)}) {
        Polytope q = Polytope::from_facets(p.facets());
        CHECK(q == p);
    }
}

TEST_CASE("volume: exact values") {
    CHECK(make_pn(2).volume() == Rat(9, 2));
    CHECK(make_cube(2).volume() == 4);
    CHECK(make_xpq(2, 3).volume() == Rat(1, 3));
    CHECK(make_pn(3).volume() == Rat(32, 3));
    CHECK(make_pn_x_p1(3).volume() == 9);
    CHECK(make_cube(3).volume() == 8);
    CHECK(make_hexagon().volume() == 3);
    CHECK(make_bl1_p2().volume() == 4);
    CHECK(make_bl2_p2().volume() == Rat(7, 2));
    CHECK(make_bl1_p3().volume() == Rat(28, 3));
}

TEST_CASE("triangulation: simplex volumes sum to the volume") {
    for (const auto& p : {make_pn(3), make_bl1_p3(), make_cube(3)}) {
        Rat total = 0;
        const auto& t = p.triangulation();
        for (const auto& s : t.simplices) {
            REQUIRE(s.size() == static_cast<std::size_t>(p.dim() + 1));
            RatMat m;
            for (std::size_t i = 1; i < s.size(); ++i) {
                RatVec r(p.dim());
                for (int c = 0; c < p.dim(); ++c)
                    r[c] = p.vertices()[s[i]][c] - p.vertices()[s[0]][c];
                m.push_back(std::move(r));
            }
            Rat d = det(m);
            if (d < 0) d = -d;
            CHECK(d > 0);
            total += d / 6;
        }
        CHECK(total == p.volume());
    }
}

TEST_CASE("barycenter: exact values and translation equivariance") {
    CHECK(is_zero(make_pn(2).barycenter()));
    CHECK(is_zero(make_hexagon().barycenter()));
    CHECK(is_zero(make_cube(3).barycenter()));
    CHECK(is_zero(make_xpq(2, 3).barycenter()));

    Polytope t = make_pn(2).translate(rv({1, 0}));
    RatVec b = t.barycenter();
    CHECK(b[0] == 1);
    CHECK(b[1] == 0);

    // Bl1P2 and Bl2P2 are the K-unstable surfaces.
    RatVec b1 = make_bl1_p2().barycenter();
    CHECK(!is_zero(b1));
    CHECK(b1[0] == Rat(1, 12));
    RatVec b2 = make_bl2_p2().barycenter();
    CHECK(b2[0] == Rat(-2, 21));
    CHECK(b2[1] == Rat(-2, 21));
    CHECK(!is_zero(make_bl1_p3().barycenter()));
}

TEST_CASE("polar dual: cube vs cross-polytope, X_pq, involution") {
    Polytope cube2 = make_cube(2);
    Polytope cross = cube2.polar_dual();
    CHECK(cross.vertices().size() == 4);
    CHECK(cross.volume() == 2);
    std::set<RatVec> vs(cross.vertices().begin(), cross.vertices().end());
    CHECK(vs.count(rv({1, 0})) == 1);
    CHECK(vs.count(rv({0, -1})) == 1);

    Polytope rect = make_xpq(2, 3).polar_dual();
    std::set<RatVec> rs(rect.vertices().begin(), rect.vertices().end());
    CHECK(rs.count(rv({2, 3})) == 1);
    CHECK(rs.count(rv({-2, -3})) == 1);
    CHECK(rect.volume() == 24);

    for (const auto& p : {make_pn(2), make_hexagon(), make_xpq(2, 3), make_cube(3), make_pn(3)}) {
        CHECK(p.polar_dual().polar_dual() == p);
    }

    CHECK_THROWS_AS(make_pn(2).translate(rv({5, 5})).polar_dual(), OriginNotInterior);
}

TEST_CASE("boundary measure: reflexive identity and exact values") {
    CHECK(Polytope::from_vertices({rv({-1}), rv({1})}).boundary_measure() == 2);
    CHECK(make_pn(2).boundary_measure() == 9);
    for (const auto& p : {make_pn(2), make_hexagon(), make_bl1_p2(), make_bl2_p2(),
                          make_cube(2), make_pn_x_p1(2)}) {
        CHECK(p.boundary_measure() == Rat(p.dim()) * p.volume());
    }
    for (const auto& p : {make_pn(3), make_bl1_p3(), make_cube(3), make_pn_x_p1(3)}) {
        CHECK(p.boundary_measure() == Rat(p.dim()) * p.volume());
    }
    // X_{2,3} is Fano-normalized but not a lattice polytope; the identity
    // still holds because all offsets are 1.
    CHECK(make_xpq(2, 3).boundary_measure() == Rat(2) * make_xpq(2, 3).volume());
}

TEST_CASE("classify_lattice: smooth, Gorenstein and delta tests") {
    auto c2 = make_pn(2).classify_lattice();
    CHECK(c2.is_lattice);
    CHECK(c2.is_reflexive);
    CHECK(c2.is_simplicial);
    CHECK(c2.is_smooth);
    for (const auto& d : c2.vertex_deltas) CHECK(d == 1);

    auto cx = make_xpq(2, 3).classify_lattice();
    CHECK(!cx.is_lattice); // non-integral vertices => not Gorenstein
    CHECK(cx.is_simplicial);
    CHECK(!cx.is_smooth);
    // determinant of adjacent normals (2,3),(2,-3) is 12
    bool has_12 = false;
    for (const auto& d : cx.vertex_deltas) has_12 = has_12 || d == 12;
    CHECK(has_12);

    auto ch = make_hexagon().classify_lattice();
    CHECK(ch.is_lattice);
    CHECK(ch.is_simplicial);
    CHECK(ch.is_smooth);

    CHECK_THROWS_AS(make_pn(2).translate(rv({1, 0})).classify_lattice(), NotFanoNormalized);
}

TEST_CASE("linear_image: determinant scaling and unimodular invariance") {
    Polytope p = make_pn(2);
    CHECK(p.linear_image(identity_matrix(2)) == p);

    RatMat shear = {{Rat(1), Rat(1)}, {Rat(0), Rat(1)}};
    CHECK(p.linear_image(shear).volume() == p.volume());

    RatMat diag = {{Rat(1, 2), Rat(0)}, {Rat(0), Rat(1, 3)}};
    Polytope img = make_cube(2).linear_image(diag);
    CHECK(img.volume() == Rat(4) * Rat(1, 6));
    std::set<RatVec> vs(img.vertices().begin(), img.vertices().end());
    CHECK(vs.count({Rat(1, 2), Rat(1, 3)}) == 1);

    RatMat sing = {{Rat(1), Rat(1)}, {Rat(1), Rat(1)}};
    CHECK_THROWS_AS(p.linear_image(sing), SingularMatrix);

    // volume(A P) = |det A| volume(P) exactly, including rational A
    RatMat a = {{Rat(2), Rat(1)}, {Rat(1, 3), Rat(1)}};
    Rat d = det(a);
    CHECK(make_hexagon().linear_image(a).volume() == d * make_hexagon().volume());
}

TEST_CASE("builtin polytopes") {
    Polytope p1 = builtin_polytope("Pn", {1});
    CHECK(p1.vertices().size() == 2);
    CHECK(p1.volume() == 2);
    CHECK(is_zero(p1.barycenter()));

    Polytope p2 = builtin_polytope("Pn", {2});
    std::set<RatVec> vs(p2.vertices().begin(), p2.vertices().end());
    CHECK(vs.count(rv({-1, -1})) == 1);
    CHECK(vs.count(rv({2, -1})) == 1);
    CHECK(vs.count(rv({-1, 2})) == 1);

    CHECK(builtin_polytope("PnxP1", {2}).volume() == 4);
    CHECK(builtin_polytope("cube", {4}).volume() == 16);
    CHECK(builtin_polytope("Xpq", {2, 3}).volume() == Rat(1, 3));

    CHECK_THROWS_AS(builtin_polytope("Pn", {0}), BadParams);
    CHECK_THROWS_AS(builtin_polytope("Xpq", {2, 4}), BadParams);
    CHECK_THROWS_AS(builtin_polytope("nosuch", {}), BadParams);
}

TEST_CASE("Mahler products stay above the Kurlberg bound on the fixtures") {
    // (pi/2e)^{n-1} (n+1)^{n+1} / (n!)^2 at n = 2 is about 3.9006; compare
    // the exact rational Mahler volumes against the conjectured 27/4 where
    // equality holds (simplex) and against 27/4 * (pi/2e) elsewhere.
    auto mahler = [](const Polytope& p) { return p.volume() * p.polar_dual().volume(); };
    CHECK(mahler(make_pn(2)) == Rat(27, 4));
    CHECK(mahler(make_xpq(2, 3)) == 8);
    CHECK(mahler(make_cube(2)) == 8);
    CHECK(mahler(make_hexagon()) == 9); // the dual hexagon also has area 3
    double kur2 = 3.9005798055443608;
    for (const auto& p : {make_pn(2), make_xpq(2, 3), make_cube(2), make_hexagon()}) {
        CHECK(to_double(mahler(p)) >= kur2);
    }
    CHECK(to_double(mahler(make_pn(3))) >= 3.7431568027046416); // (pi/2e)^2 * 256/36
    CHECK(to_double(mahler(make_cube(3))) >= 3.7431568027046416);
}

TEST_CASE("inscribed cross radius") {
    CHECK(make_cube(2).inscribed_cross_radius() == 1);
    CHECK(make_pn(2).inscribed_cross_radius() == 1);
    CHECK(make_xpq(2, 3).inscribed_cross_radius() == Rat(1, 3));
}

TEST_CASE("product polytopes compose representations directly") {
    Polytope p = Polytope::product(make_pn(2), make_pn(1));
    CHECK(p.dim() == 3);
    CHECK(p.vertices().size() == 6);
    CHECK(p.facets().size() == 5);
    CHECK(p.volume() == 9);
    CHECK(p == make_pn_x_p1(3));
    // big product without enumeration blow-up
    Polytope c6 = make_cube(6);
    CHECK(c6.vertices().size() == 64);
    CHECK(c6.volume() == 64);
    CHECK(is_zero(c6.barycenter()));
}
