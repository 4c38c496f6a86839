#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "toric/errors.hpp"
#include "toric/legendre.hpp"
#include "toric/polytope.hpp"

using namespace toric;
using doctest::Approx;

namespace {

// Tangent-plane sampling of a smooth convex function: slopes are the
// gradients at the sample points, so the max-affine minorizes f.
MaxAffinePotential sample_tangents_1d(const std::function<double(double)>& f,
                                      const std::function<double(double)>& df,
                                      const std::vector<Rat>& slopes_as_points) {
    std::vector<RatVec> slopes;
    std::vector<double> intercepts;
    for (const auto& p : slopes_as_points) {
        double x0 = to_double(p);
        double g = df(x0);
        slopes.push_back({Rat(std::lround(g * 1000000), 1000000)});
        intercepts.push_back(to_double(slopes.back()[0]) * x0 - f(x0));
    }
    return MaxAffinePotential(std::move(slopes), std::move(intercepts));
}

// Quadratic |x|^2/2 sampled on an exact rational slope grid: the tangent at
// x0 = p has slope p and intercept p^2/2.
MaxAffinePotential quadratic_max_affine_1d(int k, double range) {
    std::vector<RatVec> slopes;
    std::vector<double> intercepts;
    for (int i = -k; i <= k; ++i) {
        Rat p = Rat(i) * Rat(std::lround(range * 1000), 1000) / k;
        slopes.push_back({p});
        double pd = to_double(p);
        intercepts.push_back(0.5 * pd * pd);
    }
    return MaxAffinePotential(std::move(slopes), std::move(intercepts));
}

MaxAffinePotential quadratic_max_affine_2d(int k, double range) {
    std::vector<RatVec> slopes;
    std::vector<double> intercepts;
    for (int i = -k; i <= k; ++i) {
        for (int j = -k; j <= k; ++j) {
            Rat a = Rat(i) * Rat(std::lround(range * 1000), 1000) / k;
            Rat b = Rat(j) * Rat(std::lround(range * 1000), 1000) / k;
            double ad = to_double(a), bd = to_double(b);
            slopes.push_back({a, b});
            intercepts.push_back(0.5 * (ad * ad + bd * bd));
        }
    }
    return MaxAffinePotential(std::move(slopes), std::move(intercepts));
}

} // namespace

TEST_CASE("legendre_transform: zero data reproduces the support function") {
    Polytope p = make_pn(2);
    DualGridFunction u = make_dual_grid(p, 3);
    SupportFunction psi(p);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-3, 3);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x = {d(rng), d(rng)};
        CHECK(legendre_transform(u, x) == Approx(psi(x)).epsilon(1e-12));
    }
}

TEST_CASE("legendre_transform: quadratic grid data approximates x^2/2") {
    // u(p) = p^2/2 on a dense grid of [-1,1]; conjugate at x=0.5 -> 0.125.
    Polytope seg = Polytope::from_vertices({{Rat(-1)}, {Rat(1)}});
    DualGridFunction u = make_dual_grid(seg, 200);
    for (std::size_t i = 0; i < u.nodes.size(); ++i) {
        double p = to_double(u.nodes[i][0]);
        u.values[i] = 0.5 * p * p;
    }
    CHECK(legendre_transform(u, {0.5}) == Approx(0.125).epsilon(1e-4));
    // brute-force oracle over the same grid
    double brute = -1e300;
    for (std::size_t i = 0; i < u.nodes.size(); ++i)
        brute = std::max(brute, to_double(u.nodes[i][0]) * 0.5 - u.values[i]);
    CHECK(legendre_transform(u, {0.5}) == Approx(brute).epsilon(1e-15));
}

TEST_CASE("biconjugation: twice recovers convex data, three times is idempotent") {
    Polytope seg = Polytope::from_vertices({{Rat(-1)}, {Rat(1)}});
    DualGridFunction u = make_dual_grid(seg, 40);
    for (std::size_t i = 0; i < u.nodes.size(); ++i) {
        double p = to_double(u.nodes[i][0]);
        u.values[i] = std::cosh(p); // smooth convex
    }
    std::vector<double> xs;
    for (int j = -80; j <= 80; ++j) xs.push_back(j * 0.05);
    std::vector<double> v(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) v[j] = legendre_transform(u, {xs[j]});
    auto conj_back = [&](const std::vector<double>& vv) {
        std::vector<double> w(u.nodes.size());
        for (std::size_t i = 0; i < u.nodes.size(); ++i) {
            double best = -1e300;
            for (std::size_t j = 0; j < xs.size(); ++j)
                best = std::max(best, to_double(u.nodes[i][0]) * xs[j] - vv[j]);
            w[i] = best;
        }
        return w;
    };
    auto w = conj_back(v);
    const double grid_gap = 0.05;
    for (std::size_t i = 0; i < u.nodes.size(); ++i) {
        CHECK(w[i] <= u.values[i] + 1e-12);
        CHECK(u.values[i] - w[i] < 2.5 * grid_gap); // modulus-of-continuity bound
    }
    // third application equals the first (exactly in real arithmetic; one
    // ulp of wobble from the re-rounded products here)
    DualGridFunction u2 = u;
    u2.values = w;
    for (std::size_t j = 0; j < xs.size(); ++j)
        CHECK(std::abs(legendre_transform(u2, {xs[j]}) - v[j]) <= 1e-13);
}

TEST_CASE("integrate_exp_neg: exact 1-d closed forms") {
    // psi_{[-1,1]} = |x|: integral 2, and equal to n! Vol(P*) with P* = [-1,1]
    Polytope seg = Polytope::from_vertices({{Rat(-1)}, {Rat(1)}});
    auto r = integrate_exp_neg(support_potential(seg), 1e-10);
    CHECK(r.value == Approx(2.0).epsilon(1e-13));
    CHECK(r.error_bound < 1e-12);

    // scaling law: phi + c multiplies by e^{-c}
    MaxAffinePotential phi = support_potential(seg);
    for (auto& c : phi.intercepts) c -= 3.25; // phi + 3.25
    auto r2 = integrate_exp_neg(phi, 1e-10);
    CHECK(r2.value == Approx(2.0 * std::exp(-3.25)).epsilon(1e-12));
}

TEST_CASE("integrate_exp_neg: smooth 1-d potential via tangent sampling") {
    // phi = 2 log(2 cosh(x/2)) has int e^{-phi} = 1
    auto f = [](double x) { return 2 * std::log(2 * std::cosh(x / 2)); };
    auto df = [](double x) { return std::tanh(x / 2); };
    std::vector<Rat> pts;
    for (int k = -60; k <= 60; ++k) pts.push_back(Rat(k, 10));
    auto phi = sample_tangents_1d(f, df, pts);
    auto r = integrate_exp_neg(phi, 1e-9);
    CHECK(r.value == Approx(1.0).epsilon(5e-3));
    // tangent envelope minorizes phi, so the integral approaches 1 from above
    CHECK(r.value >= 1.0 - 1e-9);
}

TEST_CASE("integrate_exp_neg: n=2 support function gives n! Vol(P*)") {
    auto r = integrate_exp_neg(support_potential(make_cube(2)), 1e-6);
    CHECK(r.value == Approx(4.0).epsilon(2e-4));
    CHECK(r.error_bound < 2e-3);

    auto rp2 = integrate_exp_neg(support_potential(make_pn(2)), 1e-6);
    CHECK(rp2.value == Approx(2.0 * to_double(make_pn(2).polar_dual().volume())).epsilon(2e-4));
}

TEST_CASE("integrate_exp_neg: n=3 support function") {
    auto r = integrate_exp_neg(support_potential(make_cube(3)), 1e-4);
    CHECK(r.value == Approx(6.0 * to_double(make_cube(3).polar_dual().volume())).epsilon(2e-3));
}

TEST_CASE("integrate_exp_neg: generic 1-d path agrees with a quadrature oracle") {
    // independent oracle: straightforward Simpson on [-40, 40]
    auto phi = quadratic_max_affine_1d(40, 3.0);
    auto r = integrate_exp_neg(phi, 1e-10);
    double simpson = 0;
    const int m = 40000;
    const double a = -40, h = 80.0 / m;
    for (int j = 0; j <= m; ++j) {
        double w = (j == 0 || j == m) ? 1 : (j % 2 ? 4 : 2);
        simpson += w * std::exp(-phi.value({a + j * h}));
    }
    simpson *= h / 3;
    CHECK(r.value == Approx(simpson).epsilon(1e-6)); // Simpson sees the kinks
}

TEST_CASE("integrate_exp_neg: divergent slope clouds are rejected") {
    // all slopes on one side of 0
    MaxAffinePotential bad({{Rat(1)}, {Rat(2)}}, {0.0, 0.0});
    CHECK_THROWS_AS(integrate_exp_neg(bad, 1e-6), TailDivergence);
    MaxAffinePotential bad2({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}, {Rat(1), Rat(1)}},
                            {0.0, 0.0, 0.0});
    CHECK_THROWS_AS(integrate_exp_neg(bad2, 1e-6), TailDivergence);
}

TEST_CASE("integrate_dual: constants, FS dual, affine exactness in 1-d") {
    Polytope p = make_pn(2);
    DualGridFunction u = make_dual_grid(p, 6);
    for (auto& v : u.values) v = 1.0;
    CHECK(integrate_dual(u) == Approx(4.5).epsilon(1e-12));

    // FS dual on [-1,1]: integral is exactly -2 in the limit
    Polytope seg = Polytope::from_vertices({{Rat(-1)}, {Rat(1)}});
    auto fs = [](double t) {
        auto xlogx = [](double s) { return s <= 0 ? 0.0 : s * std::log(s); };
        return xlogx(1 + t) + xlogx(1 - t) - 2 * std::log(2.0);
    };
    double prev_err = 1e9;
    for (int s : {40, 80, 160}) {
        DualGridFunction g = make_dual_grid(seg, s);
        for (std::size_t i = 0; i < g.nodes.size(); ++i) g.values[i] = fs(to_double(g.nodes[i][0]));
        double err = std::abs(integrate_dual(g) - (-2.0));
        CHECK(err < prev_err + 1e-12);
        prev_err = err;
    }
    CHECK(prev_err < 2e-4);

    // affine data on a barycenter-zero interval: exactly u(0) * Vol
    DualGridFunction g = make_dual_grid(seg, 10);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        g.values[i] = 0.75 + 2.5 * to_double(g.nodes[i][0]);
    CHECK(integrate_dual(g) == Approx(0.75 * 2.0).epsilon(1e-13));
}

TEST_CASE("make_dual_grid: weights are exact and nodes cover the vertices") {
    for (int s : {3, 5, 8}) {
        for (const auto& p : {make_pn(2), make_hexagon(), make_xpq(2, 3)}) {
            DualGridFunction g = make_dual_grid(p, s);
            Rat total = 0;
            for (const auto& w : g.weights) total += w;
            CHECK(total == p.volume());
            for (const auto& v : p.vertices())
                CHECK(std::find(g.nodes.begin(), g.nodes.end(), v) != g.nodes.end());
            for (const auto& w : g.weights) CHECK(w >= 0);
        }
    }
    // snapping: X_{2,3} vertices have denominators 2 and 3
    CHECK(snapped_grid_parameter(make_xpq(2, 3), 25) == 30);
    CHECK(snapped_grid_parameter(make_pn(2), 7) == 7);
    // 201 nodes on [-1,1] at s=100
    Polytope seg = Polytope::from_vertices({{Rat(-1)}, {Rat(1)}});
    CHECK(make_dual_grid(seg, 100).nodes.size() == 201);
}

TEST_CASE("santalo_check: support potential of [-1,1]") {
    // int e^{-|x|} = 2, dual side = Vol([-1,1]) = 2, product 4 <= 2 pi
    auto r = santalo_check(support_potential(Polytope::from_vertices({{Rat(-1)}, {Rat(1)}})),
                           1e-6);
    CHECK(r.primal_integral == Approx(2.0).epsilon(1e-12));
    CHECK(r.dual_integral == Approx(2.0).epsilon(1e-12));
    CHECK(r.product == Approx(4.0).epsilon(1e-11));
    CHECK(r.holds);
}

TEST_CASE("santalo_check: quadratic saturates the bound") {
    auto r1 = santalo_check(quadratic_max_affine_1d(60, 4.0), 1e-4);
    CHECK(r1.holds);
    CHECK(r1.product == Approx(2 * std::numbers::pi).epsilon(5e-3));

    auto r2 = santalo_check(quadratic_max_affine_2d(12, 3.5), 1e-3);
    CHECK(r2.holds);
    CHECK(r2.product == Approx(std::pow(2 * std::numbers::pi, 2)).epsilon(2e-2));
}

TEST_CASE("santalo_check: off-center potentials are recentered first") {
    // phi(x) = |x - 4|-ish: slopes +-1 with intercepts shifted
    MaxAffinePotential phi({{Rat(-1)}, {Rat(1)}}, {4.0, -4.0});
    auto r = santalo_check(phi, 1e-8);
    CHECK(r.center[0] == Approx(-4.0).epsilon(1e-9)); // pieces meet at x = -4
    CHECK(r.product == Approx(4.0).epsilon(1e-9));
    CHECK(r.holds);
}

TEST_CASE("santalo_check: random centered instances satisfy the bound") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> num(-8, 8);
    std::uniform_real_distribution<double> cdist(-0.6, 0.6);
    int trials_1d = 120, trials_2d = 25;
    for (int t = 0; t < trials_1d; ++t) {
        std::vector<RatVec> slopes;
        std::vector<double> cs;
        slopes.push_back({Rat(-9, 8)});
        slopes.push_back({Rat(9, 8)});
        cs.push_back(cdist(rng));
        cs.push_back(cdist(rng));
        for (int i = 0; i < 6; ++i) {
            slopes.push_back({Rat(num(rng), 8)});
            cs.push_back(cdist(rng));
        }
        auto r = santalo_check(MaxAffinePotential(slopes, cs), 1e-5);
        CHECK(r.holds);
        CHECK(r.product <= r.bound + 1e-5);
    }
    for (int t = 0; t < trials_2d; ++t) {
        std::vector<RatVec> slopes;
        std::vector<double> cs;
        for (int sx : {-1, 1})
            for (int sy : {-1, 1}) {
                slopes.push_back({Rat(sx * 5, 4), Rat(sy * 5, 4)});
                cs.push_back(cdist(rng));
            }
        for (int i = 0; i < 8; ++i) {
            slopes.push_back({Rat(num(rng), 8), Rat(num(rng), 8)});
            cs.push_back(cdist(rng));
        }
        auto r = santalo_check(MaxAffinePotential(slopes, cs), 2e-2);
        CHECK(r.holds);
    }
}
