#include "toric/ding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <numeric>

#include "toric/errors.hpp"

namespace toric {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::EnvelopePiece;
using detail::Line;
using detail::RowIntegral;
using detail::Scaled;

int default_grid(int n) { return n == 1 ? 100 : 10; }

} // namespace

struct DingSolver::Impl {
    Polytope p;
    DingConfig cfg;
    int n = 0;
    int s = 0;
    DualGridFunction grid;
    std::size_t m = 0;
    double vol = 0;
    std::vector<double> w_over_v;  // w_i / Vol(P)
    std::vector<int> vertex_nodes; // node indices that are vertices of P
    double radius_r = 0;           // inscribed cross radius of P
    bool semistable = false;
    int rows = 0;
    // Quadrature decomposition frozen for the whole run so the discretized
    // objective is one fixed smooth function; re-frozen only if intercepts
    // outgrow the headroom.
    double frozen_radius = 0;
    double frozen_cmax = 0;

    // n = 2: the integration runs in sheared coordinates u = B^{-1} x with
    // det B = 1, chosen so that the sheared x-slopes q_x = p_x + lambda p_y
    // are pairwise distinct AND no interface is close to horizontal: with
    // lambda = a/b ~ 1/2 and b beyond the lattice extent, every cell
    // interface is well-transversal to the rows, the row sweep sees all
    // Hessian couplings, and the discretized objective is smooth (no
    // winner-switch staircase). The Ding objective is invariant under
    // determinant-one shears.
    Rat shear_lambda;
    std::vector<int> order;             // node index by increasing q_x
    std::vector<double> slope_x_sorted; // sheared x-slopes, strictly increasing
    std::vector<double> slope_y_sorted;

    Impl(const Polytope& poly, const DingConfig& c) : p(poly), cfg(c) {
        n = p.dim();
        if (n > 2)
            throw BadParams("DingSolver: KE heights are computed for n <= 2 "
                            "(documented limit); the closed-form bounds still apply");
        s = snapped_grid_parameter(p, cfg.grid > 0 ? cfg.grid : default_grid(n));
        grid = make_dual_grid(p, s);
        m = grid.nodes.size();
        vol = to_double(p.volume());
        w_over_v.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            w_over_v[i] = to_double(grid.weights[i] / grid.total_weight);
        for (std::size_t i = 0; i < m; ++i)
            for (const auto& v : p.vertices())
                if (grid.nodes[i] == v) vertex_nodes.push_back(static_cast<int>(i));
        semistable = is_zero(p.barycenter());

        if (n == 1) {
            radius_r = to_double(p.inscribed_cross_radius());
            rows = 0;
            return;
        }

        // pick lambda = a/b with b past the lattice extent and a/b near 1/2;
        // bump on (pathological, unsnapped-vertex) collisions
        Rat span = 0;
        for (const auto& v : p.vertices())
            for (const auto& x : v) span = std::max(span, x < 0 ? -x : x);
        long b = 2 * (span * s).convert_to<long>() + 3;
        std::vector<Rat> qx(m);
        for (;; b += 2) {
            long a = b / 2;
            while (std::gcd(a, b) != 1) ++a;
            shear_lambda = Rat(a, b);
            for (std::size_t i = 0; i < m; ++i)
                qx[i] = grid.nodes[i][0] + grid.nodes[i][1] * shear_lambda;
            std::vector<Rat> sorted = qx;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) break;
        }
        RatMat shear = {{Rat(1), shear_lambda}, {Rat(0), Rat(1)}};
        radius_r = to_double(p.linear_image(shear).inscribed_cross_radius());

        order.resize(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return qx[a] < qx[b]; });
        slope_x_sorted.resize(m);
        slope_y_sorted.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            slope_x_sorted[i] = to_double(qx[order[i]]);
            slope_y_sorted[i] = to_double(grid.nodes[order[i]][1]);
        }

        freeze_radius(12.0);
        rows = cfg.rows > 0 ? cfg.rows : default_row_count();
        if (rows % 2) ++rows;
    }

    // Rows fine enough to resolve the dual cells: about eight per lattice
    // step, capped for safety.
    int default_row_count() const {
        const double per_cell = 8.0;
        int r = static_cast<int>(2 * frozen_radius * per_cell * s);
        return std::clamp(r, 1024, 16384);
    }

    void freeze_radius(double headroom) {
        frozen_cmax = headroom;
        double radius = std::max(4.0, (frozen_cmax + 14.0) / radius_r);
        while (detail::outer_tail_bound(n, radius_r, frozen_cmax, radius) >
               0.5 * std::min(cfg.integration_tol, 1e-9)) {
            radius *= 1.5;
            if (radius > 1e6) throw TailDivergence("DingSolver: tail radius runaway");
        }
        frozen_radius = radius;
    }

    // Largest intercept among the vertex nodes; the tail bound is valid while
    // this stays below the frozen headroom.
    double vertex_cmax(const std::vector<double>& c) const {
        double cmax = -kInf;
        for (int i : vertex_nodes) cmax = std::max(cmax, c[i]);
        return cmax;
    }

    double tail_radius(const std::vector<double>& c) const {
        if (vertex_cmax(c) <= frozen_cmax) return frozen_radius;
        double cmax = vertex_cmax(c);
        double radius = std::max(4.0, (cmax + 14.0) / radius_r);
        while (detail::outer_tail_bound(n, radius_r, cmax, radius) >
               0.5 * cfg.integration_tol) {
            radius *= 1.5;
            if (radius > 1e6) throw TailDivergence("DingSolver: tail radius runaway");
        }
        return radius;
    }

    std::vector<EnvelopePiece> make_row(const std::vector<double>& c, double y) const {
        std::vector<Line> lines;
        lines.reserve(m);
        for (std::size_t k = 0; k < m; ++k) {
            const int i = order[k];
            const double drop = c[i] - slope_y_sorted[k] * y;
            if (!lines.empty() && lines.back().slope == slope_x_sorted[k]) {
                if (drop < lines.back().drop) lines.back() = {slope_x_sorted[k], drop, i};
                continue;
            }
            lines.push_back({slope_x_sorted[k], drop, i});
        }
        return detail::upper_envelope_sorted(lines);
    }


    struct Evaluation {
        Scaled integral;
        std::vector<double> mu;
        // Normalized interface densities: bbar[i*m+j] = (1/I) d I_i / d c_j
        // for j != i, the Hessian off-diagonal building block.
        std::vector<double> bbar;
        double radius = 0;
    };

    Evaluation evaluate(const std::vector<double>& c, bool want_mu, bool want_hessian,
                        int row_count) const {
        Evaluation ev;
        std::vector<double> masses;
        if (want_mu) masses.assign(m, 0.0);
        std::vector<double> iface; // accumulated at mass scale
        if (want_hessian) iface.assign(m * m, 0.0);
        double mass_scale = 0;

        auto add_interfaces = [&](const std::vector<EnvelopePiece>& env, double weight) {
            // d I_i / d c_j = e^{-phi(x_b)} / |slope_i - slope_j| at the
            // breakpoint x_b between adjacent active pieces i and j.
            for (std::size_t k = 1; k < env.size(); ++k) {
                const double xb = env[k].x_left;
                const double u = env[k].drop - env[k].slope * xb; // -phi(x_b)
                const double dens =
                    weight * std::exp(u - mass_scale) / (env[k].slope - env[k - 1].slope);
                iface[env[k - 1].index * m + env[k].index] += dens;
                iface[env[k].index * m + env[k - 1].index] += dens;
            }
        };

        if (n == 1) {
            std::vector<Line> lines(m);
            for (std::size_t i = 0; i < m; ++i)
                lines[i] = {to_double(grid.nodes[i][0]), c[i], static_cast<int>(i)};
            auto env = detail::upper_envelope(std::move(lines));
            for (std::size_t k = 1; k < env.size(); ++k)
                mass_scale = std::max(mass_scale,
                                      env[k].drop - env[k].slope * env[k].x_left);
            RowIntegral ri = detail::exp_integral_envelope(env, want_mu ? &masses : nullptr,
                                                           mass_scale, 1.0, false);
            if (want_hessian) add_interfaces(env, 1.0);
            ev.integral = ri.total;
            finalize(ev, masses, iface, mass_scale, want_mu, want_hessian);
            return ev;
        }

        // n == 2: exact rows in x, composite Simpson in y. The row envelopes
        // are built once; the global scale is known before any mass or
        // interface accumulation happens.
        ev.radius = tail_radius(c);
        const int mrows = row_count;
        const double h = 2 * ev.radius / mrows;
        std::vector<std::vector<EnvelopePiece>> envs(mrows + 1);
        mass_scale = -kInf;
        for (int j = 0; j <= mrows; ++j) {
            envs[j] = make_row(c, -ev.radius + j * h);
            const auto& env = envs[j];
            for (std::size_t k = 1; k < env.size(); ++k)
                mass_scale = std::max(mass_scale,
                                      env[k - 1].drop - env[k - 1].slope * env[k].x_left);
        }
        std::vector<Scaled> row_vals(mrows + 1);
        std::vector<double> row_w(mrows + 1);
        for (int j = 0; j <= mrows; ++j) {
            const double sw = ((j == 0 || j == mrows) ? 1.0 : (j % 2 ? 4.0 : 2.0)) * h / 3;
            RowIntegral ri = detail::exp_integral_envelope(envs[j], want_mu ? &masses : nullptr,
                                                           mass_scale, sw, false);
            if (want_hessian) add_interfaces(envs[j], sw);
            row_vals[j] = ri.total;
            row_w[j] = sw;
        }
        ev.integral = detail::scaled_sum(row_vals, row_w);
        finalize(ev, masses, iface, mass_scale, want_mu, want_hessian);
        return ev;
    }

    void finalize(Evaluation& ev, const std::vector<double>& masses,
                  const std::vector<double>& iface, double mass_scale, bool want_mu,
                  bool want_hessian) const {
        if (!want_mu && !want_hessian) return;
        const double denom = ev.integral.mantissa * std::exp(ev.integral.scale - mass_scale);
        if (want_mu) {
            ev.mu.resize(m);
            for (std::size_t i = 0; i < m; ++i) ev.mu[i] = masses[i] / denom;
        }
        if (want_hessian) {
            ev.bbar.resize(m * m);
            for (std::size_t i = 0; i < m * m; ++i) ev.bbar[i] = iface[i] / denom;
        }
    }

    double log_integral(const std::vector<double>& c, int row_count) const {
        auto ev = evaluate(c, false, false, row_count);
        return std::log(ev.integral.mantissa) + ev.integral.scale;
    }

    double objective_raw(const std::vector<double>& c) const {
        double t1 = 0;
        for (std::size_t i = 0; i < m; ++i) t1 += w_over_v[i] * c[i];
        return -t1 + log_integral(c, rows) + n * std::log(std::numbers::pi);
    }

    std::vector<double> envelope_values(const std::vector<double>& c) const {
        if (n == 1) {
            // exact monotone chain over (p_i, c_i); grid nodes are sorted
            std::vector<int> hull;
            for (std::size_t i = 0; i < m; ++i) {
                while (hull.size() >= 2) {
                    const int a = hull[hull.size() - 2], b = hull.back();
                    const double pa = to_double(grid.nodes[a][0]),
                                 pb = to_double(grid.nodes[b][0]),
                                 pi = to_double(grid.nodes[i][0]);
                    if ((c[b] - c[a]) * (pi - pa) >= (c[i] - c[a]) * (pb - pa))
                        hull.pop_back();
                    else
                        break;
                }
                hull.push_back(static_cast<int>(i));
            }
            std::vector<double> env(m);
            std::size_t seg = 0;
            for (std::size_t i = 0; i < m; ++i) {
                while (seg + 2 < hull.size() &&
                       grid.nodes[hull[seg + 1]][0] <= grid.nodes[i][0])
                    ++seg;
                const int a = hull[seg], b = hull[seg + 1 < hull.size() ? seg + 1 : seg];
                if (a == static_cast<int>(i) || b == static_cast<int>(i) || a == b) {
                    env[i] = (a == static_cast<int>(i) || b == static_cast<int>(i))
                                 ? c[i]
                                 : c[a];
                    continue;
                }
                const double pa = to_double(grid.nodes[a][0]),
                             pb = to_double(grid.nodes[b][0]),
                             pi = to_double(grid.nodes[i][0]);
                const double t = (pi - pa) / (pb - pa);
                env[i] = std::min(c[i], (1 - t) * c[a] + t * c[b]);
            }
            return env;
        }
        // n == 2: biconjugation through the integration rows. Mean-centering
        // keeps the result exactly equivariant under c -> c + t.
        double mean = 0;
        for (std::size_t i = 0; i < m; ++i) mean += c[i];
        mean /= double(m);
        std::vector<double> c0(c);
        for (auto& x : c0) x -= mean;
        const double radius = tail_radius(c0);
        const double h = 2 * radius / rows;
        std::vector<double> env(m, -kInf);
        for (int j = 0; j <= rows; ++j) {
            const double y = -radius + j * h;
            auto rowenv = make_row(c0, y);
            // conjugate of the convex row envelope at each node x-slope; the
            // maximizing slope index is monotone, so one sweep suffices
            std::size_t piece = 0;
            for (std::size_t k = 0; k < m; ++k) {
                const double sigma = slope_x_sorted[k];
                while (piece + 1 < rowenv.size() && rowenv[piece + 1].slope <= sigma) ++piece;
                double conj;
                if (piece + 1 < rowenv.size()) {
                    const double xb = rowenv[piece + 1].x_left;
                    conj = (sigma - rowenv[piece].slope) * xb + rowenv[piece].drop;
                } else {
                    conj = rowenv[piece].drop;
                }
                const int i = order[k];
                const double cand = slope_y_sorted[k] * y + conj;
                if (cand > env[i]) env[i] = cand;
            }
        }
        for (std::size_t i = 0; i < m; ++i) env[i] = std::min(env[i] + mean, c[i]);
        return env;
    }

    double objective_enveloped(const std::vector<double>& c) const {
        auto env = envelope_values(c);
        double t1 = 0;
        for (std::size_t i = 0; i < m; ++i) t1 += w_over_v[i] * env[i];
        return -t1 + log_integral(c, rows) + n * std::log(std::numbers::pi);
    }

    // int_P phi_c^* dy evaluated against the actual convex envelope, not the
    // node quadrature. The node quadrature under-integrates the piecewise
    // linear dual by O(h) (its curvature sits on the kink edges and piles up
    // at the boundary), which is exactly the slack a maximizer would exploit;
    // reported values therefore re-integrate the dual directly.
    double dual_integral_exact(const std::vector<double>& c) const {
        if (n == 1) {
            // the envelope is linear between consecutive nodes, so the
            // trapezoid sum is exact
            auto env = envelope_values(c);
            double total = 0;
            for (std::size_t i = 0; i + 1 < m; ++i) {
                const double a = to_double(grid.nodes[i][0]);
                const double b = to_double(grid.nodes[i + 1][0]);
                total += (b - a) * (env[i] + env[i + 1]) / 2;
            }
            return total;
        }
        // n == 2: midpoint quadrature of phi^*(y) over P on a fine grid, with
        // phi^* evaluated by biconjugation through the sheared rows:
        //   phi^*(y) = sup_rows [ y_2 row + conj_row(y_1 + lambda y_2) ].
        double mean = 0;
        for (std::size_t i = 0; i < m; ++i) mean += c[i];
        mean /= double(m);
        std::vector<double> c0(c);
        for (auto& x : c0) x -= mean;
        const double radius = tail_radius(c0);
        const double h = 2 * radius / rows;
        std::vector<std::vector<EnvelopePiece>> envs(rows + 1);
        for (int j = 0; j <= rows; ++j) envs[j] = make_row(c0, -radius + j * h);

        // bounding box of P
        double lo0 = kInf, hi0 = -kInf, lo1 = kInf, hi1 = -kInf;
        for (const auto& v : p.vertices()) {
            lo0 = std::min(lo0, to_double(v[0]));
            hi0 = std::max(hi0, to_double(v[0]));
            lo1 = std::min(lo1, to_double(v[1]));
            hi1 = std::max(hi1, to_double(v[1]));
        }
        const int fine = 384;
        const double f0 = (hi0 - lo0) / fine, f1 = (hi1 - lo1) / fine;
        const double lambda = to_double(shear_lambda);
        auto inside = [&](double a, double b) {
            for (const auto& fct : p.facets()) {
                double s2 = to_double(fct.offset) + to_double(fct.normal[0]) * a +
                            to_double(fct.normal[1]) * b;
                if (s2 < 0) return false;
            }
            return true;
        };
        // flat tops of the cells are wide, so a strided row subset suffices
        const int stride = std::max(1, rows / 1024);
        std::vector<int> rsel;
        for (int j = 0; j <= rows; j += stride) rsel.push_back(j);

        struct Query {
            double q;     // sheared slope a + lambda b
            double b;
            double area;  // inside fraction * cell area
        };
        std::vector<Query> queries;
        queries.reserve(std::size_t(fine) * fine / 2);
        for (int ia = 0; ia < fine; ++ia) {
            const double a = lo0 + (ia + 0.5) * f0;
            for (int ib = 0; ib < fine; ++ib) {
                const double b = lo1 + (ib + 0.5) * f1;
                const bool c1 = inside(a - f0 / 2, b - f1 / 2);
                const bool c2 = inside(a + f0 / 2, b - f1 / 2);
                const bool c3 = inside(a - f0 / 2, b + f1 / 2);
                const bool c4 = inside(a + f0 / 2, b + f1 / 2);
                if (!c1 && !c2 && !c3 && !c4) continue;
                double frac = 1.0;
                if (!(c1 && c2 && c3 && c4)) {
                    int cnt = 0;
                    for (int u = 0; u < 4; ++u)
                        for (int w2 = 0; w2 < 4; ++w2)
                            if (inside(a + (u + 0.5) * f0 / 4 - f0 / 2,
                                       b + (w2 + 0.5) * f1 / 4 - f1 / 2))
                                ++cnt;
                    frac = cnt / 16.0;
                    if (frac == 0) continue;
                }
                queries.push_back({a + lambda * b, b, frac * f0 * f1});
            }
        }
        std::sort(queries.begin(), queries.end(),
                  [](const Query& x, const Query& y) { return x.q < y.q; });

        // persistent per-row cursors track the conjugate piece as q increases
        std::vector<std::size_t> cursor(rsel.size(), 0);
        double total = 0;
        for (const auto& qu : queries) {
            double best = -kInf;
            for (std::size_t jr = 0; jr < rsel.size(); ++jr) {
                const auto& env = envs[rsel[jr]];
                std::size_t& cur = cursor[jr];
                while (cur + 1 < env.size() && env[cur + 1].slope <= qu.q) ++cur;
                double conj;
                if (cur + 1 < env.size())
                    conj = (qu.q - env[cur].slope) * env[cur + 1].x_left + env[cur].drop;
                else
                    conj = env[cur].drop;
                const double y = -radius + rsel[jr] * h;
                const double v = qu.b * y + conj;
                if (v > best) best = v;
            }
            total += (best + mean) * qu.area;
        }
        return total;
    }
};

DingSolver::DingSolver(const Polytope& p, const DingConfig& cfg)
    : impl_(std::make_unique<Impl>(p, cfg)) {}
DingSolver::~DingSolver() = default;
DingSolver::DingSolver(DingSolver&&) noexcept = default;

const DualGridFunction& DingSolver::grid() const { return impl_->grid; }
int DingSolver::grid_parameter() const { return impl_->s; }

double DingSolver::objective(const std::vector<double>& c) const {
    if (!impl_->semistable && impl_->cfg.diagnostic_iterations == 0)
        throw NotSemistable("ding_objective: the barycenter of P is nonzero");
    return impl_->objective_enveloped(c);
}

double DingSolver::objective_raw(const std::vector<double>& c) const {
    if (!impl_->semistable && impl_->cfg.diagnostic_iterations == 0)
        throw NotSemistable("ding_objective: the barycenter of P is nonzero");
    return impl_->objective_raw(c);
}

std::vector<double> DingSolver::subgradient(const std::vector<double>& c) const {
    if (!impl_->semistable && impl_->cfg.diagnostic_iterations == 0)
        throw NotSemistable("ding_subgradient: the barycenter of P is nonzero");
    auto ev = impl_->evaluate(c, true, false, impl_->rows);
    std::vector<double> g(impl_->m);
    for (std::size_t i = 0; i < impl_->m; ++i) g[i] = ev.mu[i] - impl_->w_over_v[i];
    return g;
}

std::vector<double> DingSolver::envelope(const std::vector<double>& c) const {
    return impl_->envelope_values(c);
}

double DingSolver::dual_integral(const std::vector<double>& c) const {
    return impl_->dual_integral_exact(c);
}

std::vector<double> DingSolver::neg_hessian(const std::vector<double>& c) const {
    auto ev = impl_->evaluate(c, true, true, impl_->rows);
    const std::size_t mm = impl_->m;
    std::vector<double> h(mm * mm);
    for (std::size_t i = 0; i < mm; ++i) {
        double rowsum = 0;
        for (std::size_t j = 0; j < mm; ++j) {
            if (j == i) continue;
            h[i * mm + j] = ev.mu[i] * ev.mu[j] - ev.bbar[i * mm + j];
            rowsum += ev.bbar[i * mm + j];
        }
        h[i * mm + i] = rowsum - ev.mu[i] + ev.mu[i] * ev.mu[i];
    }
    return h;
}

DingResult DingSolver::maximize() {
    Impl& im = *impl_;
    const bool diagnostic = !im.semistable;
    if (diagnostic && im.cfg.diagnostic_iterations == 0)
        throw NotSemistable("maximize: the barycenter of P is nonzero (the supremum is "
                            "+infinity); set diagnostic_iterations to trace the ascent");

    DingResult res;
    res.dim = im.n;
    res.vol = im.vol;
    res.grid_parameter = im.s;
    res.node_count = im.m;

    auto regauge = [&](std::vector<double>& v) {
        double shift = 0;
        for (std::size_t i = 0; i < im.m; ++i) shift += im.w_over_v[i] * v[i];
        for (auto& x : v) x -= shift;
    };

    // Start from the tangent family of |x|^2/2: every dual cell carries mass
    // from the first iteration on. (With c = 0, i.e. phi = psi_P, all
    // interior cells are empty and the Newton floor cannot be seeded.)
    std::vector<double> c(im.m);
    for (std::size_t i = 0; i < im.m; ++i) {
        double q = 0;
        for (int a = 0; a < im.n; ++a) {
            const double pa = to_double(im.grid.nodes[i][a]);
            q += pa * pa;
        }
        c[i] = q / 2;
    }
    regauge(c);

    const int max_iter = diagnostic ? im.cfg.diagnostic_iterations : im.cfg.max_iterations;
    const bool newton = im.cfg.schedule == StepSchedule::kAdaptive;

    auto eval_f = [&](const std::vector<double>& cc, const Impl::Evaluation& ev) {
        double t1 = 0;
        for (std::size_t i = 0; i < im.m; ++i) t1 += im.w_over_v[i] * cc[i];
        return -t1 + std::log(ev.integral.mantissa) + ev.integral.scale +
               im.n * std::log(std::numbers::pi);
    };

    Impl::Evaluation ev = im.evaluate(c, true, newton, im.rows);
    double f = eval_f(c, ev);
    res.objective_trace.push_back(f);
    std::vector<double> best_c = c;
    double best_res = kInf;

    // Damping floor: no weighted cell may fall below half of
    // min(its initial mass, its target mass). Keeping every cell alive is
    // what makes the damped Newton iteration globally convergent here.
    double mass_floor = kInf;
    for (std::size_t i = 0; i < im.m; ++i) {
        if (im.w_over_v[i] <= 0) continue;
        mass_floor = std::min(mass_floor, std::min(ev.mu[i], im.w_over_v[i]));
    }
    mass_floor *= 0.5;
    auto min_mass = [&](const std::vector<double>& mu) {
        double lo = kInf;
        for (std::size_t i = 0; i < im.m; ++i)
            if (im.w_over_v[i] > 0) lo = std::min(lo, mu[i]);
        return lo;
    };

    // Newton system: (-Hess F) d = g restricted to the gauge plane, made
    // definite with a rank-one gauge term. Solved by LDL^T.
    std::vector<double> nmat, dirbuf;
    auto newton_solve = [&](const Impl::Evaluation& e, const std::vector<double>& g,
                            double ridge, std::vector<double>& dir) {
        const std::size_t mm = im.m;
        nmat.assign(mm * mm, 0.0);
        double diag_mean = 0;
        for (std::size_t i = 0; i < mm; ++i) {
            double rowsum = 0;
            for (std::size_t j = 0; j < mm; ++j) {
                if (j == i) continue;
                const double off = e.mu[i] * e.mu[j] - e.bbar[i * mm + j];
                nmat[i * mm + j] = off;
                rowsum += e.bbar[i * mm + j];
            }
            nmat[i * mm + i] = rowsum - e.mu[i] + e.mu[i] * e.mu[i];
            diag_mean += std::abs(nmat[i * mm + i]);
        }
        diag_mean = diag_mean / double(mm) + 1e-12;
        const double sigma = diag_mean; // gauge direction stiffness
        for (std::size_t i = 0; i < mm; ++i) {
            for (std::size_t j = 0; j < mm; ++j) nmat[i * mm + j] += sigma;
            nmat[i * mm + i] += ridge * diag_mean;
        }
        // in-place LDL^T
        for (std::size_t k = 0; k < mm; ++k) {
            for (std::size_t j = 0; j < k; ++j) {
                const double l = nmat[k * mm + j];
                for (std::size_t i = k; i < mm; ++i)
                    nmat[i * mm + k] -= l * nmat[i * mm + j] * nmat[j * mm + j];
            }
            if (nmat[k * mm + k] <= 0) return false;
            for (std::size_t i = k + 1; i < mm; ++i) nmat[i * mm + k] /= nmat[k * mm + k];
        }
        dir.assign(g.begin(), g.end());
        for (std::size_t k = 0; k < mm; ++k)
            for (std::size_t i = 0; i < k; ++i) dir[k] -= nmat[k * mm + i] * dir[i];
        for (std::size_t k = 0; k < mm; ++k) dir[k] /= nmat[k * mm + k];
        for (std::size_t k = mm; k-- > 0;)
            for (std::size_t i = k + 1; i < mm; ++i) dir[k] -= nmat[i * mm + k] * dir[i];
        return true;
    };
    auto newton_direction = [&](const Impl::Evaluation& e, const std::vector<double>& g,
                                std::vector<double>& dir) {
        for (double ridge : {0.0, 1e-6, 1e-3, 1e-1}) // Levenberg fallbacks
            if (newton_solve(e, g, ridge, dir)) return true;
        return false;
    };

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::vector<double> g(im.m);
        double gmax = 0, gnorm2 = 0;
        for (std::size_t i = 0; i < im.m; ++i) {
            g[i] = ev.mu[i] - im.w_over_v[i];
            gmax = std::max(gmax, std::abs(g[i]));
            gnorm2 += g[i] * g[i];
        }
        if (gmax < best_res) {
            best_res = gmax;
            best_c = c;
        }
        if (!diagnostic && gmax < im.cfg.tol) break;

        std::vector<double> dir;
        double sk = 1.0;
        bool monotone = newton;
        if (newton) {
            if (!newton_direction(ev, g, dirbuf)) dirbuf = g;
            double dg = 0;
            for (std::size_t i = 0; i < im.m; ++i) dg += dirbuf[i] * g[i];
            dir = dg > 0 ? dirbuf : g;
            // trust region in sup norm: starved cells ask for huge intercept
            // moves that the line search could never tame
            double dmax = 0;
            for (double v : dir) dmax = std::max(dmax, std::abs(v));
            if (dmax > 4.0)
                for (auto& v : dir) v *= 4.0 / dmax;
        } else {
            dir = g;
            if (im.cfg.schedule == StepSchedule::kDiminishing) {
                sk = im.cfg.step0 / std::sqrt(double(iter + 1));
            } else { // Polyak
                sk = gnorm2 > 0 ? (im.cfg.polyak_target - f) / gnorm2 : 1.0;
                if (sk <= 0) sk = im.cfg.step0 / std::sqrt(double(iter + 1));
            }
        }

        std::vector<double> cand(im.m);
        Impl::Evaluation evc;
        double fc = -kInf;
        bool accepted = false;
        for (int half = 0; half < 40; ++half) {
            for (std::size_t i = 0; i < im.m; ++i) cand[i] = c[i] + sk * dir[i];
            regauge(cand);
            evc = im.evaluate(cand, true, newton, im.rows);
            fc = eval_f(cand, evc);
            const bool ok_value = fc >= f - 1e-12 * std::max(1.0, std::abs(f));
            if (!monotone || (ok_value && min_mass(evc.mu) >= mass_floor)) {
                accepted = true;
                break;
            }
            sk *= 0.5;
        }
        if (std::getenv("TORIC_DING_TRACE"))
            std::fprintf(stderr,
                         "  it=%4d f=%.10f res=%.3e sk=%.3e acc=%d minmu=%.2e floor=%.2e\n",
                         iter, f, gmax, sk, int(accepted),
                         accepted ? min_mass(evc.mu) : -1.0, mass_floor);
        if (!accepted) break; // stationary at line-search resolution

        c.swap(cand);
        ev = std::move(evc);
        f = fc;
        res.objective_trace.push_back(f);
        if (im.n == 2 && im.vertex_cmax(c) > im.frozen_cmax) {
            im.freeze_radius(im.vertex_cmax(c) + 8.0);
            ev = im.evaluate(c, true, newton, im.rows);
            f = eval_f(c, ev);
        }
    }
    res.iterations = iter;

    c = best_c;
    res.ke_residual = best_res;
    res.converged = !diagnostic && best_res < im.cfg.tol;

    // Value of the spec objective at the computed potential, with the dual
    // integral evaluated against the envelope itself rather than the node
    // quadrature (which carries the O(h) kink bias a maximizer exploits).
    res.f_star = -im.dual_integral_exact(c) / im.vol + im.log_integral(c, im.rows) +
                 im.n * std::log(std::numbers::pi);
    res.chi_volume = im.vol * res.f_star / 2;
    res.height = std::tgamma(double(im.n) + 2.0) * res.chi_volume;
    res.intercepts = c;

    if (im.n == 1) {
        res.integration_error = 1e-13;
        res.certified = res.converged;
    } else {
        const double lo = im.log_integral(c, im.rows);
        const double hi = im.log_integral(c, im.rows * 2);
        res.integration_error = std::abs(hi - lo) + im.cfg.integration_tol;
        res.certified = res.converged && res.integration_error < im.cfg.tol;
    }
    if (im.cfg.require_certified && !res.certified)
        throw TailDivergence("maximize: certified run requested but not achieved");
    return res;
}

DingResult maximize_ding(const Polytope& p, const DingConfig& cfg) {
    DingSolver solver(p, cfg);
    return solver.maximize();
}

std::vector<BoundCheck> verify_bounds(const DingResult& result, const FanoReport& report) {
    std::vector<BoundCheck> out;
    auto push = [&](const std::string& name, double lhs, double rhs) {
        BoundCheck b;
        b.name = name;
        b.lhs = lhs;
        b.rhs = rhs;
        b.margin = rhs - lhs;
        b.passed = lhs <= rhs;
        out.push_back(b);
    };
    push("chi_volume_below_universal_bound", result.chi_volume, report.bounds.universal_upper);
    push("height_above_ke_lower", report.bounds.ke_lower, result.height);
    push("height_below_ke_upper", result.height, report.bounds.ke_upper);
    push("height_below_pn_height", result.height, report.bounds.pn_height);
    return out;
}

LinearEquivalenceExperiment linear_equivalence_experiment(const Polytope& p, const RatMat& a,
                                                          const DingConfig& cfg) {
    Rat d = det(a);
    if (d == 0) throw SingularMatrix("linear_equivalence_experiment: det A = 0");
    LinearEquivalenceExperiment ex;
    ex.base = maximize_ding(p, cfg);
    ex.image = maximize_ding(p.linear_image(a), cfg);
    ex.measured_delta = ex.image.chi_volume / ex.image.vol - ex.base.chi_volume / ex.base.vol;
    ex.predicted_delta = -0.5 * std::log(std::abs(to_double(d)));
    return ex;
}

} // namespace toric
