#include "toric/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>

#include "toric/errors.hpp"

namespace toric {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> to_double_vec(const RatVec& v) {
    std::vector<double> d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = to_double(v[i]);
    return d;
}
} // namespace

MaxAffinePotential::MaxAffinePotential(std::vector<RatVec> s, std::vector<double> c)
    : slopes(std::move(s)), intercepts(std::move(c)) {
    if (slopes.empty()) throw DegenerateInput("MaxAffinePotential: need at least one piece");
    if (slopes.size() != intercepts.size())
        throw DimensionMismatch("MaxAffinePotential: slopes and intercepts differ in length");
    dim = static_cast<int>(slopes[0].size());
    slopes_d.reserve(slopes.size());
    for (const auto& p : slopes) {
        if (static_cast<int>(p.size()) != dim)
            throw DimensionMismatch("MaxAffinePotential: ragged slope list");
        slopes_d.push_back(to_double_vec(p));
    }
    for (double v : intercepts)
        if (!std::isfinite(v)) throw DegenerateInput("MaxAffinePotential: non-finite intercept");
}

double MaxAffinePotential::value(const std::vector<double>& x) const {
    double best = -kInf;
    for (std::size_t i = 0; i < slopes_d.size(); ++i) {
        double v = -intercepts[i];
        for (int c = 0; c < dim; ++c) v += slopes_d[i][c] * x[c];
        if (v > best) best = v;
    }
    return best;
}

int MaxAffinePotential::argmax(const std::vector<double>& x) const {
    double best = -kInf;
    int arg = 0;
    for (std::size_t i = 0; i < slopes_d.size(); ++i) {
        double v = -intercepts[i];
        for (int c = 0; c < dim; ++c) v += slopes_d[i][c] * x[c];
        if (v > best) {
            best = v;
            arg = static_cast<int>(i);
        }
    }
    return arg;
}

MaxAffinePotential MaxAffinePotential::translated(const std::vector<double>& a) const {
    // phi(x + a) has intercepts c_i - <p_i, a>.
    MaxAffinePotential out = *this;
    for (std::size_t i = 0; i < slopes_d.size(); ++i) {
        double shift = 0;
        for (int c = 0; c < dim; ++c) shift += slopes_d[i][c] * a[c];
        out.intercepts[i] -= shift;
    }
    return out;
}

MaxAffinePotential support_potential(const Polytope& p) {
    return MaxAffinePotential(p.vertices(), std::vector<double>(p.vertices().size(), 0.0));
}

Rat SupportFunction::operator()(const RatVec& x) const {
    Rat best;
    bool first = true;
    for (const auto& v : vertices_) {
        Rat s = dot(v, x);
        if (first || s > best) best = s, first = false;
    }
    return best;
}

double SupportFunction::operator()(const std::vector<double>& x) const {
    double best = -kInf;
    for (const auto& v : vertices_) {
        double s = 0;
        for (std::size_t c = 0; c < x.size(); ++c) s += to_double(v[c]) * x[c];
        best = std::max(best, s);
    }
    return best;
}

int snapped_grid_parameter(const Polytope& p, int s) {
    if (s < 1) throw BadParams("grid parameter must be >= 1");
    Int l = 1;
    for (const auto& v : p.vertices())
        for (const auto& c : v) l = boost::multiprecision::lcm(l, Int(denominator(c)));
    if (l > 64) return s;
    long ll = l.convert_to<long>();
    return static_cast<int>(((s + ll - 1) / ll) * ll);
}

DualGridFunction make_dual_grid(const Polytope& p, int s_request) {
    const int n = p.dim();
    const int s = snapped_grid_parameter(p, s_request);
    DualGridFunction g;
    g.dim = n;
    g.total_weight = p.volume();

    std::vector<Rat> lo(n), hi(n);
    for (int c = 0; c < n; ++c) {
        lo[c] = p.vertices()[0][c];
        hi[c] = p.vertices()[0][c];
        for (const auto& v : p.vertices()) {
            lo[c] = std::min(lo[c], v[c]);
            hi[c] = std::max(hi[c], v[c]);
        }
    }
    auto floor_rat = [](const Rat& q) {
        Int f = Int(numerator(q)) / Int(denominator(q));
        if (q < 0 && Rat(f) != q) f -= 1;
        return f;
    };
    auto ceil_rat = [&](const Rat& q) {
        Int f = floor_rat(q);
        return Rat(f) == q ? f : f + 1;
    };
    auto inside = [&](const RatVec& x) {
        for (const auto& f : p.facets())
            if (f.slack(x) < 0) return false;
        return true;
    };

    if (n == 1) {
        std::vector<Rat> nodes;
        for (Int k = ceil_rat(lo[0] * s); k <= floor_rat(hi[0] * s); ++k)
            nodes.push_back(Rat(k, Int(s)));
        nodes.push_back(lo[0]);
        nodes.push_back(hi[0]);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        const std::size_t m = nodes.size();
        g.nodes.resize(m);
        g.weights.assign(m, Rat(0));
        for (std::size_t i = 0; i < m; ++i) g.nodes[i] = {nodes[i]};
        for (std::size_t i = 0; i < m; ++i) {
            if (i > 0) g.weights[i] += (nodes[i] - nodes[i - 1]) / 2;
            if (i + 1 < m) g.weights[i] += (nodes[i + 1] - nodes[i]) / 2;
        }
        g.values.assign(m, 0.0);
        return g;
    }

    if (n != 2) throw BadParams("make_dual_grid: n <= 2 (documented limit)");

    // Nodes: lattice points inside P.
    std::map<std::pair<Int, Int>, std::size_t> node_index;
    {
        Int k0 = ceil_rat(lo[0] * s), k1 = floor_rat(hi[0] * s);
        Int l0 = ceil_rat(lo[1] * s), l1 = floor_rat(hi[1] * s);
        for (Int k = k0; k <= k1; ++k) {
            for (Int l = l0; l <= l1; ++l) {
                RatVec x = {Rat(k, Int(s)), Rat(l, Int(s))};
                if (!inside(x)) continue;
                node_index[{k, l}] = g.nodes.size();
                g.nodes.push_back(std::move(x));
            }
        }
    }
    g.weights.assign(g.nodes.size(), Rat(0));

    // Weights: hat-function integrals over a fixed triangulation of the
    // lattice squares, each triangle clipped to P exactly. For convex data
    // this makes sum w_i c_i >= int_P (lower envelope of c), so the Ding
    // objective never exceeds its continuum supremum. Contributions of
    // triangle corners outside P go to the nearest inside node.
    struct Orphan {
        RatVec at;
        Rat amount;
    };
    std::vector<Orphan> orphans;
    auto barycentric_at = [](const std::array<RatVec, 3>& t, const RatVec& y, int corner) {
        const RatVec &a = t[corner], &b = t[(corner + 1) % 3], &c = t[(corner + 2) % 3];
        Rat det_t = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        Rat det_y = (b[0] - y[0]) * (c[1] - y[1]) - (c[0] - y[0]) * (b[1] - y[1]);
        return det_y / det_t;
    };
    {
        Int k0 = ceil_rat(lo[0] * s) - 1, k1 = floor_rat(hi[0] * s);
        Int l0 = ceil_rat(lo[1] * s) - 1, l1 = floor_rat(hi[1] * s);
        const Rat step(1, s);
        for (Int k = k0; k <= k1; ++k) {
            for (Int l = l0; l <= l1; ++l) {
                RatVec p00 = {Rat(k, Int(s)), Rat(l, Int(s))};
                RatVec p10 = {p00[0] + step, p00[1]};
                RatVec p01 = {p00[0], p00[1] + step};
                RatVec p11 = {p00[0] + step, p00[1] + step};
                std::array<std::array<RatVec, 3>, 2> tris = {
                    std::array<RatVec, 3>{p00, p10, p11},
                    std::array<RatVec, 3>{p00, p11, p01}};
                std::array<std::array<std::pair<Int, Int>, 3>, 2> keys = {
                    std::array<std::pair<Int, Int>, 3>{std::pair<Int, Int>{k, l},
                                                       {k + 1, l},
                                                       {k + 1, l + 1}},
                    std::array<std::pair<Int, Int>, 3>{std::pair<Int, Int>{k, l},
                                                       {k + 1, l + 1},
                                                       {k, l + 1}}};
                for (int t = 0; t < 2; ++t) {
                    const auto& tri = tris[t];
                    std::vector<HalfSpace> cut = p.facets();
                    for (int e = 0; e < 3; ++e) {
                        const RatVec &a = tri[e], &b = tri[(e + 1) % 3], &c = tri[(e + 2) % 3];
                        RatVec nrm = {a[1] - b[1], b[0] - a[0]};
                        Rat off = -dot(nrm, a);
                        if (dot(nrm, c) + off < 0) {
                            for (auto& z : nrm) z = -z;
                            off = -off;
                        }
                        cut.push_back(HalfSpace::from_rational(nrm, off));
                    }
                    Rat vol;
                    RatVec centroid;
                    try {
                        Polytope clip = Polytope::from_facets(cut);
                        vol = clip.volume();
                        centroid = clip.barycenter();
                    } catch (const Empty&) {
                        continue;
                    } catch (const DegenerateInput&) {
                        continue;
                    } catch (const Unbounded&) {
                        continue;
                    }
                    if (vol == 0) continue;
                    if (std::getenv("TORIC_GRID_DEBUG") && vol != Rat(1, 2 * s * s))
                        fprintf(stderr, "tri k=%s l=%s t=%d vol=%s\n", k.str().c_str(),
                                l.str().c_str(), t, rat_to_string(vol).c_str());
                    for (int corner = 0; corner < 3; ++corner) {
                        Rat wgt = vol * barycentric_at(tri, centroid, corner);
                        auto it = node_index.find(keys[t][corner]);
                        if (it != node_index.end()) {
                            g.weights[it->second] += wgt;
                        } else {
                            orphans.push_back({tri[corner], wgt});
                        }
                    }
                }
            }
        }
    }
    for (const auto& o : orphans) {
        std::size_t best = 0;
        Rat best_d;
        bool first = true;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            Rat d = 0;
            for (int c = 0; c < n; ++c) {
                Rat t = g.nodes[i][c] - o.at[c];
                d += t * t;
            }
            if (first || d < best_d ||
                (d == best_d && compare_lex(g.nodes[i], g.nodes[best]) < 0)) {
                best = i;
                best_d = d;
                first = false;
            }
        }
        g.weights[best] += o.amount;
    }

    // Vertices must be nodes; with snapping they already are. Without
    // snapping (huge denominator lcm) they enter with zero weight.
    for (const auto& v : p.vertices()) {
        if (std::find(g.nodes.begin(), g.nodes.end(), v) == g.nodes.end()) {
            g.nodes.push_back(v);
            g.weights.push_back(Rat(0));
        }
    }

    Rat total = 0;
    for (const auto& w : g.weights) total += w;
    if (total != g.total_weight) {
        fprintf(stderr, "DBG mismatch: sum=%.15f vol=%.15f diff=%.3e\n", to_double(total),
                to_double(g.total_weight), to_double(total - g.total_weight));
        throw DegenerateInput("make_dual_grid: internal weight mismatch");
    }
    g.values.assign(g.nodes.size(), 0.0);
    return g;
}

double legendre_transform(const DualGridFunction& u, const std::vector<double>& x,
                          int* arg_index) {
    double best = -kInf;
    int arg = 0;
    for (std::size_t i = 0; i < u.nodes.size(); ++i) {
        double v = -u.values[i];
        for (int c = 0; c < u.dim; ++c) v += to_double(u.nodes[i][c]) * x[c];
        if (v > best) {
            best = v;
            arg = static_cast<int>(i);
        }
    }
    if (arg_index) *arg_index = arg;
    return best;
}

double integrate_dual(const DualGridFunction& u) {
    double s = 0;
    for (std::size_t i = 0; i < u.nodes.size(); ++i) s += to_double(u.weights[i]) * u.values[i];
    return s;
}

namespace detail {

double Scaled::to_double() const { return mantissa * std::exp(scale); }

std::vector<EnvelopePiece> upper_envelope(std::vector<Line> lines) {
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        if (a.slope != b.slope) return a.slope < b.slope;
        if (a.drop != b.drop) return a.drop < b.drop;
        return a.index < b.index;
    });
    return upper_envelope_sorted(lines);
}

std::vector<EnvelopePiece> upper_envelope_sorted(const std::vector<Line>& lines) {
    std::vector<EnvelopePiece> env;
    env.reserve(lines.size());
    auto meet = [](const EnvelopePiece& a, const Line& b) {
        return (b.drop - a.drop) / (b.slope - a.slope);
    };
    for (const auto& l : lines) {
        if (!env.empty() && env.back().slope == l.slope) continue; // smaller drop already kept
        double x_new = -kInf;
        while (!env.empty()) {
            x_new = meet(env.back(), l);
            if (x_new <= env.back().x_left)
                env.pop_back();
            else
                break;
        }
        if (env.empty()) x_new = -kInf;
        env.push_back({l.slope, l.drop, l.index, x_new});
    }
    return env;
}

RowIntegral exp_integral_envelope(const std::vector<EnvelopePiece>& env,
                                  std::vector<double>* masses, double mass_scale_hint,
                                  double mass_weight, bool want_moment) {
    if (env.empty() || env.front().slope >= 0 || env.back().slope <= 0)
        throw TailDivergence("exp_integral_envelope: envelope slopes do not change sign");

    const std::size_t k = env.size();
    struct Piece {
        double mantissa;
        double scale;
        double moment_mantissa;
        int index;
    };
    std::vector<Piece> pieces(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double s = env[i].slope, d = env[i].drop;
        const double xl = env[i].x_left;
        const double xr = (i + 1 < k) ? env[i + 1].x_left : kInf;
        const double ul = (xl == -kInf) ? -kInf : d - s * xl;
        const double ur = (xr == kInf) ? -kInf : d - s * xr;
        double scale = std::max(ul, ur);
        double mant = 0, mom = 0;
        if (xl == -kInf) {
            mant = 1.0 / (-s); // scale = ur
            if (want_moment) mom = -(xr / s + 1.0 / (s * s));
        } else if (xr == kInf) {
            mant = 1.0 / s; // scale = ul
            if (want_moment) mom = xl / s + 1.0 / (s * s);
        } else if (s == 0) {
            scale = d;
            mant = xr - xl;
            if (want_moment) mom = (xr * xr - xl * xl) / 2;
        } else {
            // (e^{ul} - e^{ur}) / s with the larger exponent factored out
            if (ul >= ur)
                mant = -std::expm1(ur - ul) / s;
            else
                mant = std::expm1(ul - ur) / s;
            if (want_moment) {
                if (std::abs(s * (xr - xl)) < 1e-9) {
                    mom = (xr - xl) * (xl + xr) / 2 * std::exp((ul + ur) / 2 - scale);
                } else {
                    mom = (xl / s + 1.0 / (s * s)) * std::exp(ul - scale) -
                          (xr / s + 1.0 / (s * s)) * std::exp(ur - scale);
                }
            }
        }
        pieces[i] = {mant, scale, mom, env[i].index};
    }
    double g = -kInf;
    for (const auto& pc : pieces) g = std::max(g, pc.scale);
    RowIntegral out;
    out.total.scale = g;
    out.moment.scale = g;
    for (const auto& pc : pieces) {
        const double f = std::exp(pc.scale - g);
        out.total.mantissa += pc.mantissa * f;
        if (want_moment) out.moment.mantissa += pc.moment_mantissa * f;
        if (masses)
            (*masses)[pc.index] += mass_weight * pc.mantissa * std::exp(pc.scale - mass_scale_hint);
    }
    return out;
}

Scaled scaled_sum(const std::vector<Scaled>& terms, const std::vector<double>& weights) {
    Scaled out;
    double g = -kInf;
    for (const auto& t : terms)
        if (t.mantissa != 0) g = std::max(g, t.scale);
    if (g == -kInf) return out;
    out.scale = g;
    // pairwise reduction keeps the sum bit-stable for a fixed decomposition
    std::vector<double> vals(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i)
        vals[i] = weights[i] * terms[i].mantissa * std::exp(terms[i].scale - g);
    while (vals.size() > 1) {
        std::vector<double> next((vals.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < vals.size(); i += 2) next[i / 2] = vals[i] + vals[i + 1];
        if (vals.size() % 2) next.back() = vals.back();
        vals.swap(next);
    }
    out.mantissa = vals[0];
    return out;
}

TailCertificate tail_certificate(const MaxAffinePotential& phi) {
    // phi >= max over any slope subset S of <p_i, x> - c_i
    //     >= psi_{conv S} - max_{S} c_i,
    // so any subset whose hull has 0 interior certifies the tail. Try the
    // directional extremes first (axes and sign diagonals); fall back to the
    // full hull only for small clouds.
    const int n = phi.dim;
    std::vector<RatVec> dirs;
    for (int j = 0; j < n; ++j)
        for (int s : {1, -1}) {
            RatVec d(n, Rat(0));
            d[j] = s;
            dirs.push_back(d);
        }
    for (int mask = 0; mask < (1 << n); ++mask) {
        RatVec d(n);
        for (int j = 0; j < n; ++j) d[j] = (mask >> j) & 1 ? 1 : -1;
        dirs.push_back(d);
    }
    std::vector<std::size_t> subset;
    for (const auto& d : dirs) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < phi.slopes.size(); ++i) {
            Rat a = dot(phi.slopes[i], d), b = dot(phi.slopes[best], d);
            if (a > b || (a == b && phi.intercepts[i] < phi.intercepts[best])) best = i;
        }
        subset.push_back(best);
    }
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());

    auto build = [&](const std::vector<std::size_t>& idx) -> TailCertificate {
        std::vector<RatVec> pts;
        for (auto i : idx) pts.push_back(phi.slopes[i]);
        Polytope hull = Polytope::from_vertices(pts);
        if (!hull.origin_interior()) throw OriginNotInterior("subset hull");
        TailCertificate cert;
        cert.r = to_double(hull.inscribed_cross_radius());
        cert.c = -kInf;
        for (const auto& v : hull.vertices()) {
            double best = kInf; // smallest intercept among pieces at this slope
            for (auto i : idx)
                if (phi.slopes[i] == v) best = std::min(best, phi.intercepts[i]);
            cert.c = std::max(cert.c, best);
        }
        return cert;
    };
    try {
        return build(subset);
    } catch (const std::exception&) {
        // fall through to the full hull
    }
    if (phi.slopes.size() > 400)
        throw TailDivergence(
            "integrate_exp_neg: could not certify integrability from directional extremes");
    std::vector<std::size_t> all(phi.slopes.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    try {
        return build(all);
    } catch (const std::exception&) {
        throw TailDivergence("integrate_exp_neg: 0 is not interior to the slope hull");
    }
}

TailCertificate tail_certificate_for_grid(const Polytope& p, const MaxAffinePotential& phi,
                                          const std::vector<int>& vertex_node_indices) {
    TailCertificate cert;
    cert.r = to_double(p.inscribed_cross_radius());
    cert.c = -kInf;
    for (int i : vertex_node_indices) cert.c = std::max(cert.c, phi.intercepts[i]);
    return cert;
}

double outer_tail_bound(int n, double r, double c, double radius) {
    const double e = std::exp(c - r * radius);
    if (n == 1) return 2 * e / r;
    if (n == 2) return 4 * e * (radius / r + 2 / (r * r));
    if (n == 3)
        return 16 * e * (radius * radius / r + 3 * radius / (r * r) + 3 / (r * r * r));
    throw BadParams("outer_tail_bound: n <= 3 only");
}

} // namespace detail

namespace {

using detail::EnvelopePiece;
using detail::Line;
using detail::RowIntegral;
using detail::Scaled;

// Envelope of the restriction of phi to {x_0 free, outer coordinates fixed}.
std::vector<EnvelopePiece> row_envelope(const MaxAffinePotential& phi,
                                        const std::vector<double>& outer) {
    std::vector<Line> lines(phi.slopes_d.size());
    for (std::size_t i = 0; i < phi.slopes_d.size(); ++i) {
        double drop = phi.intercepts[i];
        for (std::size_t a = 1; a < phi.slopes_d[i].size(); ++a)
            drop -= phi.slopes_d[i][a] * outer[a - 1];
        lines[i] = {phi.slopes_d[i][0], drop, static_cast<int>(i)};
    }
    return detail::upper_envelope(std::move(lines));
}

// Composite Simpson over [-radius, radius]^{n-1} of the exact row integrals.
Scaled outer_composite(const MaxAffinePotential& phi, double radius, int intervals,
                       std::vector<Scaled>* coord_moments) {
    const int n = phi.dim;
    const double h = 2 * radius / intervals;
    std::vector<Scaled> rows;
    std::vector<double> weights;
    std::vector<std::vector<Scaled>> moment_terms(n);
    std::vector<std::vector<double>> moment_weights(n);
    const bool want = coord_moments != nullptr;

    auto simpson_w = [&](int j) { return (j == 0 || j == intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0); };

    if (n == 2) {
        for (int j = 0; j <= intervals; ++j) {
            const double y = -radius + j * h;
            auto env = row_envelope(phi, {y});
            RowIntegral ri = detail::exp_integral_envelope(env, nullptr, 0, 1.0, want);
            const double w = simpson_w(j) * h / 3;
            rows.push_back(ri.total);
            weights.push_back(w);
            if (want) {
                moment_terms[0].push_back(ri.moment);
                moment_weights[0].push_back(w);
                moment_terms[1].push_back(ri.total);
                moment_weights[1].push_back(w * y);
            }
        }
    } else if (n == 3) {
        for (int j = 0; j <= intervals; ++j) {
            const double y = -radius + j * h;
            for (int k = 0; k <= intervals; ++k) {
                const double z = -radius + k * h;
                auto env = row_envelope(phi, {y, z});
                RowIntegral ri = detail::exp_integral_envelope(env, nullptr, 0, 1.0, want);
                const double w = simpson_w(j) * simpson_w(k) * h * h / 9;
                rows.push_back(ri.total);
                weights.push_back(w);
                if (want) {
                    moment_terms[0].push_back(ri.moment);
                    moment_weights[0].push_back(w);
                    moment_terms[1].push_back(ri.total);
                    moment_weights[1].push_back(w * y);
                    moment_terms[2].push_back(ri.total);
                    moment_weights[2].push_back(w * z);
                }
            }
        }
    } else {
        throw BadParams("outer_composite: n must be 2 or 3");
    }
    if (want) {
        coord_moments->clear();
        for (int c = 0; c < n; ++c)
            coord_moments->push_back(detail::scaled_sum(moment_terms[c], moment_weights[c]));
    }
    return detail::scaled_sum(rows, weights);
}

struct FullIntegral {
    Scaled total;
    std::vector<Scaled> moments;
    double radius = 0;
    double error = 0;
};

FullIntegral integrate_full(const MaxAffinePotential& phi, double tol,
                            const detail::TailCertificate& cert, bool want_moments) {
    FullIntegral out;
    const int n = phi.dim;
    if (n == 1) {
        std::vector<Line> lines(phi.slopes_d.size());
        for (std::size_t i = 0; i < phi.slopes_d.size(); ++i)
            lines[i] = {phi.slopes_d[i][0], phi.intercepts[i], static_cast<int>(i)};
        auto env = detail::upper_envelope(std::move(lines));
        RowIntegral ri = detail::exp_integral_envelope(env, nullptr, 0, 1.0, want_moments);
        out.total = ri.total;
        if (want_moments) out.moments = {ri.moment};
        out.error = 1e-14 * std::abs(ri.total.to_double());
        return out;
    }
    if (n > 3) throw BadParams("integrate_exp_neg: n <= 3 (documented limit)");

    double radius = std::max(4.0, (cert.c + 12.0) / cert.r);
    while (detail::outer_tail_bound(n, cert.r, cert.c, radius) > 0.5 * tol) {
        radius *= 1.5;
        if (radius > 1e6) throw TailDivergence("integrate_exp_neg: tail radius runaway");
    }
    out.radius = radius;

    int intervals = n == 2 ? 512 : 96;
    Scaled prev = outer_composite(phi, radius, intervals, nullptr);
    Scaled cur = prev;
    double diff = kInf;
    for (int round = 0; round < (n == 2 ? 5 : 3); ++round) {
        intervals *= 2;
        std::vector<Scaled> moments;
        cur = outer_composite(phi, radius, intervals, want_moments ? &moments : nullptr);
        if (want_moments) out.moments = moments;
        diff = std::abs(cur.to_double() - prev.to_double());
        prev = cur;
        if (diff < 0.25 * tol * std::max(1.0, std::abs(cur.to_double()))) break;
    }
    out.total = cur;
    out.error = diff + detail::outer_tail_bound(n, cert.r, cert.c, radius);
    return out;
}

} // namespace

IntegralResult integrate_exp_neg(const MaxAffinePotential& phi, double tol) {
    auto cert = detail::tail_certificate(phi);
    auto full = integrate_full(phi, tol, cert, false);
    return {full.total.to_double(), full.error};
}

namespace {

struct HullPoint {
    double p;
    double u;
};

// Lower hull of (p_i, u_i); p strictly increasing on output.
std::vector<HullPoint> lower_hull_1d(std::vector<HullPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const HullPoint& a, const HullPoint& b) {
        if (a.p != b.p) return a.p < b.p;
        return a.u < b.u;
    });
    std::vector<HullPoint> uniq;
    for (const auto& q : pts)
        if (uniq.empty() || uniq.back().p != q.p) uniq.push_back(q);
    std::vector<HullPoint> hull;
    for (const auto& q : uniq) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            if ((b.u - a.u) * (q.p - a.p) >= (q.u - a.u) * (b.p - a.p))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(q);
    }
    return hull;
}

// int e^{-u} over [a, b] for the affine u through (a, ua), (b, ub).
double exp_segment(double a, double ua, double b, double ub) {
    const double len = b - a;
    if (len <= 0) return 0;
    const double d = ub - ua;
    if (std::abs(d) < 1e-12) return len * std::exp(-0.5 * (ua + ub));
    return -len * std::exp(-ua) * std::expm1(-d) / d;
}

double dual_integral_1d(const MaxAffinePotential& phi) {
    std::vector<HullPoint> pts(phi.slopes_d.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        pts[i] = {phi.slopes_d[i][0], phi.intercepts[i]};
    auto hull = lower_hull_1d(std::move(pts));
    double total = 0;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i)
        total += exp_segment(hull[i].p, hull[i].u, hull[i + 1].p, hull[i + 1].u);
    return total;
}

// Discrete 1-D conjugate g(y_l) = max_j (y_l x_j - f_j) for increasing y,
// via the upper envelope of the lines slope = x_j, drop = f_j.
void conjugate_onto(const std::vector<double>& x, const std::vector<double>& f,
                    const std::vector<double>& y, std::vector<double>& out) {
    std::vector<Line> lines;
    lines.reserve(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!std::isfinite(f[j])) continue;
        lines.push_back({x[j], f[j], static_cast<int>(j)});
    }
    auto env = detail::upper_envelope(std::move(lines));
    out.assign(y.size(), -kInf);
    std::size_t piece = 0;
    for (std::size_t l = 0; l < y.size(); ++l) {
        while (piece + 1 < env.size()) {
            const double v_cur = env[piece].slope * y[l] - env[piece].drop;
            const double v_nxt = env[piece + 1].slope * y[l] - env[piece + 1].drop;
            if (v_nxt >= v_cur)
                ++piece;
            else
                break;
        }
        out[l] = env[piece].slope * y[l] - env[piece].drop;
    }
}

double dual_integral_2d(const MaxAffinePotential& phi, const Polytope& hull, double radius) {
    // Sample phi on a fine primal grid, conjugate separably onto a dual grid
    // over the hull's bounding box, and integrate e^{-phi*} with midpoint
    // cells; cells cut by the hull boundary are supersampled.
    const int kPrimal = 1 << 11;
    const int kDual = 480;
    std::vector<double> xs(kPrimal + 1);
    for (int j = 0; j <= kPrimal; ++j) xs[j] = -radius + 2 * radius * j / kPrimal;

    double lo0 = kInf, hi0 = -kInf, lo1 = kInf, hi1 = -kInf;
    for (const auto& v : hull.vertices()) {
        lo0 = std::min(lo0, to_double(v[0]));
        hi0 = std::max(hi0, to_double(v[0]));
        lo1 = std::min(lo1, to_double(v[1]));
        hi1 = std::max(hi1, to_double(v[1]));
    }
    const double h0 = (hi0 - lo0) / kDual, h1 = (hi1 - lo1) / kDual;
    std::vector<double> y0(kDual), y1(kDual);
    for (int l = 0; l < kDual; ++l) y0[l] = lo0 + (l + 0.5) * h0;
    for (int l = 0; l < kDual; ++l) y1[l] = lo1 + (l + 0.5) * h1;

    // pass 1: per primal column j, h_j(y1) = max_k (y1 x2_k - phi(x_j, x2_k))
    std::vector<std::vector<double>> hcol(kPrimal + 1);
    {
        std::vector<double> fcol(kPrimal + 1);
        for (int j = 0; j <= kPrimal; ++j) {
            std::vector<Line> lines(phi.slopes_d.size());
            for (std::size_t i = 0; i < phi.slopes_d.size(); ++i)
                lines[i] = {phi.slopes_d[i][1], phi.intercepts[i] - phi.slopes_d[i][0] * xs[j],
                            static_cast<int>(i)};
            auto env = detail::upper_envelope(std::move(lines));
            std::size_t piece = 0;
            for (int k = 0; k <= kPrimal; ++k) {
                while (piece + 1 < env.size() && env[piece + 1].x_left <= xs[k]) ++piece;
                fcol[k] = env[piece].slope * xs[k] - env[piece].drop;
            }
            conjugate_onto(xs, fcol, y1, hcol[j]);
        }
    }

    std::vector<double> neg_h(kPrimal + 1), row(kDual);
    double total = 0;
    auto inside = [&](double a, double b) {
        for (const auto& f : hull.facets()) {
            double s = to_double(f.offset) + to_double(f.normal[0]) * a +
                       to_double(f.normal[1]) * b;
            if (s < 0) return false;
        }
        return true;
    };
    for (int l1 = 0; l1 < kDual; ++l1) {
        for (int j = 0; j <= kPrimal; ++j) neg_h[j] = -hcol[j][l1];
        conjugate_onto(xs, neg_h, y0, row);
        for (int l0 = 0; l0 < kDual; ++l0) {
            const bool c1 = inside(y0[l0] - h0 / 2, y1[l1] - h1 / 2);
            const bool c2 = inside(y0[l0] + h0 / 2, y1[l1] - h1 / 2);
            const bool c3 = inside(y0[l0] - h0 / 2, y1[l1] + h1 / 2);
            const bool c4 = inside(y0[l0] + h0 / 2, y1[l1] + h1 / 2);
            if (!c1 && !c2 && !c3 && !c4) continue;
            double frac = 1.0;
            if (!(c1 && c2 && c3 && c4)) {
                int cnt = 0;
                const int ss = 6;
                for (int a = 0; a < ss; ++a)
                    for (int b = 0; b < ss; ++b)
                        if (inside(y0[l0] + (a + 0.5) * h0 / ss - h0 / 2,
                                   y1[l1] + (b + 0.5) * h1 / ss - h1 / 2))
                            ++cnt;
                frac = double(cnt) / (ss * ss);
            }
            if (frac > 0) total += frac * h0 * h1 * std::exp(-row[l0]);
        }
    }
    return total;
}

} // namespace

SantaloResult santalo_check(const MaxAffinePotential& phi, double tol) {
    SantaloResult r;
    const int n = phi.dim;
    if (n > 2) throw BadParams("santalo_check: n <= 2");
    r.bound = std::pow(2 * std::numbers::pi, n);

    auto cert = detail::tail_certificate(phi);
    auto first = integrate_full(phi, std::min(tol, 1e-7), cert, true);
    r.center.assign(n, 0.0);
    const double i0 = first.total.to_double();
    for (int c = 0; c < n; ++c) r.center[c] = first.moments[c].to_double() / i0;

    MaxAffinePotential centered = phi.translated(r.center);
    auto cert2 = detail::tail_certificate(centered);
    auto prim = integrate_full(centered, std::min(tol, 1e-7), cert2, false);
    r.primal_integral = prim.total.to_double();

    if (n == 1) {
        r.dual_integral = dual_integral_1d(centered);
    } else {
        Polytope hull = Polytope::from_vertices(centered.slopes);
        r.dual_integral = dual_integral_2d(centered, hull, prim.radius);
    }
    r.product = r.primal_integral * r.dual_integral;
    r.holds = r.product <= r.bound + tol;
    return r;
}

} // namespace toric
