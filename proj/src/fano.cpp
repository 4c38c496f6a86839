#include "toric/fano.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "toric/errors.hpp"

namespace toric {

namespace {

constexpr double kPi = std::numbers::pi;

double harmonic(int n) {
    double h = 0;
    for (int k = n; k >= 1; --k) h += 1.0 / k;
    return h;
}

double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

// (n+1)^n / n! without overflow for the n used in the sweeps.
double vol_pn(int n) { return std::exp(n * std::log(double(n) + 1.0) - log_factorial(n)); }

Rat gap_threshold_rational(int n) {
    // 2 n^{n-1} / (n-1)!
    Int num = 2;
    for (int i = 0; i < n - 1; ++i) num *= Int(n);
    Int den = 1;
    for (int i = 2; i <= n - 1; ++i) den *= Int(i);
    return Rat(num, den);
}

} // namespace

double mahler_constant(int n, MahlerBound which, double custom) {
    switch (which) {
        case MahlerBound::kCustom:
            return custom;
        case MahlerBound::kConjectured:
            return std::exp((n + 1) * std::log(double(n) + 1.0) - 2 * log_factorial(n));
        case MahlerBound::kKurlberg:
        default:
            return std::exp((n - 1) * std::log(kPi / (2 * std::numbers::e)) +
                            (n + 1) * std::log(double(n) + 1.0) - 2 * log_factorial(n));
    }
}

double pn_bracket(int n) {
    return (n + 1) * harmonic(n) - n + n * std::log(kPi) - log_factorial(n);
}

double pn_height(int n) {
    return 0.5 * std::pow(double(n) + 1.0, n + 1) * pn_bracket(n);
}

double pn_chi_volume(int n) { return 0.5 * vol_pn(n) * pn_bracket(n); }

double universal_upper_bound(double vol, int n) {
    return -0.5 * vol * (std::log(vol) - n * std::log(2 * kPi * kPi));
}

KeHeightBounds ke_height_bounds(double vol, int n, MahlerBound which, double custom_mahler) {
    KeHeightBounds b;
    b.mahler_used = mahler_constant(n, which, custom_mahler);
    double half_fact = 0.5 * std::exp(log_factorial(n + 1));
    b.lower = half_fact * vol * (log_factorial(n) + std::log(b.mahler_used) +
                                 n * std::log(kPi) - std::log(vol));
    b.upper = half_fact * vol * (n * std::log(2 * kPi) + n * std::log(kPi) - std::log(vol));
    return b;
}

double corollary_upper(int n) {
    return 0.5 * n * std::pow(double(n) + 1.0, n + 1) *
           (std::log(2 * kPi * kPi) + log_factorial(n) - std::log(double(n) + 1.0));
}

FanoReport analyze(const Polytope& p, MahlerBound mahler) {
    if (!p.is_fano_normalized() || !p.origin_interior())
        throw NotFanoNormalized("analyze: polytope must have all facet offsets 1 and 0 interior");
    FanoReport r;
    r.dim = p.dim();
    r.vol = p.volume();
    Int nfact = 1;
    for (int i = 2; i <= p.dim(); ++i) nfact *= Int(i);
    r.degree = r.vol * Rat(nfact);
    r.barycenter = p.barycenter();
    r.k_semistable = is_zero(r.barycenter);

    auto cls = p.classify_lattice();
    r.is_reflexive = cls.is_reflexive;
    r.gorenstein = cls.is_lattice;
    r.q_factorial = cls.is_simplicial;
    r.smooth = cls.is_smooth;

    const int n = r.dim;
    const double vol = to_double(r.vol);
    r.bounds.universal_upper = universal_upper_bound(vol, n);
    auto ke = ke_height_bounds(vol, n, mahler);
    r.bounds.ke_lower = ke.lower;
    r.bounds.ke_upper = ke.upper;
    r.bounds.pn_height = pn_height(n);
    r.bounds.corollary_upper =
        r.k_semistable ? corollary_upper(n) : std::numeric_limits<double>::quiet_NaN();
    r.bounds.mahler_lower_kurlberg = mahler_constant(n, MahlerBound::kKurlberg);
    r.bounds.mahler_conjectured = mahler_constant(n, MahlerBound::kConjectured);
    return r;
}

GapReport gap_scan(const std::vector<Polytope>& dataset, int n) {
    GapReport g;
    g.dim = n;
    g.total_inputs = dataset.size();
    g.gap_threshold = gap_threshold_rational(n);
    for (const auto& p : dataset) {
        if (p.dim() != n)
            throw MixedDimensions("gap_scan: dataset entry of dimension " +
                                  std::to_string(p.dim()) + ", expected " + std::to_string(n));
        if (!p.is_fano_normalized() || !p.origin_interior())
            throw NotFanoNormalized("gap_scan: entries must be Fano-normalized");
        if (is_zero(p.barycenter())) g.semistable_volumes.push_back(p.volume());
    }
    g.semistable_count = g.semistable_volumes.size();
    std::sort(g.semistable_volumes.begin(), g.semistable_volumes.end(),
              [](const Rat& a, const Rat& b) { return a > b; });
    if (!g.semistable_volumes.empty()) {
        g.has_max = true;
        g.max_volume = g.semistable_volumes.front();
    }
    if (g.semistable_volumes.size() >= 2) {
        g.has_second = true;
        g.second_volume = g.semistable_volumes[1];
        g.gap_holds = g.second_volume <= g.gap_threshold;
    } else {
        g.gap_holds = true; // vacuous
    }
    return g;
}

std::vector<CheckResult> verify_induction_chain(int max_n) {
    std::vector<CheckResult> out;
    const double gamma = std::numbers::egamma;
    for (int n = 2; n <= max_n; ++n) {
        const double sigma_n = vol_pn(n);
        const double e_n = std::exp(n * std::log1p(1.0 / n));
        const double e_n1 = std::exp((n + 1) * std::log1p(1.0 / (n + 1)));
        // vol(P^{n-1} x P^1) = 2 n^{n-1}/(n-1)!; its log stays in range.
        const double log_v = std::log(2.0) + (n - 1) * std::log(double(n)) - log_factorial(n - 1);
        const double bracket = pn_bracket(n);

        // (a) -v log(v/(2pi^2)^n) < 2 chi(P^n); both sides divided by vol(P^n)
        //     for overflow-free evaluation, reported in absolute units.
        {
            CheckResult c;
            c.name = "product_volume_inequality";
            c.n = n;
            const double lhs_norm = (2.0 / e_n) * (n * std::log(2 * kPi * kPi) - log_v);
            c.lhs = lhs_norm * sigma_n;
            c.rhs = bracket * sigma_n;
            c.margin = (bracket - lhs_norm) * sigma_n;
            c.holds = lhs_norm < bracket;
            out.push_back(c);
        }
        // (b) chi-volume of P^n is positive.
        {
            CheckResult c;
            c.name = "pn_chi_positive";
            c.n = n;
            c.lhs = 0;
            c.rhs = 0.5 * sigma_n * bracket;
            c.margin = c.rhs;
            c.holds = bracket > 0;
            out.push_back(c);
        }
        // (c) e_n = (1+1/n)^n strictly increasing and bounded by 4.
        {
            CheckResult c;
            c.name = "en_increasing_below_4";
            c.n = n;
            c.lhs = e_n;
            c.rhs = 4.0;
            c.margin = std::min(4.0 - e_n, e_n1 - e_n);
            c.holds = e_n < e_n1 && e_n <= 4.0;
            out.push_back(c);
        }
        // (d) H_{n+1} - log(n+1) > gamma.
        {
            CheckResult c;
            c.name = "harmonic_above_gamma";
            c.n = n;
            c.lhs = gamma;
            c.rhs = harmonic(n + 1) - std::log(double(n) + 1.0);
            c.margin = c.rhs - c.lhs;
            c.holds = c.margin > 0;
            out.push_back(c);
        }
        // (e) (n+1)^n / (2 n!) <= 2 n^{n-1}/(n-1)!, i.e. (n+1)^n <= 4 n^n,
        //     checked with exact integers.
        {
            CheckResult c;
            c.name = "singular_volume_bound";
            c.n = n;
            Int lhs_i = 1, rhs_i = 4;
            for (int i = 0; i < n; ++i) {
                lhs_i *= Int(n + 1);
                rhs_i *= Int(n);
            }
            c.lhs = 0.5 * sigma_n;
            c.rhs = to_double(gap_threshold_rational(n));
            c.margin = c.rhs - c.lhs;
            c.holds = lhs_i <= rhs_i;
            out.push_back(c);
        }
    }
    return out;
}

double family_constant() {
    // vol(P^1xP^1) * exp(2 chi / vol) with chi/vol = 1 + log pi from the
    // additivity identity applied to two P^1 factors: a = 4 e^2 pi^2.
    return 4.0 * std::exp(2.0 * (1.0 + std::log(kPi)));
}

double family_constant_printed() {
    // The value printed in the source example, 4 exp(2 - log pi^2).
    return 4.0 * std::exp(2.0 - 2.0 * std::log(kPi));
}

double family_height_at_volume(double vol) {
    return 3.0 * vol * std::log(family_constant() / vol);
}

double family_height(long p, long q) {
    if (p < 1 || q < 1) throw BadParams("family_height: need p,q >= 1");
    return family_height_at_volume(2.0 / (double(p) * double(q)));
}

AdditivityResult product_additivity_check(
    const std::vector<std::pair<double, double>>& vol_chi) {
    AdditivityResult r;
    r.product_volume = 1;
    for (const auto& [vol, chi] : vol_chi) {
        r.normalized_sum += chi / vol;
        r.product_volume *= vol;
    }
    r.product_chi = r.product_volume * r.normalized_sum;
    return r;
}

double linear_equivalence_predict(double base_chi_norm, const Rat& det_a) {
    if (det_a == 0) throw SingularMatrix("linear_equivalence_predict: det A = 0");
    Rat d = det_a < 0 ? -det_a : det_a;
    return base_chi_norm - 0.5 * std::log(to_double(d));
}

} // namespace toric
