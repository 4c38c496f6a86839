#ifndef TORIC_FANO_HPP
#define TORIC_FANO_HPP

#include <string>
#include <vector>

#include "toric/polytope.hpp"

namespace toric {

// Which lower bound on the Mahler volume m_n to use. The Kurlberg-type bound
// (pi/2e)^{n-1} (n+1)^{n+1} / (n!)^2 is a theorem; the conjectured value
// (n+1)^{n+1} / (n!)^2 is Mahler's conjecture, proved only for n <= 2.
enum class MahlerBound { kKurlberg, kConjectured, kCustom };

double mahler_constant(int n, MahlerBound which, double custom = 0.0);

// Closed-form bounds evaluated in double precision. Exact questions
// (semistability, volumes, gap ordering) never go through these.
struct BoundSet {
    double universal_upper = 0;   // upper bound on the chi-volume
    double ke_lower = 0;          // lower bound on the KE height
    double ke_upper = 0;          // upper bound on the KE height
    double corollary_upper = 0;   // dimension-only height bound (semistable inputs)
    double pn_height = 0;         // height of P^n, the conjectured maximum
    double mahler_lower_kurlberg = 0;
    double mahler_conjectured = 0;
};

struct FanoReport {
    int dim = 0;
    Rat vol;          // Vol(P) = vol(-K_X)
    Rat degree;       // n! * vol = (-K_X)^n
    RatVec barycenter;
    bool k_semistable = false; // barycenter == 0, exact test
    bool is_reflexive = false;
    bool gorenstein = false;
    bool q_factorial = false;
    bool smooth = false;
    BoundSet bounds;
};

// Classification and closed-form bounds for a Fano-normalized polytope
// (all facet offsets 1, origin interior). Throws NotFanoNormalized.
FanoReport analyze(const Polytope& p, MahlerBound mahler = MahlerBound::kKurlberg);

// Height of P^n_Z with the volume-normalized Fubini-Study metric:
//   1/2 (n+1)^{n+1} ((n+1) sum_{k<=n} 1/k - n + log(pi^n/n!)).
// Overflows to +inf for n around 140; the sign is carried by pn_bracket.
double pn_height(int n);

// chi-volume of the same metric, pn_height(n) / (n+1)!.
double pn_chi_volume(int n);

// The dimensionless bracket (n+1)H_n - n + log(pi^n/n!); positive iff the
// height is positive. Safe for all n used here.
double pn_bracket(int n);

// -1/2 vol log(vol / (2 pi^2)^n), an upper bound for the chi-volume of any
// volume-normalized metric on a K-semistable toric Fano.
double universal_upper_bound(double vol, int n);

struct KeHeightBounds {
    double lower = 0;
    double upper = 0;
    double mahler_used = 0;
};
KeHeightBounds ke_height_bounds(double vol, int n, MahlerBound which = MahlerBound::kKurlberg,
                                double custom_mahler = 0.0);

// n (n+1)^{n+1} / 2 * log(2 pi^2 n! / (n+1)).
double corollary_upper(int n);

struct GapReport {
    int dim = 0;
    std::vector<Rat> semistable_volumes; // sorted descending
    std::size_t total_inputs = 0;
    std::size_t semistable_count = 0;
    bool has_max = false;
    Rat max_volume;
    bool has_second = false;
    Rat second_volume;
    Rat gap_threshold;   // 2 n^{n-1} / (n-1)!
    bool gap_holds = false; // vacuously true when no second entry exists
};
// Exact rational scan of the K-semistable members of the dataset.
GapReport gap_scan(const std::vector<Polytope>& dataset, int n);

struct CheckResult {
    std::string name;
    int n = 0;
    bool holds = false;
    double margin = 0;
    double lhs = 0;
    double rhs = 0;
};

// Numerically verifies, for n = 2..N, the five ingredient inequalities of the
// product-is-second-largest induction: the key volume inequality, positivity
// of the P^n chi-volume, monotonicity and boundedness of (1+1/n)^n, the
// harmonic-sum vs Euler-Mascheroni estimate, and the singular volume bound.
std::vector<CheckResult> verify_induction_chain(int max_n);

// Family constant a = vol * exp(2 chi / vol) for the X_{p,q} family, derived
// from the product additivity identity and the P^1 chi-volume rather than the
// printed example value; see family_constant_printed for the latter.
double family_constant();
double family_constant_printed();

// Height of the volume-v member of the X_{p,q} linear-equivalence family:
//   f(v) = 3 v log(a / v)  (n = 2).
double family_height_at_volume(double vol);

// Height of X_{p,q} itself, volume 2/(pq). Primality of p,q is irrelevant to
// the formula; coprimality is enforced by the polytope constructor, not here.
double family_height(long p, long q);

struct AdditivityResult {
    double normalized_sum = 0;  // sum of chi_i / vol_i
    double product_volume = 0;  // product of vol_i
    double product_chi = 0;     // product_volume * normalized_sum
};
AdditivityResult product_additivity_check(const std::vector<std::pair<double, double>>& vol_chi);

// Normalized-height transformation rule under P -> A P:
// chi/vol changes by -1/2 log|det A|.
double linear_equivalence_predict(double base_chi_norm, const Rat& det_a);

} // namespace toric

#endif
