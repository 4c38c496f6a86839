#ifndef TORIC_RATIONAL_HPP
#define TORIC_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <vector>

#include "toric/errors.hpp"

namespace toric {

// Exact arithmetic backbone. All polytope geometry is done over Q; doubles
// only appear downstream in the analytic modules.
using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

using RatVec = std::vector<Rat>;
using IntVec = std::vector<Int>;

inline double to_double(const Rat& q) { return q.convert_to<double>(); }
inline double to_double(const Int& z) { return z.convert_to<double>(); }

inline Rat dot(const RatVec& a, const RatVec& b) {
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Rat dot(const IntVec& a, const RatVec& b) {
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += Rat(a[i]) * b[i];
    return s;
}

inline Int dot(const IntVec& a, const IntVec& b) {
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool is_zero(const RatVec& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

// Scales a rational vector to a primitive integer vector (gcd of entries 1),
// preserving direction. The returned multiplier m satisfies m*v = result.
IntVec primitive_direction(const RatVec& v, Rat* multiplier = nullptr);

// Lexicographic comparison, used for all canonical orderings.
int compare_lex(const RatVec& a, const RatVec& b);
int compare_lex(const IntVec& a, const IntVec& b);

std::string rat_to_string(const Rat& q);
Rat rat_from_string(const std::string& s); // throws BadParams on junk or zero denominator

} // namespace toric

#endif
