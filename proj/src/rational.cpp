#include "toric/rational.hpp"

#include <boost/multiprecision/gmp.hpp>

namespace toric {

namespace mp = boost::multiprecision;

IntVec primitive_direction(const RatVec& v, Rat* multiplier) {
    if (is_zero(v)) throw DegenerateInput("primitive_direction: zero vector");
    Int denom_lcm = 1;
    for (const auto& q : v) denom_lcm = mp::lcm(denom_lcm, Int(denominator(q)));
    IntVec scaled(v.size());
    Int content = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        scaled[i] = Int(numerator(v[i])) * (denom_lcm / Int(denominator(v[i])));
        content = mp::gcd(content, scaled[i]);
    }
    for (auto& z : scaled) z /= content;
    if (multiplier) *multiplier = Rat(denom_lcm, content);
    return scaled;
}

int compare_lex(const RatVec& a, const RatVec& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i]) return -1;
        if (a[i] > b[i]) return 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

int compare_lex(const IntVec& a, const IntVec& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i]) return -1;
        if (a[i] > b[i]) return 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

std::string rat_to_string(const Rat& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw BadParams("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            return Rat(Int(s));
        }
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw BadParams("zero denominator in rational literal '" + s + "'");
        return Rat(num, den);
    } catch (const BadParams&) {
        throw;
    } catch (const std::exception&) {
        throw BadParams("malformed rational literal '" + s + "'");
    }
}

} // namespace toric
