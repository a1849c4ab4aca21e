#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace buckpass {

// Exact rational arithmetic. Deterministic-game costs are ratios built from the
// measure entries (doubles convert exactly: every finite double is p/2^k) and small
// integer cycle lengths, so comparisons like "strictly profitable" are exact.
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat_from_double(double x) {
    return Rat(x); // exact conversion by construction
}

inline double rat_to_double(const Rat& r) {
    return r.convert_to<double>();
}

// Canonical text form: "num/den", with "/1" dropped for integers.
inline std::string rat_to_string(const Rat& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

} // namespace buckpass
