#pragma once

#include <gmpxx.h>
#include <string>
#include <stdexcept>

namespace legweb {

// Exact rational scalar. All symbolic arithmetic in the library is over Q.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat rat_from_string(const std::string& s) {
    Rat r(s);
    r.canonicalize();
    return r;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline double rat_to_double(const Rat& r) { return r.get_d(); }

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

} // namespace legweb
