#pragma once

#include <gmpxx.h>

#include <string>

#include "famext/errors.hpp"

namespace famext {

// Exact rational scalar. All arithmetic in the library is exact; no floating
// point enters any computation or certificate.
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Parses "p", "-p", or "p/q" (q > 0 after canonicalization is enforced by sign
// normalization). Throws DomainError on malformed input.
Rat parse_rat(const std::string& text);

// Canonical form: "p" when the denominator is 1, else "p/q" with q > 0 and
// gcd(|p|, q) = 1. parse_rat(rat_to_string(x)) == x for all x.
std::string rat_to_string(const Rat& value);

inline Rat rat_abs(const Rat& value) { return abs(value); }

inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }

}  // namespace famext
