#pragma once
// Exact rational scalars and outward-rounded interval helpers.
//
// All density values in this library are GMP rationals (mpq_class), which
// canonicalize automatically.  The only place floating point enters is the
// evaluation of natural logarithms for enclosures of log-linear values; those
// are widened outward by a margin that dominates libm rounding error, so every
// reported interval is a true enclosure.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace autodens {

using Rat = mpq_class;
using Int = mpz_class;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input (automaton files, CLI values). CLI maps this to exit 2.
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input outside an operation's domain (wrong base shape,
// non-primitive automaton, empty residue set, ...). CLI maps this to exit 1.
struct DomainError : Error {
    using Error::Error;
};

// An exploration (subset closure, kernel BFS, product reachability) exceeded
// the configured state budget.
struct BudgetError : DomainError {
    using DomainError::DomainError;
};

// Reachability/state budget for all graph explorations.  Overridable through
// the AUTODENS_STATE_BUDGET environment variable; read on each call so tests
// can toggle it.
long long state_budget();

inline Rat rat(long long num, long long den = 1) {
    Rat r(static_cast<long>(num), static_cast<long>(den));
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

// Parses "p", "p/q", or a decimal like "0.25" (decimals arise from CLI flags).
Rat parse_rat(const std::string& s);

inline double rat_to_double(const Rat& r) { return r.get_d(); }

// Exact conversion; doubles are dyadic rationals.
inline Rat rat_of_double(double d) {
    if (!std::isfinite(d)) throw DomainError("cannot convert non-finite double to rational");
    return Rat(d);
}

// Closed interval with exact rational endpoints.
struct RatInterval {
    Rat lo, hi;
    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
    Rat width() const { return hi - lo; }
};

RatInterval iv_add(const RatInterval& a, const RatInterval& b);
// Scales by an exact rational (sign-aware).
RatInterval iv_scale(const RatInterval& a, const Rat& c);
// Quotient by an interval that must not straddle zero.
RatInterval iv_div(const RatInterval& a, const RatInterval& b);

// Enclosure of ln(r) for r > 0.  One libm evaluation widened by a relative
// 2^-48 margin, which dominates the <= 2 ulp combined error of mpq->double
// conversion and faithful libm rounding.
RatInterval ln_enclosure(const Rat& r);

inline long long gcdll(long long a, long long b) {
    while (b) { long long t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
}

inline long long lcmll(long long a, long long b) {
    if (a == 0 || b == 0) return 0;
    return a / gcdll(a, b) * b;
}

// k^e with overflow guard; throws DomainError when the result would not fit
// comfortably in 63 bits.
long long pow_ll(long long k, int e);

}  // namespace autodens
