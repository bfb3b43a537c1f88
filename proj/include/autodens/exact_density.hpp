#pragma once
// Exact densities: per-state/per-output natural densities of primitive
// automata, limits of per-component state densities via an exact spectral
// projector, and logarithmic densities of arithmetic membership sets as
// log-linear values with certified rational enclosures.

#include <map>
#include <string>
#include <vector>

#include "autodens/dfao.hpp"
#include "autodens/linalg.hpp"
#include "autodens/structure.hpp"

namespace autodens {

// Digit-transition count matrix: entry (i, j) counts digits w with
// delta(q_j, w) = q_i; every column sums to the base.
Mat incidence_matrix(const Dfao& a);

bool is_strongly_connected(const Dfao& a);
bool has_self_loop(const Dfao& a);
// Strongly connected with at least one self-loop (aperiodicity witness).
bool is_primitive(const Dfao& a);

// Per-state natural density of a primitive automaton: the unique solution of
// M v = k v, sum v = 1, checked exact and positive.
std::vector<Rat> primitive_state_density(const Dfao& a);

std::map<std::string, Rat> by_output(const Dfao& a, const std::vector<Rat>& state_density);

// Per-output natural density of a primitive automaton.
std::map<std::string, Rat> primitive_density(const Dfao& a);

// Exact limits d_{i,q} of the fraction of component-i members in the length-nu
// subtree below membership state q, for every component i and state q of the
// membership automaton.  Computed as v_i^T P where P projects onto
// ker(B - I) along im(B - I), B the column-stochastic transition matrix.
// Rows sum to 1 over i for every q (the residual contributes exactly 0).
std::vector<std::vector<Rat>> state_density_limits(const Decomposition& dec);

// --- log-linear values -------------------------------------------------------
//
// Value = (c0 + sum_t coeff_t * ln(arg_t)) / ln(base), all coefficients and
// arguments exact rationals, plus a certified rational enclosure of the value.
// A plain rational v is representable exactly as coeff v with arg = base.

struct LogLin {
    Rat c0;                                 // rational part of the log-numerator
    std::vector<std::pair<Rat, Rat>> terms; // (coefficient, argument>0)
    long long base = 2;
    RatInterval enclosure{Rat(0), Rat(0)};
    bool exact = false;  // true when the symbolic part is the whole value

    double midpoint() const { return rat_to_double((enclosure.lo + enclosure.hi) / 2); }
};

LogLin loglin_rational(const Rat& v, long long base);
LogLin loglin_scale(const LogLin& x, const Rat& c);
LogLin loglin_add(const LogLin& x, const LogLin& y);  // bases must match

// Recomputes the enclosure of the symbolic part only.
RatInterval loglin_symbolic_enclosure(const LogLin& x);

// Logarithmic density of the membership set of a 0/1 indicator automaton, as
// sum over generators of ln(1+1/m)/ln K.  If the generator set is detected
// finite (pending words die out), the value is exact; otherwise generators are
// enumerated to increasing depth until the certified tail bound
// pending(Lambda) * K^{-(Lambda-1)} / ln K brings the enclosure width at or
// below eps.  eps must be positive.
LogLin logdensity_set(const Dfao& indicator, const Rat& eps);

inline Rat default_logdensity_eps() { return Rat(1, 1 << 30); }

}  // namespace autodens
