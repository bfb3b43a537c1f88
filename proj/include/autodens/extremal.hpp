#pragma once
// Exact upper/lower densities of level sets along primes and coprime residue
// classes.  For these subsequences the per-component densities transfer with
// weight exactly proportional to digit counts, so the counting function below
// any digit string is a harmonic sum: the extremal prefix ratios become
// sup/inf over eventually periodic digit strings of N/D where both N and D are
// geometric digit series.  That fractional program is solved exactly by
// Dinkelbach iteration with policy iteration in the inner step.

#include <optional>
#include <string>
#include <vector>

#include "autodens/dfao.hpp"
#include "autodens/subseq.hpp"

namespace autodens {

struct ExtremalProblem {
    Dfao aut;                 // membership product automaton, base K
    long long K = 2;
    std::vector<Rat> w;       // weight d(alpha | state) per state, in [0,1]
    std::vector<Rat> w_comp;  // complement weights 1 - w (per component mass)
};

// along must be primes or coprime; squares and naturals are rejected
// (naturals: use density_along; squares: no harmonic transfer of this shape).
ExtremalProblem build_problem(const Dfao& a, const Along& along, const std::string& alpha);

struct ExtremalCertificate {
    std::vector<int> preperiod;  // digits of the optimizing string
    std::vector<int> period;     // nonempty cycle
    Rat N, D;                    // exact geometric sums for the string
    Rat theta;                   // optimum; equals N/D when D > 0
    bool inner_optimum_zero = false;  // max over strings of (N - theta*D) == 0
};

struct ExtremalResult {
    Rat value;
    ExtremalCertificate certificate;
};

// sup over non-all-zero digit strings of N/D for the given weights.
ExtremalResult maximize_ratio(const Dfao& aut, long long K, const std::vector<Rat>& w);

ExtremalResult upper_density(const ExtremalProblem& p);
// 1 - (upper density of the complement); certificate is the complement's.
ExtremalResult lower_density(const ExtremalProblem& p);

}  // namespace autodens
