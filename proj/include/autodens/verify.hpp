#pragma once
// Empirical verification: prime sieving, sampled density estimates along a
// subsequence (plain or harmonically weighted), and comparison against exact
// reports within a tolerance.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autodens/dfao.hpp"
#include "autodens/subseq.hpp"

namespace autodens {

// All primes <= limit (limit >= 1; empty for limit < 2).  Segmented sieve,
// O(sqrt(limit) + segment) memory.
std::vector<std::uint64_t> sieve_primes(std::uint64_t limit);

// The first n primes.
std::vector<std::uint64_t> first_primes(std::size_t n);

struct EmpiricalEstimate {
    Along along;
    bool log_weighted = false;
    std::uint64_t terms = 0;
    std::map<std::string, double> freq;          // per output symbol
    std::map<std::string, std::uint64_t> counts;  // unweighted tallies
};

// Frequency of each output over the first `terms` members n_1 < n_2 < ... of
// the subsequence (naturals start at 1); log_weighted uses weights 1/l
// normalized by the harmonic sum.  Guards against uint64 overflow of n_l.
EmpiricalEstimate empirical_density(const Dfao& a, const Along& along,
                                    std::uint64_t terms, bool log_weighted);

struct ComparisonLine {
    std::string alpha;
    double exact_value = 0;   // natural value, or log-linear midpoint
    double radius = 0;        // enclosure radius for log-linear values
    double empirical = 0;
    bool pass = false;
};

struct Comparison {
    bool pass = false;
    double tolerance = 0;
    std::vector<ComparisonLine> lines;
};

// Natural mode: requires report.natural_exists; compares per-symbol exact vs
// empirical within tol.  Log mode: compares against enclosure midpoints with
// the enclosure radius added to the tolerance.  Throws DomainError when the
// estimate's weighting does not match the requested mode.
Comparison compare(const DensityReport& exact, const EmpiricalEstimate& emp, double tol,
                   bool log_mode);

}  // namespace autodens
