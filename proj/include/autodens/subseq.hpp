#pragma once
// Densities of automatic sequences along subsequences: arithmetic-progression
// averages, primes, residues coprime to a modulus, and squares; plus the
// transfer of component densities to logarithmic densities of the full
// sequence and the existence test for natural densities along a subsequence.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autodens/dfao.hpp"
#include "autodens/exact_density.hpp"
#include "autodens/mullner.hpp"

namespace autodens {

struct Along {
    enum Kind { Naturals, Primes, Squares, Coprime } kind = Naturals;
    long long modulus = 0;  // for Coprime

    static Along naturals() { return {Naturals, 0}; }
    static Along primes() { return {Primes, 0}; }
    static Along squares() { return {Squares, 0}; }
    static Along coprime(long long m) { return {Coprime, m}; }
    std::string describe() const;
};

// Parses "naturals" | "primes" | "squares" | "coprime=M".
Along parse_along(const std::string& s);

// Density of squares hitting residue m mod h: c(m; h) = lim (1/N) #{n < N :
// n^2 = m mod h} as an exact rational.  Multiplicative over prime powers; each
// prime power resolved by valuation analysis and Hensel lifting.
Rat qr_count(long long m, long long h);

// Average over r in R of the natural density table of n -> b(M2 n + r),
// obtained from one M2-fold compression of b.  R must be nonempty; entries
// must lie in [0, M2).
std::map<std::string, Rat> ap_average_density(const Dfao& b, long long M2,
                                              const std::vector<long long>& R);

// Density table of b along primes for a primitive, zero-normalized b:
// the average over residues coprime to K'*d where K' is the base of the
// internally (possibly re-based) group factorization and d its maximal
// modulus.
std::map<std::string, Rat> prime_density(const Dfao& b);

// Density table of b along integers coprime to M (M >= 1):
// average over residues r coprime to M modulo lcm(M, K'*d).
std::map<std::string, Rat> coprime_density(const Dfao& b, long long M);

// Density table of b along squares, for prime-power bases only.
std::map<std::string, Rat> square_density(const Dfao& b);

// Intermediates of square_density, for inspection and tests.
struct SquareDensityDetail {
    long long p = 2;                        // prime of the base
    std::map<std::string, Rat> s_part;      // density of s(n^2) per s-output symbol
    std::map<int, Rat> t_part;              // density of T(n^2) per G index
    std::map<std::string, Rat> total;
    MullnerData data;
};
SquareDensityDetail square_density_detail(const Dfao& b);

// Density table of a primitive, zero-normalized automaton along `along`.
std::map<std::string, Rat> component_density(const Dfao& b, const Along& along);

// --- whole-sequence reports --------------------------------------------------

struct DensityWitness {
    int comp_a = 0, comp_b = 0;  // 1-based component indices
    std::string alpha;
    Rat value_a, value_b;
};

struct DensityReport {
    Along along;
    // Logarithmic densities always exist:
    std::map<std::string, LogLin> log_table;
    // Natural density along the subsequence exists iff all component tables
    // agree exactly:
    bool natural_exists = false;
    std::map<std::string, Rat> natural_table;  // meaningful iff natural_exists
    std::optional<DensityWitness> witness;
    // Per-component breakdown: component index -> its exact density table.
    std::vector<std::map<std::string, Rat>> component_tables;
    std::vector<LogLin> component_logdensities;
    std::vector<std::string> notes;
};

// Full pipeline: decompose, per-component density along `along`, logarithmic
// transfer with enclosure arithmetic, and the exact-agreement existence test.
DensityReport density_along(const Dfao& a, const Along& along,
                            const Rat& eps = default_logdensity_eps());

}  // namespace autodens
