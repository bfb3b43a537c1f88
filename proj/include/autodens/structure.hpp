#pragma once
// Structural analysis of automata: strongly connected components, column
// numbers and minimal-image families, the base-change exponent, the
// decomposition into primitive component automata with arithmetic membership
// sets, and generator enumeration for those sets.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autodens/dfao.hpp"
#include "autodens/rational.hpp"

namespace autodens {

struct SccInfo {
    std::vector<int> states;  // ascending state ids
    bool final_component = false;  // no transition leaves the component
};

struct FinalComponentInfo {
    std::vector<int> states;
    int column_number = 0;                    // min |delta(F, w)| over all words
    std::vector<std::vector<int>> min_images; // all minimal images, discovery order
    std::vector<int> minimizing_word;         // BFS-first word reaching a minimal image
    bool strongly_connected_family = true;    // the minimal images form one orbit
    bool primitive = false;                   // component strongly connected + a self-loop
};

struct StructureReport {
    std::vector<SccInfo> sccs;               // ordered by smallest state id
    std::vector<FinalComponentInfo> finals;  // same order restricted to finals
    int ell = 1;                             // exponent the decomposition would use
    bool zero_normalized = false;            // delta(initial,0) == initial already
};

std::vector<SccInfo> strongly_connected_components(const Dfao& a);

StructureReport analyze(const Dfao& a);

// lcm of the cycle lengths of the digit-0 functional graph.
int zero_cycle_exponent(const Dfao& a);

// One primitive piece of a decomposition: the component automaton b1 started
// at its anchor, plus where to find its membership set in the shared
// membership automaton.
struct DecompComponent {
    int final_index = 0;   // which final component of the rebased automaton
    int anchor = 0;        // anchor state id in the rebased automaton
    Dfao b;                // restriction of the final component, initial = anchor
};

// decompose(a): after minimize(normalize_zero(a)) and a base change to
// K = k^ell (which makes every 0-periodic state 0-fixed, then re-minimizing),
// every n is classified by whether reading (n)_K from the initial state and
// from some anchor q0_(i,j) leads to the same state.  The membership automaton
// is the product tracking the initial-state path together with every anchor
// path; its outputs are "0" (residual) or the 1-based component index.
struct Decomposition {
    Dfao rebased;        // minimal, zero-normalized, base K
    int ell = 1;
    long long K = 2;
    std::vector<FinalComponentInfo> finals;   // for the rebased automaton
    std::vector<std::vector<int>> anchor_sets;  // per final: the 0-fixed minimal image
    std::vector<DecompComponent> components;
    Dfao membership;     // outputs: "0" or "1".."s"
    std::vector<int> member_output;  // per membership state: 0 residual, else comp index

    // 0/1 indicator automaton of component comp (1-based).
    Dfao indicator(int comp) const;
    Dfao residual_indicator() const;
};

Decomposition decompose(const Dfao& a);

// --- generators of an arithmetic membership set ------------------------------
//
// M is given by a 0/1 indicator automaton over base K.  S is the set of
// members none of whose strict digit-prefixes is a member; every member
// factors uniquely as a generator followed by a member-preserving suffix, and
// the logarithmic density of M is sum over S of ln(1+1/m)/ln K.

struct GeneratorReport {
    long long K = 2;
    int depth = 0;                        // Lambda
    bool zero_in_s = false;               // 0 in S iff indicator accepts 0
    std::vector<unsigned long long> gens; // S intersected with [1, K^Lambda), ascending
    std::vector<Int> s_counts;            // per length lam=1..Lambda: |S with lam digits|
    std::vector<Int> pending_counts;      // per length: words that could still extend to S
    bool finite = false;                  // pending count reached exactly zero
    int finite_depth = 0;                 // first length with zero pending words (if finite)
};

GeneratorReport generators(const Dfao& indicator, int depth);

// Exact per-length generator/pending counts via the transfer matrix, without
// enumeration (used to bound tails); index 0 corresponds to length 1.
struct GeneratorCounts {
    std::vector<Int> s_counts;
    std::vector<Int> pending_counts;
};
GeneratorCounts generator_counts(const Dfao& indicator, int depth);

// Certified upper bound rho on the growth of the residual's pending words:
// returns an exact rational rho with (number of length-lam residual-compatible
// words) <= C * rho^lam and rho < K, or throws DomainError when certification
// fails within the iteration cap.  Uses the Collatz-Wielandt upper bound
// max_q (Tv)_q / v_q on the counting matrix T restricted to live states.
Rat residual_growth_bound(const Dfao& indicator_residual);

}  // namespace autodens
