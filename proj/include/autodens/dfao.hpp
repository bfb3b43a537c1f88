#pragma once
// Deterministic finite automata with output (Moore machines) over digit
// alphabets {0..k-1}, reading most-significant digit first.  The empty word is
// the canonical expansion of 0, so the value at 0 is the initial state's
// output.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "autodens/rational.hpp"

namespace autodens {

struct Dfao {
    int base = 2;
    std::vector<std::string> names;        // state identifiers, declaration order
    std::vector<std::string> out;          // output symbol per state
    std::vector<std::vector<int>> delta;   // delta[state][digit]
    int initial = 0;

    int size() const { return static_cast<int>(names.size()); }
    int step(int q, int digit) const { return delta[q][digit]; }
};

// Throws DomainError if sizes/ranges are inconsistent.
void check_dfao(const Dfao& a);

// --- text format -----------------------------------------------------------
//
//   # comment
//   base 2
//   states a b c d
//   initial a
//   output a=1 b=1 c=0 d=0
//   delta a 0 a
//   ...
//
// Exactly one transition per (state, digit) pair is required.

Dfao parse_dfao(std::istream& in);
Dfao parse_dfao_string(const std::string& text);
Dfao load_dfao(const std::string& path);
std::string serialize_dfao(const Dfao& a);

// Most-significant-first digits of n; empty for n = 0.
std::vector<int> digits_msb(unsigned long long n, int base);

int walk(const Dfao& a, int q, const std::vector<int>& word);
int state_at(const Dfao& a, unsigned long long n);
std::string evaluate(const Dfao& a, unsigned long long n);

// Moore minimization restricted to reachable states.  Initial partition by
// output symbol; merged-state names/positions follow the smallest original
// declaration index so results are reproducible.  When class_of is non-null it
// receives, for every original state, the index of its class in the result
// (or -1 for unreachable states).
Dfao minimize(const Dfao& a, std::vector<int>* class_of = nullptr);

// Reachable product of two automata over the same base; the output of a pair
// state is combine(out_a, out_b).
Dfao product(const Dfao& a, const Dfao& b,
             const std::function<std::string(const std::string&, const std::string&)>& combine);

// True iff both automata compute the same sequence (same base required),
// decided exactly by walking all reachable state pairs.
bool same_sequence(const Dfao& a, const Dfao& b);

// Ensures delta(initial, 0) = initial by adding a fresh initial state
// replicating the old initial's behaviour except for the 0-loop; identity when
// the automaton already has the loop.
Dfao normalize_zero(const Dfao& a);

// Reinterprets the automaton in base k^ell (same states; each new digit acts
// as its ell-digit, zero-padded base-k expansion).  Requires
// delta(initial, 0) = initial so that padding is harmless.
Dfao power_base(const Dfao& a, int ell);

// --- arithmetic-progression compression -------------------------------------
//
// States are m-tuples (a(nm), ..., a(nm+m-1)) of states of the zero-normalized
// input; the digit-j successor of a tuple is the subword at positions
// jm..jm+m-1 of the concatenation of the k children words of the tuple's
// members.  Output symbols are "<o1,...,om>".

struct Compression {
    Dfao aut;                               // the tuple automaton
    Dfao source;                            // zero-normalized input it was built from
    long long m = 1;
    std::vector<std::vector<int>> tuples;   // per tuple-state: member source states

    // Output symbol of coordinate r of a tuple state.
    std::string coord_out(int tuple_state, long long r) const {
        return source.out[tuples[tuple_state][static_cast<size_t>(r)]];
    }
};

Compression compress(const Dfao& a, long long m);

// Automaton for n -> a(nm + r): the compression automaton with coordinate-r
// outputs.
Dfao project(const Compression& c, long long r);

// Both pieces at once, as the public operation.
struct ApCompression {
    Compression compression;
    Dfao projection;
};
ApCompression compress_ap(const Dfao& a, long long m, long long r);

// --- base change p^alpha -> p ----------------------------------------------
//
// For an automaton over base k = p^alpha (p prime), returns a minimized
// automaton over base p computing the same sequence.  Built by closing the
// p-kernel (subsequences n -> a(p^e n + r) obtained by iterated compression
// projections, deduplicated by exact sequence equality), reading it
// least-significant-digit first, and reversing via the finite closure of
// kernel-state -> output maps.  The result is validated internally by an exact
// equality product against the input after power_base re-expression.
Dfao rebase_prime_power(const Dfao& a);

// Helper shared with subseq: smallest prime factor decomposition k = p^alpha;
// returns {p, alpha} or {0, 0} if k is not a prime power.
std::pair<long long, int> prime_power_split(long long k);

}  // namespace autodens
