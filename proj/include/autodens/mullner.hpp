#pragma once
// Factorization of a primitive, zero-normalized automaton into a synchronizing
// part and a group extension: a(n) = f(s(n), T(n)) where s is computed by an
// automaton on the minimal-image family and T is a permutation cocycle with
// values in a finite group G.  Also: the largest modulus d (coprime to the
// base) such that a group character phi maps T(n) to n mod d.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autodens/dfao.hpp"
#include "autodens/rational.hpp"

namespace autodens {

using Perm = std::vector<int>;  // images: p[i] = image of i

Perm perm_identity(int n);
Perm perm_compose(const Perm& f, const Perm& g);  // (f o g)(i) = f[g[i]]
Perm perm_inverse(const Perm& f);
std::string perm_cycle_notation(const Perm& f);   // "(0 1)(2 3)" style, 1-based points

// Closure of the generated subgroup of Sym(n); identity first, then BFS
// discovery order (deterministic).
std::vector<Perm> group_closure(int n, const std::vector<Perm>& gens);

struct MullnerData {
    Dfao b;             // the automaton the factorization reconstructs (possibly rebased)
    long long K = 2;    // base of b
    int rebase_exponent = 1;  // power_base exponent applied internally (1 = none)

    int c = 1;                     // column number
    std::vector<int> anchor;       // canonical tuple of the anchor minimal image
    int i0 = 0;                    // index of the initial state inside anchor

    Dfao s_aut;                          // synchronizing part; outputs name the sets
    std::vector<std::vector<int>> set_of;    // s-state -> sorted set of b-states
    std::vector<std::vector<int>> tuple_of;  // s-state -> canonical tuple C(S)
    std::vector<std::vector<Perm>> g;        // g[s_state][digit], in Sym(c)

    std::vector<Perm> G;     // closure of all g[s][j]
    long long d = 1;         // maximal modulus coprime to K
    std::vector<int> phi;    // phi[G index] in Z/d
    // f(S, pi) = output of C(S)[pi(i0)]
    std::string f_value(int s_state, const Perm& pi) const;

    int g_index(const Perm& p) const;  // index in G, -1 if absent
};

// Requires a primitive automaton with delta(initial, 0) = initial.  Aborts
// with DomainError if the exact reconstruction check fails (never returns
// invalid data).
MullnerData mullner_decompose(const Dfao& b);

// The pair-graph test for a candidate modulus described below; exposed for
// tests.  Returns the character phi (indexed like data.G) if the candidate
// works: every reachable (s-state, n mod dd) pair must see a constant value of
// (n(K-1)+j) mod dd per (digit j, s-state), and labelling the generated group
// by those values must extend consistently.
std::optional<std::vector<int>> try_modulus(const MullnerData& data, long long dd);

// Automaton with states (s-state, pi) evaluating n -> f(s(n), T(n)); the
// reconstruction check is an exact equality product of this against b.
Dfao reconstruction_automaton(const MullnerData& data);

}  // namespace autodens
