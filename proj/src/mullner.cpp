#include "autodens/mullner.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "autodens/exact_density.hpp"
#include "autodens/structure.hpp"

namespace autodens {

Perm perm_identity(int n) {
    Perm p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    return p;
}

Perm perm_compose(const Perm& f, const Perm& g) {
    Perm r(g.size());
    for (size_t i = 0; i < g.size(); ++i) r[i] = f[g[i]];
    return r;
}

Perm perm_inverse(const Perm& f) {
    Perm r(f.size());
    for (size_t i = 0; i < f.size(); ++i) r[f[i]] = static_cast<int>(i);
    return r;
}

std::string perm_cycle_notation(const Perm& f) {
    std::string s;
    std::vector<char> seen(f.size(), 0);
    for (size_t i = 0; i < f.size(); ++i) {
        if (seen[i] || f[i] == static_cast<int>(i)) continue;
        s += '(';
        size_t j = i;
        bool first = true;
        while (!seen[j]) {
            seen[j] = 1;
            if (!first) s += ' ';
            s += std::to_string(j + 1);
            first = false;
            j = f[j];
        }
        s += ')';
    }
    return s.empty() ? "id" : s;
}

std::vector<Perm> group_closure(int n, const std::vector<Perm>& gens) {
    for (auto& g : gens)
        if (static_cast<int>(g.size()) != n) throw DomainError("generator degree mismatch");
    std::vector<Perm> elems{perm_identity(n)};
    std::map<Perm, int> index{{elems[0], 0}};
    for (size_t i = 0; i < elems.size(); ++i)
        for (auto& g : gens) {
            Perm h = perm_compose(g, elems[i]);
            if (index.try_emplace(h, static_cast<int>(elems.size())).second) elems.push_back(h);
        }
    return elems;
}

std::string MullnerData::f_value(int s_state, const Perm& pi) const {
    return b.out[tuple_of[s_state][pi[i0]]];
}

int MullnerData::g_index(const Perm& p) const {
    for (size_t i = 0; i < G.size(); ++i)
        if (G[i] == p) return static_cast<int>(i);
    return -1;
}

namespace {

// Exhaustive closure of images of the full state set, recording parents for
// word reconstruction (BFS: length, then digit).
struct Closure {
    std::vector<std::vector<int>> sets;
    std::vector<int> parent, digit;
};

Closure full_image_closure(const Dfao& a) {
    long long budget = state_budget();
    Closure c;
    std::map<std::vector<int>, int> idx;
    auto intern = [&](std::vector<int> s, int par, int dig) {
        auto [it, fresh] = idx.try_emplace(s, static_cast<int>(c.sets.size()));
        if (fresh) {
            if (static_cast<long long>(c.sets.size()) + 1 > budget)
                throw BudgetError("image closure exceeds state budget");
            c.sets.push_back(std::move(s));
            c.parent.push_back(par);
            c.digit.push_back(dig);
        }
        return it->second;
    };
    std::vector<int> all(a.size());
    for (int q = 0; q < a.size(); ++q) all[q] = q;
    intern(std::move(all), -1, -1);
    for (size_t i = 0; i < c.sets.size(); ++i)
        for (int w = 0; w < a.base; ++w) {
            std::set<int> img;
            for (int q : c.sets[i]) img.insert(a.delta[q][w]);
            intern(std::vector<int>(img.begin(), img.end()), static_cast<int>(i), w);
        }
    return c;
}

std::vector<int> closure_word(const Closure& c, int i) {
    std::vector<int> w;
    while (c.parent[i] != -1) {
        w.push_back(c.digit[i]);
        i = c.parent[i];
    }
    std::reverse(w.begin(), w.end());
    return w;
}

// Shortest word from state q to state target (BFS over states).
std::vector<int> steering_word(const Dfao& a, int q, int target) {
    std::vector<int> par(a.size(), -2), pdig(a.size(), -1);
    std::deque<int> bfs{q};
    par[q] = -1;
    while (!bfs.empty()) {
        int s = bfs.front();
        bfs.pop_front();
        if (s == target) {
            std::vector<int> w;
            while (par[s] != -1) {
                w.push_back(pdig[s]);
                s = par[s];
            }
            std::reverse(w.begin(), w.end());
            return w;
        }
        for (int d = 0; d < a.base; ++d) {
            int t = a.delta[s][d];
            if (par[t] == -2) {
                par[t] = s;
                pdig[t] = d;
                bfs.push_back(t);
            }
        }
    }
    throw DomainError("automaton is not strongly connected");
}

// The 0-fixed anchor set: from the minimal image reached by the minimizing
// word, steer so the image contains the initial state, then iterate digit 0
// until the set recurs; a set on the 0-cycle consists of 0-periodic states,
// which are all 0-fixed once the base has been adjusted.
std::optional<std::vector<int>> find_anchor(const Dfao& b) {
    Closure cl = full_image_closure(b);
    size_t c = b.names.size();
    int first_min = -1;
    for (size_t i = 0; i < cl.sets.size(); ++i)
        if (cl.sets[i].size() < c) {
            c = cl.sets[i].size();
            first_min = static_cast<int>(i);
        }
    for (size_t i = 0; i < cl.sets.size(); ++i)
        if (cl.sets[i].size() == c) {
            first_min = static_cast<int>(i);
            break;
        }
    std::vector<int> w0 = closure_word(cl, first_min);
    std::vector<int> S1;
    {
        std::set<int> img;
        std::vector<int> all(b.size());
        for (int q = 0; q < b.size(); ++q) all[q] = q;
        for (int q : all) img.insert(walk(b, q, w0));
        S1.assign(img.begin(), img.end());
    }
    std::vector<int> u = steering_word(b, S1[0], b.initial);
    std::set<int> T;
    for (int q : S1) T.insert(walk(b, q, u));
    if (T.size() != S1.size()) throw Error("internal: digit action not injective on a minimal image");
    if (!T.count(b.initial)) throw Error("internal: steered minimal image misses the initial state");

    // Iterate digit 0 to a set on the 0-cycle.
    std::map<std::vector<int>, int> pos;
    std::vector<std::vector<int>> seq;
    std::vector<int> cur(T.begin(), T.end());
    while (!pos.count(cur)) {
        pos[cur] = static_cast<int>(seq.size());
        seq.push_back(cur);
        std::set<int> nxt;
        for (int q : cur) nxt.insert(b.delta[q][0]);
        cur.assign(nxt.begin(), nxt.end());
    }
    const std::vector<int>& anchor = seq[pos[cur]];  // first set on the cycle
    for (int q : anchor)
        if (b.delta[q][0] != q) return std::nullopt;  // caller must rebase
    return anchor;
}

}  // namespace

MullnerData mullner_decompose(const Dfao& b0) {
    check_dfao(b0);
    if (b0.delta[b0.initial][0] != b0.initial)
        throw DomainError("factorization requires delta(initial, 0) = initial");
    if (!is_primitive(b0)) throw DomainError("factorization requires a primitive automaton");

    MullnerData md;
    md.b = b0;
    md.rebase_exponent = 1;
    auto anchor_opt = find_anchor(md.b);
    if (!anchor_opt) {
        // Some anchor candidate states sit on nontrivial 0-cycles; pass to the
        // base power that fixes every 0-periodic state and retry.
        md.rebase_exponent = zero_cycle_exponent(md.b);
        md.b = power_base(md.b, md.rebase_exponent);
        anchor_opt = find_anchor(md.b);
        if (!anchor_opt) throw Error("internal: anchor not 0-fixed after base adjustment");
    }
    md.K = md.b.base;
    const Dfao& b = md.b;

    std::vector<int> anchor_set = *anchor_opt;  // sorted
    md.c = static_cast<int>(anchor_set.size());
    // Canonical anchor tuple: the initial state first, the rest in state order.
    md.anchor.clear();
    md.anchor.push_back(b.initial);
    for (int q : anchor_set)
        if (q != b.initial) md.anchor.push_back(q);
    md.i0 = 0;

    // BFS over reachable image sets: first visit pins the canonical tuple
    // C(S); later visits record the permutation aligning the componentwise
    // image with it.
    long long budget = state_budget();
    std::map<std::vector<int>, int> set_index;
    auto set_name = [&](const std::vector<int>& s) {
        std::string n = "{";
        for (size_t i = 0; i < s.size(); ++i) {
            if (i) n += ',';
            n += b.names[s[i]];
        }
        n += '}';
        return n;
    };
    md.s_aut.base = static_cast<int>(md.K);
    auto intern = [&](const std::vector<int>& tuple) {
        std::vector<int> key = tuple;
        std::sort(key.begin(), key.end());
        auto [it, fresh] = set_index.try_emplace(key, static_cast<int>(md.tuple_of.size()));
        if (fresh) {
            if (static_cast<long long>(md.tuple_of.size()) + 1 > budget)
                throw BudgetError("synchronizing-part closure exceeds state budget");
            md.tuple_of.push_back(tuple);
            md.set_of.push_back(key);
            md.s_aut.names.push_back(set_name(key));
            md.s_aut.out.push_back(set_name(key));
            md.s_aut.delta.emplace_back(md.s_aut.base, -1);
            md.g.emplace_back();
            md.g.back().resize(md.s_aut.base);
        }
        return it->second;
    };
    md.s_aut.initial = intern(md.anchor);
    for (size_t s = 0; s < md.tuple_of.size(); ++s)
        for (int w = 0; w < md.s_aut.base; ++w) {
            std::vector<int> img(md.c);
            for (int i = 0; i < md.c; ++i) img[i] = b.delta[md.tuple_of[s][i]][w];
            {
                std::set<int> dedup(img.begin(), img.end());
                if (static_cast<int>(dedup.size()) != md.c)
                    throw Error("internal: digit action not injective on minimal images");
            }
            int t = intern(img);
            md.s_aut.delta[s][w] = t;
            // Permutation with delta(C(S)[i], w) = C(S')[g[i]].
            Perm g(md.c);
            for (int i = 0; i < md.c; ++i) {
                int p = -1;
                for (int j = 0; j < md.c; ++j)
                    if (md.tuple_of[t][j] == img[i]) {
                        p = j;
                        break;
                    }
                g[i] = p;
            }
            md.g[s][w] = std::move(g);
        }
    check_dfao(md.s_aut);

    std::vector<Perm> gens;
    for (auto& row : md.g)
        for (auto& g : row)
            if (std::find(gens.begin(), gens.end(), g) == gens.end()) gens.push_back(g);
    md.G = group_closure(md.c, gens);

    // Maximal modulus d | |G| with gcd(d, K) = 1 admitting the digit-counting
    // character; d = 1 always works.
    long long n = static_cast<long long>(md.G.size());
    std::vector<long long> divisors;
    for (long long dd = 1; dd <= n; ++dd)
        if (n % dd == 0) divisors.push_back(dd);
    std::sort(divisors.rbegin(), divisors.rend());
    md.d = 1;
    md.phi.assign(md.G.size(), 0);
    for (long long dd : divisors) {
        if (gcdll(dd, md.K) != 1) continue;
        auto phi = try_modulus(md, dd);
        if (phi) {
            md.d = dd;
            md.phi = *phi;
            break;
        }
    }

    // The factorization must reproduce the sequence exactly.
    Dfao recon = reconstruction_automaton(md);
    if (!same_sequence(recon, b)) throw Error("internal: factorization failed to reconstruct");
    return md;
}

std::optional<std::vector<int>> try_modulus(const MullnerData& md, long long dd) {
    if (dd == 1) return std::vector<int>(md.G.size(), 0);
    long long K = md.K;
    int ns = static_cast<int>(md.tuple_of.size());
    // Reachable (s-state, n mod dd) pairs; each (digit, s-state) must see a
    // constant value of (n(K-1)+j) mod dd.
    std::vector<std::vector<int>> req(ns, std::vector<int>(static_cast<size_t>(K), -1));
    std::set<std::pair<int, long long>> seen;
    std::deque<std::pair<int, long long>> bfs;
    auto push = [&](int s, long long r) {
        if (seen.emplace(s, r).second) bfs.emplace_back(s, r);
    };
    push(md.s_aut.initial, 0);
    while (!bfs.empty()) {
        auto [s, r] = bfs.front();
        bfs.pop_front();
        for (int j = 0; j < K; ++j) {
            int v = static_cast<int>((r * ((K - 1) % dd) + j) % dd);
            int& slot = req[s][j];
            if (slot == -1)
                slot = v;
            else if (slot != v)
                return std::nullopt;
            push(md.s_aut.delta[s][j], (r * (K % dd) + j) % dd);
        }
    }
    // Seed permutation labels and close over the group by left multiplication.
    std::map<Perm, int> label;
    for (int s = 0; s < ns; ++s)
        for (int j = 0; j < K; ++j) {
            if (req[s][j] == -1) continue;
            auto [it, fresh] = label.try_emplace(md.g[s][j], req[s][j]);
            if (!fresh && it->second != req[s][j]) return std::nullopt;
        }
    std::vector<int> phi(md.G.size(), -1);
    std::map<Perm, int> gidx;
    for (size_t i = 0; i < md.G.size(); ++i) gidx[md.G[i]] = static_cast<int>(i);
    auto id_it = gidx.find(perm_identity(md.c));
    phi[id_it->second] = 0;
    std::deque<int> q{id_it->second};
    while (!q.empty()) {
        int h = q.front();
        q.pop_front();
        for (auto& [p, v] : label) {
            Perm prod = perm_compose(p, md.G[h]);
            int t = gidx.at(prod);
            int want = static_cast<int>((v + phi[h]) % dd);
            if (phi[t] == -1) {
                phi[t] = want;
                q.push_back(t);
            } else if (phi[t] != want) {
                return std::nullopt;
            }
        }
    }
    for (int v : phi)
        if (v == -1) return std::nullopt;  // seeds fail to generate G
    // Homomorphism and balance checks.
    for (size_t x = 0; x < md.G.size(); ++x)
        for (size_t y = 0; y < md.G.size(); ++y) {
            int t = gidx.at(perm_compose(md.G[x], md.G[y]));
            if (phi[t] != (phi[x] + phi[y]) % dd) return std::nullopt;
        }
    std::vector<long long> count(static_cast<size_t>(dd), 0);
    for (int v : phi) ++count[v];
    for (long long c : count)
        if (c != static_cast<long long>(md.G.size()) / dd) return std::nullopt;
    return phi;
}

Dfao reconstruction_automaton(const MullnerData& md) {
    long long budget = state_budget();
    Dfao r;
    r.base = static_cast<int>(md.K);
    std::map<std::pair<int, Perm>, int> idx;
    std::vector<std::pair<int, Perm>> states;
    auto intern = [&](int s, Perm pi) {
        auto [it, fresh] = idx.try_emplace({s, pi}, static_cast<int>(states.size()));
        if (fresh) {
            if (static_cast<long long>(states.size()) + 1 > budget)
                throw BudgetError("reconstruction automaton exceeds state budget");
            r.names.push_back("(" + std::to_string(s) + "," + perm_cycle_notation(pi) + ")");
            r.out.push_back(md.f_value(s, pi));
            r.delta.emplace_back(r.base, -1);
            states.emplace_back(s, std::move(pi));
        }
        return it->second;
    };
    r.initial = intern(md.s_aut.initial, perm_identity(md.c));
    for (size_t i = 0; i < states.size(); ++i) {
        auto [s, pi] = states[i];
        for (int j = 0; j < r.base; ++j)
            r.delta[i][j] = intern(md.s_aut.delta[s][j], perm_compose(md.g[s][j], pi));
    }
    check_dfao(r);
    return r;
}

}  // namespace autodens
