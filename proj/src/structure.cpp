#include "autodens/structure.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "autodens/linalg.hpp"

namespace autodens {

// --- strongly connected components (iterative Tarjan) -------------------------

std::vector<SccInfo> strongly_connected_components(const Dfao& a) {
    int n = a.size();
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0, ncomp = 0;

    struct Frame {
        int q;
        int digit;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.digit < a.base) {
                int t = a.delta[f.q][f.digit++];
                if (index[t] == -1) {
                    index[t] = low[t] = next_index++;
                    stack.push_back(t);
                    on_stack[t] = 1;
                    call.push_back({t, 0});
                } else if (on_stack[t]) {
                    low[f.q] = std::min(low[f.q], index[t]);
                }
            } else {
                if (low[f.q] == index[f.q]) {
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = ncomp;
                        if (w == f.q) break;
                    }
                    ++ncomp;
                }
                int q = f.q;
                call.pop_back();
                if (!call.empty()) low[call.back().q] = std::min(low[call.back().q], low[q]);
            }
        }
    }

    std::vector<SccInfo> raw(ncomp);
    for (int q = 0; q < n; ++q) raw[comp[q]].states.push_back(q);
    for (auto& c : raw) {
        c.final_component = true;
        for (int q : c.states)
            for (int w = 0; w < a.base; ++w)
                if (comp[a.delta[q][w]] != comp[q]) c.final_component = false;
    }
    std::sort(raw.begin(), raw.end(),
              [](const SccInfo& x, const SccInfo& y) { return x.states[0] < y.states[0]; });
    return raw;
}

int zero_cycle_exponent(const Dfao& a) {
    int n = a.size();
    // Cycle lengths of the digit-0 functional graph.
    std::vector<int> seen(n, -1);
    long long ell = 1;
    for (int s = 0; s < n; ++s) {
        std::map<int, int> pos;
        int q = s, step = 0;
        while (seen[q] == -1 && !pos.count(q)) {
            pos[q] = step++;
            q = a.delta[q][0];
        }
        if (pos.count(q)) {
            int len = step - pos[q];
            ell = lcmll(ell, len);
            if (ell > 1'000'000) throw DomainError("zero-cycle exponent is unreasonably large");
        }
        for (auto& [st, _] : pos) seen[st] = 1;
    }
    return static_cast<int>(ell);
}

// --- subset closure of a final component --------------------------------------

namespace {

struct ClosureNode {
    std::vector<int> set;  // sorted
    int parent = -1;
    int digit = -1;
};

// Exhaustive BFS over images delta(F, w); deterministic (length then digit).
std::vector<ClosureNode> image_closure(const Dfao& a, const std::vector<int>& F) {
    long long budget = state_budget();
    std::vector<ClosureNode> nodes;
    std::map<std::vector<int>, int> idx;
    auto intern = [&](std::vector<int> s, int parent, int digit) {
        auto [it, fresh] = idx.try_emplace(s, static_cast<int>(nodes.size()));
        if (fresh) {
            if (static_cast<long long>(nodes.size()) + 1 > budget)
                throw BudgetError("subset closure exceeds state budget");
            nodes.push_back({std::move(s), parent, digit});
        }
        return it->second;
    };
    std::vector<int> start = F;
    std::sort(start.begin(), start.end());
    intern(std::move(start), -1, -1);
    for (size_t i = 0; i < nodes.size(); ++i)
        for (int w = 0; w < a.base; ++w) {
            std::set<int> img;
            for (int q : nodes[i].set) img.insert(a.delta[q][w]);
            intern(std::vector<int>(img.begin(), img.end()), static_cast<int>(i), w);
        }
    return nodes;
}

std::vector<int> word_of(const std::vector<ClosureNode>& nodes, int i) {
    std::vector<int> w;
    while (nodes[i].parent != -1) {
        w.push_back(nodes[i].digit);
        i = nodes[i].parent;
    }
    std::reverse(w.begin(), w.end());
    return w;
}

FinalComponentInfo analyze_final(const Dfao& a, const std::vector<int>& F) {
    FinalComponentInfo info;
    info.states = F;
    std::sort(info.states.begin(), info.states.end());

    auto nodes = image_closure(a, info.states);
    size_t c = info.states.size();
    for (auto& nd : nodes) c = std::min(c, nd.set.size());
    info.column_number = static_cast<int>(c);
    int first_min = -1;
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].set.size() == c) {
            info.min_images.push_back(nodes[i].set);
            if (first_min == -1) first_min = static_cast<int>(i);
        }
    info.minimizing_word = word_of(nodes, first_min);

    // The minimal images always form a closed sub-digraph; check one orbit.
    {
        std::map<std::vector<int>, int> mi;
        for (size_t i = 0; i < info.min_images.size(); ++i) mi[info.min_images[i]] = (int)i;
        std::vector<std::set<int>> adj(info.min_images.size());
        for (size_t i = 0; i < info.min_images.size(); ++i)
            for (int w = 0; w < a.base; ++w) {
                std::set<int> img;
                for (int q : info.min_images[i]) img.insert(a.delta[q][w]);
                std::vector<int> v(img.begin(), img.end());
                auto it = mi.find(v);
                if (it != mi.end()) adj[i].insert(it->second);
            }
        // Strong connectivity of the family graph by double BFS from node 0.
        auto reach_all = [&](const std::vector<std::set<int>>& g) {
            std::vector<char> seen(g.size(), 0);
            std::deque<int> bfs{0};
            seen[0] = 1;
            size_t cnt = 1;
            while (!bfs.empty()) {
                int x = bfs.front();
                bfs.pop_front();
                for (int y : g[x])
                    if (!seen[y]) {
                        seen[y] = 1;
                        ++cnt;
                        bfs.push_back(y);
                    }
            }
            return cnt == g.size();
        };
        std::vector<std::set<int>> radj(info.min_images.size());
        for (size_t i = 0; i < adj.size(); ++i)
            for (int y : adj[i]) radj[y].insert(static_cast<int>(i));
        info.strongly_connected_family = reach_all(adj) && reach_all(radj);
    }

    bool loop = false;
    for (int q : info.states)
        for (int w = 0; w < a.base; ++w)
            if (a.delta[q][w] == q) loop = true;
    info.primitive = loop;  // the component itself is strongly connected by construction
    return info;
}

}  // namespace

StructureReport analyze(const Dfao& a) {
    check_dfao(a);
    StructureReport r;
    r.sccs = strongly_connected_components(a);
    for (auto& c : r.sccs)
        if (c.final_component) r.finals.push_back(analyze_final(a, c.states));
    r.zero_normalized = (a.delta[a.initial][0] == a.initial);
    r.ell = zero_cycle_exponent(minimize(normalize_zero(a)));
    return r;
}

// --- decomposition -------------------------------------------------------------

Dfao Decomposition::indicator(int comp) const {
    Dfao d = membership;
    for (int q = 0; q < d.size(); ++q) d.out[q] = (member_output[q] == comp) ? "1" : "0";
    return d;
}

Dfao Decomposition::residual_indicator() const {
    Dfao d = membership;
    for (int q = 0; q < d.size(); ++q) d.out[q] = (member_output[q] == 0) ? "1" : "0";
    return d;
}

Decomposition decompose(const Dfao& a0) {
    check_dfao(a0);
    Decomposition dec;
    Dfao a1 = minimize(normalize_zero(a0));
    dec.ell = zero_cycle_exponent(a1);
    // After raising to base k^ell every 0-periodic state is 0-fixed; the
    // re-minimization keeps that property (quotient classes of fixed states
    // absorb all 0-cycles) and restores minimality in the new base.
    dec.rebased = dec.ell > 1 ? minimize(power_base(a1, dec.ell)) : a1;
    dec.K = dec.rebased.base;
    const Dfao& A = dec.rebased;

    auto sccs = strongly_connected_components(A);
    for (auto& c : sccs) {
        if (!c.final_component) continue;
        FinalComponentInfo info = analyze_final(A, c.states);

        // Anchor set: BFS-first minimal image fixed elementwise by digit 0.
        std::vector<int> anchors;
        for (auto& img : info.min_images) {
            bool fixed = true;
            for (int q : img)
                if (A.delta[q][0] != q) fixed = false;
            if (fixed) {
                anchors = img;
                break;
            }
        }
        if (anchors.empty())
            throw Error("internal: no 0-fixed minimal image in a final component");

        int fin_idx = static_cast<int>(dec.finals.size());
        dec.finals.push_back(std::move(info));
        dec.anchor_sets.push_back(anchors);
        for (int q0ij : anchors) {
            DecompComponent comp;
            comp.final_index = fin_idx;
            comp.anchor = q0ij;
            // Restriction of the (closed) final component, initial at the anchor.
            const auto& F = dec.finals[fin_idx].states;
            std::map<int, int> rename;
            for (size_t i = 0; i < F.size(); ++i) rename[F[i]] = static_cast<int>(i);
            comp.b.base = A.base;
            for (int q : F) {
                comp.b.names.push_back(A.names[q]);
                comp.b.out.push_back(A.out[q]);
                std::vector<int> row(A.base);
                for (int w = 0; w < A.base; ++w) row[w] = rename.at(A.delta[q][w]);
                comp.b.delta.push_back(std::move(row));
            }
            comp.b.initial = rename.at(q0ij);
            check_dfao(comp.b);
            dec.components.push_back(std::move(comp));
        }
    }

    // Membership product: track the initial-state path and every anchor path.
    long long budget = state_budget();
    std::vector<int> start{A.initial};
    for (auto& c : dec.components) start.push_back(c.anchor);
    std::map<std::vector<int>, int> idx;
    std::vector<std::vector<int>> tuples;
    Dfao& m = dec.membership;
    m.base = A.base;
    auto output_of = [&](const std::vector<int>& tup) {
        int match = 0;
        for (size_t j = 1; j < tup.size(); ++j)
            if (tup[j] == tup[0]) {
                if (match != 0) throw Error("internal: ambiguous membership match");
                match = static_cast<int>(j);
            }
        return match;
    };
    auto intern = [&](std::vector<int> tup) {
        auto [it, fresh] = idx.try_emplace(tup, static_cast<int>(tuples.size()));
        if (fresh) {
            if (static_cast<long long>(tuples.size()) + 1 > budget)
                throw BudgetError("membership product exceeds state budget");
            int out = output_of(tup);
            m.names.push_back("m" + std::to_string(tuples.size()));
            m.out.push_back(std::to_string(out));
            m.delta.emplace_back(m.base, -1);
            dec.member_output.push_back(out);
            tuples.push_back(std::move(tup));
        }
        return it->second;
    };
    m.initial = intern(std::move(start));
    for (size_t t = 0; t < tuples.size(); ++t)
        for (int w = 0; w < m.base; ++w) {
            std::vector<int> nxt(tuples[t].size());
            for (size_t i = 0; i < tuples[t].size(); ++i) nxt[i] = A.delta[tuples[t][i]][w];
            m.delta[t][w] = intern(std::move(nxt));
        }
    check_dfao(m);
    return dec;
}

// --- generators ----------------------------------------------------------------

namespace {

struct IndicatorView {
    const Dfao& d;
    std::vector<char> accepting;
    std::vector<char> live;  // can reach an accepting state
};

IndicatorView indicator_view(const Dfao& d) {
    check_dfao(d);
    IndicatorView v{d, {}, {}};
    v.accepting.resize(d.size());
    for (int q = 0; q < d.size(); ++q) {
        if (d.out[q] != "0" && d.out[q] != "1")
            throw DomainError("indicator automata must have outputs 0/1");
        v.accepting[q] = (d.out[q] == "1");
    }
    v.live.assign(d.size(), 0);
    std::vector<std::vector<int>> rev(d.size());
    for (int q = 0; q < d.size(); ++q)
        for (int w = 0; w < d.base; ++w) rev[d.delta[q][w]].push_back(q);
    std::deque<int> bfs;
    for (int q = 0; q < d.size(); ++q)
        if (v.accepting[q]) {
            v.live[q] = 1;
            bfs.push_back(q);
        }
    while (!bfs.empty()) {
        int q = bfs.front();
        bfs.pop_front();
        for (int s : rev[q])
            if (!v.live[s]) {
                v.live[s] = 1;
                bfs.push_back(s);
            }
    }
    return v;
}

}  // namespace

GeneratorCounts generator_counts(const Dfao& indicator, int depth) {
    if (depth < 1) throw DomainError("generator depth must be positive");
    auto v = indicator_view(indicator);
    const Dfao& d = indicator;
    GeneratorCounts gc;
    std::vector<Int> pend(d.size(), 0);
    for (int lam = 1; lam <= depth; ++lam) {
        std::vector<Int> paths(d.size(), 0);
        if (lam == 1) {
            for (int j = 1; j < d.base; ++j) paths[d.delta[d.initial][j]] += 1;
        } else {
            for (int q = 0; q < d.size(); ++q)
                if (pend[q] != 0)
                    for (int j = 0; j < d.base; ++j) paths[d.delta[q][j]] += pend[q];
        }
        Int s = 0, p = 0;
        std::vector<Int> next(d.size(), 0);
        for (int q = 0; q < d.size(); ++q) {
            if (paths[q] == 0) continue;
            if (v.accepting[q])
                s += paths[q];
            else if (v.live[q]) {
                next[q] = paths[q];
                p += paths[q];
            }
        }
        gc.s_counts.push_back(s);
        gc.pending_counts.push_back(p);
        pend = std::move(next);
    }
    return gc;
}

GeneratorReport generators(const Dfao& indicator, int depth) {
    if (depth < 1) throw DomainError("generator depth must be positive");
    auto v = indicator_view(indicator);
    const Dfao& d = indicator;
    long long K = d.base;
    pow_ll(K, depth);  // overflow guard for enumerated values
    long long budget = state_budget();

    GeneratorReport rep;
    rep.K = K;
    rep.depth = depth;
    rep.zero_in_s = v.accepting[d.initial];

    struct Node {
        int q;
        unsigned long long value;
        int len;
    };
    std::vector<Node> stack;
    for (int j = d.base - 1; j >= 1; --j)
        stack.push_back({d.delta[d.initial][j], static_cast<unsigned long long>(j), 1});
    long long visits = 0;
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        if (++visits > budget * d.base)
            throw BudgetError("generator enumeration exceeds state budget");
        if (v.accepting[nd.q]) {
            rep.gens.push_back(nd.value);
            if (static_cast<long long>(rep.gens.size()) > budget)
                throw BudgetError("generator enumeration exceeds state budget");
            continue;
        }
        if (nd.len >= depth || !v.live[nd.q]) continue;
        for (int j = d.base - 1; j >= 0; --j)
            stack.push_back({d.delta[nd.q][j],
                             nd.value * static_cast<unsigned long long>(K) +
                                 static_cast<unsigned long long>(j),
                             nd.len + 1});
    }
    std::sort(rep.gens.begin(), rep.gens.end());

    auto gc = generator_counts(indicator, depth);
    rep.s_counts = gc.s_counts;
    rep.pending_counts = gc.pending_counts;
    for (int lam = 1; lam <= depth; ++lam)
        if (gc.pending_counts[lam - 1] == 0) {
            rep.finite = true;
            rep.finite_depth = lam;
            break;
        }
    return rep;
}

Rat residual_growth_bound(const Dfao& indicator_residual) {
    auto v = indicator_view(indicator_residual);
    const Dfao& d = indicator_residual;
    // Relevant states: reachable and able to reach an accepting state.
    std::vector<char> reach(d.size(), 0);
    {
        std::deque<int> bfs{d.initial};
        reach[d.initial] = 1;
        while (!bfs.empty()) {
            int q = bfs.front();
            bfs.pop_front();
            for (int w = 0; w < d.base; ++w)
                if (!reach[d.delta[q][w]]) {
                    reach[d.delta[q][w]] = 1;
                    bfs.push_back(d.delta[q][w]);
                }
        }
    }
    std::vector<int> rel;
    for (int q = 0; q < d.size(); ++q)
        if (reach[q] && v.live[q]) rel.push_back(q);
    if (rel.empty()) return Rat(0);

    std::map<int, int> pos;
    for (size_t i = 0; i < rel.size(); ++i) pos[rel[i]] = static_cast<int>(i);
    int n = static_cast<int>(rel.size());
    Mat T(n, n);
    for (int j = 0; j < n; ++j)
        for (int w = 0; w < d.base; ++w) {
            auto it = pos.find(d.delta[rel[j]][w]);
            if (it != pos.end()) T.at(it->second, j) += 1;
        }
    auto bound = certify_spectral_radius_below(T, Rat(d.base), 500);
    if (!bound)
        throw DomainError("could not certify residual growth below the base within 500 rounds");
    return *bound;
}

}  // namespace autodens
