#include "autodens/exact_density.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace autodens {

Mat incidence_matrix(const Dfao& a) {
    int n = a.size();
    Mat m(n, n);
    for (int j = 0; j < n; ++j)
        for (int w = 0; w < a.base; ++w) m.at(a.delta[j][w], j) += 1;
    return m;
}

bool is_strongly_connected(const Dfao& a) {
    return strongly_connected_components(a).size() == 1;
}

bool has_self_loop(const Dfao& a) {
    for (int q = 0; q < a.size(); ++q)
        for (int w = 0; w < a.base; ++w)
            if (a.delta[q][w] == q) return true;
    return false;
}

bool is_primitive(const Dfao& a) { return is_strongly_connected(a) && has_self_loop(a); }

std::vector<Rat> primitive_state_density(const Dfao& a) {
    check_dfao(a);
    if (!is_strongly_connected(a))
        throw DomainError("state density requires a strongly connected automaton");
    if (!has_self_loop(a))
        throw DomainError("state density requires a self-loop (aperiodicity witness)");
    Mat M = incidence_matrix(a);
    Mat A = mat_sub(M, mat_scale(identity(a.size()), Rat(a.base)));
    Mat K = kernel_basis(A);
    if (K.cols != 1)
        throw DomainError("dominant eigenspace is not one-dimensional");
    Rat sum(0);
    for (int i = 0; i < K.rows; ++i) sum += K.at(i, 0);
    if (sum == 0) throw DomainError("degenerate dominant eigenvector");
    std::vector<Rat> v(a.size());
    for (int i = 0; i < K.rows; ++i) {
        v[i] = K.at(i, 0) / sum;
        if (v[i] <= 0) throw DomainError("dominant eigenvector is not positive");
    }
    return v;
}

std::map<std::string, Rat> by_output(const Dfao& a, const std::vector<Rat>& state_density) {
    std::map<std::string, Rat> t;
    for (int q = 0; q < a.size(); ++q) t[a.out[q]] += state_density[q];
    return t;
}

std::map<std::string, Rat> primitive_density(const Dfao& a) {
    return by_output(a, primitive_state_density(a));
}

std::vector<std::vector<Rat>> state_density_limits(const Decomposition& dec) {
    const Dfao& m = dec.membership;
    int n = m.size();
    Mat B = mat_scale(incidence_matrix(m), rat(1, dec.K));
    Mat P = projector_onto_kernel_along_image(mat_sub(B, identity(n)));

    int ncomp = static_cast<int>(dec.components.size());
    std::vector<std::vector<Rat>> rows(ncomp, std::vector<Rat>(n, Rat(0)));
    std::vector<Rat> residual_row(n, Rat(0));
    for (int t = 0; t < n; ++t) {
        int c = dec.member_output[t];
        for (int q = 0; q < n; ++q) {
            if (c == 0)
                residual_row[q] += P.at(t, q);
            else
                rows[c - 1][q] += P.at(t, q);
        }
    }
    for (int q = 0; q < n; ++q) {
        if (residual_row[q] != 0)
            throw Error("internal: residual carries positive limiting density");
        Rat s(0);
        for (int i = 0; i < ncomp; ++i) {
            if (rows[i][q] < 0) throw Error("internal: negative limiting density");
            s += rows[i][q];
        }
        if (s != 1) throw Error("internal: limiting densities do not sum to 1");
    }
    return rows;
}

// --- log-linear values ----------------------------------------------------------

namespace {

RatInterval loglin_numerator_enclosure(const LogLin& x) {
    RatInterval acc{x.c0, x.c0};
    for (auto& [c, arg] : x.terms) acc = iv_add(acc, iv_scale(ln_enclosure(arg), c));
    return acc;
}

bool rat_is_integer(const Rat& r) { return r.get_den() == 1; }

// Detects exact symbolic values that collapse to rationals: when all term
// coefficients are integers and prod(arg^coeff) is an exact power of the base,
// the whole value is that exponent (covers the telescoping case).
void loglin_try_collapse(LogLin& x) {
    if (!x.exact) return;
    if (x.terms.empty()) {
        if (x.c0 == 0) x.enclosure = {Rat(0), Rat(0)};
        return;
    }
    if (x.c0 != 0) return;
    Rat prod(1);
    for (auto& [c, arg] : x.terms) {
        if (!rat_is_integer(c)) return;
        Int e = c.get_num();
        Int ae = abs(e);
        if (ae > 4096) return;
        Rat p(1);
        unsigned long cnt = mpz_get_ui(ae.get_mpz_t());
        for (unsigned long i = 0; i < cnt; ++i) p *= arg;
        if (e < 0) p = 1 / p;
        prod *= p;
    }
    // prod == base^e for an integer e makes the whole value the rational e.
    Rat K(static_cast<long>(x.base));
    long e = 0;
    Rat r = prod;
    int guard = 0;
    while (r > 1 && guard++ < 100000) {
        r /= K;
        ++e;
    }
    while (r < 1 && guard++ < 100000) {
        r *= K;
        --e;
    }
    if (r != 1) return;
    x.terms.clear();
    x.terms.emplace_back(Rat(static_cast<long>(e)), K);
    x.enclosure = {Rat(static_cast<long>(e)), Rat(static_cast<long>(e))};
}

}  // namespace

RatInterval loglin_symbolic_enclosure(const LogLin& x) {
    return iv_div(loglin_numerator_enclosure(x), ln_enclosure(Rat(static_cast<long>(x.base))));
}

LogLin loglin_rational(const Rat& v, long long base) {
    LogLin x;
    x.base = base;
    x.c0 = 0;
    if (v != 0) x.terms.emplace_back(v, Rat(static_cast<long>(base)));
    x.enclosure = {v, v};
    x.exact = true;
    return x;
}

LogLin loglin_scale(const LogLin& x, const Rat& c) {
    LogLin r;
    r.base = x.base;
    r.c0 = x.c0 * c;
    if (c != 0)
        for (auto& [cf, arg] : x.terms) r.terms.emplace_back(cf * c, arg);
    r.enclosure = iv_scale(x.enclosure, c);
    r.exact = x.exact;
    return r;
}

LogLin loglin_add(const LogLin& x, const LogLin& y) {
    if (x.base != y.base) throw DomainError("log-linear addition requires equal bases");
    LogLin r;
    r.base = x.base;
    r.c0 = x.c0 + y.c0;
    std::map<Rat, Rat> by_arg;
    std::vector<Rat> order;
    for (auto* src : {&x.terms, &y.terms})
        for (auto& [c, arg] : *src) {
            auto [it, fresh] = by_arg.try_emplace(arg, Rat(0));
            if (fresh) order.push_back(arg);
            it->second += c;
        }
    for (auto& arg : order)
        if (by_arg[arg] != 0) r.terms.emplace_back(by_arg[arg], arg);
    r.enclosure = iv_add(x.enclosure, y.enclosure);
    r.exact = x.exact && y.exact;
    return r;
}

LogLin logdensity_set(const Dfao& indicator, const Rat& eps) {
    check_dfao(indicator);
    if (eps <= 0) throw DomainError("requested enclosure width must be positive");
    long long K = indicator.base;

    // Support iteration of pending words: live, non-accepting states reachable
    // by member-free canonical prefixes.  Empty support at some depth means the
    // generator set is finite (exact value); a repeated support means it is
    // infinite.
    std::vector<char> accepting(indicator.size());
    for (int q = 0; q < indicator.size(); ++q) {
        if (indicator.out[q] != "0" && indicator.out[q] != "1")
            throw DomainError("indicator automata must have outputs 0/1");
        accepting[q] = indicator.out[q] == "1";
    }
    std::vector<char> live(indicator.size(), 0);
    {
        std::vector<std::vector<int>> rev(indicator.size());
        for (int q = 0; q < indicator.size(); ++q)
            for (int w = 0; w < K; ++w) rev[indicator.delta[q][w]].push_back(q);
        std::vector<int> bfs;
        for (int q = 0; q < indicator.size(); ++q)
            if (accepting[q]) {
                live[q] = 1;
                bfs.push_back(q);
            }
        for (size_t i = 0; i < bfs.size(); ++i)
            for (int s : rev[bfs[i]])
                if (!live[s]) {
                    live[s] = 1;
                    bfs.push_back(s);
                }
    }

    bool finite = false;
    int finite_depth = 0;
    {
        std::set<int> support;
        for (int j = 1; j < K; ++j) {
            int t = indicator.delta[indicator.initial][j];
            if (!accepting[t] && live[t]) support.insert(t);
        }
        std::set<std::set<int>> seen;
        int depth = 1;
        while (true) {
            if (support.empty()) {
                finite = true;
                finite_depth = depth;
                break;
            }
            if (!seen.insert(support).second || depth > 4096) break;
            std::set<int> next;
            for (int q : support)
                for (int w = 0; w < K; ++w) {
                    int t = indicator.delta[q][w];
                    if (!accepting[t] && live[t]) next.insert(t);
                }
            support = std::move(next);
            ++depth;
        }
    }

    LogLin x;
    x.base = K;
    x.c0 = 0;
    x.exact = finite;

    int depth = finite_depth;
    Rat tail_hi(0);
    if (!finite) {
        // Smallest depth whose certified tail bound pending * K^{1-depth} fits
        // inside the requested width (with headroom for the symbolic part).
        const int LMAX = 360;
        RatInterval lnK = ln_enclosure(Rat(static_cast<long>(K)));
        Rat budget = eps * lnK.lo * Rat(9, 10);
        auto gc = generator_counts(indicator, LMAX);
        Rat powK(1);  // K^{depth-1}
        depth = 0;
        for (int lam = 1; lam <= LMAX; ++lam) {
            Rat tail = Rat(gc.pending_counts[lam - 1]) / powK;
            if (tail <= budget) {
                depth = lam;
                tail_hi = tail;
                break;
            }
            powK *= static_cast<long>(K);
        }
        if (depth == 0)
            throw DomainError("cannot certify the requested enclosure width within depth 360");
    }

    GeneratorReport rep = generators(indicator, depth);
    for (unsigned long long m : rep.gens) {
        // Contribution ln(1 + 1/m); the member 0 (when present) carries weight 0.
        Int mi(static_cast<unsigned long>(m));
        Rat arg(Rat(mi + 1) / Rat(mi));
        x.terms.emplace_back(Rat(1), arg);
    }
    RatInterval sym = loglin_symbolic_enclosure(x);
    if (finite) {
        x.enclosure = sym;
        loglin_try_collapse(x);
    } else {
        RatInterval lnK = ln_enclosure(Rat(static_cast<long>(K)));
        x.enclosure = {sym.lo, sym.hi + tail_hi / lnK.lo};
        if (x.enclosure.width() > eps)
            throw DomainError("enclosure width exceeds the requested bound");
    }
    return x;
}

}  // namespace autodens
