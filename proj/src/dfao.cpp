#include "autodens/dfao.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace autodens {

void check_dfao(const Dfao& a) {
    if (a.base < 2) throw DomainError("automaton base must be at least 2");
    int n = a.size();
    if (n == 0) throw DomainError("automaton has no states");
    if (a.out.size() != a.names.size() || a.delta.size() != a.names.size())
        throw DomainError("automaton arrays have inconsistent sizes");
    if (a.initial < 0 || a.initial >= n) throw DomainError("initial state out of range");
    for (int q = 0; q < n; ++q) {
        if (static_cast<int>(a.delta[q].size()) != a.base)
            throw DomainError("state '" + a.names[q] + "' lacks a full transition row");
        for (int j = 0; j < a.base; ++j)
            if (a.delta[q][j] < 0 || a.delta[q][j] >= n)
                throw DomainError("transition target out of range");
    }
}

// --- parsing -----------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream is(line);
    std::string t;
    while (is >> t) toks.push_back(t);
    return toks;
}

[[noreturn]] void fail(int lineno, const std::string& msg) {
    throw ParseError("line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

Dfao parse_dfao(std::istream& in) {
    Dfao a;
    a.base = 0;
    std::map<std::string, int> index;
    std::string initial_name;
    bool have_initial = false;
    std::vector<std::pair<int, std::string>> pending_outputs;              // lineno, "name=value"
    std::vector<std::tuple<int, std::string, std::string, std::string>> pending_deltas;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "base") {
            if (toks.size() != 2) fail(lineno, "expected: base <k>");
            try {
                a.base = std::stoi(toks[1]);
            } catch (...) {
                fail(lineno, "malformed base '" + toks[1] + "'");
            }
            if (a.base < 2) fail(lineno, "base must be at least 2");
        } else if (head == "states") {
            if (toks.size() < 2) fail(lineno, "expected: states <name>...");
            for (size_t i = 1; i < toks.size(); ++i) {
                if (toks[i].find('=') != std::string::npos)
                    fail(lineno, "state name may not contain '='");
                if (index.count(toks[i])) fail(lineno, "duplicate state '" + toks[i] + "'");
                index[toks[i]] = static_cast<int>(a.names.size());
                a.names.push_back(toks[i]);
            }
        } else if (head == "initial") {
            if (toks.size() != 2) fail(lineno, "expected: initial <state>");
            initial_name = toks[1];
            have_initial = true;
        } else if (head == "output") {
            if (toks.size() < 2) fail(lineno, "expected: output <state>=<symbol>...");
            for (size_t i = 1; i < toks.size(); ++i) pending_outputs.emplace_back(lineno, toks[i]);
        } else if (head == "delta") {
            if (toks.size() != 4) fail(lineno, "expected: delta <state> <digit> <state>");
            pending_deltas.emplace_back(lineno, toks[1], toks[2], toks[3]);
        } else {
            fail(lineno, "unknown directive '" + head + "'");
        }
    }

    if (a.base == 0) throw ParseError("missing 'base' line");
    if (a.names.empty()) throw ParseError("missing 'states' line");
    if (!have_initial) throw ParseError("missing 'initial' line");
    auto lookup = [&](const std::string& name, int ln) {
        auto it = index.find(name);
        if (it == index.end()) fail(ln, "undeclared state '" + name + "'");
        return it->second;
    };
    a.initial = lookup(initial_name, 0);

    a.out.assign(a.names.size(), "");
    std::vector<char> have_out(a.names.size(), 0);
    for (auto& [ln, pair] : pending_outputs) {
        auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size())
            fail(ln, "malformed output assignment '" + pair + "'");
        int q = lookup(pair.substr(0, eq), ln);
        if (have_out[q]) fail(ln, "duplicate output for state '" + a.names[q] + "'");
        a.out[q] = pair.substr(eq + 1);
        have_out[q] = 1;
    }
    for (size_t q = 0; q < a.names.size(); ++q)
        if (!have_out[q]) throw ParseError("missing output for state '" + a.names[q] + "'");

    a.delta.assign(a.names.size(), std::vector<int>(a.base, -1));
    for (auto& [ln, from, digit, to] : pending_deltas) {
        int q = lookup(from, ln);
        int w = -1;
        try {
            size_t used = 0;
            w = std::stoi(digit, &used);
            if (used != digit.size()) w = -1;
        } catch (...) {
            w = -1;
        }
        if (w < 0 || w >= a.base)
            fail(ln, "digit '" + digit + "' out of range for base " + std::to_string(a.base));
        int t = lookup(to, ln);
        if (a.delta[q][w] != -1)
            fail(ln, "duplicate transition for (" + from + ", " + digit + ")");
        a.delta[q][w] = t;
    }
    for (size_t q = 0; q < a.names.size(); ++q)
        for (int w = 0; w < a.base; ++w)
            if (a.delta[q][w] == -1)
                throw ParseError("missing transition for (" + a.names[q] + ", " +
                                 std::to_string(w) + ")");
    check_dfao(a);
    return a;
}

Dfao parse_dfao_string(const std::string& text) {
    std::istringstream is(text);
    return parse_dfao(is);
}

Dfao load_dfao(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open automaton file '" + path + "'");
    return parse_dfao(f);
}

std::string serialize_dfao(const Dfao& a) {
    std::ostringstream os;
    os << "base " << a.base << "\n";
    os << "states";
    for (auto& n : a.names) os << ' ' << n;
    os << "\n";
    os << "initial " << a.names[a.initial] << "\n";
    os << "output";
    for (int q = 0; q < a.size(); ++q) os << ' ' << a.names[q] << '=' << a.out[q];
    os << "\n";
    for (int q = 0; q < a.size(); ++q)
        for (int w = 0; w < a.base; ++w)
            os << "delta " << a.names[q] << ' ' << w << ' ' << a.names[a.delta[q][w]] << "\n";
    return os.str();
}

// --- evaluation --------------------------------------------------------------

std::vector<int> digits_msb(unsigned long long n, int base) {
    std::vector<int> d;
    while (n) {
        d.push_back(static_cast<int>(n % static_cast<unsigned long long>(base)));
        n /= static_cast<unsigned long long>(base);
    }
    std::reverse(d.begin(), d.end());
    return d;
}

int walk(const Dfao& a, int q, const std::vector<int>& word) {
    for (int w : word) q = a.delta[q][w];
    return q;
}

int state_at(const Dfao& a, unsigned long long n) {
    return walk(a, a.initial, digits_msb(n, a.base));
}

std::string evaluate(const Dfao& a, unsigned long long n) { return a.out[state_at(a, n)]; }

// --- minimization ------------------------------------------------------------

Dfao minimize(const Dfao& a, std::vector<int>* class_of) {
    check_dfao(a);
    int n = a.size();
    std::vector<char> reach(n, 0);
    {
        std::deque<int> bfs{a.initial};
        reach[a.initial] = 1;
        while (!bfs.empty()) {
            int q = bfs.front();
            bfs.pop_front();
            for (int w = 0; w < a.base; ++w)
                if (!reach[a.delta[q][w]]) {
                    reach[a.delta[q][w]] = 1;
                    bfs.push_back(a.delta[q][w]);
                }
        }
    }

    // Initial partition by output symbol, class ids in declaration order of
    // first occurrence; refinement splits by successor-class signatures.
    std::vector<int> cls(n, -1);
    int nclasses = 0;
    {
        std::map<std::string, int> by_sym;
        for (int q = 0; q < n; ++q) {
            if (!reach[q]) continue;
            auto [it, fresh] = by_sym.try_emplace(a.out[q], nclasses);
            if (fresh) ++nclasses;
            cls[q] = it->second;
        }
    }
    for (;;) {
        std::map<std::vector<int>, int> by_sig;
        std::vector<int> next(n, -1);
        int count = 0;
        for (int q = 0; q < n; ++q) {
            if (!reach[q]) continue;
            std::vector<int> sig;
            sig.reserve(a.base + 1);
            sig.push_back(cls[q]);
            for (int w = 0; w < a.base; ++w) sig.push_back(cls[a.delta[q][w]]);
            auto [it, fresh] = by_sig.try_emplace(std::move(sig), count);
            if (fresh) ++count;
            next[q] = it->second;
        }
        bool stable = (count == nclasses);
        cls = std::move(next);
        nclasses = count;
        if (stable) break;
    }

    // Representative = smallest declaration index; classes ordered by it.
    std::vector<int> rep(nclasses, -1);
    for (int q = n - 1; q >= 0; --q)
        if (reach[q]) rep[cls[q]] = q;
    std::vector<int> order(nclasses);
    for (int c = 0; c < nclasses; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return rep[x] < rep[y]; });
    std::vector<int> newid(nclasses);
    for (int i = 0; i < nclasses; ++i) newid[order[i]] = i;

    Dfao m;
    m.base = a.base;
    m.names.resize(nclasses);
    m.out.resize(nclasses);
    m.delta.assign(nclasses, std::vector<int>(a.base));
    for (int i = 0; i < nclasses; ++i) {
        int r = rep[order[i]];
        m.names[i] = a.names[r];
        m.out[i] = a.out[r];
        for (int w = 0; w < a.base; ++w) m.delta[i][w] = newid[cls[a.delta[r][w]]];
    }
    m.initial = newid[cls[a.initial]];
    if (class_of) {
        class_of->assign(n, -1);
        for (int q = 0; q < n; ++q)
            if (reach[q]) (*class_of)[q] = newid[cls[q]];
    }
    return m;
}

// --- products ----------------------------------------------------------------

Dfao product(const Dfao& a, const Dfao& b,
             const std::function<std::string(const std::string&, const std::string&)>& combine) {
    check_dfao(a);
    check_dfao(b);
    if (a.base != b.base) throw DomainError("product requires equal bases");
    long long budget = state_budget();
    Dfao p;
    p.base = a.base;
    std::map<std::pair<int, int>, int> index;
    std::vector<std::pair<int, int>> pairs;
    auto intern = [&](int qa, int qb) {
        auto [it, fresh] = index.try_emplace({qa, qb}, static_cast<int>(pairs.size()));
        if (fresh) {
            pairs.emplace_back(qa, qb);
            if (static_cast<long long>(pairs.size()) > budget)
                throw BudgetError("product exceeds state budget");
            p.names.push_back("(" + a.names[qa] + "," + b.names[qb] + ")");
            p.out.push_back(combine(a.out[qa], b.out[qb]));
            p.delta.emplace_back(p.base, -1);
        }
        return it->second;
    };
    p.initial = intern(a.initial, b.initial);
    for (size_t i = 0; i < pairs.size(); ++i) {
        auto [qa, qb] = pairs[i];
        for (int w = 0; w < p.base; ++w) p.delta[i][w] = intern(a.delta[qa][w], b.delta[qb][w]);
    }
    check_dfao(p);
    return p;
}

bool same_sequence(const Dfao& a_in, const Dfao& b_in) {
    if (a_in.base != b_in.base) throw DomainError("sequence comparison requires equal bases");
    // After zero normalization, agreement on every digit string is equivalent
    // to agreement on canonical expansions, i.e. on the sequences themselves.
    Dfao a = normalize_zero(a_in);
    Dfao b = normalize_zero(b_in);
    long long budget = state_budget();
    std::set<std::pair<int, int>> seen;
    std::deque<std::pair<int, int>> bfs;
    auto push = [&](int qa, int qb) {
        if (seen.emplace(qa, qb).second) {
            if (static_cast<long long>(seen.size()) > budget)
                throw BudgetError("equality product exceeds state budget");
            bfs.emplace_back(qa, qb);
        }
    };
    push(a.initial, b.initial);
    while (!bfs.empty()) {
        auto [qa, qb] = bfs.front();
        bfs.pop_front();
        if (a.out[qa] != b.out[qb]) return false;
        for (int w = 0; w < a.base; ++w) push(a.delta[qa][w], b.delta[qb][w]);
    }
    return true;
}

// --- zero normalization and base powers ---------------------------------------

Dfao normalize_zero(const Dfao& a) {
    check_dfao(a);
    if (a.delta[a.initial][0] == a.initial) return a;
    Dfao r = a;
    std::string name = a.names[a.initial] + "'";
    while (std::find(r.names.begin(), r.names.end(), name) != r.names.end()) name += "'";
    int fresh = r.size();
    r.names.push_back(name);
    r.out.push_back(a.out[a.initial]);
    std::vector<int> row = a.delta[a.initial];
    row[0] = fresh;
    r.delta.push_back(std::move(row));
    r.initial = fresh;
    check_dfao(r);
    return r;
}

Dfao power_base(const Dfao& a, int ell) {
    check_dfao(a);
    if (ell < 1) throw DomainError("power_base exponent must be positive");
    if (a.delta[a.initial][0] != a.initial)
        throw DomainError("power_base requires delta(initial, 0) = initial");
    if (ell == 1) return a;
    long long K = pow_ll(a.base, ell);
    if (K > state_budget()) throw BudgetError("power_base alphabet exceeds state budget");
    Dfao r;
    r.base = static_cast<int>(K);
    r.names = a.names;
    r.out = a.out;
    r.initial = a.initial;
    r.delta.assign(a.size(), std::vector<int>(r.base));
    for (int q = 0; q < a.size(); ++q)
        for (long long e = 0; e < K; ++e) {
            auto d = digits_msb(static_cast<unsigned long long>(e), a.base);
            std::vector<int> padded(static_cast<size_t>(ell) - d.size(), 0);
            padded.insert(padded.end(), d.begin(), d.end());
            r.delta[q][e] = walk(a, q, padded);
        }
    check_dfao(r);
    return r;
}

// --- compression --------------------------------------------------------------

Compression compress(const Dfao& a, long long m) {
    check_dfao(a);
    if (m < 1) throw DomainError("compression modulus must be positive");
    long long budget = state_budget();
    Compression c;
    c.source = normalize_zero(a);
    c.m = m;
    const Dfao& s = c.source;
    c.aut.base = s.base;

    std::map<std::vector<int>, int> index;
    auto intern = [&](std::vector<int> tup) {
        auto [it, fresh] = index.try_emplace(tup, static_cast<int>(c.tuples.size()));
        if (fresh) {
            if (static_cast<long long>(c.tuples.size()) + 1 > budget)
                throw BudgetError("compression exceeds state budget");
            std::string name = "<", out = "<";
            for (size_t i = 0; i < tup.size(); ++i) {
                if (i) name += ',', out += ',';
                name += s.names[tup[i]];
                out += s.out[tup[i]];
            }
            name += '>';
            out += '>';
            c.aut.names.push_back(name);
            c.aut.out.push_back(out);
            c.aut.delta.emplace_back(s.base, -1);
            c.tuples.push_back(std::move(tup));
        }
        return it->second;
    };

    std::vector<int> t0(static_cast<size_t>(m));
    for (long long i = 0; i < m; ++i)
        t0[static_cast<size_t>(i)] = state_at(s, static_cast<unsigned long long>(i));
    c.aut.initial = intern(std::move(t0));

    for (size_t t = 0; t < c.tuples.size(); ++t) {
        // Children word W: W[i*k + j] = delta(member i, j); digit-w successor
        // is the subword at positions w*m .. w*m+m-1.
        std::vector<int> W(static_cast<size_t>(m) * s.base);
        for (long long i = 0; i < m; ++i)
            for (int j = 0; j < s.base; ++j)
                W[static_cast<size_t>(i) * s.base + j] = s.delta[c.tuples[t][i]][j];
        for (int w = 0; w < s.base; ++w) {
            std::vector<int> child(W.begin() + static_cast<long long>(w) * m,
                                   W.begin() + static_cast<long long>(w) * m + m);
            c.aut.delta[t][w] = intern(std::move(child));
        }
    }
    check_dfao(c.aut);
    return c;
}

Dfao project(const Compression& c, long long r) {
    if (r < 0 || r >= c.m) throw DomainError("projection residue out of range");
    Dfao p = c.aut;
    for (int t = 0; t < p.size(); ++t) p.out[t] = c.coord_out(t, r);
    return p;
}

ApCompression compress_ap(const Dfao& a, long long m, long long r) {
    ApCompression res;
    res.compression = compress(a, m);
    res.projection = project(res.compression, r);
    return res;
}

// --- prime-power base change ----------------------------------------------------

std::pair<long long, int> prime_power_split(long long k) {
    if (k < 2) return {0, 0};
    long long p = 0;
    for (long long d = 2; d * d <= k; ++d)
        if (k % d == 0) {
            p = d;
            break;
        }
    if (p == 0) return {k, 1};
    int alpha = 0;
    long long rest = k;
    while (rest % p == 0) {
        rest /= p;
        ++alpha;
    }
    if (rest != 1) return {0, 0};
    return {p, alpha};
}

Dfao rebase_prime_power(const Dfao& a) {
    check_dfao(a);
    auto [p, alpha] = prime_power_split(a.base);
    if (p == 0)
        throw DomainError("base " + std::to_string(a.base) + " is not a prime power");
    if (alpha == 1) return a;
    long long budget = state_budget();

    // Close the p-kernel: subsequences n -> a(p^e n + r), deduplicated by exact
    // sequence equality of minimized representatives.
    std::vector<Dfao> kernel{minimize(a)};
    std::vector<std::vector<int>> kdelta;
    std::vector<std::string> kout;
    for (size_t s = 0; s < kernel.size(); ++s) {
        kout.push_back(evaluate(kernel[s], 0));
        Compression c = compress(kernel[s], p);
        kdelta.emplace_back(p, -1);
        for (long long j = 0; j < p; ++j) {
            Dfao proj = minimize(project(c, j));
            int found = -1;
            for (size_t t = 0; t < kernel.size(); ++t)
                if (same_sequence(kernel[t], proj)) {
                    found = static_cast<int>(t);
                    break;
                }
            if (found == -1) {
                found = static_cast<int>(kernel.size());
                kernel.push_back(std::move(proj));
                if (static_cast<long long>(kernel.size()) > budget)
                    throw BudgetError("kernel closure exceeds state budget");
            }
            kdelta[s][static_cast<size_t>(j)] = found;
        }
    }

    // Reverse the least-significant-first kernel reading: states are maps
    // kernel-index -> output; reading digit j (MSB order) precomposes with the
    // kernel transition by j.
    int nk = static_cast<int>(kernel.size());
    std::vector<std::vector<std::string>> fmaps;
    std::map<std::vector<std::string>, int> findex;
    Dfao r;
    r.base = static_cast<int>(p);
    auto intern = [&](std::vector<std::string> fm) {
        auto [it, fresh] = findex.try_emplace(fm, static_cast<int>(fmaps.size()));
        if (fresh) {
            if (static_cast<long long>(fmaps.size()) + 1 > budget)
                throw BudgetError("base-change reversal exceeds state budget");
            r.names.push_back("G" + std::to_string(fmaps.size()));
            r.out.push_back(fm[0]);  // value of the original sequence's kernel element
            r.delta.emplace_back(r.base, -1);
            fmaps.push_back(std::move(fm));
        }
        return it->second;
    };
    {
        std::vector<std::string> f0(kout.begin(), kout.end());
        r.initial = intern(std::move(f0));
    }
    for (size_t f = 0; f < fmaps.size(); ++f)
        for (int j = 0; j < r.base; ++j) {
            std::vector<std::string> nf(static_cast<size_t>(nk));
            for (int s = 0; s < nk; ++s) nf[s] = fmaps[f][kdelta[s][j]];
            r.delta[f][j] = intern(std::move(nf));
        }
    check_dfao(r);
    Dfao result = minimize(r);

    // Exact agreement with the input after re-expressing in base p^alpha.
    Dfao lifted = power_base(normalize_zero(result), alpha);
    if (!same_sequence(lifted, a))
        throw Error("internal: base-change result disagrees with input");
    return result;
}

}  // namespace autodens
