#include "autodens/subseq.hpp"

#include <algorithm>
#include <set>

namespace autodens {

std::string Along::describe() const {
    switch (kind) {
        case Naturals: return "naturals";
        case Primes: return "primes";
        case Squares: return "squares";
        case Coprime: return "coprime=" + std::to_string(modulus);
    }
    return "?";
}

Along parse_along(const std::string& s) {
    if (s == "naturals") return Along::naturals();
    if (s == "primes") return Along::primes();
    if (s == "squares") return Along::squares();
    if (s.rfind("coprime=", 0) == 0) {
        try {
            size_t used = 0;
            long long m = std::stoll(s.substr(8), &used);
            if (used != s.size() - 8 || m < 1) throw ParseError("");
            return Along::coprime(m);
        } catch (...) {
            throw ParseError("malformed coprime modulus in '" + s + "'");
        }
    }
    throw ParseError("unknown subsequence '" + s + "' (naturals|primes|squares|coprime=M)");
}

// --- density of squares in residue classes -------------------------------------

namespace {

long long powmod(long long b, long long e, long long m) {
    long long r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = (__int128)r * b % m;
        b = (__int128)b * b % m;
        e >>= 1;
    }
    return r;
}

// Number of unit square roots of unit u modulo p^e (e >= 1).
long long unit_sqrt_count(long long u, long long p, int e) {
    if (p == 2) {
        if (e == 1) return 1;
        if (e == 2) return u % 4 == 1 ? 2 : 0;
        return u % 8 == 1 ? 4 : 0;
    }
    return powmod(u, (p - 1) / 2, p) == 1 ? 2 : 0;
}

Rat qr_count_prime_power(long long m, long long p, int a) {
    long long pa = 1;
    for (int i = 0; i < a; ++i) pa *= p;
    long long mm = m % pa;
    long long half = 1;
    for (int i = 0; i < a / 2; ++i) half *= p;
    if (mm == 0) return rat(half, pa);  // v_p(n) >= ceil(a/2)
    int v = 0;
    while (mm % p == 0) {
        mm /= p;
        ++v;
    }
    if (v % 2 == 1) return Rat(0);
    int mu = v / 2, e = a - v;
    long long n0 = unit_sqrt_count(mm, p, e);
    if (n0 == 0) return Rat(0);
    long long pmu = 1;
    for (int i = 0; i < mu; ++i) pmu *= p;
    return rat(n0 * pmu, pa);
}

}  // namespace

Rat qr_count(long long m, long long h) {
    if (h < 1) throw DomainError("modulus must be positive");
    m %= h;
    if (m < 0) m += h;
    Rat result(1);
    long long rest = h;
    for (long long p = 2; p * p <= rest; ++p) {
        if (rest % p) continue;
        int a = 0;
        while (rest % p == 0) {
            rest /= p;
            ++a;
        }
        result *= qr_count_prime_power(m, p, a);
    }
    if (rest > 1) result *= qr_count_prime_power(m, rest, 1);
    return result;
}

// --- arithmetic-progression averages --------------------------------------------

namespace {

void check_table(const std::map<std::string, Rat>& t) {
    Rat s(0);
    for (auto& [k, v] : t) {
        if (v < 0 || v > 1) throw Error("internal: density outside [0,1]");
        s += v;
    }
    if (s != 1) throw Error("internal: density table does not sum to 1");
}

}  // namespace

std::map<std::string, Rat> ap_average_density(const Dfao& b, long long M2,
                                               const std::vector<long long>& R) {
    check_dfao(b);
    if (R.empty()) throw DomainError("residue set must be nonempty");
    for (long long r : R)
        if (r < 0 || r >= M2) throw DomainError("residue out of range for the modulus");

    Compression c = compress(b, M2);
    Dfao caut = c.aut;
    std::vector<std::vector<int>> tuples = c.tuples;
    if (!is_primitive(caut)) {
        // Merging equal-behaviour tuple states preserves the tuple outputs, so
        // coordinate projections survive; primitivity of the source usually
        // reappears after the merge.
        std::vector<int> cls;
        Dfao merged = minimize(caut, &cls);
        std::vector<std::vector<int>> t2(merged.size());
        for (size_t q = 0; q < tuples.size(); ++q)
            if (cls[q] != -1 && t2[cls[q]].empty()) t2[cls[q]] = tuples[q];
        caut = std::move(merged);
        tuples = std::move(t2);
        if (!is_primitive(caut))
            throw DomainError("compression automaton is not primitive");
    }

    auto dens = primitive_state_density(caut);
    std::map<std::string, Rat> acc;
    for (long long r : R)
        for (int t = 0; t < caut.size(); ++t)
            acc[c.source.out[tuples[t][static_cast<size_t>(r)]]] += dens[t];
    Rat inv(1, static_cast<long>(R.size()));
    for (auto& [k, v] : acc) v *= inv;
    for (auto& o : b.out) acc.try_emplace(o, Rat(0));
    check_table(acc);
    return acc;
}

std::map<std::string, Rat> prime_density(const Dfao& b) {
    MullnerData md = mullner_decompose(b);
    long long m = md.K * md.d;
    std::vector<long long> R;
    for (long long r = 0; r < m; ++r)
        if (gcdll(r, m) == 1) R.push_back(r);
    return ap_average_density(b, m, R);
}

std::map<std::string, Rat> coprime_density(const Dfao& b, long long M) {
    if (M < 1) throw DomainError("coprimality modulus must be positive");
    MullnerData md = mullner_decompose(b);
    long long m2 = lcmll(M, md.K * md.d);
    std::vector<long long> R;
    for (long long r = 0; r < m2; ++r)
        if (gcdll(r, M) == 1) R.push_back(r);
    if (R.empty()) throw DomainError("no residues coprime to the modulus");
    return ap_average_density(b, m2, R);
}

// --- squares ---------------------------------------------------------------------

SquareDensityDetail square_density_detail(const Dfao& b) {
    SquareDensityDetail det;
    det.data = mullner_decompose(b);
    MullnerData& md = det.data;
    auto [p, e] = prime_power_split(md.K);
    if (p == 0)
        throw DomainError("squares unsupported for base " + std::to_string(b.base) +
                          " (not a prime power)");
    det.p = p;

    Dfao sp = (e > 1) ? rebase_prime_power(md.s_aut) : md.s_aut;
    if (sp.delta[sp.initial][0] != sp.initial)
        throw Error("internal: synchronizing part lost its 0-loop in the base change");
    auto ds = primitive_state_density(sp);

    // Where reading the square's low digits lands: for odd p, a nonzero
    // quadratic-residue digit with mass 2/p each; for p = 2, the digit block
    // 001 with mass 1/2 (squares are 1 mod 8 after removing the even part).
    std::vector<Rat> arrivals(sp.size(), Rat(0));
    if (p == 2) {
        for (int q = 0; q < sp.size(); ++q)
            arrivals[walk(sp, q, {0, 0, 1})] += ds[q] * Rat(1, 2);
    } else {
        std::vector<char> qr(static_cast<size_t>(p), 0);
        for (long long x = 1; x < p; ++x) qr[static_cast<size_t>(x * x % p)] = 1;
        Rat w(2, static_cast<long>(p));
        for (int q = 0; q < sp.size(); ++q)
            for (long long m0 = 1; m0 < p; ++m0)
                if (qr[static_cast<size_t>(m0)])
                    arrivals[sp.delta[q][static_cast<size_t>(m0)]] += ds[q] * w;
    }

    // Geometric tail over trailing zero pairs: weight p^-mu for 2*mu zeros.
    std::vector<Rat> dsq(sp.size(), Rat(0));
    Rat invp(1, static_cast<long>(p));
    for (int q2 = 0; q2 < sp.size(); ++q2) {
        if (arrivals[q2] == 0) continue;
        std::vector<int> first(sp.size(), -1), visit;
        int z = q2;
        while (first[z] == -1) {
            first[z] = static_cast<int>(visit.size());
            visit.push_back(z);
            z = sp.delta[sp.delta[z][0]][0];
        }
        int rho = first[z];
        int cyc = static_cast<int>(visit.size()) - rho;
        Rat cycle_factor(1);
        {
            Rat f(1);
            for (int i = 0; i < cyc; ++i) f *= invp;
            cycle_factor = 1 - f;
        }
        Rat pw(1);
        for (size_t idx = 0; idx < visit.size(); ++idx) {
            Rat weight = pw;
            if (static_cast<int>(idx) >= rho) weight /= cycle_factor;
            dsq[visit[idx]] += arrivals[q2] * weight;
            pw *= invp;
        }
    }

    for (int q = 0; q < sp.size(); ++q) det.s_part[sp.out[q]] += dsq[q];
    check_table(det.s_part);

    Rat gsize(static_cast<long>(md.G.size()));
    for (size_t gi = 0; gi < md.G.size(); ++gi)
        det.t_part[static_cast<int>(gi)] =
            Rat(static_cast<long>(md.d)) / gsize * qr_count(md.phi[gi], md.d);

    std::map<std::string, int> sym2s;
    for (int s = 0; s < md.s_aut.size(); ++s) sym2s[md.s_aut.out[s]] = s;
    for (auto& [sym, sv] : det.s_part) {
        int s = sym2s.at(sym);
        for (size_t gi = 0; gi < md.G.size(); ++gi) {
            Rat mass = sv * det.t_part[static_cast<int>(gi)];
            if (mass != 0) det.total[md.f_value(s, md.G[gi])] += mass;
        }
    }
    for (auto& o : md.b.out) det.total.try_emplace(o, Rat(0));
    check_table(det.total);
    return det;
}

std::map<std::string, Rat> square_density(const Dfao& b) { return square_density_detail(b).total; }

std::map<std::string, Rat> component_density(const Dfao& b, const Along& along) {
    switch (along.kind) {
        case Along::Naturals: {
            auto t = primitive_density(b);
            for (auto& o : b.out) t.try_emplace(o, Rat(0));
            check_table(t);
            return t;
        }
        case Along::Primes: return prime_density(b);
        case Along::Squares: return square_density(b);
        case Along::Coprime: return coprime_density(b, along.modulus);
    }
    throw DomainError("unknown subsequence kind");
}

// --- whole-sequence reports -------------------------------------------------------

namespace {

Rat table_get(const std::map<std::string, Rat>& t, const std::string& k) {
    auto it = t.find(k);
    return it == t.end() ? Rat(0) : it->second;
}

}  // namespace

DensityReport density_along(const Dfao& a, const Along& along, const Rat& eps) {
    DensityReport rep;
    rep.along = along;
    Decomposition dec = decompose(a);
    for (size_t i = 0; i < dec.components.size(); ++i) {
        rep.component_tables.push_back(component_density(dec.components[i].b, along));
        rep.component_logdensities.push_back(
            logdensity_set(dec.indicator(static_cast<int>(i) + 1), eps));
    }
    rep.notes.push_back("decomposition: base " + std::to_string(dec.K) + " with " +
                        std::to_string(dec.components.size()) + " primitive component(s)");
    switch (along.kind) {
        case Along::Naturals:
            rep.notes.push_back("component values: dominant eigenvector of the digit-transition count matrix");
            break;
        case Along::Primes:
            rep.notes.push_back("component values: compression average over residues coprime to (base x modulus of the digit-counting character)");
            break;
        case Along::Coprime:
            rep.notes.push_back("component values: compression average over residues coprime to the requested modulus");
            break;
        case Along::Squares:
            rep.notes.push_back("component values: quadratic-residue digit distribution with a geometric trailing-zero tail, combined with the square-residue distribution of the digit-counting character");
            break;
    }
    rep.notes.push_back("logarithmic transfer: sum over components of d_log(membership) x component value");

    std::set<std::string> alphabet;
    for (auto& t : rep.component_tables)
        for (auto& [k, v] : t) alphabet.insert(k);

    for (auto& sym : alphabet) {
        LogLin acc = loglin_rational(Rat(0), dec.K);
        for (size_t i = 0; i < rep.component_tables.size(); ++i)
            acc = loglin_add(
                acc, loglin_scale(rep.component_logdensities[i], table_get(rep.component_tables[i], sym)));
        rep.log_table.emplace(sym, std::move(acc));
    }

    rep.natural_exists = true;
    for (auto& sym : alphabet) {
        for (size_t i = 1; i < rep.component_tables.size(); ++i) {
            Rat v0 = table_get(rep.component_tables[0], sym);
            Rat vi = table_get(rep.component_tables[i], sym);
            if (v0 != vi) {
                rep.natural_exists = false;
                rep.witness = DensityWitness{1, static_cast<int>(i) + 1, sym, v0, vi};
                break;
            }
        }
        if (!rep.natural_exists) break;
    }
    if (rep.natural_exists && !rep.component_tables.empty()) {
        for (auto& sym : alphabet)
            rep.natural_table[sym] = table_get(rep.component_tables[0], sym);
        check_table(rep.natural_table);
    }
    return rep;
}

}  // namespace autodens
