// End-to-end acceptance run: one line per criterion, exit code = number of
// failures.  Tolerances and time limits are pinned here, next to each check.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "autodens/dfao.hpp"
#include "autodens/exact_density.hpp"
#include "autodens/extremal.hpp"
#include "autodens/linalg.hpp"
#include "autodens/mullner.hpp"
#include "autodens/structure.hpp"
#include "autodens/subseq.hpp"
#include "autodens/verify.hpp"
#include "corpus.hpp"

using namespace autodens;
using namespace testutil;

namespace {

int g_failures = 0;

void expect(std::ostringstream& why, bool cond, const std::string& msg) {
    if (!cond) why << " [" << msg << "]";
}

void criterion(const char* id, const char* desc,
               const std::function<void(std::ostringstream&)>& body) {
    std::ostringstream why;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(why);
    } catch (const std::exception& e) {
        why << " [unexpected exception: " << e.what() << "]";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = why.str().empty();
    if (!ok) ++g_failures;
    std::printf("%s %s %s (%.2fs)%s\n", id, ok ? "PASS" : "FAIL", desc, secs,
                why.str().c_str());
    std::fflush(stdout);
}

std::string dstr(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

// Exact values of the two digit series N(u), D(u) for the eventually periodic
// string pre (per)^infinity, computed by direct simulation with cycle
// detection on (state, phase) pairs -- independent of the library's
// certificate machinery.
std::pair<Rat, Rat> series_nd(const ExtremalProblem& p, const std::vector<int>& pre,
                              const std::vector<int>& per) {
    Rat kinv = rat(1, p.K);
    Rat pw(1), n_acc(0), d_acc(0);
    int q = p.aut.initial;
    auto step = [&](int c) {
        pw *= kinv;
        Rat n_qc(0);
        for (int cc = 0; cc < c; ++cc) n_qc += p.w[static_cast<size_t>(p.aut.step(q, cc))];
        n_acc += n_qc * pw;
        d_acc += Rat(c) * pw;
        q = p.aut.step(q, c);
    };
    for (int c : pre) step(c);
    std::map<std::pair<int, size_t>, std::pair<Rat, std::pair<Rat, Rat>>> seen;
    size_t phase = 0;
    while (!seen.count({q, phase})) {
        seen[{q, phase}] = {pw, {n_acc, d_acc}};
        step(per[phase]);
        phase = (phase + 1) % per.size();
    }
    auto [pw0, acc0] = seen.at({q, phase});
    Rat geom = Rat(1) / (Rat(1) - pw / pw0);
    return {acc0.first + (n_acc - acc0.first) * geom,
            acc0.second + (d_acc - acc0.second) * geom};
}

void ac1(std::ostringstream& why) {
    Dfao pf = minimize(normalize_zero(corpus("paperfolding.aut")));
    expect(why, is_primitive(pf), "automaton not primitive");
    std::vector<Rat> v = primitive_state_density(pf);
    expect(why, v.size() == 4, "expected 4 states");
    for (const Rat& x : v) expect(why, x == Rat(1, 4), "state density != 1/4");
    std::map<std::string, Rat> t = primitive_density(pf);
    expect(why, t.at("0") == Rat(1, 2) && t.at("1") == Rat(1, 2),
           "output densities != 1/2");
}

void ac2(std::ostringstream& why) {
    Dfao pf = corpus("paperfolding.aut");
    std::map<std::string, Rat> t = prime_density(pf);
    expect(why, t.at("0") == Rat(1, 2) && t.at("1") == Rat(1, 2),
           "exact prime densities != 1/2");
    std::vector<std::uint64_t> primes = sieve_primes(20000000);
    std::uint64_t ones = 0;
    for (std::uint64_t p : primes)
        if (evaluate(pf, p) == "1") ++ones;
    double freq = static_cast<double>(ones) / static_cast<double>(primes.size());
    expect(why, std::fabs(freq - 0.5) <= 0.005,
           "empirical " + dstr(freq) + " off exact 0.5 by more than 0.005");
}

void ac3(std::ostringstream& why) {
    Dfao pf = corpus("paperfolding.aut");
    std::map<std::string, Rat> t = square_density(pf);
    expect(why, t.at("1") == 1 && t.at("0") == 0, "exact square densities != {1:1, 0:0}");
    SquareDensityDetail det = square_density_detail(pf);
    expect(why, det.s_part.at("{o1}") == Rat(1, 2) && det.s_part.at("{z0}") == Rat(1, 2),
           "strongly connected part not split 1/2 + 1/2");
    std::uint64_t ones = 0;
    double f4 = 0, f5 = 0, f6 = 0;
    for (std::uint64_t n = 0; n < 1000000; ++n) {
        if (evaluate(pf, n * n) == "1") ++ones;
        if (n + 1 == 10000) f4 = static_cast<double>(ones) / 1e4;
        if (n + 1 == 100000) f5 = static_cast<double>(ones) / 1e5;
        if (n + 1 == 1000000) f6 = static_cast<double>(ones) / 1e6;
    }
    expect(why, f4 <= f5 && f5 <= f6,
           "frequencies not monotone: " + dstr(f4) + ", " + dstr(f5) + ", " + dstr(f6));
    expect(why, f6 >= 0.97, "frequency at 10^6 squares is " + dstr(f6) + " < 0.97");
}

void ac4(std::ostringstream& why) {
    Dfao tm = corpus("thuemorse.aut");
    std::map<std::string, Rat> t = square_density(tm);
    expect(why, t.at("0") == Rat(1, 2) && t.at("1") == Rat(1, 2),
           "exact square densities != 1/2");
    std::uint64_t ones = 0;
    for (std::uint64_t n = 0; n < 1000000; ++n)
        if (evaluate(tm, n * n) == "1") ++ones;
    double freq = static_cast<double>(ones) / 1e6;
    expect(why, std::fabs(freq - 0.5) <= 0.01,
           "empirical " + dstr(freq) + " off exact 0.5 by more than 0.01");
}

void ac5(std::ostringstream& why) {
    Dfao ts = corpus("threestate.aut");
    DensityReport rep = density_along(ts, Along::primes());
    expect(why, !rep.natural_exists, "natural density should not exist");
    expect(why, rep.witness.has_value(), "missing witness");
    if (rep.witness) {
        std::set<Rat> vals{rep.witness->value_a, rep.witness->value_b};
        expect(why, vals == std::set<Rat>{Rat(0), Rat(1)}, "witness values != {0, 1}");
    }
    const LogLin& lb = rep.log_table.at("b");
    bool symbolic = lb.exact && lb.c0 == 0 && lb.base == 3 && lb.terms.size() == 1 &&
                    lb.terms[0].first == 1 && lb.terms[0].second == 2;
    expect(why, symbolic, "log density of b is not exactly ln 2 / ln 3");
    EmpiricalEstimate emp = empirical_density(ts, Along::primes(), 1000000, true);
    double mid = lb.midpoint();
    expect(why, std::fabs(emp.freq.at("b") - mid) <= 0.05,
           "log-weighted empirical " + dstr(emp.freq.at("b")) + " off " + dstr(mid) +
               " by more than 0.05");
}

void ac6(std::ostringstream& why) {
    Dfao a = corpus("onezeroone.aut");
    Decomposition dec = decompose(a);
    int comp_one = 0;
    for (size_t i = 0; i < dec.components.size(); ++i) {
        const Dfao& b = dec.components[i].b;
        if (b.out[static_cast<size_t>(b.initial)] == "1") comp_one = static_cast<int>(i) + 1;
    }
    expect(why, comp_one > 0, "no component with constant value 1");
    Dfao ind = dec.indicator(comp_one);
    GeneratorReport gens = generators(ind, 12);
    std::vector<unsigned long long> want;
    unsigned long long p3 = 3;
    for (int lam = 1; lam <= 11; ++lam, p3 *= 3) want.push_back(p3 + 1);
    expect(why, gens.gens == want && !gens.zero_in_s,
           "generator set is not {3^lambda + 1 : 1 <= lambda <= 11}");

    LogLin ld = logdensity_set(ind, Rat(1, 1000000000));
    expect(why, ld.enclosure.width() <= Rat(1, 1000000000), "enclosure wider than 1e-9");
    long double sum = 0, ln3 = std::log(3.0L);
    for (long long lam = 1; lam <= 1000000; ++lam) {
        long double r = std::exp(-static_cast<long double>(lam) * ln3);
        sum += std::log1p(r / (1 + r)) / ln3;
    }
    Rat sr = rat_of_double(static_cast<double>(sum));
    expect(why, ld.enclosure.contains(sr),
           "enclosure misses the directly summed series value " +
               dstr(static_cast<double>(sum)));
}

void ac7(std::ostringstream& why) {
    auto t0 = std::chrono::steady_clock::now();
    Dfao ts = corpus("threestate.aut");
    ExtremalProblem p = build_problem(ts, Along::primes(), "b");
    ExtremalResult up = upper_density(p);
    ExtremalResult lo = lower_density(p);
    expect(why, up.value == Rat(3, 4), "upper density != 3/4");
    expect(why, lo.value == Rat(1, 2), "lower density != 1/2");

    // Rational certificates, recomputed independently.
    expect(why, up.certificate.N == up.certificate.theta * up.certificate.D &&
                    up.certificate.D > 0,
           "upper certificate identity N = theta * D fails");
    auto [nu, du] = series_nd(p, up.certificate.preperiod, up.certificate.period);
    expect(why, nu == up.certificate.N && du == up.certificate.D,
           "upper certificate series do not recompute");
    ExtremalProblem comp = p;
    std::swap(comp.w, comp.w_comp);
    auto [nl, dl] = series_nd(comp, lo.certificate.preperiod, lo.certificate.period);
    expect(why, nl == lo.certificate.N && dl == lo.certificate.D,
           "lower certificate series do not recompute");
    expect(why, lo.value == Rat(1) - lo.certificate.theta,
           "lower value is not 1 - theta of the complement");

    // Exhaustive search over the eventually periodic family: preperiod value
    // m1 < 3^4, period length lambda2 <= 4.
    Rat best(0), worst(1);
    for (long long m1 = 0; m1 < 81; ++m1) {
        std::vector<int> pre = digits(static_cast<unsigned long long>(m1), 3);
        for (int lam = 1; lam <= 4; ++lam) {
            long long bound = pow_ll(3, lam);
            for (long long m2 = 0; m2 < bound; ++m2) {
                std::vector<int> per(static_cast<size_t>(lam), 0);
                long long v = m2;
                for (int i = lam - 1; i >= 0; --i) {
                    per[static_cast<size_t>(i)] = static_cast<int>(v % 3);
                    v /= 3;
                }
                auto [n, d] = series_nd(p, pre, per);
                if (d == 0) continue;
                Rat ratio = n / d;
                if (ratio > best) best = ratio;
                if (ratio < worst) worst = ratio;
            }
        }
    }
    expect(why, best == Rat(3, 4), "family maximum != 3/4");
    expect(why, worst == Rat(1, 2), "family minimum != 1/2");
    double exact_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    expect(why, exact_secs < 10.0, "exact computations took " + dstr(exact_secs) + "s >= 10s");

    // Near x = 2 * 3^12 (binary-like peak 1 2 2 ... 2 in base 3) the prime
    // counting frequency of b should approach the upper density 3/4.
    std::vector<std::uint64_t> primes = sieve_primes(2 * 531441);
    std::uint64_t hits = 0;
    for (std::uint64_t q : primes)
        if (evaluate(ts, q) == "b") ++hits;
    double freq = static_cast<double>(hits) / static_cast<double>(primes.size());
    expect(why, std::fabs(freq - 0.75) <= 0.02,
           "prime frequency " + dstr(freq) + " at the peak is not within 0.02 of 3/4");
}

void ac8(std::ostringstream& why) {
    std::vector<std::pair<std::string, Dfao>> cases;
    for (const char* name :
         {"paperfolding.aut", "thuemorse.aut", "parity3.aut", "parity6.aut", "constant.aut"})
        cases.emplace_back(name, corpus(name));
    Decomposition ts = decompose(corpus("threestate.aut"));
    for (size_t i = 0; i < ts.components.size(); ++i)
        cases.emplace_back("threestate component " + std::to_string(i + 1),
                           ts.components[i].b);
    Decomposition fs = decompose(corpus("fivestate.aut"));
    for (size_t i = 0; i < fs.components.size(); ++i)
        cases.emplace_back("fivestate component " + std::to_string(i + 1),
                           fs.components[i].b);
    cases.emplace_back("paperfolding odd part",
                       minimize(project(compress(corpus("paperfolding.aut"), 2), 1)));
    for (const auto& [label, a] : cases) {
        MullnerData md = mullner_decompose(a);
        std::map<std::string, Rat> via_primes = prime_density(a);
        std::map<std::string, Rat> via_coprime = coprime_density(a, md.K * md.d);
        expect(why, via_primes == via_coprime,
               label + ": prime density != coprime density mod K*d");
    }
}

void ac9(std::ostringstream& why) {
    // (a) quadratic-residue counts against a direct sieve for every modulus.
    for (long long h = 1; h <= 512; ++h) {
        std::vector<long long> counts(static_cast<size_t>(h), 0);
        for (long long n = 0; n < h; ++n) ++counts[static_cast<size_t>((n * n) % h)];
        bool ok = true;
        for (long long m = 0; m < h; ++m)
            if (qr_count(m, h) != rat(counts[static_cast<size_t>(m)], h)) ok = false;
        if (!ok) {
            expect(why, false, "qr counts wrong at modulus " + std::to_string(h));
            break;
        }
    }

    // (b) the exact component-density limits are sandwiched by finite-depth
    // counting on the membership automaton.
    for (const char* name : {"paperfolding.aut", "threestate.aut", "fivestate.aut"}) {
        Decomposition dec = decompose(corpus(name));
        std::vector<std::vector<Rat>> rows = state_density_limits(dec);
        const Dfao& mem = dec.membership;
        size_t n = mem.size();
        int c = static_cast<int>(dec.components.size());
        // cnt[l][q] = number of length-nu digit strings from q whose endpoint
        // carries membership label l (0 = residual).
        std::vector<std::vector<Int>> cnt(static_cast<size_t>(c) + 1,
                                          std::vector<Int>(n, 0));
        for (size_t q = 0; q < n; ++q)
            cnt[static_cast<size_t>(dec.member_output[q])][q] = 1;
        std::vector<std::vector<Int>> at9;
        Int kpow(1);
        for (int nu = 1; nu <= 10; ++nu) {
            std::vector<std::vector<Int>> next(static_cast<size_t>(c) + 1,
                                               std::vector<Int>(n, 0));
            for (size_t l = 0; l <= static_cast<size_t>(c); ++l)
                for (size_t q = 0; q < n; ++q)
                    for (int w = 0; w < mem.base; ++w)
                        next[l][q] += cnt[l][static_cast<size_t>(mem.step(static_cast<int>(q), w))];
            cnt = std::move(next);
            if (nu == 9) at9 = cnt;
            kpow *= static_cast<long>(dec.K);
        }
        Int kpow9 = kpow / static_cast<long>(dec.K);
        bool ok = true;
        for (int i = 1; i <= c; ++i) {
            for (size_t q = 0; q < n; ++q) {
                Rat f9 = Rat(at9[static_cast<size_t>(i)][q]) / Rat(kpow9);
                Rat f10 = Rat(cnt[static_cast<size_t>(i)][q]) / Rat(kpow);
                Rat slack = Rat(cnt[0][q]) / Rat(kpow);
                const Rat& limit = rows[static_cast<size_t>(i) - 1][q];
                if (!(f9 <= f10 && f10 <= limit && limit <= f10 + slack)) ok = false;
            }
        }
        expect(why, ok, std::string(name) + ": depth-10 counting does not sandwich limits");
    }

    // (c) the factored representation rebuilds exactly the same sequence.
    std::vector<Dfao> prims;
    for (const char* name :
         {"paperfolding.aut", "thuemorse.aut", "parity3.aut", "parity6.aut", "constant.aut"})
        prims.push_back(corpus(name));
    for (const auto& comp : decompose(corpus("threestate.aut")).components)
        prims.push_back(comp.b);
    for (const auto& comp : decompose(corpus("fivestate.aut")).components)
        prims.push_back(comp.b);
    for (const Dfao& a : prims) {
        MullnerData md = mullner_decompose(a);
        expect(why, same_sequence(reconstruction_automaton(md), md.b),
               "reconstruction differs from the factored automaton");
    }

    // (d) construction operations preserve the computed sequence exactly.
    for (const std::string& name : corpus_names()) {
        Dfao a = corpus(name);
        expect(why, same_sequence(minimize(a), a), name + ": minimize changed sequence");
        expect(why, same_sequence(normalize_zero(a), a),
               name + ": zero normalization changed sequence");
        expect(why, same_sequence(project(compress(a, 1), 0), a),
               name + ": trivial compression changed sequence");
    }
    Dfao pf = corpus("paperfolding.aut");
    expect(why,
           same_sequence(project(compress(pf, 6), 3),
                         project(compress(project(compress(pf, 2), 1), 3), 1)),
           "composed compressions disagree: (6n+3) vs (2(3n+1)+1)");
    for (int ell : {2, 3})
        expect(why, same_sequence(rebase_prime_power(power_base(pf, ell)), pf),
               "rebase does not invert the base power " + std::to_string(ell));
}

void ac10(std::ostringstream& why) {
    for (const std::string& name : corpus_names()) {
        Dfao a = corpus(name);
        Decomposition dec = decompose(a);
        Mat B = mat_scale(incidence_matrix(dec.membership), rat(1, dec.K));
        int n = dec.membership.size();
        Mat P = projector_onto_kernel_along_image(mat_sub(B, identity(n)));
        expect(why, mat_eq(mat_mul(P, P), P), name + ": P is not idempotent");
        expect(why, mat_eq(mat_mul(P, B), P) && mat_eq(mat_mul(B, P), P),
               name + ": P does not absorb the transition matrix");
        for (const auto& comp : dec.components) {
            Dfao m = minimize(comp.b);
            std::vector<Rat> v = primitive_state_density(m);
            Mat M = incidence_matrix(m);
            Rat total(0);
            bool eigen = true;
            for (size_t i = 0; i < v.size(); ++i) {
                total += v[i];
                Rat row(0);
                for (size_t j = 0; j < v.size(); ++j) row += M.at(i, j) * v[j];
                if (row != Rat(m.base) * v[i]) eigen = false;
            }
            expect(why, eigen && total == 1,
                   name + ": component eigenvector identity fails");
        }
    }
}

}  // namespace

int main() {
    criterion("AC1", "paperfolding: exact natural state/output densities", ac1);
    criterion("AC2", "paperfolding along primes: exact 1/2 vs primes up to 2*10^7", ac2);
    criterion("AC3", "paperfolding along squares: density 1 with split local parts", ac3);
    criterion("AC4", "thue-morse along squares: exact 1/2 vs 10^6 squares", ac4);
    criterion("AC5", "threestate along primes: no natural density, log density ln2/ln3", ac5);
    criterion("AC6", "onezeroone: generator set 3^lambda + 1 and 1e-9 enclosure", ac6);
    criterion("AC7", "threestate along primes: extremal densities 3/4 and 1/2, certified", ac7);
    criterion("AC8", "prime densities equal coprime densities at modulus K*d", ac8);
    criterion("AC9", "cross-checks: qr counts, depth sandwich, reconstruction, rewrites", ac9);
    criterion("AC10", "linear algebra identities for every bundled automaton", ac10);
    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
