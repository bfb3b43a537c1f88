#include "autodens/extremal.hpp"

#include <algorithm>
#include <map>

#include "autodens/exact_density.hpp"
#include "autodens/structure.hpp"

namespace autodens {

ExtremalProblem build_problem(const Dfao& a, const Along& along, const std::string& alpha) {
    if (along.kind != Along::Primes && along.kind != Along::Coprime)
        throw DomainError("upper/lower densities are available along primes and coprime "
                          "residue classes only (got " + along.describe() + ")");
    Decomposition dec = decompose(a);
    auto limits = state_density_limits(dec);

    ExtremalProblem p;
    p.aut = dec.membership;
    p.K = dec.K;
    int n = p.aut.size();
    p.w.assign(n, Rat(0));
    p.w_comp.assign(n, Rat(0));
    for (size_t i = 0; i < dec.components.size(); ++i) {
        auto table = component_density(dec.components[i].b, along);
        auto it = table.find(alpha);
        Rat t = it == table.end() ? Rat(0) : it->second;
        for (int q = 0; q < n; ++q) {
            p.w[q] += limits[i][q] * t;
            p.w_comp[q] += limits[i][q] * (1 - t);
        }
    }
    return p;
}

namespace {

// Exact solution of v(q) = (r(q) + v(next(q))) / K on a functional graph:
// resolve each walk-to-cycle with a geometric cycle sum, then back-substitute.
std::vector<Rat> eval_functional(const std::vector<int>& next, const std::vector<Rat>& r,
                                 long long K) {
    int n = static_cast<int>(next.size());
    Rat invK(1, static_cast<long>(K));
    std::vector<Rat> val(n, Rat(0));
    std::vector<char> done(n, 0);
    for (int q0 = 0; q0 < n; ++q0) {
        if (done[q0]) continue;
        std::vector<int> path;
        std::map<int, int> pos;
        int cur = q0;
        while (!done[cur] && !pos.count(cur)) {
            pos[cur] = static_cast<int>(path.size());
            path.push_back(cur);
            cur = next[cur];
        }
        int tail_end = static_cast<int>(path.size());
        if (!done[cur]) {
            int rho = pos[cur];
            int len = static_cast<int>(path.size()) - rho;
            Rat s(0), pw = invK;
            for (int i = 0; i < len; ++i) {
                s += r[path[rho + i]] * pw;
                pw *= invK;
            }
            Rat klen(1);
            for (int i = 0; i < len; ++i) klen *= invK;
            val[path[rho]] = s / (1 - klen);
            done[path[rho]] = 1;
            for (int j = rho + len - 1; j > rho; --j) {
                int nx = (j + 1 == rho + len) ? path[rho] : path[j + 1];
                val[path[j]] = (r[path[j]] + val[nx]) * invK;
                done[path[j]] = 1;
            }
            tail_end = rho;
        }
        for (int j = tail_end - 1; j >= 0; --j) {
            val[path[j]] = (r[path[j]] + val[next[path[j]]]) * invK;
            done[path[j]] = 1;
        }
    }
    return val;
}

struct StringSums {
    std::vector<int> preperiod, period;
    Rat N, D;
};

// Follow a digit policy from the initial state; the string is eventually
// periodic, and N, D are its exact geometric sums.
StringSums realize_policy(const Dfao& aut, long long K, const std::vector<Rat>& nmat_row_major,
                          const std::vector<int>& policy) {
    int n = aut.size();
    auto nval = [&](int q, int c) -> const Rat& {
        return nmat_row_major[static_cast<size_t>(q) * aut.base + c];
    };
    std::vector<int> first(n, -1), visit;
    int q = aut.initial;
    while (first[q] == -1) {
        first[q] = static_cast<int>(visit.size());
        visit.push_back(q);
        q = aut.delta[q][policy[q]];
    }
    int rho = first[q];
    int len = static_cast<int>(visit.size()) - rho;

    StringSums out;
    Rat invK(1, static_cast<long>(K));
    Rat pw = invK, npre(0), dpre(0);
    for (int i = 0; i < rho; ++i) {
        int st = visit[i], c = policy[st];
        out.preperiod.push_back(c);
        npre += nval(st, c) * pw;
        dpre += Rat(c) * pw;
        pw *= invK;
    }
    Rat ncyc(0), dcyc(0), cw = invK, kl(1);
    for (int i = 0; i < len; ++i) {
        int st = visit[rho + i], c = policy[st];
        out.period.push_back(c);
        ncyc += nval(st, c) * cw;
        dcyc += Rat(c) * cw;
        cw *= invK;
        kl *= invK;
    }
    Rat shift(1);
    for (int i = 0; i < rho; ++i) shift *= invK;
    out.N = npre + shift * ncyc / (1 - kl);
    out.D = dpre + shift * dcyc / (1 - kl);
    return out;
}

}  // namespace

ExtremalResult maximize_ratio(const Dfao& aut, long long K, const std::vector<Rat>& w) {
    check_dfao(aut);
    if (K != aut.base) throw DomainError("digit base does not match the automaton");
    if (static_cast<int>(w.size()) != aut.size())
        throw DomainError("weight vector size does not match the automaton");
    for (auto& x : w)
        if (x < 0 || x > 1) throw DomainError("weights must lie in [0,1]");
    int n = aut.size();
    int base = aut.base;
    Rat invK(1, static_cast<long>(K));

    // n(q,c) = sum of weights of the targets of strictly smaller digits.
    std::vector<Rat> nmat(static_cast<size_t>(n) * base, Rat(0));
    for (int q = 0; q < n; ++q) {
        Rat acc(0);
        for (int c = 0; c < base; ++c) {
            nmat[static_cast<size_t>(q) * base + c] = acc;
            acc += w[aut.delta[q][c]];
        }
    }
    auto nval = [&](int q, int c) -> const Rat& {
        return nmat[static_cast<size_t>(q) * base + c];
    };

    Rat theta(0);
    ExtremalResult res;
    for (int round = 0;; ++round) {
        if (round > 10000) throw Error("internal: ratio iteration failed to converge");

        // Inner problem: V(q) = max_c (n(q,c) - theta*c + V(delta(q,c))) / K,
        // solved by policy iteration (switch only on strict improvement).
        std::vector<int> policy(n, 0);
        std::vector<Rat> V;
        for (int it = 0;; ++it) {
            if (it > 10000) throw Error("internal: policy iteration failed to converge");
            std::vector<int> next(n);
            std::vector<Rat> reward(n);
            for (int q = 0; q < n; ++q) {
                next[q] = aut.delta[q][policy[q]];
                reward[q] = nval(q, policy[q]) - theta * policy[q];
            }
            V = eval_functional(next, reward, K);
            bool changed = false;
            for (int q = 0; q < n; ++q) {
                Rat cur = (nval(q, policy[q]) - theta * policy[q] + V[aut.delta[q][policy[q]]]) * invK;
                int best_c = policy[q];
                Rat best = cur;
                for (int c = 0; c < base; ++c) {
                    Rat qv = (nval(q, c) - theta * c + V[aut.delta[q][c]]) * invK;
                    if (qv > best) {
                        best = qv;
                        best_c = c;
                    }
                }
                if (best_c != policy[q]) {
                    policy[q] = best_c;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        Rat h = V[aut.initial];
        if (h < 0) throw Error("internal: negative inner optimum");

        if (h == 0) {
            // Optimum reached.  Among digits attaining the Bellman maximum,
            // maximize D so the certificate string is not all zeros.
            std::vector<std::vector<int>> argmax(n);
            for (int q = 0; q < n; ++q) {
                Rat vq = V[q];
                for (int c = 0; c < base; ++c) {
                    Rat qv = (nval(q, c) - theta * c + V[aut.delta[q][c]]) * invK;
                    if (qv == vq) argmax[q].push_back(c);
                }
                if (argmax[q].empty()) throw Error("internal: empty argmax set");
            }
            std::vector<int> dpol(n);
            for (int q = 0; q < n; ++q) dpol[q] = argmax[q].front();
            for (int it = 0;; ++it) {
                if (it > 10000) throw Error("internal: policy iteration failed to converge");
                std::vector<int> next(n);
                std::vector<Rat> reward(n);
                for (int q = 0; q < n; ++q) {
                    next[q] = aut.delta[q][dpol[q]];
                    reward[q] = Rat(dpol[q]);
                }
                auto Dv = eval_functional(next, reward, K);
                bool changed = false;
                for (int q = 0; q < n; ++q) {
                    Rat best = (Rat(dpol[q]) + Dv[aut.delta[q][dpol[q]]]) * invK;
                    int best_c = dpol[q];
                    for (int c : argmax[q]) {
                        Rat qv = (Rat(c) + Dv[aut.delta[q][c]]) * invK;
                        if (qv > best) {
                            best = qv;
                            best_c = c;
                        }
                    }
                    if (best_c != dpol[q]) {
                        dpol[q] = best_c;
                        changed = true;
                    }
                }
                if (!changed) break;
            }
            StringSums s = realize_policy(aut, K, nmat, dpol);
            res.value = theta;
            res.certificate.preperiod = std::move(s.preperiod);
            res.certificate.period = std::move(s.period);
            res.certificate.N = s.N;
            res.certificate.D = s.D;
            res.certificate.theta = theta;
            res.certificate.inner_optimum_zero = true;
            if (res.certificate.D == 0) {
                if (theta != 0) throw Error("internal: positive optimum with zero denominator");
            } else if (res.certificate.N != theta * res.certificate.D) {
                throw Error("internal: certificate string does not attain the optimum");
            }
            return res;
        }

        StringSums s = realize_policy(aut, K, nmat, policy);
        if (s.D == 0) throw Error("internal: improving string has zero denominator");
        Rat next_theta = s.N / s.D;
        if (next_theta <= theta) throw Error("internal: ratio iteration failed to improve");
        theta = next_theta;
    }
}

ExtremalResult upper_density(const ExtremalProblem& p) {
    return maximize_ratio(p.aut, p.K, p.w);
}

ExtremalResult lower_density(const ExtremalProblem& p) {
    ExtremalResult r = maximize_ratio(p.aut, p.K, p.w_comp);
    r.value = 1 - r.value;
    return r;
}

}  // namespace autodens
