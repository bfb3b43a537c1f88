#include "autodens/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace autodens {

std::vector<std::uint64_t> sieve_primes(std::uint64_t limit) {
    std::vector<std::uint64_t> primes;
    if (limit < 2) return primes;
    std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 2;
    while (root * root > limit + 1) --root;
    std::vector<char> small(root + 1, 1);
    for (std::uint64_t i = 2; i <= root; ++i) {
        if (!small[i]) continue;
        if (i <= limit) primes.push_back(i);
        for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
    }
    std::vector<std::uint64_t> base(primes);
    const std::uint64_t seg = 1 << 20;
    std::vector<char> mark(seg);
    for (std::uint64_t lo = root + 1; lo <= limit; lo += seg) {
        std::uint64_t hi = std::min(limit, lo + seg - 1);
        std::fill(mark.begin(), mark.begin() + (hi - lo + 1), 1);
        for (std::uint64_t p : base) {
            if (p * p > hi) break;
            std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
            for (std::uint64_t j = start; j <= hi; j += p) mark[j - lo] = 0;
        }
        for (std::uint64_t j = lo; j <= hi; ++j)
            if (mark[j - lo]) primes.push_back(j);
    }
    return primes;
}

std::vector<std::uint64_t> first_primes(std::size_t n) {
    if (n == 0) return {};
    double nn = static_cast<double>(std::max<std::size_t>(n, 6));
    std::uint64_t bound =
        static_cast<std::uint64_t>(nn * (std::log(nn) + std::log(std::log(nn)))) + 16;
    for (;;) {
        auto ps = sieve_primes(bound);
        if (ps.size() >= n) {
            ps.resize(n);
            return ps;
        }
        bound += bound / 2;
    }
}

EmpiricalEstimate empirical_density(const Dfao& a, const Along& along, std::uint64_t terms,
                                    bool log_weighted) {
    check_dfao(a);
    if (terms == 0) throw DomainError("term count must be positive");
    EmpiricalEstimate est;
    est.along = along;
    est.log_weighted = log_weighted;
    est.terms = terms;

    long double total = 0;
    std::map<std::string, long double> acc;
    std::uint64_t index = 0;  // l in the weight 1/l
    auto add = [&](std::uint64_t n) {
        ++index;
        long double wgt = log_weighted ? 1.0L / static_cast<long double>(index) : 1.0L;
        std::string v = evaluate(a, n);
        acc[v] += wgt;
        est.counts[v] += 1;
        total += wgt;
    };

    switch (along.kind) {
        case Along::Naturals:
            for (std::uint64_t n = 1; n <= terms; ++n) add(n);
            break;
        case Along::Primes:
            for (std::uint64_t p : first_primes(terms)) add(p);
            break;
        case Along::Squares: {
            if (terms > 3000000000ULL)
                throw DomainError("square index exceeds the 64-bit evaluation range");
            for (std::uint64_t l = 1; l <= terms; ++l) add(l * l);
            break;
        }
        case Along::Coprime: {
            std::uint64_t M = static_cast<std::uint64_t>(along.modulus);
            std::uint64_t taken = 0;
            for (std::uint64_t n = 1; taken < terms; ++n) {
                if (n == 0) throw DomainError("coprime scan exceeded the 64-bit range");
                if (std::gcd(n, M) == 1) {
                    add(n);
                    ++taken;
                }
            }
            break;
        }
    }
    for (auto& [k, v] : acc) est.freq[k] = static_cast<double>(v / total);
    return est;
}

Comparison compare(const DensityReport& exact, const EmpiricalEstimate& emp, double tol,
                   bool log_mode) {
    if (log_mode != emp.log_weighted)
        throw DomainError(log_mode ? "log-density comparison needs a log-weighted estimate"
                                   : "natural-density comparison needs an unweighted estimate");
    if (!log_mode && !exact.natural_exists)
        throw DomainError("natural density does not exist; compare in log mode");
    Comparison cmp;
    cmp.tolerance = tol;
    cmp.pass = true;

    std::vector<std::string> symbols;
    if (log_mode)
        for (auto& [k, v] : exact.log_table) symbols.push_back(k);
    else
        for (auto& [k, v] : exact.natural_table) symbols.push_back(k);
    for (auto& [k, v] : emp.freq)
        if (std::find(symbols.begin(), symbols.end(), k) == symbols.end()) symbols.push_back(k);

    for (auto& sym : symbols) {
        ComparisonLine line;
        line.alpha = sym;
        double radius = 0, exact_mid = 0;
        if (log_mode) {
            auto it = exact.log_table.find(sym);
            if (it != exact.log_table.end()) {
                const RatInterval& e = it->second.enclosure;
                exact_mid = (rat_to_double(e.lo) + rat_to_double(e.hi)) / 2;
                radius = rat_to_double(e.hi - e.lo) / 2;
            }
        } else {
            auto it = exact.natural_table.find(sym);
            if (it != exact.natural_table.end()) exact_mid = rat_to_double(it->second);
        }
        auto fit = emp.freq.find(sym);
        double e = fit == emp.freq.end() ? 0.0 : fit->second;
        line.exact_value = exact_mid;
        line.radius = radius;
        line.empirical = e;
        line.pass = std::abs(e - exact_mid) <= tol + radius;
        cmp.pass = cmp.pass && line.pass;
        cmp.lines.push_back(line);
    }
    return cmp;
}

}  // namespace autodens
