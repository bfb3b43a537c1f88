#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "autodens/verify.hpp"
#include "corpus.hpp"

using namespace autodens;
using namespace testutil;

TEST_CASE("prime sieve") {
    CHECK(sieve_primes(30) ==
          std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(sieve_primes(1).empty());
    CHECK(sieve_primes(2) == std::vector<std::uint64_t>{2});
    CHECK(sieve_primes(1000000).size() == 78498);

    CHECK(first_primes(10) ==
          std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(first_primes(0).empty());
    // pi(1299709) = 100000, a classical checkpoint.
    CHECK(first_primes(100000).back() == 1299709);
}

TEST_CASE("empirical frequencies along the naturals are exact counts") {
    Dfao pf = corpus("paperfolding.aut");
    EmpiricalEstimate e = empirical_density(pf, Along::naturals(), 5000, false);
    CHECK(e.terms == 5000);
    std::uint64_t total = 0;
    for (const auto& [alpha, c] : e.counts) total += c;
    CHECK(total == e.terms);
    for (const auto& [alpha, c] : e.counts) {
        CHECK(e.freq.at(alpha) ==
              doctest::Approx(static_cast<double>(c) / 5000.0).epsilon(1e-15));
    }
    // Recount by direct evaluation.
    std::uint64_t ones = 0;
    for (unsigned long long n = 0; n < 5000; ++n)
        if (evaluate(pf, n) == "1") ++ones;
    CHECK(e.counts.at("1") == ones);
}

TEST_CASE("empirical estimates approach the exact answers") {
    Dfao pf = corpus("paperfolding.aut");
    EmpiricalEstimate primes = empirical_density(pf, Along::primes(), 50000, false);
    CHECK(primes.terms == 50000);
    CHECK(primes.freq.at("1") == doctest::Approx(0.5).epsilon(0.02));

    EmpiricalEstimate squares = empirical_density(pf, Along::squares(), 20000, false);
    CHECK(squares.freq.at("1") > 0.9);

    Dfao p3 = corpus("parity3.aut");
    EmpiricalEstimate cp = empirical_density(p3, Along::coprime(6), 30000, false);
    CHECK(cp.freq.at("b") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coprime sampling matches a brute gcd filter") {
    Dfao tm = corpus("thuemorse.aut");
    EmpiricalEstimate e = empirical_density(tm, Along::coprime(12), 200, false);
    std::uint64_t even = 0, taken = 0;
    for (unsigned long long n = 1; taken < 200; ++n) {
        if (std::gcd(n, 12ull) != 1) continue;
        ++taken;
        if (tm_oracle(n) == "0") ++even;
    }
    CHECK(e.counts.at("0") == even);
}

TEST_CASE("logarithmically weighted estimates") {
    Dfao ts = corpus("threestate.aut");
    EmpiricalEstimate e = empirical_density(ts, Along::primes(), 200000, true);
    double sum = 0;
    for (const auto& [alpha, f] : e.freq) sum += f;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // ln 2 / ln 3 = 0.63092975...
    CHECK(e.freq.at("b") == doctest::Approx(0.63093).epsilon(0.05));
    // Unweighted prime counts oscillate for this sequence, but stay in range.
    EmpiricalEstimate u = empirical_density(ts, Along::primes(), 200000, false);
    CHECK(u.freq.at("b") > 0.45);
    CHECK(u.freq.at("b") < 0.8);
}

TEST_CASE("estimate validation") {
    Dfao pf = corpus("paperfolding.aut");
    CHECK_THROWS_AS(empirical_density(pf, Along::naturals(), 0, false), DomainError);
    // Squared indices would overflow 64-bit arithmetic.
    CHECK_THROWS_AS(empirical_density(pf, Along::squares(), 4300000000ull, false),
                    DomainError);
}

TEST_CASE("comparison of exact and empirical tables") {
    Dfao pf = corpus("paperfolding.aut");
    DensityReport exact = density_along(pf, Along::primes());
    EmpiricalEstimate emp = empirical_density(pf, Along::primes(), 50000, false);

    Comparison cmp = compare(exact, emp, 0.01, false);
    CHECK(cmp.pass);
    CHECK(cmp.tolerance == 0.01);
    REQUIRE(cmp.lines.size() == 2);
    for (const ComparisonLine& line : cmp.lines) {
        CHECK(line.exact_value == doctest::Approx(0.5));
        CHECK(line.pass);
        CHECK(std::fabs(line.exact_value - line.empirical) <= 0.01 + line.radius);
    }

    // An absurdly tight tolerance fails cleanly instead of throwing.
    Comparison tight = compare(exact, emp, 1e-12, false);
    CHECK(!tight.pass);

    // Mode mismatches are rejected.
    EmpiricalEstimate logemp = empirical_density(pf, Along::primes(), 1000, true);
    CHECK_THROWS_AS(compare(exact, logemp, 0.01, false), DomainError);
    CHECK_THROWS_AS(compare(exact, emp, 0.01, true), DomainError);
}

TEST_CASE("natural-mode comparison needs a natural table") {
    Dfao ts = corpus("threestate.aut");
    DensityReport exact = density_along(ts, Along::primes());
    REQUIRE(!exact.natural_exists);
    EmpiricalEstimate emp = empirical_density(ts, Along::primes(), 1000, false);
    CHECK_THROWS_AS(compare(exact, emp, 0.05, false), DomainError);
    // The logarithmic route works.
    EmpiricalEstimate logemp = empirical_density(ts, Along::primes(), 300000, true);
    Comparison cmp = compare(exact, logemp, 0.05, true);
    CHECK(cmp.pass);
}
