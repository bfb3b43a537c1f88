#include "autodens/rational.hpp"

#include <cstdlib>

namespace autodens {

long long state_budget() {
    if (const char* env = std::getenv("AUTODENS_STATE_BUDGET")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
        throw DomainError("AUTODENS_STATE_BUDGET must be a positive integer");
    }
    return 1'000'000;
}

Rat parse_rat(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational");
    auto dot = s.find('.');
    try {
        if (dot != std::string::npos) {
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            size_t frac_len = s.size() - dot - 1;
            if (digits.empty() || frac_len == 0) throw ParseError("malformed decimal: " + s);
            Int num(digits);
            Int den = 1;
            for (size_t i = 0; i < frac_len; ++i) den *= 10;
            Rat r(num, den);
            r.canonicalize();
            return r;
        }
        Rat r(s);
        r.canonicalize();
        if (r.get_den() == 0) throw ParseError("zero denominator: " + s);
        return r;
    } catch (const std::invalid_argument&) {
        throw ParseError("malformed rational: " + s);
    }
}

RatInterval iv_add(const RatInterval& a, const RatInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

RatInterval iv_scale(const RatInterval& a, const Rat& c) {
    if (c >= 0) return {a.lo * c, a.hi * c};
    return {a.hi * c, a.lo * c};
}

RatInterval iv_div(const RatInterval& a, const RatInterval& b) {
    if (b.lo <= 0 && b.hi >= 0) throw DomainError("interval division by interval containing zero");
    Rat c1 = a.lo / b.lo, c2 = a.lo / b.hi, c3 = a.hi / b.lo, c4 = a.hi / b.hi;
    Rat lo = std::min(std::min(c1, c2), std::min(c3, c4));
    Rat hi = std::max(std::max(c1, c2), std::max(c3, c4));
    return {lo, hi};
}

RatInterval ln_enclosure(const Rat& r) {
    if (r <= 0) throw DomainError("ln of non-positive rational");
    if (r == 1) return {Rat(0), Rat(0)};
    double x = r.get_d();
    double l = std::log(x);
    // Margin dominating: <=1 ulp from mpq->double conversion (relative 2^-52,
    // hence absolute <=2^-52 on ln), <=1-2 ulp from libm log.  2^-48 relative
    // on max(1,|l|) is two orders beyond both combined.
    double margin = std::ldexp(std::max(1.0, std::fabs(l)), -48);
    return {rat_of_double(l - margin), rat_of_double(l + margin)};
}

long long pow_ll(long long k, int e) {
    if (k <= 0 || e < 0) throw DomainError("pow_ll domain");
    long long r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > (3'000'000'000'000'000'000LL / k)) throw DomainError("base power overflows 63 bits");
        r *= k;
    }
    return r;
}

}  // namespace autodens
