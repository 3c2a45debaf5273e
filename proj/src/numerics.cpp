#include "normality/numerics.hpp"

#include "normality/certified.hpp"

#include <limits>
#include <map>
#include <mutex>

namespace normality {

DigitBlock::DigitBlock(std::uint64_t b, std::vector<std::uint32_t> d) : base(b), digits(std::move(d)) {
    if (b < 2) throw std::domain_error("digit block base must be >= 2");
    for (auto x : digits)
        if (x >= b) throw std::domain_error("digit out of range for base " + std::to_string(b));
}

AdicRational::AdicRational(Base b, unsigned k, DigitBlock d) : base(b), power(k), digits(std::move(d)) {
    if (k == 0) throw std::domain_error("adic power must be positive");
    Integer full = ipow(b.value, k);
    if (full != Integer(std::to_string(digits.base)))
        throw std::domain_error("digit block base does not match base^power");
}

Rational AdicRational::value() const { return adic_value(digits); }

Interval::Interval(Rational lo, Rational hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (!(0 <= lower && lower < upper && upper <= 1))
        throw std::domain_error("interval must satisfy 0 <= lower < upper <= 1");
}

Integer ipow(std::uint64_t b, std::uint64_t e) {
    Integer r;
    Integer bb(std::to_string(b));
    mpz_pow_ui(r.get_mpz_t(), bb.get_mpz_t(), e);
    return r;
}

static bool is_power_of(std::uint64_t b, std::uint64_t m) {
    unsigned __int128 p = m;
    while (p < b) p *= m;
    return p == b;
}

Base minimal_representative(Base b) {
    for (std::uint64_t m = 2; m <= b.value / m; ++m)
        if (is_power_of(b.value, m)) return Base(m);
    return b;
}

bool mult_dependent(Base a, Base b) { return minimal_representative(a) == minimal_representative(b); }

namespace {
std::mutex cache_mu;
std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> index_cache;
}  // namespace

std::uint64_t scaled_index_pow(std::uint64_t b, Base s, unsigned k) {
    if (b == 0) throw std::domain_error("scaled index requires b >= 1");
    if (k == 0) throw std::domain_error("power must be positive");
    // Memoise on (b, s) for k == 1, the overwhelmingly common case.
    if (k == 1) {
        std::lock_guard<std::mutex> lock(cache_mu);
        auto it = index_cache.find({b, s.value});
        if (it != index_cache.end()) return it->second;
    }
    Integer c = certified_ceil_ratio(Rational(Integer(std::to_string(b))), {{Rational(k), s.value}});
    std::uint64_t out = c.get_ui();
    if (k == 1) {
        std::lock_guard<std::mutex> lock(cache_mu);
        if (index_cache.size() > (1u << 20)) index_cache.clear();
        index_cache[{b, s.value}] = out;
    }
    return out;
}

std::uint64_t scaled_index(std::uint64_t b, Base r) { return scaled_index_pow(b, r, 1); }

std::uint64_t scaled_index_or_zero(std::uint64_t b, Base s, unsigned k) {
    return b == 0 ? 0 : scaled_index_pow(b, s, k);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw std::domain_error("uniform_below: empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    for (;;) {
        std::uint64_t v = rng();
        if (v < limit) return v % n;
    }
}

Rational adic_value(const DigitBlock& w) {
    Integer num = 0;
    Integer base(std::to_string(w.base));
    for (auto d : w.digits) num = num * base + d;
    Rational q(num, ipow(w.base, w.digits.size()));
    q.canonicalize();
    return q;
}

Rational frac(const Rational& x) {
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return x - Rational(f);
}

Rational ratio(const Integer& num, const Integer& den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

UnitSequence fractional_orbit(const Rational& xi, Base r, std::uint64_t j_lo, std::uint64_t j_hi) {
    if (j_lo > j_hi) throw std::domain_error("fractional_orbit: j_lo > j_hi");
    if (xi < 0 || xi >= 1) throw std::domain_error("fractional_orbit: xi outside [0,1)");
    UnitSequence out;
    out.reserve(j_hi - j_lo);
    // Work on the numerator modulo the (fixed) denominator.
    const Integer q = xi.get_den();
    Integer p;
    Integer rj = ipow(r.value, j_lo);
    mpz_mul(p.get_mpz_t(), xi.get_num_mpz_t(), rj.get_mpz_t());
    mpz_mod(p.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    for (std::uint64_t j = j_lo; j < j_hi; ++j) {
        Rational v(p, q);
        v.canonicalize();
        out.push_back(v);
        p *= static_cast<unsigned long>(r.value);
        mpz_mod(p.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    }
    return out;
}

Rational parse_rational(const std::string& text) {
    Rational q;
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string whole = text.substr(0, dot), fracpart = text.substr(dot + 1);
        bool neg = !whole.empty() && whole[0] == '-';
        if (neg) whole = whole.substr(1);
        if (whole.empty()) whole = "0";
        for (char c : whole + fracpart)
            if (c < '0' || c > '9') throw std::invalid_argument("malformed decimal: " + text);
        Integer num(whole + fracpart, 10);
        q = ratio(num, ipow(10, fracpart.size()));
        if (neg) q = -q;
    } else {
        if (q.set_str(text, 10) != 0) throw std::invalid_argument("malformed rational: " + text);
        if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
    }
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::vector<std::uint64_t> minimal_representatives_upto(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t b = 2; b <= limit; ++b)
        if (minimal_representative(Base(b)).value == b) out.push_back(b);
    return out;
}

}  // namespace normality
