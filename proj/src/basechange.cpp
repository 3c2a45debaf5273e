#include "normality/basechange.hpp"

#include "normality/certified.hpp"
#include "normality/discrepancy.hpp"

#include <cmath>

namespace normality {

AdicInterval::AdicInterval(Base b, unsigned k, std::uint64_t d, Integer i)
    : base(b), power(k), depth(d), index(std::move(i)) {
    if (k == 0) throw std::domain_error("adic interval: power must be positive");
    if (index < 0 || index >= ipow(base.value, std::uint64_t(power) * depth))
        throw std::domain_error("adic interval: index out of range");
}

Rational AdicInterval::width() const {
    Rational w(1, ipow(base.value, std::uint64_t(power) * depth));
    return w;
}

Rational AdicInterval::lower() const {
    Rational q(index, ipow(base.value, std::uint64_t(power) * depth));
    q.canonicalize();
    return q;
}

Rational AdicInterval::upper() const {
    Rational q(index + 1, ipow(base.value, std::uint64_t(power) * depth));
    q.canonicalize();
    return q;
}

namespace {

// A depth d with (s^k)^-d > mu, close below the least depth with (s^k)^-d <= mu.
std::uint64_t depth_estimate(const Rational& mu, Base s, unsigned k) {
    long en, ed;
    const double mn = mpz_get_d_2exp(&en, mu.get_num_mpz_t());
    const double md = mpz_get_d_2exp(&ed, mu.get_den_mpz_t());
    const double ln_inv = std::log(md / mn) + double(ed - en) * std::log(2.0);
    const double est = std::floor(ln_inv / (k * std::log(double(s.value)))) - 2;
    std::uint64_t d = est > 0 ? static_cast<std::uint64_t>(est) : 0;
    while (d > 0 && Rational(1, ipow(s.value, std::uint64_t(k) * d)) <= mu) --d;
    return d;
}

}  // namespace

std::optional<AdicInterval> leftmost_cell(const Interval& I, Base s, unsigned k, std::uint64_t depth) {
    const Integer scale = ipow(s.value, std::uint64_t(k) * depth);
    Integer idx = ceil_q(I.lower * scale);
    if (idx < 0) idx = 0;
    if (ratio(idx + 1, scale) > I.upper || idx >= scale) return std::nullopt;
    return AdicInterval(s, k, depth, idx);
}

AdicInterval adic_subinterval(const Interval& I, Base s) {
    const Rational mu = I.length();
    if (mu <= 0) throw std::domain_error("adic_subinterval: empty interval");
    if (I.lower < 0 || I.upper > 1) throw std::domain_error("adic_subinterval: interval must lie in [0, 1]");
    // Least m with s^-m <= mu.
    std::uint64_t m = 0;
    while (Rational(1, ipow(s.value, m)) > mu) ++m;
    if (auto cell = leftmost_cell(I, s, 1, m)) return *cell;
    // No depth-m cell fits, so I straddles one grid point g; one of the two
    // depth-(m+1) cells beside g fits.
    const Integer scale = ipow(s.value, m + 1);
    const Integer g = ceil_q(I.lower * ipow(s.value, m)) * s.value;
    if (ratio(g - 1, scale) >= I.lower) return AdicInterval(s, 1, m + 1, g - 1);
    if (ratio(g + 1, scale) <= I.upper) return AdicInterval(s, 1, m + 1, g);
    throw std::logic_error("adic_subinterval: case split found no cell");
}

std::uint64_t nested_refinement_offset(Base b0, unsigned k0, Base b1, unsigned k1) {
    Integer v = certified_ceil_logs({{Rational(k0), b0.value}, {Rational(3 * k1), b1.value}});
    return v.get_ui();
}

std::uint64_t nested_refinement_offset(Base s0, Base s1) { return nested_refinement_offset(s0, 1, s1, 1); }

std::uint64_t padding(Base b0, unsigned k0, Base b1, unsigned k1) {
    return 2 * nested_refinement_offset(b0, k0, b1, k1);
}

std::uint64_t padding(Base s0, Base s1) { return padding(s0, 1, s1, 1); }

std::pair<std::uint64_t, AdicInterval> nested_refinement(const AdicInterval& I, std::uint64_t b, Base s1,
                                                         unsigned k1) {
    if (I.depth != scaled_index_or_zero(b, I.base, I.power))
        throw std::domain_error("nested_refinement: interval depth is not <b; s0>");
    const std::uint64_t a = b + nested_refinement_offset(I.base, I.power, s1, k1);
    const std::uint64_t depth = scaled_index_pow(a, s1, k1);
    auto J = leftmost_cell(I.interval(), s1, k1, depth);
    if (!J) throw std::logic_error("nested_refinement: no s1-adic cell at depth <a; s1> inside I");
    return {a, *J};
}

std::pair<std::uint64_t, AdicInterval> minimal_refinement(const Interval& I, Base s, unsigned k) {
    if (I.length() <= 0) throw std::domain_error("minimal_refinement: empty interval");
    std::uint64_t d = depth_estimate(I.length(), s, k);
    while (Rational(1, ipow(s.value, std::uint64_t(k) * d)) > I.length()) ++d;
    while (!leftmost_cell(I, s, k, d)) ++d;
    // Least a with <a; s^k> >= d; any deeper cell of a fitting depth also fits.
    std::uint64_t lo = 0, hi = 1;
    while (scaled_index_or_zero(hi, s, k) < d) hi *= 2;
    while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (scaled_index_or_zero(mid, s, k) >= d) hi = mid;
        else lo = mid + 1;
    }
    auto cell = leftmost_cell(I, s, k, scaled_index_or_zero(lo, s, k));
    if (!cell) throw std::logic_error("minimal_refinement: deeper cell missing");
    return {lo, *cell};
}

}  // namespace normality
