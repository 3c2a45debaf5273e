#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace normality {

using Integer = mpz_class;
using Rational = mpq_class;

struct Base {
    std::uint64_t value;

    explicit Base(std::uint64_t v) : value(v) {
        if (v < 2) throw std::domain_error("base must be >= 2, got " + std::to_string(v));
    }
    friend bool operator==(Base a, Base b) { return a.value == b.value; }
    friend auto operator<=>(Base a, Base b) { return a.value <=> b.value; }
};

// Digits are stored most significant first; base may be a power s^k.
struct DigitBlock {
    std::uint64_t base = 2;
    std::vector<std::uint32_t> digits;

    DigitBlock() = default;
    DigitBlock(std::uint64_t b, std::vector<std::uint32_t> d);
    std::size_t size() const { return digits.size(); }
};

// Sum_j d_j (base^power)^(-j).
struct AdicRational {
    Base base;
    unsigned power;
    DigitBlock digits;

    AdicRational(Base b, unsigned k, DigitBlock d);
    Rational value() const;
};

using UnitSequence = std::vector<Rational>;

// Closed-open [lower, upper).
struct Interval {
    Rational lower;
    Rational upper;

    Interval(Rational lo, Rational hi);
    Rational length() const { return upper - lower; }
    bool contains(const Rational& x) const { return lower <= x && x < upper; }
};

Base minimal_representative(Base b);
bool mult_dependent(Base a, Base b);

// <b;r> = ceil(b / ln r), certified.
std::uint64_t scaled_index(std::uint64_t b, Base r);
// <b;s^k> = ceil(b / (k ln s)), without materialising s^k.
std::uint64_t scaled_index_pow(std::uint64_t b, Base s, unsigned k);

// As above but <0;s^k> = 0, the precision of an empty prefix.
std::uint64_t scaled_index_or_zero(std::uint64_t b, Base s, unsigned k = 1);

Rational adic_value(const DigitBlock& w);
UnitSequence fractional_orbit(const Rational& xi, Base r, std::uint64_t j_lo, std::uint64_t j_hi);

// {x}
Rational frac(const Rational& x);
// num/den in lowest terms; the two-argument mpq_class constructor does not reduce.
Rational ratio(const Integer& num, const Integer& den);
Integer ipow(std::uint64_t b, std::uint64_t e);
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

// The elements of M in increasing order: 2, 3, 5, 6, 7, 10, ...
std::vector<std::uint64_t> minimal_representatives_upto(std::uint64_t limit);

// Uniform draw from {0, ..., n-1} by rejection; unlike
// std::uniform_int_distribution the sequence is the same on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

}  // namespace normality
