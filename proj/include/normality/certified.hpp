#pragma once

// Directed-rounding helpers over MPFR. Every function escalates working
// precision until the integer answer is certified, or throws PrecisionError.

#include "normality/numerics.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace normality {

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr unsigned kMaxPrecisionBits = 1u << 16;

// A term coeff * ln(base).
struct LogTerm {
    Rational coeff;
    std::uint64_t base;
};

// ceil(num / sum_i coeff_i ln base_i); the denominator must be positive.
Integer certified_ceil_ratio(const Rational& num, const std::vector<LogTerm>& den);
// ceil(sum_i coeff_i ln base_i).
Integer certified_ceil_logs(const std::vector<LogTerm>& terms);

// Enclosure [lo, hi] of pi as rationals at `bits` precision.
std::pair<Rational, Rational> pi_bounds(unsigned bits);
// Enclosure of ln(b).
std::pair<Rational, Rational> log_bounds(std::uint64_t b, unsigned bits);

// Least integer strictly greater than x, for x given by an enclosure; throws if
// the enclosure straddles an integer.
Integer least_integer_above(const Rational& lo, const Rational& hi);

// Closed enclosure [lo, hi] of a positive real, carried in MPFR with directed
// rounding. Only the monotone operations the bound formulas need are provided.
class Bracket {
public:
    explicit Bracket(unsigned bits);
    Bracket(const Bracket& o);
    Bracket& operator=(const Bracket& o);
    ~Bracket();

    static Bracket of(const Rational& q, unsigned bits);
    static Bracket between(const Rational& lo, const Rational& hi, unsigned bits);
    static Bracket ln(std::uint64_t b, unsigned bits);
    static Bracket pi(unsigned bits);

    friend Bracket operator+(const Bracket& a, const Bracket& b);
    friend Bracket operator-(const Bracket& a, const Bracket& b);
    friend Bracket operator*(const Bracket& a, const Bracket& b);
    friend Bracket operator/(const Bracket& a, const Bracket& b);
    // a^e for a >= 0 and e >= 0.
    friend Bracket pow(const Bracket& a, const Bracket& e);
    friend Bracket max(const Bracket& a, const Bracket& b);
    friend Bracket exp(const Bracket& a);

    Rational lower() const;
    Rational upper() const;
    // Least integer strictly above the enclosed value; throws PrecisionError
    // if the enclosure straddles an integer.
    Integer least_integer_above() const;
    // floor(log2(upper)) + 1, a size hint for precision escalation.
    long magnitude_bits() const;
    unsigned bits() const { return bits_; }

    // From two mpfr_srcptr endpoints.
    static Bracket from_parts(const void* lo, const void* hi, unsigned bits);

private:
    unsigned bits_;
    void* lo_;
    void* hi_;
};

// Repeats `f(bits)` with doubling precision until it stops throwing
// PrecisionError; rethrows past kMaxPrecisionBits.
template <class F>
auto with_escalation(F&& f, unsigned start = 128) {
    for (unsigned bits = start;; bits *= 2) {
        try {
            return f(bits);
        } catch (const PrecisionError&) {
            if (bits >= kMaxPrecisionBits) throw;
        }
    }
}

}  // namespace normality
