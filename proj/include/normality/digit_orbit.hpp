#pragma once

// Orbits read off a finite digit expansion x = 0.d_1 d_2 ... d_M (base b): the
// j-th point {b^j x} is 0.d_{j+1} ... d_M. Everything returned is exact; long
// double approximations only prune candidates before exact confirmation.

#include "normality/discrepancy.hpp"

#include <memory>
#include <mutex>

namespace normality {

class DigitStream {
public:
    DigitStream(std::uint64_t base, std::vector<std::uint32_t> digits);

    std::uint64_t base() const { return base_; }
    std::size_t size() const { return digits_.size(); }
    const std::vector<std::uint32_t>& digits() const { return digits_; }

    // {b^j x} exactly; zero once j passes the last nonzero digit.
    Rational point(std::size_t j) const;
    // Lower approximation with point(j) - approx(j) in [0, approx_error()).
    long double approx(std::size_t j) const;
    long double approx_error() const { return err_; }

    // Discrepancies of the first N points (0 <= j < N).
    Rational star(std::size_t N) const;
    Rational extreme(std::size_t N) const;
    Rational simple(std::size_t N) const;
    Rational block(std::size_t N, std::size_t ell) const;

    // D(F_n, points lo <= j < hi) with F_n the n equal cells.
    Rational cells(std::size_t lo, std::size_t hi, std::uint64_t n) const;
    // Number of points lo <= j < hi lying in I.
    std::size_t count_in(std::size_t lo, std::size_t hi, const Interval& I) const;
    // Index of the cell [c/n, (c+1)/n) holding point j.
    std::uint64_t cell_of(std::size_t j, std::uint64_t n) const;

private:
    Integer suffix_integer(std::size_t j) const;  // digits j..last_nonzero
    int compare_point(std::size_t j, const Rational& q) const;
    const std::vector<std::uint32_t>& ranks() const;

    std::uint64_t base_;
    std::vector<std::uint32_t> digits_;
    std::size_t end_;  // one past the last nonzero digit
    unsigned window_;  // digits used by approx()
    long double scale_;
    long double err_;
    std::shared_ptr<std::once_flag> ranks_once_;
    std::shared_ptr<std::vector<std::uint32_t>> ranks_;
};

// First n base-b digits of x in [0,1), truncating.
std::vector<std::uint32_t> digits_of(const Rational& x, std::uint64_t base, std::size_t n);

}  // namespace normality
