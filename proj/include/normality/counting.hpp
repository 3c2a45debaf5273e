#pragma once

// Counting good digit blocks: exhaustive oracles and certified thresholds.

#include "normality/numerics.hpp"

#include <optional>
#include <string>

namespace normality {

constexpr std::uint64_t kEnumerationBudget = 1ull << 24;

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AlphabetChoice { drop_one, drop_two };

struct RestrictedAlphabet {
    Base s;
    unsigned k;
    Integer s_tilde;

    RestrictedAlphabet(Base s, unsigned k, AlphabetChoice choice);
    // s^k - 1 for odd s, s^k - 2 for even s.
    static RestrictedAlphabet for_construction(Base s, unsigned k);
};

// #{v in Lambda_s^N : C(ell, v) < eps}.
Integer good_block_count(Base s, std::size_t ell, const Rational& eps, std::size_t N,
                         std::uint64_t budget = kEnumerationBudget);

struct Threshold {
    std::uint64_t N0;
    std::string method;  // "tail-bound" or "empirical"
};

// Least N0 such that the bad fraction #{C(ell,v) >= eps}/s^N is < delta for all
// N >= N0, from a Hoeffding bound over ell interleaved streams.
Threshold lemma312_threshold(Base s, std::size_t ell, const Rational& eps, const Rational& delta);
// Doubling search on exhaustive counts: least N (up to the budget) at which the
// bad fraction drops below delta and stays there for every affordable N after it.
std::optional<Threshold> lemma312_empirical(Base s, std::size_t ell, const Rational& eps, const Rational& delta,
                                            std::uint64_t budget = kEnumerationBudget);

struct DefectSurvey {
    Integer count;
    Rational fraction;
};

// v in Lambda_2^N whose base-4 reading has at least 5/8 of the doubling orbit
// points {2^m eta_v}, 0 <= m < 2N, in [0, 1/2).
DefectSurvey base4_defect_survey(std::size_t N, std::uint64_t budget = kEnumerationBudget);
Threshold lemma313_threshold(const Rational& eps);

// Base-s rendering of a base-s^k block, k digits per symbol.
DigitBlock expand_block(const DigitBlock& w, Base s, unsigned k);

struct Lemma314Params {
    unsigned k;
    Integer N0;
    std::size_t ell;  // block length used in the reduction
    std::optional<RestrictedAlphabet> alphabet;  // absent when s^k is too large to hold
};

Lemma314Params lemma314_params(Base s, const Rational& eps, AlphabetChoice choice);
// N0 for a given k: least N with 2 s^ell exp(-tau^2 N / 2) < 1/2 and kN > 2 ell (3/eps)^2.
Integer lemma314_N0(Base s, unsigned k, const Rational& eps);

// Fraction of w in Lambda_{s~}^N with D({s^j eta_w} : 0 <= j < kN) < eps.
struct Lemma314Survey {
    Rational fraction;
    bool estimated;
    std::uint64_t examined;
};
Lemma314Survey lemma314_survey(Base s, unsigned k, const RestrictedAlphabet& alphabet, std::size_t N,
                               const Rational& eps, std::optional<std::uint64_t> sample, std::uint64_t seed,
                               std::uint64_t budget = kEnumerationBudget);

}  // namespace normality
