#pragma once

#include "normality/numerics.hpp"

#include <optional>
#include <set>

namespace normality {

// midpoint +- radius, both exact rationals.
struct ApproxReal {
    Rational midpoint;
    Rational radius;

    Rational lower() const { return midpoint - radius; }
    Rational upper() const { return midpoint + radius; }
    bool contains(const Rational& x) const { return lower() <= x && x <= upper(); }
};

constexpr std::uint64_t kMaxMaterializedT = 1u << 20;

struct LevequeParams {
    Integer m;
    std::vector<std::int64_t> T;  // {1, ..., m}; left empty when m > kMaxMaterializedT
    Rational delta;               // certified lower bound of eps^3 pi^2 / (24 m)
    Rational source_eps;
};

struct SchmidtConfig {
    Rational c{1, 100};
};

// Raised when an enclosure cannot be made decisive within the precision cap.
struct UndecidedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

LevequeParams leveque_parameters(const Rational& eps);

ApproxReal weyl_power(const UnitSequence& seq, std::int64_t t, const Rational& precision);
ApproxReal leveque_bound(const UnitSequence& seq, std::uint64_t m, const Rational& precision);

using BaseSet = std::set<std::uint64_t>;
using FreqSet = std::vector<std::int64_t>;

ApproxReal exp_sum_A(const Rational& xi, const BaseSet& R, const FreqSet& T, std::uint64_t a,
                     std::uint64_t ell, const Rational& precision);

// Decisive comparison A(xi,...) / scale < delta: enclosure is refined until it
// falls on one side; throws UndecidedError otherwise.
bool exp_sum_A_below(const Rational& xi, const BaseSet& R, const FreqSet& T, std::uint64_t a,
                     std::uint64_t ell, const Rational& scale, const Rational& delta);

ApproxReal cosine_constant(const Rational& precision);

std::uint64_t schmidt_p(const BaseSet& R, const FreqSet& T, Base s);
// Same, for a frequency set given only by max |t|.
std::uint64_t schmidt_p(const BaseSet& R, const Integer& t_max, Base s);

// s_pow = s^k.
Integer lemma317_ell0(const BaseSet& R, const FreqSet& T, Base s, unsigned k, const SchmidtConfig& cfg);
// Same, for T given by its size and max |t| (T = {1, ..., m} when not materialised).
Integer lemma317_ell0(const BaseSet& R, const Integer& t_count, const Integer& t_max, Base s, unsigned k,
                      const SchmidtConfig& cfg);

struct SurveyResult {
    Rational fraction_passing;
    std::vector<DigitBlock> witnesses;  // up to 100, lexicographic
    bool estimated = false;             // true when sampled
    std::uint64_t examined = 0;
    std::uint64_t passing = 0;
};

// eta is s^k-adic with precision <a; s^k>; candidates extend it by blocks of
// length <a+ell; s^k> - <a; s^k> over the restricted alphabet.
SurveyResult candidate_survey(const AdicRational& eta, Base s, unsigned k, std::uint64_t a, std::uint64_t ell,
                              const BaseSet& R, const FreqSet& T, const Rational& threshold,
                              std::optional<std::uint64_t> sample, std::uint64_t seed,
                              std::uint64_t budget = 1ull << 24);

std::uint64_t restricted_alphabet_size(Base s, unsigned k);

}  // namespace normality
