#pragma once

#include "normality/numerics.hpp"

#include <map>
#include <optional>

namespace normality {

using IntervalFamily = std::vector<Interval>;

struct BlockStats {
    std::size_t block_length = 0;
    std::map<std::vector<std::uint32_t>, std::uint64_t> counts;
};

// Exact sup over [u,v) of |#{u <= x_n < v}/N - (v-u)|.
Rational extreme_discrepancy(const UnitSequence& seq);
// Audit path: enumerates intervals with endpoints in the point set plus {0,1},
// taking both one-sided limits at each endpoint.
Rational extreme_discrepancy_bruteforce(const UnitSequence& seq);

// Anchored intervals [0,v).
Rational star_discrepancy(const UnitSequence& seq);

Rational family_discrepancy(const IntervalFamily& F, const UnitSequence& seq);
IntervalFamily equipartition(std::uint64_t n);

struct PartitionBound {
    Rational family_value;
    std::optional<Rational> implied_bound;
};
PartitionBound partition_bound(const Rational& eps, const UnitSequence& seq);
std::uint64_t partition_cells(const Rational& eps);  // ceil(3/eps)

BlockStats block_stats(const DigitBlock& w, std::size_t ell);
Rational block_discrepancy(const DigitBlock& w, std::size_t ell);

Rational simple_discrepancy(const UnitSequence& seq, Base r);

bool perturbation_bound(const Rational& eps, std::uint64_t N, std::uint64_t n);
std::optional<Rational> chain_bound(const Rational& eps, const std::vector<std::uint64_t>& breakpoints,
                                    const std::vector<Rational>& block_discrepancies);
std::optional<Rational> avoidance_bound(const Interval& I, const UnitSequence& seq, std::uint64_t m);

Integer ceil_q(const Rational& q);
Integer floor_q(const Rational& q);

}  // namespace normality
