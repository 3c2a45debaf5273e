#pragma once

// Adic cells and the refinements that move a nested interval from one base to another.

#include "normality/numerics.hpp"

#include <optional>
#include <utility>

namespace normality {

// [index L, (index+1) L) with L = (base^power)^(-depth).
struct AdicInterval {
    Base base;
    unsigned power = 1;
    std::uint64_t depth = 0;
    Integer index;

    AdicInterval(Base b, unsigned k, std::uint64_t d, Integer i);

    Integer radix() const { return ipow(base.value, power); }
    Rational width() const;
    Rational lower() const;
    Rational upper() const;
    Interval interval() const { return Interval(lower(), upper()); }
    bool inside(const Interval& I) const { return I.lower <= lower() && upper() <= I.upper; }
};

// Leftmost s-adic cell inside I of length >= |I|/(2s).
AdicInterval adic_subinterval(const Interval& I, Base s);

// ceil(ln s0 + 3 ln s1).
std::uint64_t nested_refinement_offset(Base s0, Base s1);
// Same with s0 = b0^k0 and s1 = b1^k1 given by their roots.
std::uint64_t nested_refinement_offset(Base b0, unsigned k0, Base b1, unsigned k1);

// I has depth <b; s0>; returns a = b + offset and the leftmost cell J of I in
// base s1^k1 at depth <a; s1^k1>. Throws std::logic_error if J does not exist.
std::pair<std::uint64_t, AdicInterval> nested_refinement(const AdicInterval& I, std::uint64_t b, Base s1,
                                                         unsigned k1 = 1);

// 2 ceil(ln s0 + 3 ln s1).
std::uint64_t padding(Base s0, Base s1);
std::uint64_t padding(Base b0, unsigned k0, Base b1, unsigned k1);

// Least a with a (s^k)-adic cell of depth <a; s^k> inside I, and the leftmost such cell.
std::pair<std::uint64_t, AdicInterval> minimal_refinement(const Interval& I, Base s, unsigned k);

// Leftmost (s^k)-adic cell of the given depth inside I, if any.
std::optional<AdicInterval> leftmost_cell(const Interval& I, Base s, unsigned k, std::uint64_t depth);

}  // namespace normality
