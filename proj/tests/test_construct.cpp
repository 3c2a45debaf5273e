#include "normality/construct.hpp"
#include "normality/digit_orbit.hpp"
#include "normality/discrepancy.hpp"
#include "normality/runfile.hpp"

#include <doctest.h>

#include <sstream>

using namespace normality;

namespace {

Integer I(std::uint64_t v) { return Integer(std::to_string(v)); }

Schedule desk(std::uint64_t cap_ell, std::uint64_t seed = 0) {
    Schedule s;
    s.cap_ell = cap_ell;
    s.seed = seed;
    return s;
}

std::string serialize(const ConstructedReal& x) {
    std::ostringstream os;
    write_run(os, x);
    return os.str();
}

// Direct reading of the definition.
std::uint64_t x_search_oracle(const PredicateOracle& phi, std::uint64_t s, std::uint64_t n, std::uint64_t c) {
    for (std::uint64_t x = 1; x < c; ++x)
        for (std::uint64_t y = 0; y < n; ++y) {
            bool all = true, miss = false;
            for (std::uint64_t z = 0; z < n; ++z) all = all && phi.theta(s, x, y, z);
            for (std::uint64_t z = 0; z < c; ++z) miss = miss || !phi.theta(s, x, y, z);
            if (all && miss) return x;
        }
    return c;
}

void check_nesting(const ConstructedReal& x) {
    for (std::size_t i = 1; i < x.stages.size(); ++i) {
        const AdicInterval& outer = x.stages[i - 1].interval;
        const AdicInterval& inner = x.stages[i].interval;
        CHECK(inner.inside(outer.interval()));
        CHECK(inner.width() < outer.width());
        CHECK(inner.width() == ratio(1, ipow(inner.base.value, std::uint64_t(inner.power) * inner.depth)));
    }
}

bool R_is_independent(const StageState& st) {
    for (auto r : st.R)
        if (mult_dependent(Base{r}, st.s) || minimal_representative(Base{r}).value != r) return false;
    return true;
}

}  // namespace

TEST_CASE("rendering digits") {
    RenderResult a = render_digits(Interval(Rational(3, 8), Rational(1, 2)), Base{2}, 3);
    CHECK(a.prefix.digits == std::vector<std::uint32_t>{0, 1, 1});
    CHECK(a.undetermined == 0);
    RenderResult b = render_digits(Interval(Rational(0), Rational(1, 9)), Base{3}, 2);
    CHECK(b.prefix.digits == std::vector<std::uint32_t>{0, 0});
    CHECK(b.undetermined == 0);
    // 0.25 and 0.4999... already differ in the first decimal digit.
    RenderResult c = render_digits(Interval(Rational(1, 4), Rational(1, 2)), Base{10}, 2);
    CHECK(c.prefix.digits.empty());
    CHECK(c.undetermined == 2);
    // [0.25, 0.26) fixes two decimals.
    RenderResult d = render_digits(Interval(Rational(1, 4), Rational(26, 100)), Base{10}, 3);
    CHECK(d.prefix.digits == std::vector<std::uint32_t>{2, 5});
    CHECK(d.undetermined == 1);
}

TEST_CASE("enumerations with repetition") {
    std::vector<std::uint64_t> got;
    for (std::uint64_t c = 1; c <= 10; ++c) got.push_back(enumerate_M(c));
    CHECK(got == std::vector<std::uint64_t>{2, 2, 3, 2, 3, 5, 2, 3, 5, 6});
    CHECK(enumerate_list(4, {3, 7}) == 3);
    CHECK(enumerate_list(5, {3, 7}) == 7);
    CHECK(enumerate_list(3, {3, 7}) == 7);
    // Every element keeps returning.
    int twos = 0;
    for (std::uint64_t c = 1; c <= 200; ++c) twos += enumerate_M(c) == 2;
    CHECK(twos >= 15);
    CHECK(diagonal_element(6, [](std::uint64_t i) { return i * 10; }) == 30);
}

TEST_CASE("x search") {
    PredicateOracle t = oracle_true();
    PredicateOracle f = oracle_false();
    for (std::uint64_t n = 0; n < 6; ++n)
        for (std::uint64_t c = n + 1; c < 9; ++c) {
            CHECK(x_search(t, 3, n, c) == c);
            CHECK(x_search(f, 3, n, c) == x_search_oracle(f, 3, n, c));
        }
    PredicateOracle mixed;
    mixed.theta = [](std::uint64_t, std::uint64_t x, std::uint64_t y, std::uint64_t z) { return z < x + y; };
    for (std::uint64_t n = 1; n < 6; ++n)
        for (std::uint64_t c = n + 1; c < 12; ++c) CHECK(x_search(mixed, 2, n, c) == x_search_oracle(mixed, 2, n, c));
    CHECK(x_search(mixed, 2, 2, 9) == 1);
    CHECK_THROWS(oracle_by_name("nope"));
}

TEST_CASE("length budget") {
    SchmidtConfig cfg;
    EllBudget big = ell_budget({2}, Base{3}, 1, Rational(1, 2), cfg);
    CHECK(big.value > ipow(10, 100));
    for (const Integer& t : {big.transfer, big.block_count, big.survey, big.weyl}) CHECK(t <= big.value);
    EllBudget smaller_eps = ell_budget({2}, Base{3}, 1, Rational(1, 4), cfg);
    CHECK(smaller_eps.transfer >= big.transfer);
    CHECK(smaller_eps.weyl >= big.weyl);
    CHECK(smaller_eps.value >= big.value);

    CHECK(transfer_cells(Rational(1, 2)) == 400);
    CHECK(transfer_cells(Rational(1)) == 100);
    CHECK(transfer_cells(Rational(1, 3)) == 900);
    CHECK(transfer_ell0(Base{2}, Rational(1, 2)) >= transfer_ell0(Base{2}, Rational(1)));
}

TEST_CASE("base-3 denial blocks use digits 0 and 1") {
    ConstructedReal x = thm5_run({}, {3}, 12, desk(48));
    CHECK(x.stages.size() == 13);
    check_nesting(x);
    for (std::size_t i = 1; i < x.stages.size(); ++i) {
        const StageState& st = x.stages[i];
        for (auto d : expand_block(st.block, st.s, st.k).digits) CHECK(d <= 1);
    }
}

TEST_CASE("two required bases, one denial base") {
    ConstructedReal x = thm5_run({2}, {3}, 16, desk(64, 7));
    check_nesting(x);
    CHECK_THROWS(thm5_run({3}, {3}, 2, desk(32)));

    // Resuming from a prefix reproduces the uninterrupted run.
    ConstructedReal head = thm5_run({2}, {3}, 6, desk(64, 7));
    ConstructedReal cont = thm5_run({2}, {3}, 16, desk(64, 7), &head);
    CHECK(serialize(cont) == serialize(x));
    // So does a run read back from its file.
    std::istringstream in(serialize(head));
    ConstructedReal loaded = read_run(in);
    CHECK(serialize(thm5_run({2}, {3}, 16, desk(64, 7), &loaded)) == serialize(x));

    CHECK(serialize(thm5_run({2}, {3}, 16, desk(64, 7))) == serialize(x));
}

TEST_CASE("denial base 2 runs in base 4") {
    ConstructedReal x = thm5_run({3}, {2}, 6, desk(48));
    check_nesting(x);
    CHECK(x.stages.back().s.value == 4);
}

TEST_CASE("all-bases path with a true oracle") {
    ConstructedReal x = thm2_run(oracle_true(), 8, desk(64));
    CHECK(x.stages.size() == 9);
    check_nesting(x);
    for (std::size_t i = 1; i < x.stages.size(); ++i) {
        const StageState& st = x.stages[i];
        CHECK(st.x == st.c);
        CHECK(R_is_independent(st));
    }
    // Star discrepancy of the determined prefix, first geometric checkpoint (64) against the last.
    auto falls = [](const ConstructedReal& run, std::uint64_t b) {
        RenderResult r = render_digits(run, Base{b}, 100000);
        DigitStream ds(b, r.prefix.digits);
        const std::size_t n = r.prefix.digits.size();
        REQUIRE(n > 256);
        return ds.star(n) < ds.star(64);
    };
    CHECK(falls(x, 3));
    // Measured at 8 stages: 0.2186 at N = 741 against 0.1813 at N = 64. Reported, not asserted.
    WARN_MESSAGE(falls(x, 2), "base-2 star discrepancy has not yet fallen below its N = 64 value after 8 stages");
    ConstructedReal longer = thm2_run(oracle_true(), 20, desk(64), &x);
    check_nesting(longer);
    CHECK(falls(longer, 2));
    CHECK(falls(longer, 3));
    CHECK(serialize(thm2_run(oracle_true(), 8, desk(64))) == serialize(x));
}

TEST_CASE("thm4 trace and alphabet") {
    const GSchedule g = g_by_name("log2");
    ConstructedReal x = thm4_run(Base{3}, g, 10, desk(96));
    check_nesting(x);
    for (std::size_t i = 1; i < x.stages.size(); ++i) {
        const StageState& st = x.stages[i];
        const std::uint64_t S = ipow(st.s.value, st.k).get_ui();
        for (auto d : st.block.digits) CHECK(d < S - 1);
    }
    std::vector<FPoint> f = f_trace(x);
    REQUIRE(f.size() == x.stages.size());
    for (std::size_t i = 1; i < f.size(); ++i) {
        CHECK(f[i].value <= f[i - 1].value);
        CHECK(f[i].n >= f[i - 1].n);
    }
    for (const FPoint& p : f) {
        if (p.m0) CHECK(p.value == 4 * x.stages[*p.m0].eps);
        else CHECK(p.value == 4);
    }
    CHECK(g.g(0) == Rational(1, 2));
    CHECK(g.g(2) == Rational(1, 4));
    CHECK(g.g(6) == Rational(1, 6));
    CHECK_THROWS_AS(g_by_name("cubic"), std::invalid_argument);
}
