#pragma once

// Stage machines for the three constructions, the length budget that drives
// them, and digit rendering of the resulting nested intervals.

#include "normality/basechange.hpp"
#include "normality/counting.hpp"
#include "normality/expsums.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace normality {

enum class Mode { faithful, desk };

// Caps apply in desk mode only. Faithful mode executes the budget values and
// refuses (BudgetError) once a length exceeds faithful_limit.
struct Schedule {
    Mode mode = Mode::desk;
    std::uint64_t cap_ell = 64;
    unsigned cap_k = 1;
    std::uint64_t cap_N = 64;
    std::uint64_t samples = 64;  // candidates drawn per stage
    // Lower bound on the eps fed to the LeVeque parameters in desk mode.
    Rational leveque_floor{1};
    std::uint64_t seed = 0;
    SchmidtConfig schmidt;
    std::uint64_t faithful_limit = 1u << 16;
};

struct LemmaAssertionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OracleBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// theta(r, x, y, z); phi(r) = forall x exists y forall z theta. The evaluator
// must terminate; the search aborts once step_budget evaluations are used.
struct PredicateOracle {
    std::function<bool(std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t)> theta;
    std::string description;
    std::uint64_t step_budget = 1u << 22;
};

PredicateOracle oracle_true();
PredicateOracle oracle_false();  // theta = (z < y)
PredicateOracle oracle_by_name(const std::string& name);

// Element at 1-based position c of the diagonal enumeration with repetition
// e1 | e1 e2 | e1 e2 e3 | ... of the sequence nth(1), nth(2), ...
std::uint64_t diagonal_element(std::uint64_t c, const std::function<std::uint64_t(std::uint64_t)>& nth);
std::uint64_t enumerate_M(std::uint64_t c);
std::uint64_t enumerate_list(std::uint64_t c, const std::vector<std::uint64_t>& elems);

// Least x in [1, c) with a y < n such that theta(s,x,y,z) for all z < n and
// not theta(s,x,y,z) for some z < c; c when there is none.
std::uint64_t x_search(const PredicateOracle& phi, std::uint64_t s, std::uint64_t n, std::uint64_t c);

// ceil(100/eps^2) equal cells.
std::uint64_t transfer_cells(const Rational& eps);
// ceil(ln r + (18/eps^2) ceil(ln ceil(100/eps^2) + 3 ln r)).
Integer transfer_ell0(Base r, const Rational& eps);

struct EllBudget {
    Integer value;  // least integer above every term
    Integer transfer;
    Integer block_count;
    Integer survey;
    Integer weyl;  // least integer above ((ln max R)^2 / delta)^(4/c)
};
EllBudget ell_budget(const BaseSet& R, Base s, unsigned k, const Rational& eps, const SchmidtConfig& cfg);

enum class Theorem { thm2, thm4, thm5 };
std::string theorem_name(Theorem t);

struct StageState {
    std::uint64_t stage_index = 0;
    std::string clause = "init";
    Base s{2};
    unsigned k = 1;
    Rational eps{1};
    std::uint64_t b = 0;
    std::uint64_t ell = 0;
    std::uint64_t c = 1;
    std::uint64_t x = 1;
    BaseSet R;
    unsigned kbar = 1;
    std::uint64_t a = 0;
    DigitBlock block;  // extension digits in base s^k
    AdicInterval interval{Base{2}, 1, 0, 0};
};

struct ConstructedReal {
    Theorem theorem = Theorem::thm5;
    Schedule sched;
    std::map<std::string, std::string> inputs;
    std::vector<StageState> stages;
    std::vector<std::string> report;

    const StageState& last() const { return stages.back(); }
    const AdicInterval& interval() const { return stages.back().interval; }
};

// Base-s digits of the stage interval's left endpoint, k per base-s^k digit.
std::vector<std::uint32_t> stage_digits(const StageState& st);

// Every run function continues `resume` (when given) until `stages` stages
// past the initial one exist; a resumed run equals an uninterrupted one.
ConstructedReal thm2_run(const PredicateOracle& phi, std::uint64_t stages, const Schedule& sched,
                         const ConstructedReal* resume = nullptr);

struct GSchedule {
    std::function<Rational(std::uint64_t)> g;
    std::string name;
};
GSchedule g_by_name(const std::string& name);

struct FPoint {
    std::uint64_t n;
    Rational value;
    std::optional<std::uint64_t> m0;  // stage whose eps gives the value; value 4 when none
};

ConstructedReal thm4_run(Base s, const GSchedule& g, std::uint64_t stages, const Schedule& sched,
                         const ConstructedReal* resume = nullptr);
// f(n) at n = b_m for every recorded stage m.
std::vector<FPoint> f_trace(const ConstructedReal& x);

// R: bases required normal (minimal representatives); S: denial bases, enumerated
// diagonally with repetition. 2 in S runs its stages in base 4.
ConstructedReal thm5_run(const std::vector<std::uint64_t>& R, const std::vector<std::uint64_t>& S,
                         std::uint64_t stages, const Schedule& sched, const ConstructedReal* resume = nullptr);

struct RenderResult {
    DigitBlock prefix;
    std::uint64_t undetermined = 0;
};
// First n base-b digits shared by every point of the interval.
RenderResult render_digits(const Interval& I, Base b, std::uint64_t n);
RenderResult render_digits(const ConstructedReal& x, Base b, std::uint64_t n);

}  // namespace normality
