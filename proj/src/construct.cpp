#include "normality/construct.hpp"

#include "normality/certified.hpp"
#include "normality/digit_orbit.hpp"
#include "normality/discrepancy.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace normality {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

Integer to_int(std::uint64_t v) { return Integer(std::to_string(v)); }

std::uint64_t small_pow(std::uint64_t s, unsigned k) {
    Integer v = ipow(s, k);
    if (v > to_int(0xffffffffu)) throw std::domain_error("s^k exceeds the supported digit width");
    return v.get_ui();
}

std::uint64_t alphabet_size(Base s, unsigned k) { return RestrictedAlphabet::for_construction(s, k).s_tilde.get_ui(); }

// Least k with an alphabet of at least two symbols.
unsigned min_valid_k(Base s) { return s.value == 2 ? 2 : 1; }

Integer digits_value(const std::vector<std::uint32_t>& d, std::uint64_t base) {
    Integer v = 0;
    for (auto x : d) {
        v *= static_cast<unsigned long>(base);
        v += x;
    }
    return v;
}

std::vector<std::uint32_t> expand(const std::vector<std::uint32_t>& w, std::uint64_t s, unsigned k) {
    std::vector<std::uint32_t> out(w.size() * k);
    for (std::size_t n = 0; n < w.size(); ++n) {
        std::uint64_t d = w[n];
        for (unsigned i = k; i-- > 0;) {
            out[n * k + i] = static_cast<std::uint32_t>(d % s);
            d /= s;
        }
    }
    return out;
}

// Lexicographic enumeration when the space is at most `samples`, otherwise
// `samples` uniform draws from a stream seeded by (seed, stage).
std::vector<std::vector<std::uint32_t>> draw_candidates(std::uint64_t st, std::size_t L, const Schedule& sched,
                                                        std::uint64_t stage) {
    std::vector<std::vector<std::uint32_t>> out;
    if (ipow(st, L) <= to_int(sched.samples)) {
        std::vector<std::uint32_t> w(L, 0);
        for (;;) {
            out.push_back(w);
            std::size_t pos = L;
            while (pos > 0) {
                if (++w[pos - 1] < st) break;
                w[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) break;
        }
        return out;
    }
    std::mt19937_64 rng(sched.seed ^ (stage * kGolden));
    for (std::uint64_t i = 0; i < sched.samples; ++i) {
        std::vector<std::uint32_t> w(L);
        for (auto& d : w) d = static_cast<std::uint32_t>(uniform_below(rng, st));
        out.push_back(std::move(w));
    }
    return out;
}

LevequeParams stage_leveque(const Rational& eps, const Schedule& sched) {
    Rational target = eps * eps * eps * eps / 10000;
    if (sched.mode == Mode::desk && target < sched.leveque_floor) target = sched.leveque_floor;
    LevequeParams lp = leveque_parameters(target);
    if (lp.T.empty()) throw BudgetError("frequency set too large to evaluate; faithful bounds are report-only");
    return lp;
}

bool a_test(const Rational& nu, const BaseSet& R, const LevequeParams& lp, std::uint64_t pos, std::uint64_t ell) {
    if (R.empty() || ell == 0) return true;
    const std::uint64_t w = scaled_index(ell, Base{*R.rbegin()});
    const Rational scale(to_int(w) * to_int(w));
    return exp_sum_A_below(nu, R, lp.T, pos, ell, scale, lp.delta);
}

std::uint64_t faithful_length(const Integer& v, const Schedule& sched, const std::string& what) {
    if (v > to_int(sched.faithful_limit)) {
        std::string shown = v.get_str();
        if (shown.size() > 40) shown = "a " + std::to_string(shown.size()) + "-digit integer";
        throw BudgetError(what + " = " + shown + " exceeds the execution limit; the value is report-only");
    }
    return v.get_ui();
}

std::string stage_tag(Theorem t, std::uint64_t m) { return theorem_name(t) + " stage " + std::to_string(m); }

void add_desk_report(ConstructedReal& X) {
    const Schedule& s = X.sched;
    if (s.mode == Mode::faithful) {
        X.report.push_back("mode faithful: all lengths from the budget function");
        return;
    }
    X.report.push_back("mode desk: ell capped at " + std::to_string(s.cap_ell) + "; budget values report-only");
    if (X.theorem == Theorem::thm2) X.report.push_back("mode desk: k capped at " + std::to_string(s.cap_k));
    if (X.theorem == Theorem::thm4) X.report.push_back("mode desk: N capped at " + std::to_string(s.cap_N));
    X.report.push_back("mode desk: LeVeque eps floored at " + to_string(s.leveque_floor));
    X.report.push_back("candidates per stage: " + std::to_string(s.samples) + ", seed " + std::to_string(s.seed));
}

AdicInterval extend_interval(const AdicInterval& J, std::uint64_t radix, std::size_t L,
                             const std::vector<std::uint32_t>& w) {
    Integer idx = J.index * ipow(radix, L) + digits_value(w, radix);
    return AdicInterval(J.base, J.power, J.depth + L, idx);
}

}  // namespace

std::string theorem_name(Theorem t) {
    switch (t) {
        case Theorem::thm2: return "thm2";
        case Theorem::thm4: return "thm4";
        case Theorem::thm5: return "thm5";
    }
    return "?";
}

PredicateOracle oracle_true() {
    return {[](std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t) { return true; }, "true"};
}

PredicateOracle oracle_false() {
    return {[](std::uint64_t, std::uint64_t, std::uint64_t y, std::uint64_t z) { return z < y; }, "false"};
}

PredicateOracle oracle_by_name(const std::string& name) {
    if (name == "true") return oracle_true();
    if (name == "false") return oracle_false();
    if (name == "wiring")
        return {[](std::uint64_t, std::uint64_t x, std::uint64_t, std::uint64_t z) { return !(x == 2 && z == 5); },
                "wiring"};
    if (name == "even")
        return {[](std::uint64_t r, std::uint64_t, std::uint64_t y, std::uint64_t z) { return r % 2 == 0 || z < y; },
                "even"};
    throw std::invalid_argument("unknown oracle '" + name + "' (true, false, wiring, even)");
}

std::uint64_t diagonal_element(std::uint64_t c, const std::function<std::uint64_t(std::uint64_t)>& nth) {
    if (c == 0) throw std::domain_error("enumeration positions start at 1");
    std::uint64_t t = 1;
    while (t * (t + 1) / 2 < c) ++t;
    return nth(c - t * (t - 1) / 2);
}

std::uint64_t enumerate_M(std::uint64_t c) {
    return diagonal_element(c, [](std::uint64_t j) {
        for (std::uint64_t limit = 16;; limit *= 2) {
            auto reps = minimal_representatives_upto(limit);
            if (reps.size() >= j) return reps[j - 1];
        }
    });
}

std::uint64_t enumerate_list(std::uint64_t c, const std::vector<std::uint64_t>& elems) {
    if (elems.empty()) throw std::domain_error("enumerate_list: empty list");
    return diagonal_element(c, [&](std::uint64_t j) { return elems[(j - 1) % elems.size()]; });
}

std::uint64_t x_search(const PredicateOracle& phi, std::uint64_t s, std::uint64_t n, std::uint64_t c) {
    std::uint64_t steps = 0;
    auto theta = [&](std::uint64_t x, std::uint64_t y, std::uint64_t z) {
        if (++steps > phi.step_budget)
            throw OracleBudgetError("oracle '" + phi.description + "' exceeded its step budget of " +
                                    std::to_string(phi.step_budget));
        return phi.theta(s, x, y, z);
    };
    for (std::uint64_t x = 1; x < c; ++x) {
        for (std::uint64_t y = 0; y < n; ++y) {
            bool all = true;
            for (std::uint64_t z = 0; z < n && all; ++z) all = theta(x, y, z);
            if (!all) continue;
            for (std::uint64_t z = 0; z < c; ++z)
                if (!theta(x, y, z)) return x;
        }
    }
    return c;
}

std::uint64_t transfer_cells(const Rational& eps) {
    if (eps <= 0) throw std::domain_error("transfer_cells: eps must be positive");
    Integer n = ceil_q(Rational(100) / (eps * eps));
    if (!n.fits_ulong_p()) throw std::overflow_error("transfer_cells: too many cells");
    return n.get_ui();
}

Integer transfer_ell0(Base r, const Rational& eps) {
    const std::uint64_t n = transfer_cells(eps);
    Integer inner = certified_ceil_logs({{Rational(1), n}, {Rational(3), r.value}});
    const Rational coeff = Rational(18) * Rational(inner) / (eps * eps);
    // ln r is irrational, so the ceiling is the least integer above.
    return with_escalation([&](unsigned bits) { return (Bracket::ln(r.value, bits) + Bracket::of(coeff, bits)).least_integer_above(); });
}

EllBudget ell_budget(const BaseSet& R, Base s, unsigned k, const Rational& eps, const SchmidtConfig& cfg) {
    for (auto r : R)
        if (mult_dependent(Base{r}, s)) throw std::domain_error("ell_budget: R must be independent of s");
    EllBudget out;
    out.block_count = lemma314_N0(s, k, std::min(eps, Rational(1)));
    Integer best = out.block_count + 1;
    if (!R.empty()) {
        const Rational target = eps * eps * eps * eps / 10000;
        LevequeParams lp = leveque_parameters(target);
        for (auto r : R) out.transfer = std::max(out.transfer, transfer_ell0(Base{r}, eps));
        out.survey = lemma317_ell0(R, lp.m, lp.m, s, k, cfg);
        const std::uint64_t rmax = *R.rbegin();
        auto evaluate = [&](unsigned bits) {
            Bracket l = Bracket::ln(rmax, bits);
            return pow(l * l / Bracket::of(lp.delta, bits), Bracket::of(4 / cfg.c, bits));
        };
        unsigned bits = 128;
        for (;;) {
            Bracket v = evaluate(bits);
            if (static_cast<unsigned long>(v.magnitude_bits()) + 64 > bits) {
                bits = static_cast<unsigned>(v.magnitude_bits()) + 128;
                continue;
            }
            try {
                out.weyl = v.least_integer_above();
                break;
            } catch (const PrecisionError&) {
                if (bits >= kMaxPrecisionBits) throw;
                bits *= 2;
            }
        }
        for (const Integer& v : {Integer(out.transfer + 1), Integer(out.survey + 1), out.weyl}) best = std::max(best, v);
    }
    out.value = best;
    return out;
}

std::vector<std::uint32_t> stage_digits(const StageState& st) {
    const AdicInterval& I = st.interval;
    return digits_of(I.lower(), I.base.value, static_cast<std::size_t>(I.power) * I.depth);
}

// ---------------------------------------------------------------------------
// Exactly the bases where a predicate holds (thm2)

namespace {

std::uint64_t last_position(std::uint64_t s, std::uint64_t c) {
    for (std::uint64_t pos = c - 1; pos >= 1; --pos)
        if (enumerate_M(pos) == s) return pos;
    return 0;
}

StageState thm2_initial(const Schedule& sched) {
    StageState st;
    st.s = Base{3};
    st.k = 1;
    st.eps = 1;
    st.b = 1;
    st.ell = sched.mode == Mode::desk ? sched.cap_ell : 1;
    st.x = 1;
    st.c = 1;
    st.interval = AdicInterval(Base{3}, 1, scaled_index(1, Base{3}), 0);
    return st;
}

StageState thm2_stage(const StageState& P, const PredicateOracle& phi, const Schedule& sched, std::uint64_t m) {
    StageState Q = P;
    Q.stage_index = m;
    Q.block = DigitBlock();

    // Clause (1).
    const std::uint64_t cells = 12 * small_pow(P.s.value, P.k);
    const std::uint64_t n_orbit = scaled_index(P.b, P.s);
    DigitStream orbit(P.s.value, stage_digits(P));
    const Rational D = orbit.cells(0, n_orbit, cells);
    if (D < Rational(1, to_int(cells) * to_int(cells))) {
        Q.clause = "1";
    } else {
        // Clause (2).
        const std::uint64_t c = P.c + 1;
        const Base s{enumerate_M(c)};
        const std::uint64_t n = last_position(s.value, c);
        const std::uint64_t x = x_search(phi, s.value, n, c);
        const auto choice = s.value % 2 == 1 ? AlphabetChoice::drop_one : AlphabetChoice::drop_two;
        const Lemma314Params lp = lemma314_params(s, Rational(1, to_int(x)), choice);
        BaseSet R;
        for (std::uint64_t pos = 1; pos < c; ++pos)
            if (enumerate_M(pos) != s.value) R.insert(enumerate_M(pos));
        unsigned k;
        std::uint64_t L;
        const std::uint64_t p = padding(P.s, s);
        if (sched.mode == Mode::desk) {
            k = std::max(std::min(lp.k, sched.cap_k), min_valid_k(s));
            L = sched.cap_ell;
        } else {
            k = lp.k;
            Integer lead = to_int(std::max<std::uint64_t>({x, c}));
            lead = std::max(lead, Integer(2 * ipow(s.value, k)));
            BaseSet all = R;
            all.insert(s.value);
            const Rational coeff = Rational(lead * to_int(p));
            Integer first = with_escalation(
                [&](unsigned bits) { return (Bracket::of(coeff, bits) * Bracket::ln(*all.rbegin(), bits)).least_integer_above(); });
            Integer v = std::max(first, Integer(lp.N0 + 1));
            v = std::max(v, ell_budget(R, s, k, Rational(1, to_int(c)), sched.schmidt).value);
            L = faithful_length(v, sched, "ell");
        }
        bool hold = ratio(to_int(scaled_index(P.b, s)), to_int(x)) <= Rational(to_int(L + p));
        for (auto r : R)
            if (ratio(to_int(scaled_index(P.b, Base{r})), to_int(c)) <= Rational(to_int(L + p))) hold = true;
        if (hold) {
            Q.clause = "2";
        } else {
            // Clause (3); x is adopted together with the other parameters.
            Q.clause = "3";
            Q.s = s;
            Q.k = k;
            Q.eps = Rational(1, to_int(c));
            Q.ell = L;
            Q.x = x;
            Q.R = R;
            Q.c = c;
        }
    }

    // Extension.
    const std::uint64_t S = small_pow(Q.s.value, Q.k);
    auto [a, J] = minimal_refinement(P.interval.interval(), Q.s, Q.k);
    const std::uint64_t b = a + Q.ell;
    const std::uint64_t depth_b = scaled_index_pow(b, Q.s, Q.k);
    const std::size_t L = depth_b - J.depth;
    const std::uint64_t st = alphabet_size(Q.s, Q.k);
    const LevequeParams lev = stage_leveque(Q.eps, sched);
    const std::uint64_t fcells = 12 * S;
    const std::size_t lo = scaled_index_or_zero(a, Q.s) + 1, hi = scaled_index_or_zero(b, Q.s) + 1;
    const std::vector<std::uint32_t> prefix = digits_of(J.lower(), Q.s.value, std::size_t(Q.k) * J.depth);

    std::optional<std::pair<Rational, std::vector<std::uint32_t>>> best;
    for (auto& w : draw_candidates(st, L, sched, m)) {
        AdicInterval cell = extend_interval(J, S, L, w);
        if (!a_test(cell.lower(), Q.R, lev, a, Q.ell)) continue;
        std::vector<std::uint32_t> digits = prefix;
        auto tail = expand(w, Q.s.value, Q.k);
        digits.insert(digits.end(), tail.begin(), tail.end());
        Rational d = DigitStream(Q.s.value, std::move(digits)).cells(lo, hi, fcells);
        if (!best || d < best->first || (d == best->first && w < best->second)) best.emplace(d, w);
    }
    if (!best)
        throw LemmaAssertionError(stage_tag(Theorem::thm2, m) +
                                  ": no candidate passed the exponential-sum test (candidate-survey lemma)");
    Q.a = a;
    Q.b = b;
    Q.block = DigitBlock(S, best->second);
    Q.interval = extend_interval(J, S, L, best->second);
    return Q;
}

void check_resume(const ConstructedReal* resume, Theorem t) {
    if (resume && (resume->theorem != t || resume->stages.empty()))
        throw std::invalid_argument("resume: run file is for a different construction");
}

}  // namespace

ConstructedReal thm2_run(const PredicateOracle& phi, std::uint64_t stages, const Schedule& sched,
                         const ConstructedReal* resume) {
    check_resume(resume, Theorem::thm2);
    ConstructedReal X;
    if (resume) {
        X = *resume;
        X.sched = sched;
    } else {
        X.theorem = Theorem::thm2;
        X.sched = sched;
        X.inputs = {{"oracle", phi.description}, {"enumeration", "M-diagonal"}};
        add_desk_report(X);
        X.report.push_back("clause (1) partition: cells of length s^-k/12");
        X.report.push_back("clause (3): x adopted together with s, k, eps, ell, R, c");
        X.stages.push_back(thm2_initial(sched));
    }
    while (X.stages.size() <= stages) X.stages.push_back(thm2_stage(X.stages.back(), phi, sched, X.stages.size()));
    return X;
}

// ---------------------------------------------------------------------------
// Normal to no base, discrepancy bounded below (thm4)

GSchedule g_by_name(const std::string& name) {
    if (name == "log2")
        return {[](std::uint64_t n) {
                    // 1 / (2 ceil(log2(n + 2)))
                    Integer m = to_int(n + 1);
                    std::uint64_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
                    return Rational(1, to_int(2 * bits));
                },
                "log2"};
    if (name == "harmonic") return {[](std::uint64_t n) { return Rational(1, to_int(n + 2)); }, "harmonic"};
    throw std::invalid_argument("unknown g schedule '" + name + "' (log2, harmonic)");
}

namespace {

std::uint64_t next_independent(std::uint64_t above, Base s) {
    std::uint64_t r = std::max<std::uint64_t>(above + 1, 2);
    while (mult_dependent(Base{r}, s)) ++r;
    return r;
}

StageState thm4_initial(Base s) {
    StageState st;
    st.s = s;
    st.k = 1;
    st.eps = 1;
    st.b = 1;
    st.ell = 0;
    st.R = {next_independent(1, s)};
    st.kbar = 1;
    st.interval = AdicInterval(s, 1, scaled_index(1, s), 0);
    return st;
}

StageState thm4_stage(const StageState& P, const GSchedule& g, const Schedule& sched, std::uint64_t m) {
    StageState Q = P;
    Q.stage_index = m;
    const Base s = P.s;

    // Clause (1).
    const std::uint64_t r = next_independent(*P.R.rbegin(), s);
    BaseSet R_next = P.R;
    R_next.insert(r);
    const Rational half = P.eps / 2;
    auto budget = [&](const BaseSet& R, unsigned kbar, const Rational& eps) -> std::uint64_t {
        if (sched.mode == Mode::desk) return sched.cap_ell;
        return faithful_length(ell_budget(R, s, kbar, eps, sched.schmidt).value, sched, "ell");
    };
    const bool halve = half * to_int(scaled_index(P.b, Base{r})) >= Rational(to_int(budget(R_next, P.kbar + 1, half)));
    if (halve) {
        Q.eps = half;
        Q.R = R_next;
        Q.kbar = P.kbar + 1;
    }
    Q.ell = budget(Q.R, Q.kbar, Q.eps);
    Q.b = P.b + Q.ell;

    // Clause (2).
    const Rational eps_k(1, 4 * ipow(s.value, P.k));
    unsigned k;
    Integer N;
    if (sched.mode == Mode::desk) {
        k = P.k + 1;
        N = std::min(lemma314_N0(s, k, eps_k), to_int(sched.cap_N));
    } else {
        const auto choice = s.value % 2 == 1 ? AlphabetChoice::drop_one : AlphabetChoice::drop_two;
        Lemma314Params lp = lemma314_params(s, eps_k, choice);
        k = lp.k;
        N = lp.N0;
    }
    const bool advance_k = k <= Q.kbar && N <= to_int(scaled_index(Q.ell, s)) &&
                           Rational(1, 2 * ipow(s.value, k)) > g.g(scaled_index(P.b, s));
    Q.k = advance_k ? k : P.k;
    if (Q.k < min_valid_k(s)) Q.k = min_valid_k(s);
    Q.clause = std::string(halve ? "halve" : "keep") + (advance_k ? "+k" : "");

    // Extension: a block of <ell; s^k> symbols starting at the next base-s^k boundary.
    const std::uint64_t S = small_pow(s.value, Q.k);
    const std::size_t have = std::size_t(P.interval.power) * P.interval.depth;
    const std::size_t start = (have + Q.k - 1) / Q.k;
    const std::size_t L = scaled_index_pow(Q.ell, s, Q.k);
    AdicInterval J(s, 1, std::size_t(Q.k) * start, P.interval.index * ipow(s.value, std::size_t(Q.k) * start - have));
    const std::uint64_t st = alphabet_size(s, Q.k);
    const LevequeParams lev = stage_leveque(Q.eps, sched);
    const std::uint64_t fcells = 12 * S;
    const std::vector<std::uint32_t> prefix = digits_of(J.lower(), s.value, J.depth);

    std::optional<std::pair<Rational, std::vector<std::uint32_t>>> best;
    for (auto& w : draw_candidates(st, L, sched, m)) {
        auto tail = expand(w, s.value, Q.k);
        AdicInterval cell = extend_interval(J, s.value, tail.size(), tail);
        if (!a_test(cell.lower(), Q.R, lev, P.b, Q.ell)) continue;
        std::vector<std::uint32_t> digits = prefix;
        digits.insert(digits.end(), tail.begin(), tail.end());
        Rational d = DigitStream(s.value, std::move(digits)).cells(J.depth, J.depth + tail.size(), fcells);
        if (!best || d < best->first || (d == best->first && w < best->second)) best.emplace(d, w);
    }
    if (!best)
        throw LemmaAssertionError(stage_tag(Theorem::thm4, m) +
                                  ": no candidate passed the exponential-sum test (candidate-survey lemma)");
    Q.a = P.b;
    Q.block = DigitBlock(S, best->second);
    Q.interval = extend_interval(J, s.value, L * Q.k, expand(best->second, s.value, Q.k));
    return Q;
}

}  // namespace

ConstructedReal thm4_run(Base s, const GSchedule& g, std::uint64_t stages, const Schedule& sched,
                         const ConstructedReal* resume) {
    check_resume(resume, Theorem::thm4);
    ConstructedReal X;
    if (resume) {
        X = *resume;
        X.sched = sched;
    } else {
        X.theorem = Theorem::thm4;
        X.sched = sched;
        X.inputs = {{"s", std::to_string(s.value)}, {"g", g.name}};
        add_desk_report(X);
        X.report.push_back("extension blocks start at the next base-s^k boundary after the current digits");
        X.stages.push_back(thm4_initial(s));
    }
    while (X.stages.size() <= stages) X.stages.push_back(thm4_stage(X.stages.back(), g, sched, X.stages.size()));
    return X;
}

std::vector<FPoint> f_trace(const ConstructedReal& X) {
    std::vector<FPoint> out;
    for (std::size_t m = 0; m < X.stages.size(); ++m) {
        const StageState& cur = X.stages[m];
        FPoint pt{cur.b, Rational(4), std::nullopt};
        for (std::size_t m0 = m + 1; m0-- > 0;) {
            const StageState& st = X.stages[m0];
            if (st.R.empty()) continue;
            const Rational lhs = st.eps * to_int(scaled_index(cur.b, Base{*st.R.rbegin()}));
            if (lhs > Rational(to_int(st.b))) {
                pt.value = 4 * st.eps;
                pt.m0 = m0;
                break;
            }
        }
        out.push_back(pt);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normal to R, not simply normal to S (thm5)

namespace {

struct Thm5Inputs {
    BaseSet R;
    std::vector<std::uint64_t> S;  // 2 replaced by 4
    bool two_in_S = false;
};

Thm5Inputs thm5_inputs(const std::vector<std::uint64_t>& R, const std::vector<std::uint64_t>& S) {
    Thm5Inputs in;
    if (S.empty()) throw std::invalid_argument("thm5: S must be nonempty");
    for (auto r : R) {
        Base b{r};
        if (minimal_representative(b).value != r) throw std::invalid_argument("thm5: R must list minimal representatives");
        in.R.insert(r);
    }
    BaseSet seen;
    for (auto s : S) {
        Base b{s};
        if (minimal_representative(b).value != s) throw std::invalid_argument("thm5: S must list minimal representatives");
        for (auto r : R)
            if (mult_dependent(Base{r}, b)) throw std::invalid_argument("thm5: R and S overlap");
        std::uint64_t v = s == 2 ? 4 : s;
        if (s == 2) in.two_in_S = true;
        if (seen.insert(v).second) in.S.push_back(v);
    }
    std::sort(in.S.begin(), in.S.end());
    return in;
}

bool thm5_clause1(const StageState& P, bool binary_check) {
    const std::uint64_t n = scaled_index_or_zero(P.b, P.s);
    if (n == 0) return false;
    const auto digits = stage_digits(P);
    DigitStream orbit(P.s.value, digits);
    const Interval top(ratio(to_int(P.s.value - 1), to_int(P.s.value)), Rational(1));
    Rational d = ratio(to_int(orbit.count_in(0, n, top)), to_int(n)) - Rational(1, to_int(P.s.value));
    if (d < 0) d = -d;
    if (!(d < Rational(1, to_int(4 * P.s.value)))) return false;
    if (!binary_check) return true;
    const std::uint64_t n2 = scaled_index_or_zero(P.b, Base{2});
    DigitStream bits(2, expand(digits, 2, 2));
    return bits.simple(n2) < Rational(1, 16);
}

StageState thm5_initial(const Thm5Inputs& in) {
    StageState st;
    st.s = Base{in.S.front()};
    st.k = 1;
    st.eps = 1;
    st.b = 0;
    st.ell = 0;
    if (!in.R.empty()) st.R = {*in.R.begin()};
    st.c = 1;
    st.interval = AdicInterval(st.s, 1, 0, 0);
    return st;
}

StageState thm5_stage(const StageState& P, const Thm5Inputs& in, const Schedule& sched, std::uint64_t m) {
    StageState Q = P;
    Q.stage_index = m;
    const bool binary_check = in.two_in_S && P.s.value == 4;

    if (thm5_clause1(P, binary_check)) {
        Q.clause = "1";
    } else {
        // Clause (2).
        const std::uint64_t c = P.c + 1;
        const Base s{enumerate_list(c, in.S)};
        std::optional<std::uint64_t> r;
        for (auto v : in.R)
            if (!P.R.count(v)) {
                r = v;
                break;
            }
        BaseSet R_next = P.R;
        if (r) R_next.insert(*r);
        const std::uint64_t p = padding(P.s, s);
        std::uint64_t L;
        if (sched.mode == Mode::desk) {
            L = sched.cap_ell;
        } else {
            Integer v = 0;
            if (!P.R.empty()) {
                const Rational coeff = Rational(to_int(c) * to_int(p));
                v = with_escalation([&](unsigned bits) {
                    return (Bracket::of(coeff, bits) * Bracket::ln(*P.R.rbegin(), bits)).least_integer_above();
                });
            }
            v = std::max(v, ell_budget(R_next, s, 1, Rational(1, to_int(c)), sched.schmidt).value);
            if (in.two_in_S && s.value == 4) {
                // Enough base-4 digits for the majority count over binary defects.
                const std::uint64_t n0 = lemma313_threshold(Rational(1, 2)).N0;
                std::uint64_t ell = 1;
                while (scaled_index(ell, s) < n0) ++ell;
                v = std::max(v, to_int(ell));
            }
            L = faithful_length(v, sched, "ell");
        }
        // The test is skipped while no length has been adopted, since a held
        // length of zero never extends the expansion.
        bool hold = false;
        if (P.ell != 0 && !P.R.empty())
            hold = ratio(to_int(scaled_index_or_zero(P.b, Base{*P.R.rbegin()})), to_int(c)) <= Rational(to_int(L + p));
        if (hold) {
            Q.clause = "2";
        } else {
            Q.clause = "3";
            Q.s = s;
            Q.eps = Rational(1, to_int(c));
            Q.ell = L;
            Q.R = R_next;
            Q.c = c;
        }
    }

    // Extension.
    const Base s = Q.s;
    auto [a, J] = minimal_refinement(P.interval.interval(), s, 1);
    const std::uint64_t b = a + Q.ell;
    const std::uint64_t depth_b = scaled_index_or_zero(b, s);
    const std::size_t L = depth_b - J.depth;
    const std::uint64_t st = alphabet_size(s, 1);
    const LevequeParams lev = stage_leveque(Q.eps, sched);
    const bool filter = in.two_in_S && s.value == 4;

    std::optional<std::vector<std::uint32_t>> chosen;
    for (auto& w : draw_candidates(st, L, sched, m)) {
        if (filter && L > 0) {
            // Binary simple discrepancy of the block window above 1/8.
            DigitStream bits(2, expand(w, 2, 2));
            if (!(bits.cells(0, 2 * L, 2) > Rational(1, 8))) continue;
        }
        AdicInterval cell = extend_interval(J, s.value, L, w);
        if (!a_test(cell.lower(), Q.R, lev, P.b, Q.ell)) continue;
        chosen = w;
        break;
    }
    if (!chosen) {
        std::string what = filter ? "binary-defect majority and exponential-sum test" : "exponential-sum test";
        throw LemmaAssertionError(stage_tag(Theorem::thm5, m) + ": no candidate passed the " + what);
    }
    Q.k = 1;
    Q.a = a;
    Q.b = b;
    Q.block = DigitBlock(s.value, *chosen);
    Q.interval = extend_interval(J, s.value, L, *chosen);
    return Q;
}

}  // namespace

ConstructedReal thm5_run(const std::vector<std::uint64_t>& R, const std::vector<std::uint64_t>& S,
                         std::uint64_t stages, const Schedule& sched, const ConstructedReal* resume) {
    check_resume(resume, Theorem::thm5);
    const Thm5Inputs in = thm5_inputs(R, S);
    ConstructedReal X;
    if (resume) {
        X = *resume;
        X.sched = sched;
    } else {
        X.theorem = Theorem::thm5;
        X.sched = sched;
        std::ostringstream rs, ss;
        for (std::size_t i = 0; i < R.size(); ++i) rs << (i ? "," : "") << R[i];
        for (std::size_t i = 0; i < S.size(); ++i) ss << (i ? "," : "") << S[i];
        X.inputs = {{"R", rs.str()}, {"S", ss.str()}};
        add_desk_report(X);
        if (in.two_in_S) X.report.push_back("2 in S: denial stages for 2 run in base 4 with a binary-defect filter");
        X.stages.push_back(thm5_initial(in));
    }
    while (X.stages.size() <= stages) X.stages.push_back(thm5_stage(X.stages.back(), in, sched, X.stages.size()));
    return X;
}

// ---------------------------------------------------------------------------

RenderResult render_digits(const Interval& I, Base b, std::uint64_t n) {
    if (I.lower < 0 || I.upper > 1 || I.length() <= 0) throw std::domain_error("render_digits: bad interval");
    const Integer scale = ipow(b.value, n);
    // Digit strings of the least and greatest points, truncated to n digits.
    const Integer lo = floor_q(I.lower * scale);
    const Integer hi = ceil_q(I.upper * scale) - 1;
    auto dl = digits_of(ratio(lo, scale), b.value, n);
    auto dh = digits_of(ratio(hi, scale), b.value, n);
    std::size_t p = 0;
    while (p < n && dl[p] == dh[p]) ++p;
    dl.resize(p);
    return RenderResult{DigitBlock(b.value, std::move(dl)), n - p};
}

RenderResult render_digits(const ConstructedReal& x, Base b, std::uint64_t n) {
    return render_digits(x.interval().interval(), b, n);
}

}  // namespace normality
