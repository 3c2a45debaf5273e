#include "commands.hpp"

#include "normality/basechange.hpp"
#include "normality/certified.hpp"
#include "normality/construct.hpp"
#include "normality/counting.hpp"
#include "normality/digit_orbit.hpp"
#include "normality/discrepancy.hpp"
#include "normality/expsums.hpp"
#include "normality/runfile.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

using namespace normality;

namespace nfcli {

namespace {

Integer to_int(std::uint64_t v) { return Integer(std::to_string(v)); }

std::string slurp(const std::string& path, std::istream& in) {
    if (path != "-") return read_file(path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path == "-")
        out << content;
    else
        write_file_atomic(path, content);
}

BaseSet to_set(const std::vector<std::uint64_t>& v) { return BaseSet(v.begin(), v.end()); }

std::vector<std::uint64_t> split_list(const std::string& s) {
    std::vector<std::uint64_t> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) v.push_back(std::stoull(item));
    return v;
}

FreqSet freq_upto(std::uint64_t m) {
    FreqSet T;
    for (std::uint64_t t = 1; t <= m; ++t) T.push_back(static_cast<std::int64_t>(t));
    return T;
}

// ---------------------------------------------------------------------------
// construct

struct ScheduleOpts {
    std::string mode = "desk";
    std::uint64_t cap_ell = 64, cap_k = 1, cap_N = 64, samples = 64, seed = 0;
    std::string leveque_floor = "1", schmidt_c = "1/100";
    std::vector<CLI::Option*> opts;  // for resume overrides
};

void add_schedule_options(CLI::App* a, ScheduleOpts& o) {
    o.opts.push_back(a->add_option("--mode", o.mode, "desk or faithful")
                         ->check(CLI::IsMember({"desk", "faithful"}))
                         ->capture_default_str());
    o.opts.push_back(a->add_option("--cap-ell", o.cap_ell, "desk cap on block lengths")->capture_default_str());
    o.opts.push_back(a->add_option("--cap-k", o.cap_k, "desk cap on k")->capture_default_str());
    o.opts.push_back(a->add_option("--cap-N", o.cap_N, "desk cap on N")->capture_default_str());
    o.opts.push_back(a->add_option("--samples", o.samples, "candidates per stage")->capture_default_str());
    o.opts.push_back(a->add_option("--seed", o.seed, "candidate sampling seed")->capture_default_str());
    o.opts.push_back(
        a->add_option("--leveque-floor", o.leveque_floor, "least eps fed to T, delta (desk)")->capture_default_str());
    o.opts.push_back(a->add_option("--schmidt-c", o.schmidt_c, "constant c in the length budget")->capture_default_str());
}

Schedule make_schedule(const ScheduleOpts& o, const Schedule* base) {
    Schedule s;
    if (base) s = *base;
    auto given = [&](std::size_t i) { return !base || o.opts[i]->count() > 0; };
    if (given(0)) s.mode = o.mode == "faithful" ? Mode::faithful : Mode::desk;
    if (given(1)) s.cap_ell = o.cap_ell;
    if (given(2)) s.cap_k = static_cast<unsigned>(o.cap_k);
    if (given(3)) s.cap_N = o.cap_N;
    if (given(4)) s.samples = o.samples;
    if (given(5)) s.seed = o.seed;
    if (given(6)) s.leveque_floor = parse_rational(o.leveque_floor);
    if (given(7)) s.schmidt.c = parse_rational(o.schmidt_c);
    if (s.cap_ell == 0 || s.cap_k == 0 || s.cap_N == 0 || s.samples == 0)
        throw std::invalid_argument("caps and samples must be positive");
    if (s.leveque_floor <= 0 || s.schmidt.c <= 0) throw std::invalid_argument("leveque-floor and schmidt-c must be positive");
    return s;
}

struct ConstructOpts {
    ScheduleOpts sched;
    std::uint64_t stages = 10;
    std::string out = "-";
    std::string resume;
    std::vector<std::uint64_t> digit_bases;
    std::string digits_out;
    std::uint64_t digits = 0;  // 0: every determined digit
    // thm2
    std::string oracle = "true";
    // thm4
    std::uint64_t s = 3;
    std::string g = "log2";
    std::string f_trace;
    bool exact = false;
    // thm5
    std::vector<std::uint64_t> R{2}, S{3};
};

void add_construct_options(CLI::App* a, ConstructOpts& o) {
    add_schedule_options(a, o.sched);
    a->add_option("--stages", o.stages, "stages past the initial one")->capture_default_str();
    a->add_option("--out", o.out, "run file ('-' for stdout)")->capture_default_str();
    a->add_option("--resume", o.resume, "continue from a run file");
    a->add_option("--digits-base", o.digit_bases, "render digits in these bases")->delimiter(',');
    a->add_option("--digits-out", o.digits_out, "digit file path; {base} is replaced by the base");
    a->add_option("--digits", o.digits, "number of digits to render (0: all determined)");
}

std::uint64_t determined_estimate(const AdicInterval& J, Base b) {
    const double d = static_cast<double>(J.depth) * J.power * std::log(static_cast<double>(J.base.value)) /
                     std::log(static_cast<double>(b.value));
    return static_cast<std::uint64_t>(d) + 2;
}

DigitBlock determined_digits(const AdicInterval& J, Base b) {
    return render_digits(J.interval(), b, determined_estimate(J, b)).prefix;
}

std::string digits_path(const std::string& pattern, std::uint64_t base, bool several) {
    auto pos = pattern.find("{base}");
    if (pos != std::string::npos) return pattern.substr(0, pos) + std::to_string(base) + pattern.substr(pos + 6);
    return several ? pattern + "." + std::to_string(base) : pattern;
}

int finish_construct(const ConstructedReal& X, const ConstructOpts& o, std::ostream& out, std::ostream& err) {
    std::ostringstream run;
    write_run(run, X);
    emit(o.out, run.str(), out);
    std::ostream& rep = o.out == "-" ? err : out;

    const StageState& L = X.last();
    rep << theorem_name(X.theorem) << ": " << X.stages.size() - 1 << " stages, mode "
        << (X.sched.mode == Mode::desk ? "desk" : "faithful") << "\n";
    rep << "final interval: base " << L.interval.base.value << "^" << L.interval.power << ", depth "
        << L.interval.depth << "\n";
    for (const auto& line : X.report) rep << "  " << line << "\n";

    if (!o.digits_out.empty()) {
        std::vector<std::uint64_t> bases = o.digit_bases;
        if (bases.empty()) bases.push_back(L.interval.base.value);
        for (std::uint64_t b : bases) {
            DigitBlock d;
            if (o.digits > 0) {
                RenderResult r = render_digits(X, Base{b}, o.digits);
                if (r.undetermined > 0)
                    rep << "base " << b << ": " << r.undetermined << " of " << o.digits
                        << " digits undetermined; run more stages\n";
                d = r.prefix;
            } else {
                d = determined_digits(L.interval, Base{b});
            }
            std::ostringstream ds;
            write_digits(ds, d);
            emit(digits_path(o.digits_out, b, bases.size() > 1), ds.str(), out);
            rep << "base " << b << ": " << d.size() << " digits written\n";
        }
    }
    return kOk;
}

std::unique_ptr<ConstructedReal> load_resume(const std::string& path, Theorem t, std::istream& in) {
    if (path.empty()) return nullptr;
    std::istringstream is(slurp(path, in));
    auto X = std::make_unique<ConstructedReal>(read_run(is));
    if (X->theorem != t) throw std::invalid_argument("resume file holds a " + theorem_name(X->theorem) + " run");
    return X;
}

std::string input_of(const ConstructedReal& X, const std::string& key) {
    auto it = X.inputs.find(key);
    if (it == X.inputs.end()) throw FormatError("run file lacks input '" + key + "'");
    return it->second;
}

int cmd_thm2(ConstructOpts& o, std::istream& in, std::ostream& out, std::ostream& err) {
    auto prev = load_resume(o.resume, Theorem::thm2, in);
    Schedule sched = make_schedule(o.sched, prev ? &prev->sched : nullptr);
    PredicateOracle phi = oracle_by_name(prev ? input_of(*prev, "oracle") : o.oracle);
    return finish_construct(thm2_run(phi, o.stages, sched, prev.get()), o, out, err);
}

int cmd_thm4(ConstructOpts& o, std::istream& in, std::ostream& out, std::ostream& err) {
    auto prev = load_resume(o.resume, Theorem::thm4, in);
    Schedule sched = make_schedule(o.sched, prev ? &prev->sched : nullptr);
    Base s{prev ? std::stoull(input_of(*prev, "s")) : o.s};
    GSchedule g = g_by_name(prev ? input_of(*prev, "g") : o.g);
    ConstructedReal X = thm4_run(s, g, o.stages, sched, prev.get());
    std::string trace_path = o.f_trace;
    if (trace_path.empty() && o.out != "-") trace_path = o.out + ".ftrace.csv";
    if (!trace_path.empty()) {
        std::ostringstream csv;
        csv << "n,f,m0\n";
        for (const FPoint& p : f_trace(X)) {
            csv << p.n << "," << (o.exact ? to_string(p.value) : format_decimal(p.value)) << ",";
            if (p.m0) csv << *p.m0;
            csv << "\n";
        }
        emit(trace_path, csv.str(), out);
    }
    return finish_construct(X, o, out, err);
}

int cmd_thm5(ConstructOpts& o, std::istream& in, std::ostream& out, std::ostream& err) {
    auto prev = load_resume(o.resume, Theorem::thm5, in);
    Schedule sched = make_schedule(o.sched, prev ? &prev->sched : nullptr);
    std::vector<std::uint64_t> R = prev ? split_list(input_of(*prev, "R")) : o.R;
    std::vector<std::uint64_t> S = prev ? split_list(input_of(*prev, "S")) : o.S;
    return finish_construct(thm5_run(R, S, o.stages, sched, prev.get()), o, out, err);
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOpts {
    std::string input = "-";
    std::string out = "-";
    std::vector<std::uint64_t> bases;
    std::string checkpoints = "geometric";
    std::uint64_t start = 64, ratio = 2, step = 1000;
    std::uint64_t extreme_cap = 5000;
    std::uint64_t block_ell = 0;
    std::uint64_t limit = 0;
    bool exact = false;
    bool per_stage = false;
};

int cmd_analyze(const AnalyzeOpts& o, std::istream& in, std::ostream& out) {
    const std::string text = slurp(o.input, in);
    std::optional<ConstructedReal> run;
    std::optional<DigitBlock> dig;
    std::istringstream is(text);
    if (text.rfind("nfrun/1", 0) == 0)
        run = read_run(is);
    else if (text.rfind("nfdig/1", 0) == 0)
        dig = read_digits(is);
    else
        throw FormatError("input is neither an nfrun/1 nor an nfdig/1 file");
    if (o.per_stage && !run) throw std::invalid_argument("--per-stage needs a run file");
    if (o.checkpoints != "geometric" && o.checkpoints != "linear")
        throw std::invalid_argument("--checkpoints must be geometric or linear");
    if (o.start == 0 || o.ratio < 2 || o.step == 0) throw std::invalid_argument("bad checkpoint spacing");

    std::vector<std::uint64_t> bases = o.bases;
    if (bases.empty()) bases.push_back(run ? run->interval().base.value : dig->base);

    auto fmt = [&](const Rational& q) { return o.exact ? to_string(q) : format_decimal(q); };
    std::ostringstream csv;
    csv << "N,base,star,extreme,simple,block_C,block_ell\n";
    for (std::uint64_t b : bases) {
        Base B{b};
        DigitBlock d;
        if (run) {
            d = determined_digits(run->interval(), B);
        } else if (dig->base == b) {
            d = *dig;
        } else {
            const Rational lo = adic_value(*dig);
            const Rational hi = lo + Rational(1, ipow(dig->base, dig->size()));
            const double est = static_cast<double>(dig->size()) * std::log(static_cast<double>(dig->base)) /
                               std::log(static_cast<double>(b));
            d = render_digits(Interval(lo, hi), B, static_cast<std::uint64_t>(est) + 2).prefix;
        }
        if (o.limit > 0 && d.size() > o.limit) d.digits.resize(o.limit);
        const std::uint64_t total = d.size();

        std::vector<std::uint64_t> cps;
        if (o.per_stage) {
            for (const StageState& st : run->stages) {
                std::uint64_t n = std::min<std::uint64_t>(determined_digits(st.interval, B).size(), total);
                if (n > 0 && (cps.empty() || n > cps.back())) cps.push_back(n);
            }
        } else if (o.checkpoints == "linear") {
            cps = linear_checkpoints(total, o.step);
        } else {
            cps = geometric_checkpoints(total, o.start, o.ratio);
        }

        DigitStream ds(b, d.digits);
        for (std::uint64_t N : cps) {
            csv << N << "," << b << "," << fmt(ds.star(N)) << ",";
            if (N <= o.extreme_cap) csv << fmt(ds.extreme(N));
            csv << "," << fmt(ds.simple(N)) << ",";
            if (o.block_ell > 0 && o.block_ell <= N) csv << fmt(ds.block(N, o.block_ell)) << "," << o.block_ell;
            else csv << ",";
            csv << "\n";
        }
    }
    emit(o.out, csv.str(), out);
    return kOk;
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsOpts {
    std::string eps = "1";
    std::string delta = "1/2";
    std::uint64_t s0 = 3, s1 = 2;
    std::vector<std::uint64_t> R{2};
    std::uint64_t s = 3, k = 1, r = 2, ell = 1, T = 1;
    std::string c = "1/100";
    std::string precision = "1/1000000000000";
    std::string parity = "auto";
};

std::string show_T(const LevequeParams& lp) {
    if (lp.m <= 16) {
        std::string t = "{";
        for (std::size_t i = 0; i < lp.T.size(); ++i) t += (i ? "," : "") + std::to_string(lp.T[i]);
        return t + "}";
    }
    return "{1,...," + lp.m.get_str() + "}";
}

int bounds_leveque(const BoundsOpts& o, std::ostream& out) {
    LevequeParams lp = leveque_parameters(parse_rational(o.eps));
    out << "m = " << lp.m.get_str() << "\n";
    out << "T = " << show_T(lp) << "\n";
    out << "delta = " << to_string(lp.delta) << "\n";
    out << "delta ~ " << format_decimal(lp.delta) << "\n";
    return kOk;
}

int bounds_padding(const BoundsOpts& o, std::ostream& out) {
    Base a{o.s0}, b{o.s1};
    out << "offset = " << nested_refinement_offset(a, b) << "\n";
    out << "padding = " << padding(a, b) << "\n";
    return kOk;
}

int bounds_ell(const BoundsOpts& o, std::ostream& out) {
    SchmidtConfig cfg;
    cfg.c = parse_rational(o.c);
    EllBudget e = ell_budget(to_set(o.R), Base{o.s}, static_cast<unsigned>(o.k), parse_rational(o.eps), cfg);
    out << "ell = " << e.value.get_str() << "\n";
    out << "  transfer = " << e.transfer.get_str() << "\n";
    out << "  block_count = " << e.block_count.get_str() << "\n";
    out << "  survey = " << e.survey.get_str() << "\n";
    out << "  weyl = " << e.weyl.get_str() << "\n";
    if (e.value > to_int(Schedule{}.faithful_limit)) out << "report-only: exceeds the execution limit\n";
    return kOk;
}

int bounds_transfer(const BoundsOpts& o, std::ostream& out) {
    const Rational eps = parse_rational(o.eps);
    out << "cells = " << transfer_cells(eps) << "\n";
    out << "ell0 = " << transfer_ell0(Base{o.r}, eps).get_str() << "\n";
    return kOk;
}

int bounds_lemma312(const BoundsOpts& o, std::ostream& out) {
    Threshold t = lemma312_threshold(Base{o.s}, o.ell, parse_rational(o.eps), parse_rational(o.delta));
    out << "N0 = " << t.N0 << " (" << t.method << ")\n";
    return kOk;
}

int bounds_lemma313(const BoundsOpts& o, std::ostream& out) {
    Threshold t = lemma313_threshold(parse_rational(o.eps));
    out << "N0 = " << t.N0 << " (" << t.method << ")\n";
    return kOk;
}

int bounds_lemma314(const BoundsOpts& o, std::ostream& out) {
    Base s{o.s};
    AlphabetChoice ch = s.value % 2 ? AlphabetChoice::drop_one : AlphabetChoice::drop_two;
    if (o.parity == "odd") ch = AlphabetChoice::drop_one;
    else if (o.parity == "even") ch = AlphabetChoice::drop_two;
    else if (o.parity != "auto") throw std::invalid_argument("--parity must be auto, odd or even");
    Lemma314Params p = lemma314_params(s, parse_rational(o.eps), ch);
    out << "k = " << p.k << "\n";
    out << "ell = " << p.ell << "\n";
    out << "N0 = " << p.N0.get_str() << "\n";
    if (p.alphabet)
        out << "s_tilde = " << p.alphabet->s_tilde.get_str() << "\n";
    else
        out << "s_tilde = s^" << p.k << " - " << (ch == AlphabetChoice::drop_one ? 1 : 2) << " (not materialised)\n";
    return kOk;
}

int bounds_schmidt(const BoundsOpts& o, std::ostream& out) {
    SchmidtConfig cfg;
    cfg.c = parse_rational(o.c);
    const BaseSet R = to_set(o.R);
    const FreqSet T = freq_upto(o.T);
    out << "p = " << schmidt_p(R, T, Base{o.s}) << "\n";
    out << "ell0 = " << lemma317_ell0(R, T, Base{o.s}, static_cast<unsigned>(o.k), cfg).get_str() << "\n";
    return kOk;
}

int bounds_cosine(const BoundsOpts& o, std::ostream& out) {
    ApproxReal c = cosine_constant(parse_rational(o.precision));
    out << "c~ in [" << format_decimal(c.lower(), 16) << ", " << format_decimal(c.upper(), 16) << "]\n";
    out << "radius = " << format_decimal(c.radius, 4) << "\n";
    return kOk;
}

int bounds_scaled(const BoundsOpts& o, std::ostream& out) {
    out << scaled_index(o.ell, Base{o.r}) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
    std::uint64_t n = 1000;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> R{2};
    std::uint64_t s = 3, k = 1, ell = 16, T = 1, N = 14;
    bool exhaustive = false;
    std::uint64_t samples = 4096;
};

struct Tally {
    std::uint64_t trials = 0, hypothesis = 0, counterexamples = 0;
    std::string witness;
};

int report(const std::string& suite, const Tally& t, std::ostream& out) {
    out << suite << ": " << t.trials << " trials, " << t.hypothesis << " met the hypothesis, " << t.counterexamples
        << " counterexamples\n";
    if (t.counterexamples) {
        out << "witness: " << t.witness << "\n";
        return kCounterexample;
    }
    out << "pass\n";
    return kOk;
}

std::string show_seq(const UnitSequence& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
    return s + ")";
}

// Random sequences in [0,1): uniform rationals or jittered equispaced points,
// so that the small-discrepancy hypotheses are met in a useful share of trials.
UnitSequence random_sequence(std::mt19937_64& rng, std::uint64_t max_n) {
    const std::uint64_t N = 1 + uniform_below(rng, max_n);
    UnitSequence v(N);
    if (uniform_below(rng, 2) == 0) {
        const std::uint64_t den = 1 + uniform_below(rng, 1000);
        for (auto& x : v) x = ratio(to_int(uniform_below(rng, den)), to_int(den));
    } else {
        const std::uint64_t jitter = uniform_below(rng, 4);  // 0: exact grid
        const std::uint64_t den = N * 1000;
        for (std::uint64_t j = 0; j < N; ++j) {
            std::uint64_t num = j * 1000 + 500;
            if (jitter) {
                std::uint64_t w = (jitter == 1 ? 50 : jitter == 2 ? 400 : 499);
                num = num - w + uniform_below(rng, 2 * w + 1);
            }
            v[j] = ratio(to_int(num), to_int(den));
        }
        std::shuffle(v.begin(), v.end(), rng);
    }
    for (auto& x : v) x.canonicalize();
    return v;
}

int verify_discrepancy_oracle(const VerifyOpts& o, std::ostream& out) {
    std::mt19937_64 rng(o.seed);
    Tally t;
    for (std::uint64_t i = 0; i < o.n; ++i) {
        UnitSequence v = random_sequence(rng, 200);
        ++t.trials;
        ++t.hypothesis;
        Rational d = extreme_discrepancy(v), bf = extreme_discrepancy_bruteforce(v), st = star_discrepancy(v);
        if (d != bf || st > d || d > 2 * st) {
            ++t.counterexamples;
            t.witness = show_seq(v) + " closed form " + to_string(d) + " brute force " + to_string(bf);
        }
    }
    return report("discrepancy-oracle", t, out);
}

int verify_partition(const VerifyOpts& o, std::ostream& out) {
    std::mt19937_64 rng(o.seed);
    Tally t;
    for (const Rational eps : {Rational(1, 2), Rational(1, 3), Rational(1, 5)}) {
        for (std::uint64_t i = 0; i < o.n; ++i) {
            UnitSequence v = random_sequence(rng, 200);
            ++t.trials;
            PartitionBound pb = partition_bound(eps, v);
            if (!pb.implied_bound) continue;
            ++t.hypothesis;
            if (extreme_discrepancy(v) >= eps) {
                ++t.counterexamples;
                t.witness = "eps " + to_string(eps) + " " + show_seq(v);
            }
        }
    }
    return report("partition", t, out);
}

int verify_leveque(const VerifyOpts& o, std::ostream& out) {
    std::mt19937_64 rng(o.seed);
    Tally t;
    std::uint64_t undecided = 0;
    for (const Rational eps : {Rational(1, 2), Rational(1, 3)}) {
        LevequeParams lp = leveque_parameters(eps);
        for (std::uint64_t i = 0; i < o.n; ++i) {
            UnitSequence v = random_sequence(rng, 200);
            ++t.trials;
            bool all_below = true;
            for (std::int64_t h : lp.T) {
                ApproxReal w = weyl_power(v, h, Rational(1, ipow(10, 30)));
                if (w.upper() < lp.delta) continue;
                if (w.lower() < lp.delta) ++undecided;
                all_below = false;
                break;
            }
            if (!all_below) continue;
            ++t.hypothesis;
            if (extreme_discrepancy(v) >= eps) {
                ++t.counterexamples;
                t.witness = "eps " + to_string(eps) + " " + show_seq(v);
            }
        }
    }
    if (undecided) {
        out << "leveque: " << undecided << " enclosures straddled delta\n";
        return kCounterexample;
    }
    return report("leveque", t, out);
}

// Words of length N over {0,1} with C(ell,w) < eps^2/18 must have D < eps.
int verify_block_transfer(const VerifyOpts& o, std::ostream& out) {
    std::mt19937_64 rng(o.seed);
    Tally t;
    for (const Rational eps : {Rational(3, 4), Rational(1, 2)}) {
        std::size_t ell = 1;
        while (Rational(to_int(1ull << ell)) <= 3 / eps) ++ell;
        const Rational need = 2 * Rational(to_int(ell)) * (3 / eps) * (3 / eps);
        const std::size_t N = floor_q(need).get_ui() + 1;
        const Rational bound = eps * eps / 18;
        for (std::uint64_t i = 0; i < o.n; ++i) {
            std::vector<std::uint32_t> w(N);
            for (auto& d : w) d = static_cast<std::uint32_t>(uniform_below(rng, 2));
            ++t.trials;
            DigitBlock blk(2, w);
            if (block_discrepancy(blk, ell) >= bound) continue;
            ++t.hypothesis;
            if (DigitStream(2, w).extreme(N) >= eps) {
                ++t.counterexamples;
                std::string s;
                for (auto d : w) s += char('0' + d);
                t.witness = "eps " + to_string(eps) + " w=" + s;
            }
        }
    }
    return report("block-transfer", t, out);
}

int verify_survey(const VerifyOpts& o, std::ostream& out) {
    const BaseSet R = to_set(o.R);
    if (R.empty()) throw std::invalid_argument("--R must be nonempty");
    Base s{o.s};
    LevequeParams lp = leveque_parameters(Rational(1));
    const std::uint64_t w = scaled_index(o.ell, Base{*R.rbegin()});
    const Rational threshold = lp.delta * Rational(to_int(w) * to_int(w));
    AdicRational eta(s, static_cast<unsigned>(o.k), DigitBlock(ipow(s.value, o.k).get_ui(), {}));
    std::optional<std::uint64_t> sample;
    if (!o.exhaustive) sample = o.samples;
    SurveyResult r = candidate_survey(eta, s, static_cast<unsigned>(o.k), 0, o.ell, R, freq_upto(o.T), threshold,
                                      sample, o.seed);
    out << "survey: " << r.examined << " candidates" << (r.estimated ? " (sampled)" : " (exhaustive)") << ", "
        << r.passing << " passing, fraction " << to_string(r.fraction_passing) << " ~ "
        << format_decimal(r.fraction_passing) << "\n";
    if (r.fraction_passing >= Rational(1, 2)) {
        out << "pass\n";
        return kOk;
    }
    out << "fraction below 1/2\n";
    return kCounterexample;
}

// Every surveyed N must clear 5/8; the trend check asks that the last
// fraction be no smaller than the first.
int verify_base4_defect(const VerifyOpts& o, std::ostream& out) {
    if (o.N < 2) throw std::invalid_argument("--N must be at least 2");
    std::vector<Rational> fr;
    bool monotone = true, clears = true;
    for (std::uint64_t N = 2; N <= o.N; N += 2) {
        DefectSurvey d = base4_defect_survey(N);
        out << "N=" << N << " count " << d.count.get_str() << " fraction " << to_string(d.fraction) << " ~ "
            << format_decimal(d.fraction) << "\n";
        if (!fr.empty() && d.fraction < fr.back()) monotone = false;
        if (d.fraction < Rational(5, 8)) clears = false;
        fr.push_back(d.fraction);
    }
    out << "nondecreasing: " << (monotone ? "yes" : "no") << "\n";
    if (clears && fr.back() >= fr.front()) {
        out << "pass\n";
        return kOk;
    }
    out << "fraction below 5/8 or trend reversed\n";
    return kCounterexample;
}

int verify_basechange(const VerifyOpts& o, std::ostream& out) {
    std::mt19937_64 rng(o.seed);
    Tally t;
    for (std::uint64_t i = 0; i < o.n; ++i) {
        const std::uint64_t den = 2 + uniform_below(rng, 100000);
        std::uint64_t a = uniform_below(rng, den), b = uniform_below(rng, den);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        Interval I(ratio(to_int(a), to_int(den)), ratio(to_int(b), to_int(den)));
        Base s{2 + uniform_below(rng, 9)};
        ++t.trials;
        ++t.hypothesis;
        AdicInterval J = adic_subinterval(I, s);
        bool ok = J.inside(I) && J.width() * 2 * s.value >= I.length();
        // Refinement of a random cell at depth <b; s> into another base.
        const std::uint64_t bb = 1 + uniform_below(rng, 200);
        const std::uint64_t depth = scaled_index(bb, s);
        Integer idx = 0;
        for (std::uint64_t j = 0; j < depth; ++j) idx = idx * to_int(s.value) + to_int(uniform_below(rng, s.value));
        AdicInterval C(s, 1, depth, idx);
        Base s1{2 + uniform_below(rng, 9)};
        auto [an, K] = nested_refinement(C, bb, s1);
        ok = ok && K.inside(C.interval()) && an == bb + nested_refinement_offset(s, s1);
        if (!ok) {
            ++t.counterexamples;
            t.witness = "[" + to_string(I.lower) + ", " + to_string(I.upper) + ") base " + std::to_string(s.value);
        }
    }
    return report("basechange", t, out);
}

// ---------------------------------------------------------------------------

int classify(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const LemmaAssertionError*>(&e)) return kLemma;
    if (dynamic_cast<const PrecisionError*>(&e) || dynamic_cast<const UndecidedError*>(&e) ||
        dynamic_cast<const OracleBudgetError*>(&e) || dynamic_cast<const BudgetError*>(&e))
        return kBudget;
    if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e) ||
        dynamic_cast<const std::domain_error*>(&e) || dynamic_cast<const std::out_of_range*>(&e))
        return kInput;
    return kCounterexample;
}

// Config values are spliced in as flags for the chosen subcommand unless the
// command line already names them.
std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args, std::istream& in) {
    std::string config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (config.empty()) return args;

    CLI::App* leaf = &app;
    std::size_t pos = 0;
    while (pos < args.size()) {
        CLI::App* sub = nullptr;
        try {
            sub = leaf->get_subcommand(args[pos]);
        } catch (const CLI::OptionNotFound&) {
            break;
        }
        leaf = sub;
        ++pos;
    }
    auto named = [&](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    for (auto [key, value] : parse_config(slurp(config, in))) {
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        const CLI::Option* opt = leaf->get_option_no_throw(flag);
        if (!opt) throw std::invalid_argument("config key '" + key + "' is not an option of this command");
        if (named(flag)) continue;
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1") args.push_back(flag);
        } else {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

}  // namespace

std::string format_decimal(const Rational& q0, int significant) {
    if (significant < 1) throw std::invalid_argument("format_decimal: need at least one digit");
    if (q0 == 0) return "0";
    const bool neg = q0 < 0;
    const Rational q = neg ? Rational(-q0) : q0;
    // e with 10^e <= q < 10^(e+1)
    long e = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 10));
    auto p10 = [](long k) { return k >= 0 ? Rational(ipow(10, k)) : Rational(1, ipow(10, -k)); };
    while (p10(e) > q) --e;
    while (p10(e + 1) <= q) ++e;
    const Rational x = q * p10(significant - 1 - e);
    Integer n = floor_q(x);
    const Rational f = x - n;
    if (f > Rational(1, 2) || (f == Rational(1, 2) && mpz_odd_p(n.get_mpz_t()))) ++n;
    if (n == ipow(10, significant)) {
        n /= 10;
        ++e;
    }
    std::string digits = n.get_str();
    std::string s;
    if (e >= significant - 1) {
        s = digits + std::string(static_cast<std::size_t>(e - (significant - 1)), '0');
    } else if (e >= 0) {
        s = digits.substr(0, static_cast<std::size_t>(e + 1)) + "." + digits.substr(static_cast<std::size_t>(e + 1));
    } else {
        s = "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + digits;
    }
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return neg ? "-" + s : s;
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t total, std::uint64_t start, std::uint64_t ratio) {
    std::vector<std::uint64_t> v;
    for (std::uint64_t n = start; n < total; n *= ratio) v.push_back(n);
    if (total > 0) v.push_back(total);
    return v;
}

std::vector<std::uint64_t> linear_checkpoints(std::uint64_t total, std::uint64_t step) {
    std::vector<std::uint64_t> v;
    for (std::uint64_t n = step; n < total; n += step) v.push_back(n);
    if (total > 0) v.push_back(total);
    return v;
}

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream is(text);
    std::string line;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        s.erase(0, s.find_first_not_of(ws));
        s.erase(s.find_last_not_of(ws) + 1);
        return s;
    };
    for (int no = 1; std::getline(is, line); ++no) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(no) + ": expected key = value");
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty()) throw std::invalid_argument("config line " + std::to_string(no) + ": empty key");
        kv.emplace_back(k, v);
    }
    return kv;
}

int run_cli(const std::vector<std::string>& argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Constructions of reals with prescribed normality, and digit-stream analysis"};
    app.name("nfconstruct");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    std::vector<std::pair<CLI::App*, std::function<int()>>> actions;

    // construct
    ConstructOpts co;
    auto* construct = app.add_subcommand("construct", "run a construction and write a run file");
    construct->require_subcommand(1);
    auto* t2 = construct->add_subcommand("thm2", "normal exactly for the bases where a predicate holds");
    add_construct_options(t2, co);
    t2->add_option("--oracle", co.oracle, "predicate: true, false, wiring, even")->capture_default_str();
    auto* t4 = construct->add_subcommand("thm4", "normal to no base, discrepancy bounded below by g");
    add_construct_options(t4, co);
    t4->add_option("--s", co.s, "working base")->capture_default_str();
    t4->add_option("--g", co.g, "schedule: log2, harmonic")->capture_default_str();
    t4->add_option("--f-trace", co.f_trace, "CSV of (n, f(n)); default <out>.ftrace.csv");
    t4->add_flag("--exact", co.exact, "exact rationals in the f-trace");
    auto* t5 = construct->add_subcommand("thm5", "normal to the bases in R, not simply normal to those in S");
    add_construct_options(t5, co);
    t5->add_option("--R", co.R, "bases required normal")->delimiter(',')->capture_default_str();
    t5->add_option("--S", co.S, "bases denied simple normality")->delimiter(',')->capture_default_str();
    actions.push_back({t2, [&] { return cmd_thm2(co, in, out, err); }});
    actions.push_back({t4, [&] { return cmd_thm4(co, in, out, err); }});
    actions.push_back({t5, [&] { return cmd_thm5(co, in, out, err); }});

    // analyze
    AnalyzeOpts ao;
    auto* analyze = app.add_subcommand("analyze", "discrepancy trace of a digit or run file as CSV");
    analyze->add_option("input", ao.input, "nfdig/1 or nfrun/1 file ('-' for stdin)")->capture_default_str();
    analyze->add_option("--out", ao.out, "CSV destination")->capture_default_str();
    analyze->add_option("--bases", ao.bases, "analysis bases")->delimiter(',');
    analyze->add_option("--checkpoints", ao.checkpoints, "geometric or linear")->capture_default_str();
    analyze->add_option("--start", ao.start, "first geometric checkpoint")->capture_default_str();
    analyze->add_option("--ratio", ao.ratio, "geometric ratio")->capture_default_str();
    analyze->add_option("--step", ao.step, "linear step")->capture_default_str();
    analyze->add_option("--extreme-cap", ao.extreme_cap, "largest N for exact extreme discrepancy")
        ->capture_default_str();
    analyze->add_option("--block-ell", ao.block_ell, "block length for C(ell, w); 0 to omit")->capture_default_str();
    analyze->add_option("--limit", ao.limit, "analyze at most this many digits");
    analyze->add_flag("--exact", ao.exact, "print exact rationals p/q");
    analyze->add_flag("--per-stage", ao.per_stage, "checkpoints at stage boundaries (run files)");
    actions.push_back({analyze, [&] { return cmd_analyze(ao, in, out); }});

    // bounds
    BoundsOpts bo;
    auto* bounds = app.add_subcommand("bounds", "print bound values exactly");
    bounds->require_subcommand(1);
    auto add_b = [&](const std::string& name, const std::string& desc, int (*fn)(const BoundsOpts&, std::ostream&)) {
        auto* b = bounds->add_subcommand(name, desc);
        actions.push_back({b, [&, fn] { return fn(bo, out); }});
        return b;
    };
    auto* bl = add_b("leveque", "frequency set T and threshold delta for eps", bounds_leveque);
    bl->add_option("--eps", bo.eps)->capture_default_str();
    auto* bp = add_b("padding", "base-change offset and padding", bounds_padding);
    bp->add_option("--s0", bo.s0)->capture_default_str();
    bp->add_option("--s1", bo.s1)->capture_default_str();
    auto* be = add_b("ell", "length budget for a stage", bounds_ell);
    be->add_option("--R", bo.R)->delimiter(',')->capture_default_str();
    be->add_option("--s", bo.s)->capture_default_str();
    be->add_option("--k", bo.k)->capture_default_str();
    be->add_option("--eps", bo.eps)->capture_default_str();
    be->add_option("--c", bo.c)->capture_default_str();
    auto* bt = add_b("transfer", "cell count and ell0 for the discrepancy transfer", bounds_transfer);
    bt->add_option("--r", bo.r)->capture_default_str();
    bt->add_option("--eps", bo.eps)->capture_default_str();
    auto* b12 = add_b("lemma312", "N0 for the block-count tail bound", bounds_lemma312);
    b12->add_option("--s", bo.s)->capture_default_str();
    b12->add_option("--ell", bo.ell)->capture_default_str();
    b12->add_option("--eps", bo.eps)->capture_default_str();
    b12->add_option("--delta", bo.delta)->capture_default_str();
    auto* b13 = add_b("lemma313", "N0 for the base-4 defect count", bounds_lemma313);
    b13->add_option("--eps", bo.eps)->capture_default_str();
    auto* b14 = add_b("lemma314", "k, N0 and alphabet for restricted-alphabet blocks", bounds_lemma314);
    b14->add_option("--s", bo.s)->capture_default_str();
    b14->add_option("--eps", bo.eps)->capture_default_str();
    b14->add_option("--parity", bo.parity, "auto, odd or even")->capture_default_str();
    auto* bs = add_b("schmidt", "p and ell0 for the candidate survey", bounds_schmidt);
    bs->add_option("--R", bo.R)->delimiter(',')->capture_default_str();
    bs->add_option("--T", bo.T, "T = {1..T}")->capture_default_str();
    bs->add_option("--s", bo.s)->capture_default_str();
    bs->add_option("--k", bo.k)->capture_default_str();
    bs->add_option("--c", bo.c)->capture_default_str();
    auto* bc = add_b("cosine", "enclosure of the cosine-product constant", bounds_cosine);
    bc->add_option("--precision", bo.precision)->capture_default_str();
    auto* bx = add_b("scaled-index", "ceil(b / ln r)", bounds_scaled);
    bx->add_option("--b", bo.ell)->capture_default_str();
    bx->add_option("--r", bo.r)->capture_default_str();

    // verify
    VerifyOpts vo;
    auto* verify = app.add_subcommand("verify", "run a property suite; exit 1 on a counterexample");
    verify->require_subcommand(1);
    auto add_v = [&](const std::string& name, const std::string& alias, const std::string& desc,
                     int (*fn)(const VerifyOpts&, std::ostream&)) {
        auto* v = verify->add_subcommand(name, desc);
        if (!alias.empty()) v->alias(alias);
        v->add_option("--n", vo.n, "trials")->capture_default_str();
        v->add_option("--seed", vo.seed)->capture_default_str();
        actions.push_back({v, [&, fn] { return fn(vo, out); }});
        return v;
    };
    add_v("discrepancy-oracle", "", "closed form against brute force", verify_discrepancy_oracle);
    add_v("partition", "lemma31", "small partition discrepancy forces small discrepancy", verify_partition);
    add_v("leveque", "lemma38", "small Weyl sums on T force discrepancy below eps", verify_leveque);
    add_v("block-transfer", "lemma311", "small block discrepancy forces small orbit discrepancy",
          verify_block_transfer);
    auto* vs = add_v("survey", "lemma317", "share of candidates passing the exponential-sum test", verify_survey);
    vs->add_option("--R", vo.R)->delimiter(',')->capture_default_str();
    vs->add_option("--s", vo.s)->capture_default_str();
    vs->add_option("--k", vo.k)->capture_default_str();
    vs->add_option("--ell", vo.ell)->capture_default_str();
    vs->add_option("--T", vo.T, "T = {1..T}")->capture_default_str();
    vs->add_flag("--exhaustive", vo.exhaustive);
    vs->add_option("--samples", vo.samples)->capture_default_str();
    auto* v13 = add_v("base4-defect", "lemma313", "base-4 words with a binary defect", verify_base4_defect);
    v13->add_option("--N", vo.N, "largest word length (even lengths from 2)")->capture_default_str();
    add_v("basechange", "", "adic subintervals and refinements stay inside", verify_basechange);

    try {
        std::vector<std::string> args = apply_config(app, argv, in);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        CLI::App* at = &app;
        for (CLI::App* sub = at; sub;) {
            auto subs = sub->get_subcommands();
            sub = subs.empty() ? nullptr : subs.front();
            if (sub) at = sub;
        }
        err << "error: " << e.what() << "\n" << at->help();
        return kInput;
    } catch (const std::exception& e) {
        return classify(e, err);
    }

    for (auto& [sub, fn] : actions) {
        if (!sub->parsed()) continue;
        try {
            return fn();
        } catch (const std::exception& e) {
            return classify(e, err);
        }
    }
    err << "error: no command given\n" << app.help();
    return kInput;
}

}  // namespace nfcli
