#include "normality/counting.hpp"

#include "normality/certified.hpp"
#include "normality/digit_orbit.hpp"
#include "normality/discrepancy.hpp"

#include <algorithm>
#include <random>

namespace normality {
namespace {

Integer to_int(std::uint64_t v) { return Integer(std::to_string(v)); }

std::uint64_t checked_space(std::uint64_t base, std::size_t n, std::uint64_t budget, const char* what) {
    Integer space = ipow(base, n);
    if (space > to_int(budget))
        throw BudgetError(std::string(what) + ": " + space.get_str() + " words exceed the enumeration budget");
    return space.get_ui();
}

// Odometer over Lambda_base^n.
bool odometer_next(std::vector<std::uint32_t>& v, std::uint64_t base) {
    for (std::size_t pos = v.size(); pos-- > 0;) {
        if (++v[pos] < base) return true;
        v[pos] = 0;
    }
    return false;
}

// Least n in [lo, ...) with pred(n), for pred monotone (false then true).
template <class Pred>
std::uint64_t least_true(std::uint64_t lo, Pred&& pred) {
    std::uint64_t hi = std::max<std::uint64_t>(lo, 1);
    while (!pred(hi)) {
        lo = hi + 1;
        if (hi > (1ull << 62)) throw std::overflow_error("threshold search overflow");
        hi *= 2;
    }
    while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (pred(mid)) hi = mid;
        else lo = mid + 1;
    }
    return hi;
}

// Decides value < bound for value given by evaluate(bits), escalating precision.
template <class F>
bool certified_less(F&& evaluate, const Rational& bound) {
    for (unsigned bits = 128; bits <= kMaxPrecisionBits; bits *= 2) {
        Bracket v = evaluate(bits);
        if (v.upper() < bound) return true;
        if (v.lower() >= bound) return false;
    }
    throw PrecisionError("threshold comparison undecided");
}

}  // namespace

RestrictedAlphabet::RestrictedAlphabet(Base s_, unsigned k_, AlphabetChoice choice) : s(s_), k(k_) {
    if (k == 0) throw std::domain_error("restricted alphabet: k must be positive");
    Integer full = ipow(s.value, k);
    s_tilde = full - (choice == AlphabetChoice::drop_one ? 1 : 2);
    if (s_tilde < 2) throw std::domain_error("restricted alphabet needs at least two symbols");
}

RestrictedAlphabet RestrictedAlphabet::for_construction(Base s, unsigned k) {
    return RestrictedAlphabet(s, k, s.value % 2 == 1 ? AlphabetChoice::drop_one : AlphabetChoice::drop_two);
}

Integer good_block_count(Base s, std::size_t ell, const Rational& eps, std::size_t N, std::uint64_t budget) {
    if (ell == 0 || ell > N) throw std::domain_error("good_block_count: need 1 <= ell <= N");
    if (eps <= 0) throw std::domain_error("good_block_count: eps must be positive");
    const std::uint64_t total = checked_space(s.value, N, budget, "good_block_count");
    const std::uint64_t S = ipow(s.value, ell).get_ui();
    // |occ S - N| < eps N S  <=>  |occ S - N| <= lim
    const Rational thr = eps * Rational(to_int(N)) * Rational(to_int(S));
    const Integer lim_z = ceil_q(thr) - 1;
    const bool unbounded = !lim_z.fits_slong_p();
    const long lim = unbounded ? 0 : lim_z.get_si();

    std::vector<std::uint32_t> v(N, 0);
    std::vector<std::uint64_t> occ(S, 0);
    std::vector<std::uint64_t> touched;
    std::uint64_t good = 0;
    for (std::uint64_t w = 0; w < total; ++w, odometer_next(v, s.value)) {
        if (unbounded) {
            ++good;
            continue;
        }
        touched.clear();
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < N; ++i) {
            code = (code * s.value + v[i]) % S;
            if (i + 1 >= ell) {
                if (occ[code]++ == 0) touched.push_back(code);
            }
        }
        bool ok = true;
        for (auto c : touched) {
            long dev = static_cast<long>(occ[c] * S) - static_cast<long>(N);
            if (dev < 0) dev = -dev;
            if (dev > lim) ok = false;
            occ[c] = 0;
        }
        if (touched.size() < S && static_cast<long>(N) > lim) ok = false;
        if (ok) ++good;
    }
    return to_int(good);
}

Threshold lemma312_threshold(Base s, std::size_t ell, const Rational& eps, const Rational& delta) {
    if (ell == 0) throw std::domain_error("lemma312_threshold: ell must be positive");
    if (eps <= 0 || delta <= 0) throw std::domain_error("lemma312_threshold: eps and delta must be positive");
    // C(ell, v) <= max(1 - s^-ell, s^-ell) < 1, so eps >= 1 leaves no bad words.
    if (eps >= 1) return {ell, "tail-bound"};
    const Integer lead = to_int(2 * ell) * ipow(s.value, ell);
    const Rational L(to_int(ell));
    auto ok = [&](std::uint64_t N) {
        if (N < ell) return false;
        const Rational n(to_int(N));
        const Rational gap = eps - L / n;
        if (gap <= 0) return false;
        const Rational streams = (n - L + 1) / L - 1;
        if (streams <= 0) return false;
        const Rational X = 2 * streams * gap * gap;
        return certified_less(
            [&](unsigned bits) { return Bracket::of(Rational(lead), bits) * exp(Bracket::of(-X, bits)); }, delta);
    };
    return {least_true(ell, ok), "tail-bound"};
}

std::optional<Threshold> lemma312_empirical(Base s, std::size_t ell, const Rational& eps, const Rational& delta,
                                            std::uint64_t budget) {
    std::optional<std::uint64_t> start;
    for (std::size_t N = ell; ipow(s.value, N) <= to_int(budget); ++N) {
        Integer good = good_block_count(s, ell, eps, N, budget);
        Rational bad = ratio(ipow(s.value, N) - good, ipow(s.value, N));
        if (bad < delta) {
            if (!start) start = N;
        } else {
            start.reset();
        }
    }
    if (!start) return std::nullopt;
    return Threshold{*start, "empirical"};
}

DefectSurvey base4_defect_survey(std::size_t N, std::uint64_t budget) {
    if (N == 0) throw std::domain_error("base4_defect_survey: N must be positive");
    const std::uint64_t total = checked_space(2, N, budget, "base4_defect_survey");
    // The binary expansion of eta_v is 0 v_1 0 v_2 ... 0 v_N, and
    // {2^m eta_v} < 1/2 exactly when binary digit m+1 is 0.
    std::uint64_t count = 0;
    std::vector<std::uint32_t> v(N, 0);
    for (std::uint64_t w = 0; w < total; ++w, odometer_next(v, 2)) {
        std::uint64_t zeros = 0;
        for (auto d : v) zeros += 1 + (d == 0 ? 1 : 0);
        if (8 * zeros >= 5 * 2 * N) ++count;
    }
    DefectSurvey out{to_int(count), ratio(to_int(count), ipow(2, N))};
    out.fraction.canonicalize();
    return out;
}

Threshold lemma313_threshold(const Rational& eps) {
    if (!(eps > 0 && eps < 1)) throw std::domain_error("lemma313_threshold: need 0 < eps < 1");
    return lemma312_threshold(Base{2}, 1, Rational(1, 12), eps);
}

DigitBlock expand_block(const DigitBlock& w, Base s, unsigned k) {
    if (k == 0) throw std::domain_error("expand_block: k must be positive");
    const Integer S = ipow(s.value, k);
    if (to_int(w.base) != S) throw std::domain_error("expand_block: block base must be s^k");
    std::vector<std::uint32_t> out(w.size() * k);
    for (std::size_t n = 0; n < w.size(); ++n) {
        std::uint64_t d = w.digits[n];
        for (unsigned i = k; i-- > 0;) {
            out[n * k + i] = static_cast<std::uint32_t>(d % s.value);
            d /= s.value;
        }
    }
    return DigitBlock(s.value, std::move(out));
}

namespace {

std::size_t reduction_ell(Base s, const Rational& eps) {
    // ell minimal with s^ell > 3/eps.
    std::size_t ell = 1;
    while (Rational(ipow(s.value, ell)) <= Rational(3) / eps) ++ell;
    return ell;
}

Integer reduction_N0(Base s, std::size_t ell, unsigned k, const Rational& eps) {
    const Rational tau = eps * eps / 18;
    const Rational L(to_int(ell));
    Integer n_tail = with_escalation([&](unsigned bits) {
        Bracket lnv = Bracket::ln(4, bits) + Bracket::of(L, bits) * Bracket::ln(s.value, bits);
        Bracket v = Bracket::of(2, bits) * lnv / Bracket::of(tau * tau, bits);
        return v.least_integer_above();
    });
    Integer n_len = floor_q(2 * L * 9 / (eps * eps) / k) + 1;
    return std::max(n_tail, n_len);
}

std::size_t bit_size(const Integer& v) { return mpz_sizeinbase(v.get_mpz_t(), 2); }

}  // namespace

Lemma314Params lemma314_params(Base s, const Rational& eps, AlphabetChoice choice) {
    if (!(eps > 0 && eps <= 1)) throw std::domain_error("lemma314_params: need 0 < eps <= 1");
    const std::size_t ell = reduction_ell(s, eps);
    const Rational half_tau = eps * eps / 36;
    const unsigned drop = choice == AlphabetChoice::drop_one ? 1 : 2;
    // k least with s~ >= 2 and 2/s~ + (ell-1)/k < tau/2. No k below k0 works,
    // where k0 is least with (ell-1)/k0 < tau/2.
    Integer k0 = floor_q(Rational(to_int(ell - 1)) / half_tau) + 1;
    if (!k0.fits_uint_p()) throw std::overflow_error("lemma314_params: k too large");
    unsigned lg = 0;  // floor(log2 s)
    while ((2ull << lg) <= s.value) ++lg;
    for (unsigned k = std::max(1u, static_cast<unsigned>(k0.get_ui()));; ++k) {
        const Rational gap = half_tau - ratio(to_int(ell - 1), to_int(k));
        if (gap <= 0) continue;
        // s~ >= 2^(k lg) - 2 > 2/gap once k lg exceeds the bit size of 2/gap plus one.
        const Rational need = 2 / gap;
        const std::size_t need_bits = bit_size(ceil_q(need)) + 1;
        if (std::uint64_t(k) * lg >= need_bits + 1) {
            std::optional<RestrictedAlphabet> alpha;
            if (std::uint64_t(k) * (lg + 1) <= 4096) alpha.emplace(s, k, choice);
            return Lemma314Params{k, reduction_N0(s, ell, k, eps), ell, alpha};
        }
        Integer st = ipow(s.value, k) - drop;
        if (st < 2) continue;
        if (Rational(2) / Rational(st) < gap) {
            return Lemma314Params{k, reduction_N0(s, ell, k, eps), ell, RestrictedAlphabet(s, k, choice)};
        }
    }
}

Integer lemma314_N0(Base s, unsigned k, const Rational& eps) {
    if (!(eps > 0 && eps <= 1)) throw std::domain_error("lemma314_N0: need 0 < eps <= 1");
    if (k == 0) throw std::domain_error("lemma314_N0: k must be positive");
    return reduction_N0(s, reduction_ell(s, eps), k, eps);
}

Lemma314Survey lemma314_survey(Base s, unsigned k, const RestrictedAlphabet& alphabet, std::size_t N,
                               const Rational& eps, std::optional<std::uint64_t> sample, std::uint64_t seed,
                               std::uint64_t budget) {
    if (N == 0) throw std::domain_error("lemma314_survey: N must be positive");
    if (alphabet.s != s || alphabet.k != k) throw std::domain_error("lemma314_survey: alphabet does not match s^k");
    Integer space;
    mpz_pow_ui(space.get_mpz_t(), alphabet.s_tilde.get_mpz_t(), N);
    const bool exhaustive =
        space <= Integer(std::to_string(budget)) && (!sample || space <= Integer(std::to_string(*sample)));

    // Words are held directly as their base-s expansion, k digits per symbol.
    std::vector<std::uint32_t> star(static_cast<std::size_t>(k) * N, 0);
    auto good = [&] {
        DigitStream ds(s.value, star);
        return ds.extreme(k * N) < eps;
    };
    std::uint64_t pass = 0, seen = 0;
    if (exhaustive) {
        const std::uint64_t st = alphabet.s_tilde.get_ui();
        const std::uint64_t total = space.get_ui();
        std::vector<std::uint32_t> w(N, 0);
        for (std::uint64_t i = 0; i < total; ++i, odometer_next(w, st)) {
            for (std::size_t j = 0; j < N; ++j) {
                std::uint64_t d = w[j];
                for (unsigned q = k; q-- > 0;) {
                    star[j * k + q] = static_cast<std::uint32_t>(d % s.value);
                    d /= s.value;
                }
            }
            if (good()) ++pass;
            ++seen;
        }
    } else {
        // Uniform symbols below s~ by rejection on uniform k-digit strings;
        // s~ >= s^k / 2 so fewer than half the draws are rejected.
        const std::uint64_t n = sample ? *sample : budget;
        std::mt19937_64 rng(seed);
        std::vector<std::uint32_t> sym(k);
        for (std::uint64_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < N; ++j) {
                for (;;) {
                    Integer v = 0;
                    for (auto& d : sym) {
                        d = static_cast<std::uint32_t>(uniform_below(rng, s.value));
                        v = v * s.value + d;
                    }
                    if (v < alphabet.s_tilde) break;
                }
                std::copy(sym.begin(), sym.end(), star.begin() + static_cast<std::ptrdiff_t>(j * k));
            }
            if (good()) ++pass;
            ++seen;
        }
    }
    Lemma314Survey out{ratio(to_int(pass), to_int(seen)), !exhaustive, seen};
    out.fraction.canonicalize();
    return out;
}

}  // namespace normality
