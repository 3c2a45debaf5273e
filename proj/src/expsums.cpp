#include "normality/expsums.hpp"

#include "normality/certified.hpp"
#include "normality/discrepancy.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace normality {
namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr unsigned kDecideCapBits = 4096;

struct Enc {
    Rational mid;
    Rational rad;
};

// |S|^2 from S~ = re + i im with each component within err of S.
Enc square_modulus(const Rational& re, const Rational& im, const Rational& err) {
    Rational e = err * Rational(3, 2);  // >= sqrt(2) err
    Rational mag = abs(re) + abs(im);
    Enc out{re * re + im * im, e * (2 * mag + e)};
    if (out.mid < out.rad) {
        Rational hi = out.mid + out.rad;
        out.mid = hi / 2;
        out.rad = hi / 2;
    }
    return out;
}

Rational exact_of(double x) { return Rational(x); }

// Error budget for the double path, per component of the sum. Each x carries
// absolute error xerr; sin/cos are trusted to 2 ulp.
Rational double_budget(std::size_t n, double at, double xerr) {
    const double u = std::ldexp(1.0, -53);
    double per_term = 7.0 * (at * (xerr + u) + 4 * u) + 4 * u;
    double nn = static_cast<double>(n);
    double E = 1.25 * (nn * per_term + nn * nn * 2 * u);
    return exact_of(E);
}

Enc sum_double(const std::vector<double>& xs, double xerr, std::int64_t t) {
    double re = 0, im = 0;
    const double tt = static_cast<double>(t);
    for (double x : xs) {
        double y = tt * x;
        y -= std::floor(y);
        double ang = kTwoPi * y;
        re += std::cos(ang);
        im += std::sin(ang);
    }
    return square_modulus(exact_of(re), exact_of(im), double_budget(xs.size(), std::fabs(tt), xerr));
}

struct MpfrVar {
    mpfr_t v;
    explicit MpfrVar(unsigned bits) { mpfr_init2(v, bits); }
    ~MpfrVar() { mpfr_clear(v); }
    MpfrVar(const MpfrVar&) = delete;
    MpfrVar& operator=(const MpfrVar&) = delete;
};

// residue(j, num, den) writes the exactly reduced argument num/den in [0,1).
template <class Residue>
Enc sum_mpfr(std::size_t n, unsigned bits, Residue&& residue) {
    MpfrVar two_pi(bits), re(bits), im(bits), x(bits), s(bits), c(bits);
    mpfr_const_pi(two_pi.v, MPFR_RNDN);
    mpfr_mul_2ui(two_pi.v, two_pi.v, 1, MPFR_RNDN);
    mpfr_set_zero(re.v, 1);
    mpfr_set_zero(im.v, 1);
    Integer num, den;
    for (std::size_t j = 0; j < n; ++j) {
        residue(j, num, den);
        mpfr_set_z(x.v, num.get_mpz_t(), MPFR_RNDN);
        mpfr_div_z(x.v, x.v, den.get_mpz_t(), MPFR_RNDN);
        mpfr_mul(x.v, x.v, two_pi.v, MPFR_RNDN);
        mpfr_sin_cos(s.v, c.v, x.v, MPFR_RNDN);
        mpfr_add(re.v, re.v, c.v, MPFR_RNDN);
        mpfr_add(im.v, im.v, s.v, MPFR_RNDN);
    }
    // Argument: five roundings on a value below 2 pi; one for sin/cos; the
    // running sums are at most n in size.
    Integer nn(std::to_string(n));
    Rational E = ratio(64 * nn + 2 * nn * nn, ipow(2, bits));
    Rational qr, qi;
    mpfr_get_q(qr.get_mpq_t(), re.v);
    mpfr_get_q(qi.get_mpq_t(), im.v);
    return square_modulus(qr, qi, E);
}

// Orbit numerators r^j p mod q for j in [jlo, jhi).
class Orbit {
public:
    Orbit(const Rational& xi, std::uint64_t r, std::uint64_t jlo, std::uint64_t jhi)
        : r_(r), jlo_(jlo), n_(jhi - jlo), q_(xi.get_den()) {
        Integer rr(std::to_string(r)), e(std::to_string(jlo));
        mpz_powm(start_.get_mpz_t(), rr.get_mpz_t(), e.get_mpz_t(), q_.get_mpz_t());
        start_ *= xi.get_num();
        start_ %= q_;
        small_ = mpz_sizeinbase(q_.get_mpz_t(), 2) <= 62;
    }

    std::size_t size() const { return n_; }
    const Integer& den() const { return q_; }

    // Double approximations with absolute error <= xerr().
    std::vector<double> approx() const {
        std::vector<double> out(n_);
        if (small_) {
            std::uint64_t q = q_.get_ui(), v = start_.get_ui();
            const double dq = static_cast<double>(q);
            for (std::size_t j = 0; j < n_; ++j) {
                out[j] = static_cast<double>(v) / dq;
                v = static_cast<std::uint64_t>(static_cast<unsigned __int128>(v) * r_ % q);
            }
            return out;
        }
        long eq;
        double mq = mpz_get_d_2exp(&eq, q_.get_mpz_t());
        Integer v = start_;
        for (std::size_t j = 0; j < n_; ++j) {
            long ev;
            double mv = mpz_get_d_2exp(&ev, v.get_mpz_t());
            out[j] = v == 0 ? 0.0 : std::ldexp(mv / mq, static_cast<int>(ev - eq));
            step(v);
        }
        return out;
    }
    static double xerr() { return std::ldexp(1.0, -50); }

    // Visits the exact numerators t r^j p mod q in order.
    template <class F>
    void each(std::int64_t t, F&& f) const {
        Integer v = start_, w;
        const Integer tt(std::to_string(t));
        for (std::size_t j = 0; j < n_; ++j) {
            w = v * tt;
            mpz_fdiv_r(w.get_mpz_t(), w.get_mpz_t(), q_.get_mpz_t());
            f(j, w);
            step(v);
        }
    }

private:
    void step(Integer& v) const {
        v *= static_cast<unsigned long>(r_);
        if (r_ <= 16) {
            while (v >= q_) v -= q_;
        } else {
            v %= q_;
        }
    }

    std::uint64_t r_;
    std::uint64_t jlo_;
    std::size_t n_;
    Integer q_;
    Integer start_;
    bool small_;
};

void require_A_inputs(const Rational& xi, const BaseSet& R, const FreqSet& T, std::uint64_t ell) {
    if (ell == 0) throw std::domain_error("exp_sum_A: ell must be positive");
    if (R.empty() || T.empty()) throw std::domain_error("exp_sum_A: R and T must be nonempty");
    if (xi < 0 || xi >= 1) throw std::domain_error("exp_sum_A: xi outside [0,1)");
    for (auto r : R) Base{r};
}

// bits == 0 selects the double path.
Enc eval_A(const Rational& xi, const BaseSet& R, const FreqSet& T, std::uint64_t a, std::uint64_t ell,
           unsigned bits) {
    Enc total{0, 0};
    for (auto r : R) {
        const std::uint64_t lo = scaled_index_or_zero(a, Base{r});
        const std::uint64_t hi = scaled_index_or_zero(a + ell, Base{r});
        Orbit orbit(xi, r, lo + 1, hi + 1);
        if (orbit.size() == 0) continue;
        if (bits == 0) {
            std::vector<double> xs = orbit.approx();
            for (auto t : T) {
                Enc e = sum_double(xs, Orbit::xerr(), t);
                total.mid += e.mid;
                total.rad += e.rad;
            }
        } else {
            for (auto t : T) {
                std::vector<Integer> nums(orbit.size());
                orbit.each(t, [&](std::size_t j, const Integer& w) { nums[j] = w; });
                Enc e = sum_mpfr(orbit.size(), bits, [&](std::size_t j, Integer& num, Integer& den) {
                    num = nums[j];
                    den = orbit.den();
                });
                total.mid += e.mid;
                total.rad += e.rad;
            }
        }
    }
    return total;
}

ApproxReal to_approx(const Enc& e) { return ApproxReal{e.mid, e.rad}; }

Enc eval_weyl(const UnitSequence& seq, std::int64_t t, unsigned bits) {
    const Rational tq(Integer(std::to_string(t)));
    std::vector<Rational> ys(seq.size());
    for (std::size_t j = 0; j < seq.size(); ++j) ys[j] = frac(tq * seq[j]);
    if (bits == 0) {
        std::vector<double> xs(ys.size());
        for (std::size_t j = 0; j < ys.size(); ++j) xs[j] = ys[j].get_d();
        // ys are already reduced, so the frequency is 1 from here on.
        return sum_double(xs, std::ldexp(1.0, -52), 1);
    }
    return sum_mpfr(ys.size(), bits, [&](std::size_t j, Integer& num, Integer& den) {
        num = ys[j].get_num();
        den = ys[j].get_den();
    });
}

Integer ceil_exact(const Rational& q) { return ceil_q(q); }

}  // namespace

LevequeParams leveque_parameters(const Rational& eps) {
    if (!(eps > 0 && eps <= 1)) throw std::domain_error("leveque_parameters: need 0 < eps <= 1");
    const Rational e3 = eps * eps * eps;
    Integer m = with_escalation(
        [&](unsigned bits) {
            auto [pl, ph] = pi_bounds(bits);
            Integer a = ceil_exact(Rational(12) / (e3 * ph * ph));
            Integer b = ceil_exact(Rational(12) / (e3 * pl * pl));
            if (a != b) throw PrecisionError("leveque m straddles an integer");
            return a;
        },
        64);
    LevequeParams out;
    out.m = m;
    out.source_eps = eps;
    auto [pl, ph] = pi_bounds(64);
    (void)ph;
    out.delta = e3 * pl * pl / (Rational(m) * 24);
    if (m <= kMaxMaterializedT) {
        const std::uint64_t mm = m.get_ui();
        out.T.reserve(mm);
        for (std::uint64_t t = 1; t <= mm; ++t) out.T.push_back(static_cast<std::int64_t>(t));
    }
    return out;
}

ApproxReal weyl_power(const UnitSequence& seq, std::int64_t t, const Rational& precision) {
    if (seq.empty()) throw std::domain_error("weyl_power: empty sequence");
    if (t == 0) throw std::domain_error("weyl_power: t must be nonzero");
    if (precision <= 0) throw std::domain_error("weyl_power: precision must be positive");
    const Rational n2 = Rational(Integer(std::to_string(seq.size()))) * Rational(Integer(std::to_string(seq.size())));
    for (unsigned bits = 0; bits <= kMaxPrecisionBits; bits = bits == 0 ? 128 : bits * 2) {
        Enc e = eval_weyl(seq, t, bits);
        e.mid /= n2;
        e.rad /= n2;
        if (e.rad <= precision) return to_approx(e);
    }
    throw PrecisionError("weyl_power: precision cap reached");
}

ApproxReal leveque_bound(const UnitSequence& seq, std::uint64_t m, const Rational& precision) {
    if (seq.empty()) throw std::domain_error("leveque_bound: empty sequence");
    if (m == 0) throw std::domain_error("leveque_bound: m must be positive");
    if (precision <= 0) throw std::domain_error("leveque_bound: precision must be positive");
    Rational wprec = precision / 8;
    for (unsigned bits = 128; bits <= kMaxPrecisionBits; bits *= 2, wprec /= 1024) {
        Rational lo = Rational(1, m + 1), hi = lo;
        for (std::uint64_t h = 1; h <= m; ++h) {
            ApproxReal w = weyl_power(seq, static_cast<std::int64_t>(h), wprec);
            Rational inv(1, h * h);
            Rational wl = w.lower();
            if (wl < 0) wl = 0;
            lo += inv * wl;
            hi += inv * w.upper();
        }
        Bracket pi = Bracket::pi(bits);
        Bracket six = Bracket::of(6, bits);
        Bracket third = Bracket::of(Rational(1, 3), bits);
        Bracket vlo = pow(six * Bracket::of(lo, bits) / (pi * pi), third);
        Bracket vhi = pow(six * Bracket::of(hi, bits) / (pi * pi), third);
        Rational a = vlo.lower(), b = vhi.upper();
        ApproxReal out{(a + b) / 2, (b - a) / 2};
        if (out.radius <= precision) return out;
    }
    throw PrecisionError("leveque_bound: precision cap reached");
}

ApproxReal exp_sum_A(const Rational& xi, const BaseSet& R, const FreqSet& T, std::uint64_t a, std::uint64_t ell,
                     const Rational& precision) {
    require_A_inputs(xi, R, T, ell);
    if (precision <= 0) throw std::domain_error("exp_sum_A: precision must be positive");
    for (unsigned bits = 0; bits <= kMaxPrecisionBits; bits = bits == 0 ? 128 : bits * 2) {
        Enc e = eval_A(xi, R, T, a, ell, bits);
        if (e.rad <= precision) return to_approx(e);
    }
    throw PrecisionError("exp_sum_A: precision cap reached");
}

bool exp_sum_A_below(const Rational& xi, const BaseSet& R, const FreqSet& T, std::uint64_t a, std::uint64_t ell,
                     const Rational& scale, const Rational& delta) {
    require_A_inputs(xi, R, T, ell);
    const Rational thr = scale * delta;
    for (unsigned bits = 0; bits <= kDecideCapBits; bits = bits == 0 ? 128 : bits * 2) {
        Enc e = eval_A(xi, R, T, a, ell, bits);
        if (e.mid + e.rad < thr) return true;
        if (e.mid - e.rad >= thr) return false;
    }
    throw UndecidedError("A-test undecided at the precision cap");
}

ApproxReal cosine_constant(const Rational& precision) {
    if (precision <= 0) throw std::domain_error("cosine_constant: precision must be positive");
    // L ~ log2(1/precision); every parameter below is a nondecreasing function
    // of L, so enclosures for finer precisions are nested in coarser ones.
    long L = static_cast<long>(mpz_sizeinbase(precision.get_den_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(precision.get_num_mpz_t(), 2)) + 2;
    if (L < 1) L = 1;
    for (;; L += 16) {
        const unsigned K = static_cast<unsigned>(L / 2 + 8);
        const unsigned bits = static_cast<unsigned>(L + 64);
        MpfrVar pl(bits), ph(bits), x(bits), c(bits), plo(bits), phi(bits);
        mpfr_const_pi(pl.v, MPFR_RNDD);
        mpfr_const_pi(ph.v, MPFR_RNDU);
        mpfr_set_ui(plo.v, 1, MPFR_RNDN);
        mpfr_set_ui(phi.v, 1, MPFR_RNDN);
        for (unsigned k = 1; k <= K; ++k) {
            // cos is decreasing on [0, pi/2].
            mpfr_div_2ui(x.v, ph.v, k + 1, MPFR_RNDU);
            mpfr_cos(c.v, x.v, MPFR_RNDD);
            mpfr_mul(plo.v, plo.v, c.v, MPFR_RNDD);
            mpfr_div_2ui(x.v, pl.v, k + 1, MPFR_RNDD);
            mpfr_cos(c.v, x.v, MPFR_RNDU);
            mpfr_mul(phi.v, phi.v, c.v, MPFR_RNDU);
        }
        Rational lo_prod, hi_prod;
        mpfr_get_q(lo_prod.get_mpq_t(), plo.v);
        mpfr_get_q(hi_prod.get_mpq_t(), phi.v);
        // Tail: prod_{k>K} cos(x_k) >= 1 - sum x_k^2 / 2 >= 1 - (32/3) 4^-(K+2), using pi <= 4.
        Rational tail = Rational(1) - ratio(Integer(32), 3 * ipow(4, K + 2));
        Rational upper = 1 / (lo_prod * tail);
        Rational lower = 1 / hi_prod;
        ApproxReal out{(upper + lower) / 2, (upper - lower) / 2};
        if (out.radius <= precision) return out;
    }
}

std::uint64_t schmidt_p(const BaseSet& R, const Integer& t_max, Base s) {
    if (R.empty()) throw std::domain_error("schmidt_p: R must be nonempty");
    const Integer need_t = t_max * 2;
    const Integer need_s = Integer(std::to_string(s.value)) * Integer(std::to_string(s.value)) + 1;
    for (std::uint64_t p = 1;; ++p) {
        bool ok = true;
        for (auto r : R) {
            if (ipow(r, p - 1) < need_t || ipow(r, p) < need_s) {
                ok = false;
                break;
            }
        }
        if (ok) return p;
    }
}

std::uint64_t schmidt_p(const BaseSet& R, const FreqSet& T, Base s) {
    if (R.empty() || T.empty()) throw std::domain_error("schmidt_p: R and T must be nonempty");
    std::int64_t tmax = 0;
    for (auto t : T) tmax = std::max<std::int64_t>(tmax, t < 0 ? -t : t);
    return schmidt_p(R, Integer(std::to_string(tmax)), s);
}

Integer lemma317_ell0(const BaseSet& R, const Integer& t_count, const Integer& t_max, Base s, unsigned k,
                      const SchmidtConfig& cfg) {
    if (!(cfg.c > 0 && cfg.c < Rational(1, 2))) throw std::domain_error("lemma317_ell0: need 0 < c < 1/2");
    if (R.empty() || t_count <= 0) throw std::domain_error("lemma317_ell0: R and T must be nonempty");
    const Integer spow = ipow(s.value, k);
    if (!spow.fits_ulong_p()) throw std::domain_error("lemma317_ell0: s^k too large");
    const std::uint64_t p = schmidt_p(R, t_max, Base{spow.get_ui()});
    std::uint64_t rmax = *R.rbegin();

    auto evaluate = [&](unsigned bits) {
        Bracket lns = Bracket::of(k, bits) * Bracket::ln(s.value, bits);
        Bracket two = Bracket::of(2, bits), one = Bracket::of(1, bits);
        Bracket t1 = (pow(two, Bracket::of(2 / cfg.c, bits)) + one) * lns;
        // The cosine product equals pi/2 (Viete), which MPFR encloses far faster
        // than the product at the precisions the power below demands.
        Bracket ct_enc = Bracket::pi(bits) / Bracket::of(2, bits);
        Bracket base2 = Bracket::of(16 * Rational(t_count) * Rational(Integer(std::to_string(R.size()))), bits) * ct_enc;
        Bracket t2 = pow(base2, Bracket::of(4 / cfg.c, bits));
        Bracket t3 = Bracket::of(8 * Rational(Integer(std::to_string(p))), bits) * lns;
        t3 = t3 * t3;
        Bracket t4 = Bracket::ln(rmax, bits);
        return max(max(t1, t2), max(t3, t4));
    };
    unsigned bits = 128;
    for (;;) {
        Bracket v = evaluate(bits);
        if (static_cast<unsigned long>(v.magnitude_bits()) + 64 > bits) {
            bits = static_cast<unsigned>(v.magnitude_bits()) + 128;
            continue;
        }
        try {
            return v.least_integer_above();
        } catch (const PrecisionError&) {
            if (bits >= kMaxPrecisionBits) throw;
            bits *= 2;
        }
    }
}

Integer lemma317_ell0(const BaseSet& R, const FreqSet& T, Base s, unsigned k, const SchmidtConfig& cfg) {
    if (R.empty() || T.empty()) throw std::domain_error("lemma317_ell0: R and T must be nonempty");
    std::int64_t tmax = 0;
    for (auto t : T) tmax = std::max<std::int64_t>(tmax, t < 0 ? -t : t);
    return lemma317_ell0(R, Integer(std::to_string(T.size())), Integer(std::to_string(tmax)), s, k, cfg);
}

std::uint64_t restricted_alphabet_size(Base s, unsigned k) {
    if (k == 0) throw std::domain_error("restricted alphabet: k must be positive");
    const Integer S = ipow(s.value, k);
    if (!S.fits_ulong_p()) throw std::domain_error("restricted alphabet: s^k too large");
    const std::uint64_t full = S.get_ui();
    const std::uint64_t out = s.value % 2 == 1 ? full - 1 : full - 2;
    if (out < 2) throw std::domain_error("restricted alphabet needs s^k - 2 >= 2; raise k");
    return out;
}

SurveyResult candidate_survey(const AdicRational& eta, Base s, unsigned k, std::uint64_t a, std::uint64_t ell,
                              const BaseSet& R, const FreqSet& T, const Rational& threshold,
                              std::optional<std::uint64_t> sample, std::uint64_t seed, std::uint64_t budget) {
    if (ell == 0) throw std::domain_error("candidate_survey: ell must be positive");
    for (auto r : R)
        if (mult_dependent(Base{r}, s))
            throw std::domain_error("candidate_survey: base " + std::to_string(r) + " is dependent on s");
    if (eta.base != s || eta.power != k) throw std::domain_error("candidate_survey: eta must be s^k-adic");
    const std::uint64_t P = scaled_index_or_zero(a, s, k);
    if (eta.digits.size() != P)
        throw std::domain_error("candidate_survey: eta must have precision <a; s^k> = " + std::to_string(P));
    const std::uint64_t L = scaled_index_or_zero(a + ell, s, k) - P;
    const std::uint64_t alpha = restricted_alphabet_size(s, k);
    const Integer S = ipow(s.value, k);
    const std::uint64_t Sv = S.get_ui();

    // eta as an integer over S^P, shifted to leave room for the block.
    const Integer prefix = adic_value(eta.digits).get_num() * (ipow(Sv, P) / adic_value(eta.digits).get_den());
    const Integer shifted = prefix * ipow(Sv, L);
    const Integer den = ipow(Sv, P + L);

    auto passes = [&](const std::vector<std::uint32_t>& v) {
        Integer V = 0;
        for (auto d : v) {
            V *= static_cast<unsigned long>(Sv);
            V += d;
        }
        Rational xi(shifted + V, den);
        xi.canonicalize();
        return exp_sum_A_below(xi, R, T, a, ell, 1, threshold);
    };

    SurveyResult out;
    const Integer space = ipow(alpha, L);
    const bool exhaustive = space <= Integer(std::to_string(budget)) &&
                            (!sample || space <= Integer(std::to_string(*sample)));
    std::vector<std::vector<std::uint32_t>> wit;
    if (exhaustive) {
        std::vector<std::uint32_t> v(L, 0);
        const std::uint64_t total = space.get_ui();
        for (std::uint64_t i = 0; i < total; ++i) {
            if (passes(v)) {
                ++out.passing;
                if (wit.size() < 100) wit.push_back(v);
            }
            ++out.examined;
            for (std::size_t pos = L; pos-- > 0;) {
                if (++v[pos] < alpha) break;
                v[pos] = 0;
            }
        }
    } else {
        const std::uint64_t n = sample ? *sample : budget;
        if (n == 0) throw std::domain_error("candidate_survey: empty sample");
        std::mt19937_64 rng(seed);
        std::vector<std::uint32_t> v(L);
        for (std::uint64_t i = 0; i < n; ++i) {
            for (auto& d : v) d = static_cast<std::uint32_t>(uniform_below(rng, alpha));
            if (passes(v)) {
                ++out.passing;
                wit.push_back(v);
            }
            ++out.examined;
        }
        std::sort(wit.begin(), wit.end());
        wit.erase(std::unique(wit.begin(), wit.end()), wit.end());
        if (wit.size() > 100) wit.resize(100);
        out.estimated = true;
    }
    out.fraction_passing = ratio(out.passing, out.examined);
    out.fraction_passing.canonicalize();
    for (auto& w : wit) out.witnesses.emplace_back(Sv, std::move(w));
    return out;
}

}  // namespace normality
