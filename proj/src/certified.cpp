#include "normality/certified.hpp"

#include <mpfr.h>

namespace normality {
namespace {

struct Mpfr {
    mpfr_t v;
    explicit Mpfr(unsigned bits) { mpfr_init2(v, bits); }
    ~Mpfr() { mpfr_clear(v); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
};

Rational to_q(const mpfr_t x) {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), x);
    return q;
}

Integer ceil_q(const Rational& q) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Integer floor_q(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// Enclosure of sum coeff_i ln base_i.
std::pair<Rational, Rational> sum_bounds(const std::vector<LogTerm>& terms, unsigned bits) {
    Rational lo = 0, hi = 0;
    for (const auto& t : terms) {
        if (t.coeff == 0 || t.base == 1) continue;
        auto [l, h] = log_bounds(t.base, bits);
        if (t.coeff > 0) {
            lo += t.coeff * l;
            hi += t.coeff * h;
        } else {
            lo += t.coeff * h;
            hi += t.coeff * l;
        }
    }
    return {lo, hi};
}

bool all_trivial(const std::vector<LogTerm>& terms) {
    for (const auto& t : terms)
        if (t.coeff != 0 && t.base != 1) return false;
    return true;
}

}  // namespace

std::pair<Rational, Rational> log_bounds(std::uint64_t b, unsigned bits) {
    if (b == 0) throw std::domain_error("log of zero");
    Mpfr x(bits), lo(bits), hi(bits);
    mpfr_set_ui(x.v, static_cast<unsigned long>(b), MPFR_RNDN);
    mpfr_log(lo.v, x.v, MPFR_RNDD);
    mpfr_log(hi.v, x.v, MPFR_RNDU);
    return {to_q(lo.v), to_q(hi.v)};
}

std::pair<Rational, Rational> pi_bounds(unsigned bits) {
    Mpfr lo(bits), hi(bits);
    mpfr_const_pi(lo.v, MPFR_RNDD);
    mpfr_const_pi(hi.v, MPFR_RNDU);
    return {to_q(lo.v), to_q(hi.v)};
}

Integer certified_ceil_ratio(const Rational& num, const std::vector<LogTerm>& den) {
    if (num == 0) return 0;
    for (unsigned bits = 64; bits <= kMaxPrecisionBits; bits *= 2) {
        auto [dlo, dhi] = sum_bounds(den, bits);
        if (dlo <= 0) {
            if (dhi <= 0 && all_trivial(den)) throw std::domain_error("zero logarithmic denominator");
            continue;
        }
        Rational a = num > 0 ? num / dhi : num / dlo;
        Rational b = num > 0 ? num / dlo : num / dhi;
        Integer ca = ceil_q(a), cb = ceil_q(b);
        if (ca == cb && a != ca) return ca;
    }
    throw PrecisionError("could not certify ceiling of logarithmic ratio");
}

Integer certified_ceil_logs(const std::vector<LogTerm>& terms) {
    if (all_trivial(terms)) return 0;
    for (unsigned bits = 64; bits <= kMaxPrecisionBits; bits *= 2) {
        auto [lo, hi] = sum_bounds(terms, bits);
        Integer ca = ceil_q(lo), cb = ceil_q(hi);
        if (ca == cb && lo != ca) return ca;
    }
    throw PrecisionError("could not certify ceiling of logarithmic sum");
}

Integer least_integer_above(const Rational& lo, const Rational& hi) {
    Integer a = floor_q(lo) + 1, b = floor_q(hi) + 1;
    if (a != b) throw PrecisionError("enclosure straddles an integer");
    return a;
}

namespace {

mpfr_ptr L(void* p) { return static_cast<mpfr_ptr>(p); }
mpfr_srcptr C(const void* p) { return static_cast<mpfr_srcptr>(p); }

void* fresh(unsigned bits) {
    auto* p = new __mpfr_struct;
    mpfr_init2(p, bits);
    return p;
}

void release(void* p) {
    if (!p) return;
    mpfr_clear(L(p));
    delete static_cast<__mpfr_struct*>(p);
}

}  // namespace

Bracket::Bracket(unsigned bits) : bits_(bits), lo_(fresh(bits)), hi_(fresh(bits)) {
    mpfr_set_zero(L(lo_), 1);
    mpfr_set_zero(L(hi_), 1);
}

Bracket::Bracket(const Bracket& o) : bits_(o.bits_), lo_(fresh(o.bits_)), hi_(fresh(o.bits_)) {
    mpfr_set(L(lo_), C(o.lo_), MPFR_RNDD);
    mpfr_set(L(hi_), C(o.hi_), MPFR_RNDU);
}

Bracket& Bracket::operator=(const Bracket& o) {
    if (this == &o) return *this;
    release(lo_);
    release(hi_);
    bits_ = o.bits_;
    lo_ = fresh(bits_);
    hi_ = fresh(bits_);
    mpfr_set(L(lo_), C(o.lo_), MPFR_RNDD);
    mpfr_set(L(hi_), C(o.hi_), MPFR_RNDU);
    return *this;
}

Bracket::~Bracket() {
    release(lo_);
    release(hi_);
}

Bracket Bracket::of(const Rational& q, unsigned bits) {
    Bracket b(bits);
    mpfr_set_q(L(b.lo_), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(L(b.hi_), q.get_mpq_t(), MPFR_RNDU);
    return b;
}

Bracket Bracket::between(const Rational& lo, const Rational& hi, unsigned bits) {
    if (hi < lo) throw std::domain_error("Bracket: empty enclosure");
    Bracket b(bits);
    mpfr_set_q(L(b.lo_), lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(L(b.hi_), hi.get_mpq_t(), MPFR_RNDU);
    return b;
}

Bracket Bracket::ln(std::uint64_t v, unsigned bits) {
    if (v == 0) throw std::domain_error("log of zero");
    Bracket b(bits);
    Mpfr x(64);
    mpfr_set_ui(x.v, static_cast<unsigned long>(v), MPFR_RNDN);
    mpfr_log(L(b.lo_), x.v, MPFR_RNDD);
    mpfr_log(L(b.hi_), x.v, MPFR_RNDU);
    return b;
}

Bracket Bracket::pi(unsigned bits) {
    Bracket b(bits);
    mpfr_const_pi(L(b.lo_), MPFR_RNDD);
    mpfr_const_pi(L(b.hi_), MPFR_RNDU);
    return b;
}

Bracket operator+(const Bracket& a, const Bracket& b) {
    Bracket r(std::max(a.bits_, b.bits_));
    mpfr_add(L(r.lo_), C(a.lo_), C(b.lo_), MPFR_RNDD);
    mpfr_add(L(r.hi_), C(a.hi_), C(b.hi_), MPFR_RNDU);
    return r;
}

Bracket operator-(const Bracket& a, const Bracket& b) {
    Bracket r(std::max(a.bits_, b.bits_));
    mpfr_sub(L(r.lo_), C(a.lo_), C(b.hi_), MPFR_RNDD);
    mpfr_sub(L(r.hi_), C(a.hi_), C(b.lo_), MPFR_RNDU);
    return r;
}

namespace {

// Extremes of op over the four corners, rounded outward.
template <class Op>
Bracket corners(const Bracket& a, const Bracket& b, unsigned bits, const void* alo, const void* ahi,
                const void* blo, const void* bhi, Op op) {
    Bracket r(bits);
    Mpfr t(bits);
    const void* as[2] = {alo, ahi};
    const void* bs[2] = {blo, bhi};
    bool first = true;
    Mpfr lo(bits), hi(bits);
    for (auto x : as)
        for (auto y : bs) {
            op(t.v, C(x), C(y), MPFR_RNDD);
            if (first || mpfr_less_p(t.v, lo.v)) mpfr_set(lo.v, t.v, MPFR_RNDD);
            op(t.v, C(x), C(y), MPFR_RNDU);
            if (first || mpfr_greater_p(t.v, hi.v)) mpfr_set(hi.v, t.v, MPFR_RNDU);
            first = false;
        }
    (void)a;
    (void)b;
    return Bracket::from_parts(lo.v, hi.v, bits);
}

}  // namespace

Bracket Bracket::from_parts(const void* lo, const void* hi, unsigned bits) {
    Bracket r(bits);
    mpfr_set(L(r.lo_), C(lo), MPFR_RNDD);
    mpfr_set(L(r.hi_), C(hi), MPFR_RNDU);
    return r;
}

Bracket operator*(const Bracket& a, const Bracket& b) {
    return corners(a, b, std::max(a.bits_, b.bits_), a.lo_, a.hi_, b.lo_, b.hi_,
                   [](mpfr_ptr t, mpfr_srcptr x, mpfr_srcptr y, mpfr_rnd_t rnd) { mpfr_mul(t, x, y, rnd); });
}

Bracket operator/(const Bracket& a, const Bracket& b) {
    if (mpfr_sgn(C(b.lo_)) <= 0 && mpfr_sgn(C(b.hi_)) >= 0) throw PrecisionError("divisor enclosure contains zero");
    return corners(a, b, std::max(a.bits_, b.bits_), a.lo_, a.hi_, b.lo_, b.hi_,
                   [](mpfr_ptr t, mpfr_srcptr x, mpfr_srcptr y, mpfr_rnd_t rnd) { mpfr_div(t, x, y, rnd); });
}

Bracket pow(const Bracket& a, const Bracket& e) {
    if (mpfr_sgn(C(a.lo_)) < 0 || mpfr_sgn(C(e.lo_)) < 0) throw std::domain_error("Bracket pow needs a, e >= 0");
    // Monotone in each argument on the quadrant, so the corners bound it.
    return corners(a, e, std::max(a.bits_, e.bits_), a.lo_, a.hi_, e.lo_, e.hi_,
                   [](mpfr_ptr t, mpfr_srcptr x, mpfr_srcptr y, mpfr_rnd_t rnd) { mpfr_pow(t, x, y, rnd); });
}

Bracket exp(const Bracket& a) {
    Bracket r(a.bits_);
    mpfr_exp(L(r.lo_), C(a.lo_), MPFR_RNDD);
    mpfr_exp(L(r.hi_), C(a.hi_), MPFR_RNDU);
    return r;
}

Bracket max(const Bracket& a, const Bracket& b) {
    Bracket r(std::max(a.bits_, b.bits_));
    mpfr_max(L(r.lo_), C(a.lo_), C(b.lo_), MPFR_RNDD);
    mpfr_max(L(r.hi_), C(a.hi_), C(b.hi_), MPFR_RNDU);
    return r;
}

Rational Bracket::lower() const { return to_q(C(lo_)); }
Rational Bracket::upper() const { return to_q(C(hi_)); }

Integer Bracket::least_integer_above() const {
    if (!mpfr_number_p(C(lo_)) || !mpfr_number_p(C(hi_))) throw PrecisionError("enclosure is not finite");
    Integer a, b;
    mpfr_get_z(a.get_mpz_t(), C(lo_), MPFR_RNDD);
    mpfr_get_z(b.get_mpz_t(), C(hi_), MPFR_RNDD);
    if (a != b) throw PrecisionError("enclosure straddles an integer");
    return a + 1;
}

long Bracket::magnitude_bits() const {
    if (mpfr_zero_p(C(hi_))) return 0;
    return std::max<long>(0, mpfr_get_exp(C(hi_)));
}

}  // namespace normality
