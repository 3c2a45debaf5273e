#include "normality/digit_orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace normality {
namespace {

char digit_char(std::uint32_t d) {
    if (d < 10) return static_cast<char>('0' + d);
    if (d < 36) return static_cast<char>('A' + d - 10);
    return static_cast<char>('a' + d - 36);
}

std::uint32_t char_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
    return c - 'a' + 36;
}

}  // namespace

DigitStream::DigitStream(std::uint64_t base, std::vector<std::uint32_t> digits)
    : base_(base), digits_(std::move(digits)) {
    if (base < 2) throw std::domain_error("DigitStream: base must be >= 2");
    for (auto d : digits_)
        if (d >= base) throw std::domain_error("DigitStream: digit out of range");
    end_ = digits_.size();
    while (end_ > 0 && digits_[end_ - 1] == 0) --end_;
    window_ = 0;
    unsigned __int128 p = 1;
    while (p * base <= (static_cast<unsigned __int128>(1) << 63)) {
        p *= base;
        ++window_;
    }
    scale_ = static_cast<long double>(static_cast<std::uint64_t>(p));
    err_ = 1.0L / scale_ + std::ldexp(1.0L, -60);
    ranks_once_ = std::make_shared<std::once_flag>();
    ranks_ = std::make_shared<std::vector<std::uint32_t>>();
}

Integer DigitStream::suffix_integer(std::size_t j) const {
    if (j >= end_) return 0;
    Integer out;
    if (base_ <= 62) {
        std::string s;
        s.reserve(end_ - j);
        for (std::size_t i = j; i < end_; ++i) s.push_back(digit_char(digits_[i]));
        mpz_set_str(out.get_mpz_t(), s.c_str(), static_cast<int>(base_));
    } else {
        for (std::size_t i = j; i < end_; ++i) {
            out *= static_cast<unsigned long>(base_);
            out += digits_[i];
        }
    }
    return out;
}

Rational DigitStream::point(std::size_t j) const {
    if (j >= end_) return 0;
    Rational q(suffix_integer(j), ipow(base_, end_ - j));
    q.canonicalize();
    return q;
}

long double DigitStream::approx(std::size_t j) const {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < window_; ++i) {
        std::size_t k = j + i;
        v = v * base_ + (k < end_ ? digits_[k] : 0);
    }
    return static_cast<long double>(v) / scale_;
}

int DigitStream::compare_point(std::size_t j, const Rational& q) const {
    Integer lhs = suffix_integer(j) * q.get_den();
    Integer rhs = q.get_num() * ipow(base_, j < end_ ? end_ - j : 0);
    return cmp(lhs, rhs);
}

const std::vector<std::uint32_t>& DigitStream::ranks() const {
    std::call_once(*ranks_once_, [this] {
        // Prefix doubling over positions 0..M, where M is a virtual all-zero
        // suffix; comparing with zero padding makes equal values rank equally.
        const std::size_t M = digits_.size();
        const std::size_t n = M + 1;
        std::vector<std::uint32_t> rank(n), tmp(n);
        for (std::size_t i = 0; i < M; ++i) rank[i] = digits_[i];
        rank[M] = 0;
        std::vector<std::uint32_t> idx(n);
        for (std::size_t k = 1;; k *= 2) {
            auto second = [&](std::size_t i) { return rank[std::min(i + k, M)]; };
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
                if (rank[a] != rank[b]) return rank[a] < rank[b];
                return second(a) < second(b);
            });
            tmp[idx[0]] = 0;
            for (std::size_t t = 1; t < n; ++t) {
                std::uint32_t a = idx[t - 1], b = idx[t];
                bool same = rank[a] == rank[b] && second(a) == second(b);
                tmp[b] = tmp[a] + (same ? 0 : 1);
            }
            rank.swap(tmp);
            if (k >= n) break;
        }
        rank.pop_back();
        *ranks_ = std::move(rank);
    });
    return *ranks_;
}

Rational DigitStream::star(std::size_t N) const {
    if (N == 0 || N > digits_.size()) throw std::domain_error("DigitStream::star: bad N");
    const auto& rk = ranks();
    std::vector<std::uint32_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return rk[a] < rk[b]; });

    struct Cand {
        long double approx;
        std::size_t rep;
        std::size_t count;
        bool above;  // true: count/N - x, false: x - count/N
    };
    std::vector<Cand> cands;
    long double best = -1;
    std::size_t i = 0;
    const long double invN = 1.0L / static_cast<long double>(N);
    while (i < N) {
        std::size_t j = i;
        while (j < N && rk[order[j]] == rk[order[i]]) ++j;
        long double x = approx(order[i]);
        Cand a{x - i * invN, order[i], i, false};
        Cand b{j * invN - x, order[i], j, true};
        best = std::max({best, a.approx, b.approx});
        cands.push_back(a);
        cands.push_back(b);
        i = j;
    }
    const long double slack = 4 * err_ + 16 * std::ldexp(1.0L, -62);
    Rational exact = 0;
    for (const auto& c : cands) {
        if (c.approx < best - slack) continue;
        Rational x = point(c.rep);
        Rational v = c.above ? ratio(c.count, N) - x : x - ratio(c.count, N);
        if (v > exact) exact = v;
    }
    return exact;
}

Rational DigitStream::extreme(std::size_t N) const {
    if (N == 0 || N > digits_.size()) throw std::domain_error("DigitStream::extreme: bad N");
    // Scale every quantity by N * B with B = b^end: x_j -> Y_j, 1/N -> B.
    const Integer B = ipow(base_, end_);
    const Integer X = suffix_integer(0);
    std::vector<Integer> Y(N);
    for (std::size_t j = 0; j < N; ++j) {
        if (j >= end_) {
            Y[j] = 0;
            continue;
        }
        Integer m = ipow(base_, end_ - j);
        mpz_tdiv_r(Y[j].get_mpz_t(), X.get_mpz_t(), m.get_mpz_t());
        Y[j] *= ipow(base_, j);
    }
    std::sort(Y.begin(), Y.end());
    const Integer n(std::to_string(N));

    Integer best = 0;
    Integer prefix = n * Y[0];
    for (std::size_t j = 1; j <= N; ++j) {
        Integer ci = n * Y[j - 1] - Integer(std::to_string(j - 1)) * B;
        if (ci > prefix) prefix = ci;
        Integer v = Integer(std::to_string(j)) * B - n * Y[j - 1] + prefix;
        if (v > best) best = v;
    }
    auto at = [&](std::size_t k) -> Integer {
        if (k == 0) return 0;
        if (k == N + 1) return B;
        return Y[k - 1];
    };
    Integer gprefix = 0;
    for (std::size_t j = 1; j <= N + 1; ++j) {
        Integer v = n * at(j) - Integer(std::to_string(j - 1)) * B + gprefix;
        if (v > best) best = v;
        Integer ci = Integer(std::to_string(j)) * B - n * at(j);
        if (ci > gprefix) gprefix = ci;
    }
    Rational out(best, n * B);
    out.canonicalize();
    if (out > 1) out = 1;
    return out;
}

Rational DigitStream::simple(std::size_t N) const {
    if (N == 0 || N > digits_.size()) throw std::domain_error("DigitStream::simple: bad N");
    std::vector<std::uint64_t> counts(base_, 0);
    for (std::size_t j = 0; j < N; ++j) counts[digits_[j]]++;
    Rational best = 0;
    const Rational cell(Integer(1), Integer(std::to_string(base_)));
    for (auto c : counts) {
        Rational d = ratio(c, N) - cell;
        if (d < 0) d = -d;
        if (d > best) best = d;
    }
    return best;
}

Rational DigitStream::block(std::size_t N, std::size_t ell) const {
    DigitBlock w(base_, std::vector<std::uint32_t>(digits_.begin(), digits_.begin() + N));
    return block_discrepancy(w, ell);
}

std::uint64_t DigitStream::cell_of(std::size_t j, std::uint64_t n) const {
    if (j >= end_) return 0;
    const long double nn = static_cast<long double>(n);
    long double y = approx(j) * nn;
    long double c = std::floor(y);
    long double hi = y + nn * err_ + std::ldexp(1.0L, -50);
    if (std::floor(hi) == c && y - c > std::ldexp(1.0L, -50)) return static_cast<std::uint64_t>(c);
    Integer q = suffix_integer(j) * static_cast<unsigned long>(n);
    Integer out;
    Integer den = ipow(base_, end_ - j);
    mpz_fdiv_q(out.get_mpz_t(), q.get_mpz_t(), den.get_mpz_t());
    return out.get_ui();
}

Rational DigitStream::cells(std::size_t lo, std::size_t hi, std::uint64_t n) const {
    if (hi <= lo) throw std::domain_error("DigitStream::cells: empty window");
    std::vector<std::uint64_t> counts(n, 0);
    for (std::size_t j = lo; j < hi; ++j) counts[cell_of(j, n)]++;
    const std::size_t N = hi - lo;
    const Rational cell(1, n);
    Rational best = 0;
    for (auto c : counts) {
        Rational d = ratio(c, N) - cell;
        if (d < 0) d = -d;
        if (d > best) best = d;
    }
    return best;
}

std::size_t DigitStream::count_in(std::size_t lo, std::size_t hi, const Interval& I) const {
    const long double u = I.lower.get_d(), v = I.upper.get_d();
    const long double tol = err_ + std::ldexp(1.0L, -45);
    std::size_t c = 0;
    for (std::size_t j = lo; j < hi; ++j) {
        long double x = approx(j);
        bool ge_u, lt_v;
        if (x > u + tol) ge_u = true;
        else if (x + tol < u) ge_u = false;
        else ge_u = compare_point(j, I.lower) >= 0;
        if (x + tol < v) lt_v = true;
        else if (x > v + tol) lt_v = false;
        else lt_v = compare_point(j, I.upper) < 0;
        if (ge_u && lt_v) ++c;
    }
    return c;
}

std::vector<std::uint32_t> digits_of(const Rational& x, std::uint64_t base, std::size_t n) {
    if (x < 0 || x >= 1) throw std::domain_error("digits_of: x outside [0,1)");
    Integer scaled = x.get_num() * ipow(base, n);
    Integer v;
    mpz_fdiv_q(v.get_mpz_t(), scaled.get_mpz_t(), x.get_den_mpz_t());
    std::vector<std::uint32_t> out(n, 0);
    if (base <= 62) {
        std::string s = v.get_str(static_cast<int>(base));
        if (v == 0) s.clear();
        std::size_t off = n - s.size();
        for (std::size_t i = 0; i < s.size(); ++i) out[off + i] = char_digit(s[i]);
    } else {
        for (std::size_t i = n; i-- > 0;) {
            Integer r;
            mpz_fdiv_qr_ui(v.get_mpz_t(), r.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(base));
            out[i] = static_cast<std::uint32_t>(r.get_ui());
        }
    }
    return out;
}

}  // namespace normality
