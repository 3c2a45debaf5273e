#include "normality/discrepancy.hpp"

#include <algorithm>

namespace normality {

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

static void require_nonempty(const UnitSequence& seq, const char* what) {
    if (seq.empty()) throw std::domain_error(std::string(what) + ": empty sequence");
}

static Rational clamp01(Rational x) {
    if (x < 0) return 0;
    if (x > 1) return 1;
    return x;
}

Rational extreme_discrepancy(const UnitSequence& seq) {
    require_nonempty(seq, "extreme_discrepancy");
    UnitSequence x = seq;
    std::sort(x.begin(), x.end());
    const std::size_t N = x.size();
    const Rational invN(1, N);

    // Closed intervals [x_i, x_j]: (j-i+1)/N - (x_j - x_i), maximised with a
    // running prefix maximum of x_i - (i-1)/N.
    Rational best = 0;
    Rational prefix = x[0];  // i = 1
    for (std::size_t j = 1; j <= N; ++j) {
        Rational cand_i = x[j - 1] - Rational(j - 1) * invN;
        if (cand_i > prefix) prefix = cand_i;
        Rational v = Rational(j) * invN - x[j - 1] + prefix;
        if (v > best) best = v;
    }

    // Open gaps (x_i, x_j) with sentinels x_0 = 0 (inclusive) and x_{N+1} = 1:
    // (x_j - x_i) - (j-i-1)/N.
    auto at = [&](std::size_t k) -> Rational {
        if (k == 0) return 0;
        if (k == N + 1) return 1;
        return x[k - 1];
    };
    Rational gprefix = 0;  // i = 0: 0/N - x_0
    for (std::size_t j = 1; j <= N + 1; ++j) {
        Rational v = at(j) - Rational(j - 1) * invN + gprefix;
        if (v > best) best = v;
        Rational cand_i = Rational(j) * invN - at(j);
        if (cand_i > gprefix) gprefix = cand_i;
    }
    return clamp01(best);
}

Rational extreme_discrepancy_bruteforce(const UnitSequence& seq) {
    require_nonempty(seq, "extreme_discrepancy_bruteforce");
    UnitSequence x = seq;
    std::sort(x.begin(), x.end());
    const std::size_t N = x.size();
    UnitSequence ends = x;
    ends.push_back(0);
    ends.push_back(1);
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());

    auto count_lt = [&](const Rational& v) {
        return static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), v) - x.begin());
    };
    auto count_le = [&](const Rational& v) {
        return static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), v) - x.begin());
    };

    Rational best = 0;
    for (std::size_t a = 0; a < ends.size(); ++a) {
        const Rational& u = ends[a];
        for (std::size_t b = a; b < ends.size(); ++b) {
            const Rational& v = ends[b];
            Rational len = v - u;
            // left: start at u (inclusive) or just after u; right: stop before v
            // or just after v.
            for (int left = 0; left < 2; ++left) {
                if (left == 1 && u == 1) continue;
                std::size_t below = left == 0 ? count_lt(u) : count_le(u);
                for (int right = 0; right < 2; ++right) {
                    if (right == 0 && left == 0 && a == b) continue;  // empty [u,u)
                    if (right == 0 && left == 1 && a == b) continue;
                    std::size_t upto = right == 0 ? count_lt(v) : count_le(v);
                    if (upto < below) continue;
                    Rational d = ratio(upto - below, N) - len;
                    if (d < 0) d = -d;
                    if (d > best) best = d;
                }
            }
        }
    }
    return clamp01(best);
}

Rational star_discrepancy(const UnitSequence& seq) {
    require_nonempty(seq, "star_discrepancy");
    UnitSequence x = seq;
    std::sort(x.begin(), x.end());
    const std::size_t N = x.size();
    Rational best = 0;
    std::size_t i = 0;
    while (i < N) {
        std::size_t j = i;
        while (j < N && x[j] == x[i]) ++j;
        // v = x: count of points below x is i; v just above x: count is j.
        Rational a = x[i] - ratio(i, N);
        Rational b = ratio(j, N) - x[i];
        if (a > best) best = a;
        if (b > best) best = b;
        i = j;
    }
    return clamp01(best);
}

Rational family_discrepancy(const IntervalFamily& F, const UnitSequence& seq) {
    require_nonempty(seq, "family_discrepancy");
    if (F.empty()) throw std::domain_error("family_discrepancy: empty family");
    const std::size_t N = seq.size();
    Rational best = 0;
    for (const auto& I : F) {
        std::size_t c = 0;
        for (const auto& x : seq)
            if (I.contains(x)) ++c;
        Rational d = ratio(c, N) - I.length();
        if (d < 0) d = -d;
        if (d > best) best = d;
    }
    return best;
}

IntervalFamily equipartition(std::uint64_t n) {
    if (n == 0) throw std::domain_error("equipartition: n must be positive");
    IntervalFamily F;
    F.reserve(n);
    for (std::uint64_t a = 0; a < n; ++a) F.emplace_back(ratio(a, n), ratio(a + 1, n));
    return F;
}

std::uint64_t partition_cells(const Rational& eps) {
    if (eps <= 0) throw std::domain_error("epsilon must be positive");
    return ceil_q(Rational(3) / eps).get_ui();
}

PartitionBound partition_bound(const Rational& eps, const UnitSequence& seq) {
    if (!(eps > 0 && eps < 1)) throw std::domain_error("partition_bound: need 0 < eps < 1");
    require_nonempty(seq, "partition_bound");
    const std::uint64_t n = partition_cells(eps);
    // Equal cells: bucket counts directly instead of scanning the family.
    std::vector<std::uint64_t> counts(n, 0);
    for (const auto& x : seq) {
        Integer c = floor_q(x * Rational(n));
        counts[c.get_ui()]++;
    }
    Rational best = 0;
    const Rational cell(1, n);
    for (auto c : counts) {
        Rational d = ratio(c, seq.size()) - cell;
        if (d < 0) d = -d;
        if (d > best) best = d;
    }
    Rational third = eps / 3;
    PartitionBound out{best, std::nullopt};
    if (best < third * third) out.implied_bound = eps;
    return out;
}

BlockStats block_stats(const DigitBlock& w, std::size_t ell) {
    if (ell == 0) throw std::domain_error("block length must be positive");
    if (ell > w.size()) throw std::domain_error("block length exceeds word length");
    BlockStats st;
    st.block_length = ell;
    for (std::size_t i = 0; i + ell <= w.size(); ++i) {
        std::vector<std::uint32_t> u(w.digits.begin() + i, w.digits.begin() + i + ell);
        st.counts[u]++;
    }
    return st;
}

Rational block_discrepancy(const DigitBlock& w, std::size_t ell) {
    BlockStats st = block_stats(w, ell);
    const Integer total = ipow(w.base, ell);
    const Rational expect(Integer(1), total);
    const std::size_t N = w.size();
    Rational best = 0;
    for (const auto& [u, c] : st.counts) {
        Rational d = ratio(c, N) - expect;
        if (d < 0) d = -d;
        if (d > best) best = d;
    }
    if (Integer(st.counts.size()) < total && expect > best) best = expect;
    return best;
}

Rational simple_discrepancy(const UnitSequence& seq, Base r) {
    require_nonempty(seq, "simple_discrepancy");
    std::vector<std::uint64_t> counts(r.value, 0);
    for (const auto& x : seq) counts[floor_q(x * Rational(Integer(std::to_string(r.value)))).get_ui()]++;
    Rational best = 0;
    const Rational cell(Integer(1), Integer(std::to_string(r.value)));
    for (auto c : counts) {
        Rational d = ratio(c, seq.size()) - cell;
        if (d < 0) d = -d;
        if (d > best) best = d;
    }
    return best;
}

bool perturbation_bound(const Rational& eps, std::uint64_t N, std::uint64_t n) {
    if (N == 0) throw std::domain_error("perturbation_bound: N must be positive");
    return Rational(Integer(std::to_string(n))) < eps * Rational(Integer(std::to_string(N)));
}

std::optional<Rational> chain_bound(const Rational& eps, const std::vector<std::uint64_t>& breakpoints,
                                    const std::vector<Rational>& block_discrepancies) {
    if (breakpoints.size() < 2 || block_discrepancies.size() != breakpoints.size() - 1)
        throw std::domain_error("chain_bound: need one block discrepancy per consecutive pair");
    for (std::size_t m = 0; m + 1 < breakpoints.size(); ++m) {
        if (breakpoints[m + 1] <= breakpoints[m])
            throw std::domain_error("chain_bound: breakpoints must be strictly increasing");
        Rational gap(Integer(std::to_string(breakpoints[m + 1] - breakpoints[m])));
        if (gap > eps * Rational(Integer(std::to_string(breakpoints[m])))) return std::nullopt;
        if (!(block_discrepancies[m] < eps)) return std::nullopt;
    }
    return 2 * eps;
}

std::optional<Rational> avoidance_bound(const Interval& I, const UnitSequence& seq, std::uint64_t m) {
    if (m == 0) throw std::domain_error("avoidance_bound: m must be positive");
    const Rational mu = I.length();
    const Integer need = ceil_q(Rational(2 * m) / mu);
    if (Integer(std::to_string(seq.size())) < need) return std::nullopt;
    for (std::size_t j = m; j <= seq.size(); ++j)
        if (I.contains(seq[j - 1])) return std::nullopt;
    return mu / 2;
}

}  // namespace normality
