#ifndef MORANFRAC_CODING_HPP
#define MORANFRAC_CODING_HPP

#include <functional>
#include <vector>

#include "moranfrac/rng.hpp"
#include "moranfrac/scales.hpp"
#include "moranfrac/spectrum.hpp"

namespace moranfrac {

/// A finite symbolic prefix; digit at position h-1 belongs to the digit set
/// of level h of the sequence that produced it.
struct Word {
    std::vector<Digit> digits;
};

/// Normal form of a delta-approximate square: the first l column indices and
/// the first k row indices.  For h <= min(k,l) the full digit (i_h, j_h) is
/// pinned; beyond that only the stated axis is constrained, so equality of
/// addresses is exactly the U(delta, w) equivalence.
struct ApproxSquareAddress {
    std::size_t k = 0;
    std::size_t l = 0;
    std::vector<int> i_part;  // length l
    std::vector<int> j_part;  // length k
    friend bool operator==(const ApproxSquareAddress&, const ApproxSquareAddress&) = default;
    friend auto operator<=>(const ApproxSquareAddress&, const ApproxSquareAddress&) = default;
};

/// Axis-aligned rectangle with exact rational corner and sides.
struct Rect {
    BigRat x0, y0, width, height;
};

inline ApproxSquareAddress address(const CumulativeScales& sc, const Word& w, std::size_t k) {
    const std::size_t l = l_of_k(sc, k);
    if (w.digits.size() < std::max(k, l))
        throw DomainError("word too short: need " + std::to_string(std::max(k, l)) + " digits");
    ApproxSquareAddress a;
    a.k = k;
    a.l = l;
    a.i_part.reserve(l);
    a.j_part.reserve(k);
    for (std::size_t h = 0; h < l; ++h) a.i_part.push_back(w.digits[h].i);
    for (std::size_t h = 0; h < k; ++h) a.j_part.push_back(w.digits[h].j);
    return a;
}

inline Rect rectangle(const ApproxSquareAddress& a, const CumulativeScales& sc) {
    Rect r;
    r.x0 = 0;
    r.y0 = 0;
    for (std::size_t h = 0; h < a.l; ++h)
        r.x0 += BigRat(a.i_part[h], sc.n_products[h]);
    for (std::size_t h = 0; h < a.k; ++h)
        r.y0 += BigRat(a.j_part[h], sc.m_products[h]);
    r.width = BigRat(1, sc.n_products[a.l - 1]);
    r.height = BigRat(1, sc.m_products[a.k - 1]);
    return r;
}

namespace detail {

/// Per-pattern lookup tables for the base measure.
struct PatternLogs {
    std::vector<double> log_p;        // per digit
    std::vector<double> cum_p;        // cumulative probs, for sampling
    std::map<int, double> log_q;      // per occupied row
    std::map<int, double> log_qhat;   // per occupied column
    std::vector<int> rows, cols;      // occupied, ascending
};

inline std::vector<PatternLogs> build_logs(const PatternSystem& sys) {
    std::vector<PatternLogs> out(sys.size());
    for (std::size_t g = 0; g < sys.size(); ++g) {
        const Pattern& p = sys.patterns[g];
        PatternLogs& pl = out[g];
        pl.log_p.resize(p.digits.size());
        pl.cum_p.resize(p.digits.size());
        double cum = 0.0;
        for (std::size_t idx = 0; idx < p.digits.size(); ++idx) {
            pl.log_p[idx] = std::log(p.probs[idx]);
            cum += p.probs[idx];
            pl.cum_p[idx] = cum;
        }
        for (const auto& [j, q] : p.row_masses()) {
            pl.log_q[j] = std::log(q);
            pl.rows.push_back(j);
        }
        for (const auto& [i, q] : p.col_masses()) {
            pl.log_qhat[i] = std::log(q);
            pl.cols.push_back(i);
        }
    }
    return out;
}

inline int digit_index_or_throw(const Pattern& p, Digit d) {
    const int idx = p.find(d);
    if (idx < 0)
        throw DomainError("address/sequence mismatch: digit (" + std::to_string(d.i) + "," +
                          std::to_string(d.j) + ") not in pattern '" + p.name + "'");
    return idx;
}

}  // namespace detail

/// log mu(S) for the base measure: full digit factors up to min(k,l), then
/// row marginals q (l <= k) or column marginals qhat (l > k).
inline double mu_square(const PatternSequence& seq, const CumulativeScales& sc,
                        const ApproxSquareAddress& a) {
    double acc = 0.0;
    const std::size_t lo = std::min(a.k, a.l);
    for (std::size_t h = 0; h < lo; ++h) {
        const Pattern& p = seq.system().patterns[sc.levels[h]];
        const int idx = detail::digit_index_or_throw(p, {a.i_part[h], a.j_part[h]});
        acc += std::log(p.probs[idx]);
    }
    if (a.l <= a.k) {
        for (std::size_t h = lo; h < a.k; ++h) {
            const Pattern& p = seq.system().patterns[sc.levels[h]];
            const auto q = p.row_masses();
            const auto it = q.find(a.j_part[h]);
            if (it == q.end()) throw DomainError("address/sequence mismatch: empty row");
            acc += std::log(it->second);
        }
    } else {
        for (std::size_t h = lo; h < a.l; ++h) {
            const Pattern& p = seq.system().patterns[sc.levels[h]];
            const auto q = p.col_masses();
            const auto it = q.find(a.i_part[h]);
            if (it == q.end()) throw DomainError("address/sequence mismatch: empty column");
            acc += std::log(it->second);
        }
    }
    return acc;
}

/// log mu_t(S): the same two-branch product with (P, Q, Qhat).
inline double mu_t_square(const PatternSequence& seq, const CumulativeScales& sc,
                          const ApproxSquareAddress& a, const TiltParams& tp) {
    if (tp.per_pattern.size() != seq.system().size())
        throw DomainError("tilt parameters built for a different system");
    double acc = 0.0;
    const std::size_t lo = std::min(a.k, a.l);
    for (std::size_t h = 0; h < lo; ++h) {
        const Pattern& p = seq.system().patterns[sc.levels[h]];
        const int idx = detail::digit_index_or_throw(p, {a.i_part[h], a.j_part[h]});
        acc += tp.per_pattern[sc.levels[h]].log_P[idx];
    }
    if (a.l <= a.k) {
        for (std::size_t h = lo; h < a.k; ++h) {
            const auto& lq = tp.per_pattern[sc.levels[h]].log_Q;
            const auto it = lq.find(a.j_part[h]);
            if (it == lq.end()) throw DomainError("address/sequence mismatch: empty row");
            acc += it->second;
        }
    } else {
        for (std::size_t h = lo; h < a.l; ++h) {
            const auto& lq = tp.per_pattern[sc.levels[h]].log_Qhat;
            const auto it = lq.find(a.i_part[h]);
            if (it == lq.end()) throw DomainError("address/sequence mismatch: empty column");
            acc += it->second;
        }
    }
    return acc;
}

constexpr std::uint64_t kDefaultEnumCap = 10'000'000;

/// Number of distinct depth-k approximate squares:
///   prod_{h<=min(k,l)} r_h  *  prod over the single-axis tail of the
///   occupied row (or column) counts.
inline BigInt count_squares(const PatternSequence& seq, const CumulativeScales& sc,
                            std::size_t k) {
    const std::size_t l = l_of_k(sc, k);
    const std::size_t lo = std::min(k, l), hi = std::max(k, l);
    BigInt count = 1;
    for (std::size_t h = 0; h < lo; ++h)
        count *= static_cast<int>(seq.system().patterns[sc.levels[h]].digit_count());
    for (std::size_t h = lo; h < hi; ++h) {
        const Pattern& p = seq.system().patterns[sc.levels[h]];
        count *= static_cast<int>(l <= k ? p.row_counts().size() : p.col_counts().size());
    }
    return count;
}

/// Visits every distinct depth-k address exactly once, in lexicographic
/// order of the per-level choices.  The first-level choice shards the
/// stream, so consumers may partition by prefix.
inline void enumerate_squares(const PatternSequence& seq, const CumulativeScales& sc,
                              std::size_t k,
                              const std::function<void(const ApproxSquareAddress&)>& visit,
                              std::uint64_t cap = kDefaultEnumCap) {
    const BigInt total = count_squares(seq, sc, k);
    if (total > cap)
        throw SizeError("enumeration of " + total.str() + " approximate squares exceeds cap " +
                        std::to_string(cap));

    const std::size_t l = l_of_k(sc, k);
    const std::size_t lo = std::min(k, l), hi = std::max(k, l);
    const auto logs = detail::build_logs(seq.system());

    ApproxSquareAddress a;
    a.k = k;
    a.l = l;
    a.i_part.assign(l, 0);
    a.j_part.assign(k, 0);

    std::vector<std::size_t> choice(hi, 0);
    std::vector<std::size_t> radix(hi, 0);
    for (std::size_t h = 0; h < hi; ++h) {
        const Pattern& p = seq.system().patterns[sc.levels[h]];
        const detail::PatternLogs& pl = logs[sc.levels[h]];
        radix[h] = h < lo ? p.digit_count() : (l <= k ? pl.rows.size() : pl.cols.size());
    }

    auto apply = [&](std::size_t h) {
        const Pattern& p = seq.system().patterns[sc.levels[h]];
        const detail::PatternLogs& pl = logs[sc.levels[h]];
        if (h < lo) {
            const Digit d = p.digits[choice[h]];
            if (h < l) a.i_part[h] = d.i;
            if (h < k) a.j_part[h] = d.j;
        } else if (l <= k) {
            a.j_part[h] = pl.rows[choice[h]];
        } else {
            a.i_part[h] = pl.cols[choice[h]];
        }
    };

    for (std::size_t h = 0; h < hi; ++h) apply(h);
    while (true) {
        visit(a);
        std::size_t h = hi;
        while (h > 0) {
            --h;
            if (++choice[h] < radix[h]) {
                apply(h);
                break;
            }
            choice[h] = 0;
            apply(h);
            if (h == 0) return;
        }
        if (hi == 0) return;
    }
}

inline std::vector<ApproxSquareAddress> enumerate_squares_vec(const PatternSequence& seq,
                                                              const CumulativeScales& sc,
                                                              std::size_t k,
                                                              std::uint64_t cap = kDefaultEnumCap) {
    std::vector<ApproxSquareAddress> out;
    enumerate_squares(seq, sc, k, [&](const ApproxSquareAddress& a) { out.push_back(a); }, cap);
    return out;
}

enum class SampleWeights { base, tilted };

/// Draws one word with independent per-level digits from p (base) or P
/// (tilted).  Fully determined by (seed, stream, level), so equal inputs
/// give equal words and streams are independent samples.
inline Word sample_word(const PatternSequence& seq, const std::vector<int>& levels,
                        SampleWeights weights, std::size_t depth, std::uint64_t seed,
                        std::uint64_t stream = 0, const TiltParams* tp = nullptr) {
    if (depth < 1) throw DomainError("sample_word requires depth >= 1");
    if (weights == SampleWeights::tilted && tp == nullptr)
        throw DomainError("tilted sampling requires tilt parameters");
    const auto logs = detail::build_logs(seq.system());
    Word w;
    w.digits.reserve(depth);
    for (std::size_t h = 1; h <= depth; ++h) {
        const int g = levels[h - 1];
        const Pattern& p = seq.system().patterns[g];
        const double u = rng::unit(seed, stream, h);
        const double* cum = weights == SampleWeights::base ? logs[g].cum_p.data()
                                                           : tp->per_pattern[g].cum_P.data();
        w.digits.push_back(p.digits[rng::pick_index(cum, p.digit_count(), u)]);
    }
    return w;
}

inline Word sample_word(const PatternSequence& seq, SampleWeights weights, std::size_t depth,
                        std::uint64_t seed, std::uint64_t stream = 0,
                        const TiltParams* tp = nullptr) {
    return sample_word(seq, seq.prefix(depth), weights, depth, seed, stream, tp);
}

/// I_k = (1/k) sum_{h<=k} log u_h(j_h) and D_k = I_{l(k)} - I_k, the
/// u-weight averages entering the replica condition.
inline std::pair<double, double> profile_ID(const PatternSequence& seq,
                                            const CumulativeScales& sc, const Word& w,
                                            std::size_t k, double t) {
    const std::size_t l = l_of_k(sc, k);
    const std::size_t hi = std::max(k, l);
    if (w.digits.size() < hi)
        throw DomainError("word too short: need " + std::to_string(hi) + " digits");

    std::vector<std::map<int, double>> row_log_u(seq.system().size());
    std::vector<bool> have(seq.system().size(), false);
    auto log_u = [&](std::size_t h) {
        const int g = sc.levels[h - 1];
        if (!have[g]) {
            row_log_u[g] = row_marginals(seq.system().patterns[g], t).log_u;
            have[g] = true;
        }
        return row_log_u[g].at(w.digits[h - 1].j);
    };

    double acc = 0.0;
    double I_l = 0.0, I_k = 0.0;
    for (std::size_t h = 1; h <= hi; ++h) {
        acc += log_u(h);
        if (h == l) I_l = acc / static_cast<double>(l);
        if (h == k) I_k = acc / static_cast<double>(k);
    }
    return {I_k, I_l - I_k};
}

}  // namespace moranfrac

#endif
