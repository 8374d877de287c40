#ifndef MORANFRAC_EMPIRICS_HPP
#define MORANFRAC_EMPIRICS_HPP

#include <cstdint>
#include <vector>

#include "moranfrac/coding.hpp"

namespace moranfrac {

/// Monte Carlo summary for the local-dimension ratio
/// log mu(S_k(w)) / (-log m_1...m_k) under words drawn from the tilted
/// product measure.
struct McStats {
    double t = 0.0;
    std::size_t k = 0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double target_alpha = 0.0;
    double relative_deviation = 0.0;
    std::vector<double> ratios;  // per-sample, in stream order
};

inline McStats mc_local_dimension(const PatternSequence& seq, double t, std::size_t k,
                                  std::size_t n_samples, std::uint64_t seed) {
    if (k < 1 || n_samples < 1) throw DomainError("mc_local_dimension requires k >= 1, N >= 1");
    const CumulativeScales sc = scales(seq, k);
    const std::size_t l = l_of_k(sc, k);
    const std::size_t depth = std::max(k, l);
    const TiltParams tp = tilt(seq.system(), t);
    const auto logs = detail::build_logs(seq.system());

    McStats stats;
    stats.t = t;
    stats.k = k;
    stats.n_samples = n_samples;
    stats.seed = seed;
    stats.target_alpha = alpha_of(tp);
    stats.ratios.resize(n_samples);

    for (std::size_t s = 0; s < n_samples; ++s) {
        double log_mu = 0.0;
        for (std::size_t h = 1; h <= depth; ++h) {
            const int g = sc.levels[h - 1];
            const Pattern& p = seq.system().patterns[g];
            const TiltParams::PerPattern& pp = tp.per_pattern[g];
            const double u = rng::unit(seed, s, h);
            const std::size_t idx = rng::pick_index(pp.cum_P.data(), p.digit_count(), u);
            if (l <= k) {
                if (h <= l)
                    log_mu += logs[g].log_p[idx];
                else if (h <= k)
                    log_mu += logs[g].log_q.at(p.digits[idx].j);
            } else {
                if (h <= k)
                    log_mu += logs[g].log_p[idx];
                else
                    log_mu += logs[g].log_qhat.at(p.digits[idx].i);
            }
        }
        stats.ratios[s] = log_mu / (-sc.log_m_sums[k - 1]);
    }

    stats.mean = pairwise_sum(stats.ratios) / static_cast<double>(n_samples);
    if (n_samples > 1) {
        std::vector<double> sq(n_samples);
        for (std::size_t s = 0; s < n_samples; ++s) {
            const double d = stats.ratios[s] - stats.mean;
            sq[s] = d * d;
        }
        stats.stddev = std::sqrt(pairwise_sum(sq) / static_cast<double>(n_samples - 1));
    }
    stats.relative_deviation = std::abs(stats.mean - stats.target_alpha) /
                               std::abs(stats.target_alpha);
    return stats;
}

/// Partition-of-unity residuals over the enumerated depth-k squares.
struct PartitionResiduals {
    std::size_t k = 0;
    double base_residual = 0.0;
    std::vector<std::pair<double, double>> tilted;  // (t, residual)
    double tilted_max_residual = 0.0;
};

inline PartitionResiduals partition_check(const PatternSequence& seq, std::size_t k,
                                          const std::vector<double>& t_grid = {-2.0, 0.0, 0.5,
                                                                               1.0, 2.0},
                                          std::uint64_t cap = kDefaultEnumCap) {
    const CumulativeScales sc = scales(seq, k);
    PartitionResiduals out;
    out.k = k;

    std::vector<double> mass;
    enumerate_squares(seq, sc, k,
                      [&](const ApproxSquareAddress& a) { mass.push_back(std::exp(mu_square(seq, sc, a))); },
                      cap);
    out.base_residual = std::abs(pairwise_sum(mass) - 1.0);

    for (double t : t_grid) {
        const TiltParams tp = tilt(seq.system(), t);
        std::size_t pos = 0;
        enumerate_squares(
            seq, sc, k,
            [&](const ApproxSquareAddress& a) { mass[pos++] = std::exp(mu_t_square(seq, sc, a, tp)); },
            cap);
        const double r = std::abs(pairwise_sum(mass) - 1.0);
        out.tilted.emplace_back(t, r);
        out.tilted_max_residual = std::max(out.tilted_max_residual, r);
    }
    return out;
}

/// Enumerated moment sum  sum_S mu(S)^t  against its per-level product form.
struct MomentCrosscheck {
    std::size_t k = 0;
    double t = 0.0;
    double enumerated = 0.0;
    double product_form = 0.0;
    double relative_gap = 0.0;
};

inline MomentCrosscheck moment_crosscheck(const PatternSequence& seq, std::size_t k, double t,
                                          std::uint64_t cap = kDefaultEnumCap) {
    const CumulativeScales sc = scales(seq, k);
    MomentCrosscheck out;
    out.k = k;
    out.t = t;

    std::vector<double> terms;
    enumerate_squares(
        seq, sc, k,
        [&](const ApproxSquareAddress& a) { terms.push_back(std::exp(t * mu_square(seq, sc, a))); },
        cap);
    out.enumerated = pairwise_sum(terms);

    const std::size_t l = l_of_k(sc, k);
    const std::size_t lo = std::min(k, l), hi = std::max(k, l);
    double log_prod = 0.0;
    for (std::size_t h = 0; h < hi; ++h) {
        const Pattern& p = seq.system().patterns[sc.levels[h]];
        std::vector<double> ts;
        if (h < lo) {
            for (double pr : p.probs) ts.push_back(t * std::log(pr));
        } else if (l <= k) {
            for (const auto& [j, q] : p.row_masses()) ts.push_back(t * std::log(q));
        } else {
            for (const auto& [i, q] : p.col_masses()) ts.push_back(t * std::log(q));
        }
        log_prod += log_sum_exp(ts);
    }
    out.product_form = std::exp(log_prod);
    out.relative_gap = std::abs(out.enumerated - out.product_form) /
                       std::max(std::abs(out.product_form), 1e-300);
    return out;
}

/// Coarse diagnostic: distribution of the per-square exponent
/// log mu(S) / (-log M_k).  Not the fine spectrum; box-counting style only.
struct Histogram {
    std::size_t k = 0;
    std::vector<double> edges;           // bins + 1 ascending edges
    std::vector<std::uint64_t> counts;   // per bin
    std::vector<double> log_count_over_log_scale;  // log(count)/log M_k, NaN for empty bins
    std::size_t modal_bin = 0;           // first maximal bin
    double modal_center() const { return 0.5 * (edges[modal_bin] + edges[modal_bin + 1]); }
};

inline Histogram coarse_histogram(const PatternSequence& seq, std::size_t k, std::size_t bins,
                                  std::uint64_t cap = kDefaultEnumCap) {
    if (bins < 1) throw DomainError("coarse_histogram requires bins >= 1");
    const CumulativeScales sc = scales(seq, k);
    std::vector<double> ratios;
    enumerate_squares(
        seq, sc, k,
        [&](const ApproxSquareAddress& a) {
            ratios.push_back(mu_square(seq, sc, a) / (-sc.log_m_sums[k - 1]));
        },
        cap);

    Histogram h;
    h.k = k;
    auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
    double lo = *mn, hi = *mx;
    const double pad = std::max(1e-9, 1e-9 * std::abs(hi));
    hi += pad;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double r : ratios) {
        auto b = static_cast<std::size_t>((r - lo) / (hi - lo) * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        ++h.counts[b];
    }
    h.log_count_over_log_scale.assign(bins, std::numeric_limits<double>::quiet_NaN());
    const double log_scale = sc.log_m_sums[k - 1];
    for (std::size_t b = 0; b < bins; ++b) {
        if (h.counts[b] > 0)
            h.log_count_over_log_scale[b] = std::log(static_cast<double>(h.counts[b])) / log_scale;
        if (h.counts[b] > h.counts[h.modal_bin]) h.modal_bin = b;
    }
    return h;
}

/// McMullen's closed form log_m sum_j r(j)^{log_n m} for a single-pattern
/// carpet; an independent check of beta(0).
inline double mcmullen_oracle(const Pattern& p) {
    const double z = std::log(static_cast<double>(p.m)) / std::log(static_cast<double>(p.n));
    std::vector<double> terms;
    for (const auto& [j, r] : p.row_counts())
        terms.push_back(z * std::log(static_cast<double>(r)));
    return log_sum_exp(terms) / std::log(static_cast<double>(p.m));
}

/// Informational trace of D_k(w) behavior under tilted sampling; no verdict
/// on the replica condition itself.
struct ReplicaDiagnostic {
    double t = 0.0;
    std::size_t depth = 0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    double min_D = 0.0;
    double max_D = 0.0;
    double fraction_tail_ge_minus_0_1 = 0.0;   // min_{k >= depth/2} D_k >= -0.1
    double fraction_tail_ge_minus_0_01 = 0.0;  // min_{k >= depth/2} D_k >= -0.01
};

inline ReplicaDiagnostic replica_diagnostic(const PatternSequence& seq, double t,
                                            std::size_t depth, std::size_t n_samples,
                                            std::uint64_t seed) {
    if (depth < 1 || n_samples < 1)
        throw DomainError("replica_diagnostic requires depth >= 1, N >= 1");
    const CumulativeScales sc = scales(seq, depth);
    const TiltParams tp = tilt(seq.system(), t);
    const std::size_t word_len = sc.extended_depth();

    std::vector<std::size_t> l_of(depth + 1);
    for (std::size_t k = 1; k <= depth; ++k) l_of[k] = l_of_k(sc, k);

    ReplicaDiagnostic out;
    out.t = t;
    out.depth = depth;
    out.n_samples = n_samples;
    out.seed = seed;
    out.min_D = std::numeric_limits<double>::infinity();
    out.max_D = -std::numeric_limits<double>::infinity();
    const std::size_t tail_start = std::max<std::size_t>(1, depth / 2);

    std::size_t hits_01 = 0, hits_001 = 0;
    std::vector<double> prefix_log_u(word_len + 1, 0.0);
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (std::size_t h = 1; h <= word_len; ++h) {
            const int g = sc.levels[h - 1];
            const Pattern& p = seq.system().patterns[g];
            const TiltParams::PerPattern& pp = tp.per_pattern[g];
            const double u = rng::unit(seed, s, h);
            const std::size_t idx = rng::pick_index(pp.cum_P.data(), p.digit_count(), u);
            prefix_log_u[h] = prefix_log_u[h - 1] + pp.row_log_u.at(p.digits[idx].j);
        }
        double tail_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k <= depth; ++k) {
            const std::size_t l = l_of[k];
            const double D = prefix_log_u[l] / static_cast<double>(l) -
                             prefix_log_u[k] / static_cast<double>(k);
            out.min_D = std::min(out.min_D, D);
            out.max_D = std::max(out.max_D, D);
            if (k >= tail_start) tail_min = std::min(tail_min, D);
        }
        if (tail_min >= -0.1) ++hits_01;
        if (tail_min >= -0.01) ++hits_001;
    }
    out.fraction_tail_ge_minus_0_1 = static_cast<double>(hits_01) / static_cast<double>(n_samples);
    out.fraction_tail_ge_minus_0_01 =
        static_cast<double>(hits_001) / static_cast<double>(n_samples);
    return out;
}

}  // namespace moranfrac

#endif
