#ifndef MORANFRAC_SPECTRUM_HPP
#define MORANFRAC_SPECTRUM_HPP

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moranfrac/pattern.hpp"

namespace moranfrac {

/// Row/column marginals of one pattern at parameter t:
///   q(j)  row mass,            qhat(i)  column mass,
///   s_j   row sum of p^t,      shat_i   column sum of p^t,
///   u(j) = q(j)^t / s_j,       uhat(i) = qhat(i)^t / shat_i.
/// Log forms are the canonical values; the linear fields may over/underflow
/// for extreme t and are kept for inspection.
struct RowMarginals {
    std::string pattern;
    double t = 0.0;
    std::map<int, double> q, qhat, s, shat, u, uhat;
    std::map<int, double> log_u, log_uhat;
};

inline RowMarginals row_marginals(const Pattern& p, double t) {
    RowMarginals rm;
    rm.pattern = p.name;
    rm.t = t;
    rm.q = p.row_masses();
    rm.qhat = p.col_masses();

    std::map<int, std::vector<double>> row_tlp, col_tlp;
    for (std::size_t idx = 0; idx < p.digits.size(); ++idx) {
        const double tlp = t * std::log(p.probs[idx]);
        row_tlp[p.digits[idx].j].push_back(tlp);
        col_tlp[p.digits[idx].i].push_back(tlp);
    }
    for (const auto& [j, xs] : row_tlp) {
        const double ls = log_sum_exp(xs);
        const double lu = t * std::log(rm.q.at(j)) - ls;
        rm.s[j] = std::exp(ls);
        rm.u[j] = std::exp(lu);
        rm.log_u[j] = lu;
    }
    for (const auto& [i, xs] : col_tlp) {
        const double ls = log_sum_exp(xs);
        const double lu = t * std::log(rm.qhat.at(i)) - ls;
        rm.shat[i] = std::exp(ls);
        rm.uhat[i] = std::exp(lu);
        rm.log_uhat[i] = lu;
    }
    return rm;
}

/// The unique beta with m^{-beta} * sum_D p^t u(j)^{1-zeta} = 1, evaluated in
/// closed form as a log-ratio.  Valid for zeta <= 1 (callers transpose
/// first otherwise).
inline double beta_gamma(const Pattern& p, double t, double zeta_value) {
    const RowMarginals rm = row_marginals(p, t);
    std::vector<double> terms;
    terms.reserve(p.digits.size());
    for (std::size_t idx = 0; idx < p.digits.size(); ++idx)
        terms.push_back(t * std::log(p.probs[idx]) +
                        (1.0 - zeta_value) * rm.log_u.at(p.digits[idx].j));
    return log_sum_exp(terms) / std::log(static_cast<double>(p.m));
}

inline void require_zeta_le_one(const PatternSystem& sys) {
    const double z = zeta(sys);
    if (!(z <= 1.0))
        throw DomainError("zeta = " + std::to_string(z) + " > 1: transpose the system first");
}

/// beta(t): frequency-weighted combination of the per-pattern exponents,
/// weights f*log m normalized by sum f log m.
inline double beta(const PatternSystem& sys, double t) {
    require_zeta_le_one(sys);
    const double z = zeta(sys);
    double num = 0.0, den = 0.0;
    for (std::size_t g = 0; g < sys.size(); ++g) {
        const double f = sys.freq(g);
        const double lm = std::log(static_cast<double>(sys.patterns[g].m));
        num += f * beta_gamma(sys.patterns[g], t, z) * lm;
        den += f * lm;
    }
    return num / den;
}

/// Tilted per-pattern weights at parameter t:
///   P(i,j) = m^{-beta_g(t)} p(i,j)^t u(j)^{1-zeta},
/// with row sums Q(j) and column sums Qhat(i).  All probability vectors.
struct TiltParams {
    double t = 0.0;
    double zeta_value = 1.0;
    double log_m_avg = 0.0;  // sum over patterns of f * log m
    double log_n_avg = 0.0;
    std::vector<double> f;  // frequencies as doubles, aligned with per_pattern

    struct PerPattern {
        double beta_g = 0.0;
        std::vector<double> P, log_P, cum_P;  // aligned with the pattern's digits
        std::vector<double> exponent;         // -zeta log p - (1-zeta) log q per digit
        std::map<int, double> Q, log_Q, Qhat, log_Qhat;
        std::map<int, double> row_log_u;
    };
    std::vector<PerPattern> per_pattern;
};

inline TiltParams tilt(const PatternSystem& sys, double t) {
    require_zeta_le_one(sys);
    TiltParams tp;
    tp.t = t;
    tp.zeta_value = zeta(sys);
    tp.per_pattern.resize(sys.size());
    tp.f.resize(sys.size());
    for (std::size_t g = 0; g < sys.size(); ++g) {
        const Pattern& p = sys.patterns[g];
        tp.f[g] = sys.freq(g);
        tp.log_m_avg += tp.f[g] * std::log(static_cast<double>(p.m));
        tp.log_n_avg += tp.f[g] * std::log(static_cast<double>(p.n));

        TiltParams::PerPattern& pp = tp.per_pattern[g];
        const RowMarginals rm = row_marginals(p, t);
        pp.row_log_u = rm.log_u;

        std::vector<double> raw(p.digits.size());
        for (std::size_t idx = 0; idx < p.digits.size(); ++idx)
            raw[idx] = t * std::log(p.probs[idx]) +
                       (1.0 - tp.zeta_value) * rm.log_u.at(p.digits[idx].j);
        const double total = log_sum_exp(raw);
        pp.beta_g = total / std::log(static_cast<double>(p.m));

        pp.P.resize(p.digits.size());
        pp.log_P.resize(p.digits.size());
        pp.cum_P.resize(p.digits.size());
        pp.exponent.resize(p.digits.size());
        double cum = 0.0;
        std::map<int, std::vector<double>> by_row, by_col;
        for (std::size_t idx = 0; idx < p.digits.size(); ++idx) {
            pp.log_P[idx] = raw[idx] - total;
            pp.P[idx] = std::exp(pp.log_P[idx]);
            cum += pp.P[idx];
            pp.cum_P[idx] = cum;
            pp.exponent[idx] = -tp.zeta_value * std::log(p.probs[idx]) -
                               (1.0 - tp.zeta_value) * std::log(rm.q.at(p.digits[idx].j));
            by_row[p.digits[idx].j].push_back(pp.log_P[idx]);
            by_col[p.digits[idx].i].push_back(pp.log_P[idx]);
        }
        for (const auto& [j, xs] : by_row) {
            pp.log_Q[j] = log_sum_exp(xs);
            pp.Q[j] = std::exp(pp.log_Q[j]);
        }
        for (const auto& [i, xs] : by_col) {
            pp.log_Qhat[i] = log_sum_exp(xs);
            pp.Qhat[i] = std::exp(pp.log_Qhat[i]);
        }
    }
    return tp;
}

/// alpha(t): the tilted-mean local exponent
///   sum_g f_g sum_w P(w) (-zeta log p(w) - (1-zeta) log q(w)) / sum f log m.
inline double alpha_of(const TiltParams& tp) {
    double num = 0.0;
    for (std::size_t g = 0; g < tp.per_pattern.size(); ++g) {
        const TiltParams::PerPattern& pp = tp.per_pattern[g];
        double inner = 0.0;
        for (std::size_t idx = 0; idx < pp.P.size(); ++idx)
            inner += pp.P[idx] * pp.exponent[idx];
        num += tp.f[g] * inner;
    }
    return num / tp.log_m_avg;
}

inline double alpha(const PatternSystem& sys, double t) { return alpha_of(tilt(sys, t)); }

struct AlphaRange {
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    bool degenerate() const {
        return alpha_max - alpha_min <= 1e-12 * std::max(1.0, std::abs(alpha_max));
    }
};

/// Frequency-weighted extremes of the per-digit exponents; the open
/// interval (alpha_min, alpha_max) is the proper domain of H.
inline AlphaRange alpha_range(const PatternSystem& sys) {
    require_zeta_le_one(sys);
    const double z = zeta(sys);
    double lo = 0.0, hi = 0.0, den = 0.0;
    for (std::size_t g = 0; g < sys.size(); ++g) {
        const Pattern& p = sys.patterns[g];
        const double f = sys.freq(g);
        const auto q = p.row_masses();
        double pmin = 0.0, pmax = 0.0;
        for (std::size_t idx = 0; idx < p.digits.size(); ++idx) {
            const double e =
                -z * std::log(p.probs[idx]) - (1.0 - z) * std::log(q.at(p.digits[idx].j));
            if (idx == 0) {
                pmin = pmax = e;
            } else {
                pmin = std::min(pmin, e);
                pmax = std::max(pmax, e);
            }
        }
        lo += f * pmin;
        hi += f * pmax;
        den += f * std::log(static_cast<double>(p.m));
    }
    return {lo / den, hi / den};
}

/// Inverts alpha(t) = target by bisection on an expanding bracket.
/// Requires target strictly inside (alpha_min, alpha_max).
inline double solve_t(const PatternSystem& sys, double target) {
    const AlphaRange range = alpha_range(sys);
    if (range.degenerate())
        throw DomainError("degenerate spectrum: alpha_min = alpha_max = " +
                          std::to_string(range.alpha_min));
    if (!(target > range.alpha_min && target < range.alpha_max))
        throw DomainError("alpha = " + std::to_string(target) + " outside (" +
                          std::to_string(range.alpha_min) + ", " +
                          std::to_string(range.alpha_max) + ")");

    double T = 8.0;
    while (!(alpha(sys, -T) > target && alpha(sys, T) < target)) {
        T *= 2.0;
        if (T > 65536.0)
            throw DomainError("no bracket for alpha = " + std::to_string(target) +
                              " within t in [-65536, 65536]");
    }
    double lo = -T, hi = T;  // alpha(lo) > target > alpha(hi)
    double mid = 0.0;
    for (int iter = 0; iter < 400; ++iter) {
        mid = 0.5 * (lo + hi);
        const double a = alpha(sys, mid);
        if (std::abs(a - target) <= 5e-11) return mid;
        (a > target ? lo : hi) = mid;
    }
    return mid;
}

struct SpectrumSample {
    double t = 0.0;
    double beta_value = 0.0;
    double alpha_value = 0.0;
    double H = 0.0;
};

struct SpectrumCurve {
    std::vector<SpectrumSample> samples;
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    double zeta_value = 0.0;        // of the system as given
    Orientation orientation_used = Orientation::original;
};

struct GridSpec {
    std::size_t alpha_steps = 101;
    double margin_fraction = 1e-3;
    std::optional<double> t_min, t_max;  // optional window on the curve
};

/// Samples H(alpha) = inf_t {alpha t + beta(t)} over an alpha grid.
/// Systems with zeta > 1 are transposed internally; the spectrum is
/// invariant under the axis swap.
inline SpectrumCurve spectrum_curve(const PatternSystem& sys, const GridSpec& grid = {}) {
    SpectrumCurve curve;
    curve.zeta_value = zeta(sys);
    PatternSystem work = sys;
    if (curve.zeta_value > 1.0) {
        work = transpose(sys);
        curve.orientation_used = Orientation::transposed;
    }

    const AlphaRange range = alpha_range(work);
    if (range.degenerate())
        throw DomainError("degenerate spectrum: alpha_min = alpha_max = " +
                          std::to_string(range.alpha_min));
    curve.alpha_min = range.alpha_min;
    curve.alpha_max = range.alpha_max;

    const double margin = grid.margin_fraction * (range.alpha_max - range.alpha_min);
    double lo = range.alpha_min + margin;
    double hi = range.alpha_max - margin;
    if (grid.t_max) lo = std::max(lo, alpha(work, *grid.t_max));
    if (grid.t_min) hi = std::min(hi, alpha(work, *grid.t_min));
    if (!(lo < hi)) throw DomainError("empty alpha grid after applying the t window");

    const std::size_t steps = std::max<std::size_t>(grid.alpha_steps, 2);
    for (std::size_t s = 0; s < steps; ++s) {
        const double a = lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(steps - 1);
        const double tv = solve_t(work, a);
        SpectrumSample sample;
        sample.t = tv;
        sample.beta_value = beta(work, tv);
        sample.alpha_value = alpha(work, tv);
        sample.H = tv * a + sample.beta_value;
        curve.samples.push_back(sample);
    }
    return curve;
}

}  // namespace moranfrac

#endif
