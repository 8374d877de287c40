#ifndef MORANFRAC_SCALES_HPP
#define MORANFRAC_SCALES_HPP

#include <cmath>
#include <vector>

#include "moranfrac/sequence.hpp"

namespace moranfrac {

/// Exact cumulative products M_k = m_1...m_k and N_l = n_1...n_l for a level
/// sequence, with float log running sums as a fast path.  The level prefix is
/// extended beyond `depth` until N catches M_depth, so l(k) is resolvable for
/// every k <= depth.  Index functions are decided by exact integer
/// comparison; ties (N_l == M_k) follow the <= in the defining display.
struct CumulativeScales {
    std::size_t depth = 0;            // declared depth (levels whose k is valid)
    std::vector<int> levels;          // pattern index per level, 1-based via levels[h-1]
    std::vector<BigInt> m_products;   // m_products[h-1] = M_h
    std::vector<BigInt> n_products;   // n_products[h-1] = N_h
    std::vector<double> log_m_sums;   // running sums of log m_h
    std::vector<double> log_n_sums;

    std::size_t extended_depth() const { return levels.size(); }
};

inline CumulativeScales scales(const PatternSequence& seq, std::size_t depth) {
    if (depth < 1) throw DomainError("scales requires depth >= 1");
    CumulativeScales sc;
    sc.depth = depth;

    // Over-extend by a safety margin so the last valid k still resolves l(k).
    std::size_t hint = depth + 2;
    sc.levels = seq.prefix(hint);
    auto extend_to = [&](std::size_t want) {
        if (want > sc.levels.size()) sc.levels = seq.prefix(want);
    };

    BigInt M = 1, N = 1;
    double lm = 0.0, ln = 0.0;
    for (std::size_t h = 0; h < depth; ++h) {
        const Pattern& p = seq.system().patterns[sc.levels[h]];
        M *= p.m;
        N *= p.n;
        lm += std::log(static_cast<double>(p.m));
        ln += std::log(static_cast<double>(p.n));
        sc.m_products.push_back(M);
        sc.n_products.push_back(N);
        sc.log_m_sums.push_back(lm);
        sc.log_n_sums.push_back(ln);
    }
    // Extend until N_L >= M_depth (and keep M/N aligned for l > k addresses).
    const BigInt target = sc.m_products[depth - 1];
    std::size_t h = depth;
    while (sc.n_products.back() < target) {
        extend_to(h + 2);
        const Pattern& p = seq.system().patterns[sc.levels[h]];
        M *= p.m;
        N *= p.n;
        lm += std::log(static_cast<double>(p.m));
        ln += std::log(static_cast<double>(p.n));
        sc.m_products.push_back(M);
        sc.n_products.push_back(N);
        sc.log_m_sums.push_back(lm);
        sc.log_n_sums.push_back(ln);
        ++h;
    }
    sc.levels.resize(sc.m_products.size());
    return sc;
}

/// The unique k with 1/M_k <= delta < 1/M_{k-1}; k = 1 when delta >= 1.
inline std::size_t k_of_delta(const CumulativeScales& sc, double delta) {
    if (!(delta > 0.0)) throw DomainError("k_of_delta requires delta > 0");
    if (delta >= 1.0) return 1;
    if (!one_over_le(sc.m_products[sc.depth - 1], delta))
        throw DomainError("insufficient depth: delta < 1/M_depth");
    // smallest k with 1/M_k <= delta
    std::size_t lo = 1, hi = sc.depth;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (one_over_le(sc.m_products[mid - 1], delta))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

/// The unique l with N_l >= M_k > N_{l-1}; an exact tie N_l = M_k selects l.
inline std::size_t l_of_k(const CumulativeScales& sc, std::size_t k) {
    if (k < 1 || k > sc.depth) throw DomainError("l_of_k: k outside 1..depth");
    const BigInt& target = sc.m_products[k - 1];
    if (sc.n_products.back() < target)
        throw DomainError("insufficient depth: n-products not extended far enough");
    // Float-log candidate, then exact fix-up.
    const double lt = sc.log_m_sums[k - 1];
    std::size_t l = 1 + static_cast<std::size_t>(std::distance(
                            sc.log_n_sums.begin(),
                            std::lower_bound(sc.log_n_sums.begin(), sc.log_n_sums.end(),
                                             lt - 1e-9)));
    if (l > sc.n_products.size()) l = sc.n_products.size();
    if (l < 1) l = 1;
    while (l > 1 && sc.n_products[l - 2] >= target) --l;
    while (sc.n_products[l - 1] < target) ++l;
    return l;
}

}  // namespace moranfrac

#endif
