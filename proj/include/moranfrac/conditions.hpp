#ifndef MORANFRAC_CONDITIONS_HPP
#define MORANFRAC_CONDITIONS_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "moranfrac/pattern.hpp"

namespace moranfrac {

struct ConditionCheck {
    bool holds = false;
    std::string details;
};

/// Row separation: within every pattern, distinct occupied rows are at
/// least 2 apart.  Same-row digits are allowed (their cells are distinct
/// grid cells); the proof only needs the row gap.
inline ConditionCheck check_rsc(const PatternSystem& sys) {
    ConditionCheck out{true, ""};
    for (const Pattern& p : sys.patterns) {
        const auto rows = p.row_counts();
        int prev = -10;
        bool adjacent_cells = false;
        for (const auto& [j, r] : rows) {
            if (prev >= 0 && j - prev < 2) {
                out.holds = false;
                out.details += "pattern '" + p.name + "': occupied rows " + std::to_string(prev) +
                               " and " + std::to_string(j) + " are adjacent; ";
            }
            prev = j;
        }
        for (std::size_t a = 0; a < p.digits.size() && !adjacent_cells; ++a)
            for (std::size_t b = a + 1; b < p.digits.size(); ++b)
                if (p.digits[a].j == p.digits[b].j &&
                    std::abs(p.digits[a].i - p.digits[b].i) == 1) {
                    adjacent_cells = true;
                    break;
                }
        if (adjacent_cells)
            out.details += "pattern '" + p.name +
                           "': same-row horizontally adjacent digits present (closed cells touch; "
                           "only the row-gap reading is enforced); ";
    }
    if (out.holds && out.details.empty()) out.details = "all patterns have row gaps >= 2";
    return out;
}

/// Top-or-bottom separation: some pattern with positive frequency leaves
/// row 0 or its top row empty.
inline ConditionCheck check_tbsc(const PatternSystem& sys) {
    ConditionCheck out{false, ""};
    for (std::size_t g = 0; g < sys.size(); ++g) {
        if (!(sys.frequencies[g] > 0)) continue;
        const Pattern& p = sys.patterns[g];
        const bool bottom_empty =
            std::none_of(p.digits.begin(), p.digits.end(), [](Digit d) { return d.j == 0; });
        const bool top_empty = std::none_of(p.digits.begin(), p.digits.end(),
                                            [&](Digit d) { return d.j == p.m - 1; });
        if (bottom_empty || top_empty) {
            out.holds = true;
            out.details = "witness pattern '" + p.name + "' (" +
                          (bottom_empty ? "bottom row empty" : "top row empty") + ")";
            return out;
        }
    }
    out.details = "every positive-frequency pattern occupies both its bottom and top rows";
    return out;
}

inline ConditionCheck check_csc(const PatternSystem& sys) {
    ConditionCheck out = check_rsc(transpose(sys));
    if (!out.details.empty()) out.details += " [transposed reading: rows there are columns here]";
    return out;
}

inline ConditionCheck check_lrsc(const PatternSystem& sys) {
    ConditionCheck out = check_tbsc(transpose(sys));
    if (!out.details.empty()) out.details += " [transposed reading: rows there are columns here]";
    return out;
}

/// Permutation hypotheses: across all pattern pairs, equal bottom/top row
/// occupancy counts and permutation-equal bottom/top probability multisets
/// (tolerance 1e-12).
inline ConditionCheck check_cor2(const PatternSystem& sys) {
    auto edge_probs = [](const Pattern& p, int row) {
        std::vector<double> v;
        for (std::size_t idx = 0; idx < p.digits.size(); ++idx)
            if (p.digits[idx].j == row) v.push_back(p.probs[idx]);
        std::sort(v.begin(), v.end());
        return v;
    };
    auto multiset_eq = [](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t idx = 0; idx < a.size(); ++idx)
            if (std::abs(a[idx] - b[idx]) > 1e-12) return false;
        return true;
    };

    ConditionCheck out{true, ""};
    for (std::size_t a = 0; a < sys.size(); ++a) {
        for (std::size_t b = a + 1; b < sys.size(); ++b) {
            const Pattern& pa = sys.patterns[a];
            const Pattern& pb = sys.patterns[b];
            const auto bottom_a = edge_probs(pa, 0), bottom_b = edge_probs(pb, 0);
            const auto top_a = edge_probs(pa, pa.m - 1), top_b = edge_probs(pb, pb.m - 1);
            if (bottom_a.size() != bottom_b.size() || top_a.size() != top_b.size()) {
                out.holds = false;
                out.details += "patterns '" + pa.name + "' and '" + pb.name +
                               "' differ in bottom/top row occupancy; ";
            } else if (!multiset_eq(bottom_a, bottom_b) || !multiset_eq(top_a, top_b)) {
                out.holds = false;
                out.details += "patterns '" + pa.name + "' and '" + pb.name +
                               "' have non-permutation bottom/top probability multisets; ";
            }
        }
    }
    if (out.holds)
        out.details = sys.size() < 2 ? "single pattern: hypotheses hold vacuously"
                                     : "bottom/top occupancies and probability multisets match";
    return out;
}

enum class Licensed { thm_via_rsc, thm_via_tbsc, cor2, transposed_variant, none };

inline std::string to_string(Licensed lic) {
    switch (lic) {
        case Licensed::thm_via_rsc: return "thm_mfa_via_RSC";
        case Licensed::thm_via_tbsc: return "thm_mfa_via_TBSC";
        case Licensed::cor2: return "cor2";
        case Licensed::transposed_variant: return "transposed_variant";
        default: return "none";
    }
}

struct ConditionReport {
    ConditionCheck rsc, tbsc, csc, lrsc, cor2;
    double zeta_value = 0.0;
    Licensed licensed = Licensed::none;
    std::vector<std::string> notes;
};

/// Runs every separation check and reports which hypothesis, if any,
/// licenses the spectrum formula for the system's orientation.
inline ConditionReport condition_report(const PatternSystem& sys) {
    ConditionReport rep;
    rep.rsc = check_rsc(sys);
    rep.tbsc = check_tbsc(sys);
    rep.csc = check_csc(sys);
    rep.lrsc = check_lrsc(sys);
    rep.zeta_value = zeta(sys);

    const bool z_gt_1 = rep.zeta_value > 1.0;
    rep.cor2 = check_cor2(z_gt_1 ? transpose(sys) : sys);
    if (z_gt_1 && rep.cor2.holds) rep.cor2.details += " (checked on the transposed system)";

    if (!z_gt_1) {
        if (rep.rsc.holds)
            rep.licensed = Licensed::thm_via_rsc;
        else if (rep.tbsc.holds)
            rep.licensed = Licensed::thm_via_tbsc;
        else if (rep.cor2.holds)
            rep.licensed = Licensed::cor2;
    } else {
        if (rep.csc.holds || rep.lrsc.holds)
            rep.licensed = Licensed::transposed_variant;
        else if (rep.cor2.holds)
            rep.licensed = Licensed::cor2;
    }
    if (rep.licensed == Licensed::none)
        rep.notes.push_back(
            "no separation or permutation hypothesis holds: the spectrum formula is unproven for "
            "this system (replica condition unverified)");
    return rep;
}

}  // namespace moranfrac

#endif
