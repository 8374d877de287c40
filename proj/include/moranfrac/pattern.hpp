#ifndef MORANFRAC_PATTERN_HPP
#define MORANFRAC_PATTERN_HPP

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "moranfrac/common.hpp"

namespace moranfrac {

struct Digit {
    int i = 0;  // column, 0 <= i < n
    int j = 0;  // row, 0 <= j < m
    friend bool operator==(const Digit&, const Digit&) = default;
    friend auto operator<=>(const Digit&, const Digit&) = default;
};

/// One construction step: an n x m grid with an occupied digit set and a
/// probability vector aligned with the digits.
struct Pattern {
    std::string name;
    int n = 0;
    int m = 0;
    std::vector<Digit> digits;
    std::vector<double> probs;

    std::size_t digit_count() const { return digits.size(); }

    /// Index of a digit in input order, or -1 if absent.
    int find(Digit d) const {
        for (std::size_t idx = 0; idx < digits.size(); ++idx)
            if (digits[idx] == d) return static_cast<int>(idx);
        return -1;
    }

    /// Row occupancy r(j) = card{i : (i,j) occupied}, occupied rows only.
    std::map<int, int> row_counts() const {
        std::map<int, int> r;
        for (const Digit& d : digits) ++r[d.j];
        return r;
    }

    /// Column occupancy rhat(i), occupied columns only.
    std::map<int, int> col_counts() const {
        std::map<int, int> r;
        for (const Digit& d : digits) ++r[d.i];
        return r;
    }

    /// Row mass q(j) = sum of p over the digits of row j.
    std::map<int, double> row_masses() const {
        std::map<int, double> q;
        for (std::size_t idx = 0; idx < digits.size(); ++idx) q[digits[idx].j] += probs[idx];
        return q;
    }

    /// Column mass qhat(i).
    std::map<int, double> col_masses() const {
        std::map<int, double> q;
        for (std::size_t idx = 0; idx < digits.size(); ++idx) q[digits[idx].i] += probs[idx];
        return q;
    }
};

enum class Orientation { original, transposed };

enum class Severity { info, warning, error };

struct Message {
    Severity severity = Severity::info;
    std::string text;
};

/// The finite pattern family with exact rational frequencies.
struct PatternSystem {
    std::vector<Pattern> patterns;
    std::vector<BigRat> frequencies;  // aligned with patterns
    Orientation orientation = Orientation::original;
    std::vector<Message> notes;  // parse-time annotations (renormalization, cycling)

    std::size_t size() const { return patterns.size(); }

    int index_of(const std::string& name) const {
        for (std::size_t idx = 0; idx < patterns.size(); ++idx)
            if (patterns[idx].name == name) return static_cast<int>(idx);
        return -1;
    }

    double freq(std::size_t idx) const {
        return static_cast<double>(frequencies[idx]);
    }
};

/// N+ = max over patterns of max(n, m).
inline int n_plus(const PatternSystem& sys) {
    int np = 0;
    for (const Pattern& p : sys.patterns) np = std::max({np, p.n, p.m});
    return np;
}

/// zeta = (sum f log m) / (sum f log n); NaN when not computable.
inline double zeta(const PatternSystem& sys) {
    double num = 0.0, den = 0.0;
    for (std::size_t g = 0; g < sys.size(); ++g) {
        const double f = sys.freq(g);
        num += f * std::log(static_cast<double>(sys.patterns[g].m));
        den += f * std::log(static_cast<double>(sys.patterns[g].n));
    }
    if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return num / den;
}

/// Exchanges the axes: (n,m,{(i,j)}) -> (m,n,{(j,i)}) with probs carried
/// along and the orientation flag flipped.  Involution.
inline PatternSystem transpose(const PatternSystem& sys) {
    PatternSystem out = sys;
    for (Pattern& p : out.patterns) {
        std::swap(p.n, p.m);
        for (Digit& d : p.digits) std::swap(d.i, d.j);
    }
    out.orientation =
        sys.orientation == Orientation::original ? Orientation::transposed : Orientation::original;
    return out;
}

struct ValidationReport {
    bool ok = true;
    std::vector<Message> messages;
    double zeta_value = std::numeric_limits<double>::quiet_NaN();
    int n_plus_value = 0;
    // per-pattern occupancy summaries, keyed by pattern name
    std::map<std::string, std::map<int, int>> row_occupancy;
    std::map<std::string, std::map<int, int>> col_occupancy;

    void add(Severity sev, std::string text) {
        if (sev == Severity::error) ok = false;
        messages.push_back({sev, std::move(text)});
    }
};

/// Checks the standing assumptions (n,m >= 2; r >= 2; p > 0; sum p = 1;
/// digits in range and distinct) plus exact sum(f) = 1.  Violations are
/// report entries, never exceptions; derived fields are filled whenever
/// computable.
inline ValidationReport validate_system(const PatternSystem& sys) {
    ValidationReport rep;
    for (const Message& note : sys.notes) rep.add(note.severity, note.text);

    if (sys.patterns.empty()) rep.add(Severity::error, "system has no patterns");
    if (sys.patterns.size() != sys.frequencies.size())
        rep.add(Severity::error, "frequency list does not match pattern list");

    std::set<std::string> names;
    for (const Pattern& p : sys.patterns) {
        if (!names.insert(p.name).second)
            rep.add(Severity::error, "duplicate pattern name '" + p.name + "'");
        if (p.n < 2 || p.m < 2)
            rep.add(Severity::error, "pattern '" + p.name + "': subdivision counts must be >= 2");
        if (p.digits.size() < 2)
            rep.add(Severity::error, "pattern '" + p.name + "': r >= 2 violated (has " +
                                         std::to_string(p.digits.size()) + " digit)");
        if (p.probs.size() != p.digits.size())
            rep.add(Severity::error,
                    "pattern '" + p.name + "': probs length does not match digits length");

        std::set<Digit> seen;
        for (const Digit& d : p.digits) {
            if (d.i < 0 || d.i >= p.n || d.j < 0 || d.j >= p.m)
                rep.add(Severity::error, "pattern '" + p.name + "': digit (" + std::to_string(d.i) +
                                             "," + std::to_string(d.j) + ") out of range for " +
                                             std::to_string(p.n) + "x" + std::to_string(p.m) +
                                             " grid");
            if (!seen.insert(d).second)
                rep.add(Severity::error, "pattern '" + p.name + "': digit (" + std::to_string(d.i) +
                                             "," + std::to_string(d.j) + ") repeated");
        }

        bool positive = true;
        double sum = 0.0;
        for (double pr : p.probs) {
            if (!(pr > 0.0)) positive = false;
            sum += pr;
        }
        if (!positive)
            rep.add(Severity::error,
                    "pattern '" + p.name + "': probability vector must be strictly positive");
        else if (!p.probs.empty() && std::abs(sum - 1.0) > 1e-12)
            rep.add(Severity::error, "pattern '" + p.name +
                                         "': probability vector does not sum to 1 (sum = " +
                                         std::to_string(sum) + ")");
        rep.row_occupancy[p.name] = p.row_counts();
        rep.col_occupancy[p.name] = p.col_counts();
    }

    if (sys.patterns.size() == sys.frequencies.size() && !sys.frequencies.empty()) {
        BigRat total = 0;
        for (std::size_t g = 0; g < sys.frequencies.size(); ++g) {
            const BigRat& f = sys.frequencies[g];
            if (f < 0)
                rep.add(Severity::error,
                        "frequency of pattern '" + sys.patterns[g].name + "' is negative");
            else if (f == 0)
                rep.add(Severity::warning,
                        "pattern '" + sys.patterns[g].name + "' has frequency 0 and is never scheduled");
            total += f;
        }
        if (total != 1) rep.add(Severity::error, "frequencies do not sum to 1 exactly");
    }

    rep.zeta_value = zeta(sys);
    rep.n_plus_value = n_plus(sys);
    return rep;
}

}  // namespace moranfrac

#endif
