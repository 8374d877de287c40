#ifndef MORANFRAC_SEQUENCE_HPP
#define MORANFRAC_SEQUENCE_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "moranfrac/pattern.hpp"

namespace moranfrac {

enum class SequenceMode { balanced, explicit_levels };

/// Deterministic level sequence k -> pattern realizing the system's
/// frequencies.  Balanced mode schedules by largest remainder: level k picks
/// the pattern maximizing f*k - count(k-1), ties broken by pattern order,
/// which keeps |count(n) - f*n| <= card(Gamma) for every prefix.  Explicit
/// mode replays a user list, cycling when the requested depth exceeds it.
class PatternSequence {
public:
    PatternSequence() = default;

    PatternSequence(PatternSystem sys, SequenceMode mode, std::vector<int> explicit_levels = {})
        : system_(std::make_shared<const PatternSystem>(std::move(sys))),
          mode_(mode),
          explicit_levels_(std::move(explicit_levels)) {}

    const PatternSystem& system() const { return *system_; }
    SequenceMode mode() const { return mode_; }
    const std::vector<int>& explicit_levels() const { return explicit_levels_; }

    /// Pattern indices for levels 1..depth.
    std::vector<int> prefix(std::size_t depth) const {
        std::vector<int> out;
        out.reserve(depth);
        if (mode_ == SequenceMode::explicit_levels) {
            for (std::size_t k = 0; k < depth; ++k)
                out.push_back(explicit_levels_[k % explicit_levels_.size()]);
            return out;
        }
        const std::size_t g_count = system_->size();
        std::vector<BigInt> counts(g_count, 0);
        for (std::size_t k = 1; k <= depth; ++k) {
            int best = 0;
            BigRat best_score;
            for (std::size_t g = 0; g < g_count; ++g) {
                BigRat score = system_->frequencies[g] * static_cast<int>(k) - counts[g];
                if (g == 0 || score > best_score) {
                    best_score = score;
                    best = static_cast<int>(g);
                }
            }
            ++counts[best];
            out.push_back(best);
        }
        return out;
    }

    /// Pattern index at level k (1-based).  O(k) in balanced mode.
    int level_index(std::size_t k) const {
        if (mode_ == SequenceMode::explicit_levels)
            return explicit_levels_[(k - 1) % explicit_levels_.size()];
        return prefix(k).back();
    }

    const Pattern& level(std::size_t k) const { return system_->patterns[level_index(k)]; }

private:
    std::shared_ptr<const PatternSystem> system_;
    SequenceMode mode_ = SequenceMode::balanced;
    std::vector<int> explicit_levels_;
};

/// Builds the level sequence; explicit mode resolves names against the
/// system and rejects unknown ones.
inline PatternSequence realize_sequence(const PatternSystem& sys, SequenceMode mode,
                                        const std::vector<std::string>& explicit_names = {}) {
    if (mode == SequenceMode::explicit_levels) {
        if (explicit_names.empty())
            throw DomainError("explicit sequence requires at least one level name");
        std::vector<int> idx;
        idx.reserve(explicit_names.size());
        for (const std::string& name : explicit_names) {
            const int g = sys.index_of(name);
            if (g < 0) throw DomainError("unknown pattern name '" + name + "' in explicit sequence");
            idx.push_back(g);
        }
        return PatternSequence(sys, mode, std::move(idx));
    }
    return PatternSequence(sys, SequenceMode::balanced);
}

/// count(n)/n per pattern name.
inline std::map<std::string, double> empirical_frequencies(const PatternSequence& seq,
                                                           std::size_t n) {
    if (n < 1) throw DomainError("empirical_frequencies requires n >= 1");
    std::vector<std::size_t> counts(seq.system().size(), 0);
    for (int g : seq.prefix(n)) ++counts[g];
    std::map<std::string, double> out;
    for (std::size_t g = 0; g < counts.size(); ++g)
        out[seq.system().patterns[g].name] =
            static_cast<double>(counts[g]) / static_cast<double>(n);
    return out;
}

}  // namespace moranfrac

#endif
