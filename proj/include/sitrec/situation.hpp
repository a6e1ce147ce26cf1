#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "sitrec/ids.hpp"
#include "sitrec/taxonomy.hpp"

namespace sitrec {

/// A (location, time, social) concept triple.
struct Situation {
    ConceptId location;
    ConceptId time;
    ConceptId social;

    const ConceptId& at(Dimension dim) const;

    friend auto operator<=>(const Situation&, const Situation&) = default;
    friend bool operator==(const Situation&, const Situation&) = default;
};

std::string to_string(const Situation& s);

struct SituationHash {
    std::size_t operator()(const Situation& s) const noexcept;
};

/// Situation resolved to node indices of its three taxonomies.
struct SituationKey {
    std::array<Taxonomy::NodeIndex, 3> nodes{};
    friend bool operator==(const SituationKey&, const SituationKey&) = default;
};

/// Per-dimension weights of the situation similarity.
struct SimilarityWeights {
    std::array<double, 3> alpha{1.0, 1.0, 1.0};

    double total() const { return alpha[0] + alpha[1] + alpha[2]; }
    /// Throws sitrec::Error unless all weights are finite, >= 0, and one is > 0.
    void validate() const;
};

/// The three taxonomies plus the weights used to compare situations.
class ContextModel {
public:
    ContextModel(Taxonomy location, Taxonomy time, Taxonomy social, SimilarityWeights weights = {});

    const Taxonomy& taxonomy(Dimension dim) const { return taxonomies_[static_cast<int>(dim)]; }
    const SimilarityWeights& weights() const noexcept { return weights_; }

    /// Throws UnknownConceptError if a component is missing from its taxonomy.
    SituationKey resolve(const Situation& s) const;
    Situation describe(const SituationKey& key) const;

    std::array<double, 3> per_dimension(const SituationKey& a, const SituationKey& b) const;
    double similarity(const SituationKey& a, const SituationKey& b) const;
    double similarity(const Situation& a, const Situation& b) const;

private:
    std::array<Taxonomy, 3> taxonomies_;
    SimilarityWeights weights_;
};

struct NearestSituation {
    std::size_t index = 0;
    double similarity = 0.0;
};

/// Exhaustive argmax of the similarity; ties go to the smallest index.
/// Throws sitrec::Error on an empty list.
NearestSituation nearest_past_situation(const SituationKey& current,
                                        std::span<const SituationKey> past,
                                        const ContextModel& model);
NearestSituation nearest_past_situation(const Situation& current, std::span<const Situation> past,
                                        const ContextModel& model);

/// Exploration rate for a situation whose closest critical situation has
/// similarity `sim`: 1 - sim/B below the threshold, 0 from the threshold on.
double contextual_epsilon(double sim, double threshold_b);

struct Criticality {
    bool is_critical = false;
    double epsilon = 1.0;
    double nearest_critical_sim = 0.0;
};

/// Critical situations (exploitation only) with the similarity threshold B.
class CriticalSituationSet {
public:
    /// Throws sitrec::Error unless B is finite and > 0.
    explicit CriticalSituationSet(double threshold_b);

    double threshold() const noexcept { return threshold_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    const std::vector<Situation>& members() const noexcept { return members_; }
    std::span<const SituationKey> keys() const noexcept { return keys_; }
    bool contains(const Situation& s) const { return lookup_.contains(s); }

    /// Appends `s` unless an identical triple is present. Returns true if added.
    bool insert(const Situation& s, const ContextModel& model);

private:
    double threshold_;
    std::vector<Situation> members_;
    std::vector<SituationKey> keys_;
    std::unordered_set<Situation, SituationHash> lookup_;
};

/// Compares the current situation against every member of the set.
/// Throws sitrec::Error if the set is empty.
Criticality criticality(const SituationKey& current, const CriticalSituationSet& sc,
                        const ContextModel& model);
Criticality criticality(const Situation& current, const CriticalSituationSet& sc,
                        const ContextModel& model);

class SituationParseError : public Error {
public:
    explicit SituationParseError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Parses `location<TAB>time<TAB>social` lines (a critical-situation seed
/// file). When `model` is given, every concept must resolve in its taxonomy.
std::vector<Situation> parse_situations(std::string_view text, const ContextModel* model = nullptr);

}  // namespace sitrec
