#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sitrec/ids.hpp"
#include "sitrec/situation.hpp"
#include "sitrec/rng.hpp"
#include "sitrec/usermodel.hpp"

namespace sitrec {

/// Shape of a synthetic recommendation environment.
///
/// Situations are grouped into clusters around a prototype triple; every
/// situation exposes the same document catalog, and each cluster has its own
/// Bernoulli click probability per document. Critical clusters keep their
/// preferences. With `drift_iteration` > 0, non-critical clusters move their
/// interest from the oldest documents to the newest ones at that trial.
struct EnvironmentConfig {
    std::uint64_t seed = 1;

    // Generated taxonomies (used when no taxonomy files are supplied).
    std::size_t taxonomy_depth = 4;
    std::size_t taxonomy_branching = 3;

    std::size_t clusters = 6;
    std::size_t critical_clusters = 2;
    std::size_t situation_count = 48;
    std::size_t docs_per_situation = 15;

    /// Per-dimension chance that a non-critical prototype reuses the concept
    /// of a critical prototype.
    double cluster_overlap = 0.0;
    /// Per-dimension chance that a situation replaces its prototype's concept
    /// by a sibling leaf.
    double variant_rate = 0.3;

    std::size_t good_docs = 4;
    double good_prob = 0.8;
    double poor_prob_min = 0.05;
    double poor_prob_max = 0.2;
    std::uint64_t drift_iteration = 1000;

    /// When > 0 the lowest-id document is a decoy with this click probability,
    /// the `good_docs` highest-id documents are the good ones, and no drift applies.
    double decoy_prob = 0.0;
    /// Clicks (and recommendations) credited to the decoy in the bootstrap case base.
    std::uint64_t decoy_prior_wins = 0;

    /// Throws sitrec::Error naming the offending field.
    void validate() const;
};

struct Cluster {
    Situation prototype;
    SituationKey key;
    bool critical = false;
    std::vector<double> early_probs;  // per catalog document
    std::vector<double> late_probs;   // after the drift iteration
};

struct PoolSituation {
    Situation situation;
    SituationKey key;
    std::size_t cluster = 0;
};

/// Situations with planted group labels, for threshold calibration.
struct GoldClustering {
    std::vector<SituationKey> situations;
    std::vector<std::size_t> labels;
};

class Environment {
public:
    const ContextModel& model() const noexcept { return model_; }
    const EnvironmentConfig& config() const noexcept { return config_; }
    const std::vector<Cluster>& clusters() const noexcept { return clusters_; }
    const std::vector<PoolSituation>& pool() const noexcept { return pool_; }
    const std::vector<DocumentId>& documents() const noexcept { return documents_; }
    const std::vector<Situation>& expert_critical() const noexcept { return expert_critical_; }

    std::optional<std::size_t> document_index(const DocumentId& id) const;

    /// Pool index of the situation met at `iteration`; identical for every
    /// policy run on this environment.
    std::size_t situation_at(std::uint64_t iteration) const;

    double click_probability(std::size_t cluster, std::size_t doc, std::uint64_t iteration) const;
    /// Bernoulli click drawn from a hash of (seed, iteration, document).
    bool click(std::uint64_t iteration, std::size_t cluster, std::size_t doc) const;
    double reading_time(std::uint64_t iteration, std::size_t doc) const;

    /// One entry per cluster prototype, every document at zero counts (the
    /// decoy carries its prior wins when configured).
    CaseBase bootstrap_case_base() const;
    /// Critical prototypes plus expert-declared situations.
    CriticalSituationSet initial_critical_set(double threshold_b) const;
    /// `n` distinct pool situations labelled by cluster.
    GoldClustering gold_sample(std::size_t n) const;

private:
    friend Environment generate_environment(const EnvironmentConfig&, const ContextModel*,
                                            std::span<const Situation>);
    Environment(EnvironmentConfig cfg, ContextModel model)
        : config_(std::move(cfg)), model_(std::move(model)) {}

    EnvironmentConfig config_;
    ContextModel model_;
    std::vector<Cluster> clusters_;
    std::vector<PoolSituation> pool_;
    std::vector<DocumentId> documents_;
    std::unordered_map<DocumentId, std::size_t> doc_index_;
    std::vector<Situation> expert_critical_;
};

/// Builds an environment; deterministic in cfg.seed. Uses `taxonomies` when
/// given (else balanced trees of taxonomy_depth x taxonomy_branching), and
/// centres the first critical clusters on `expert_critical` situations.
Environment generate_environment(const EnvironmentConfig& cfg, const ContextModel* taxonomies = nullptr,
                                 std::span<const Situation> expert_critical = {});

/// Balanced tree: `branching` children per node down to `depth` levels.
Taxonomy balanced_taxonomy(Dimension dim, std::size_t depth, std::size_t branching);

namespace detail {
std::uint64_t splitmix64(std::uint64_t x);
/// Uniform double in [0, 1) from a 64-bit hash.
double unit_from_hash(std::uint64_t h);
}  // namespace detail

}  // namespace sitrec
