#include "sitrec/environment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <unordered_set>

namespace sitrec {

namespace detail {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_from_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace detail

namespace {

// Stream tags keep the situation stream, clicks and reading times independent.
constexpr std::uint64_t kStreamTag = 0x5157a7e0ULL;
constexpr std::uint64_t kClickTag = 0xc11c4ULL;
constexpr std::uint64_t kReadTag = 0x4ead71eULL;

std::uint64_t mix(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b = 0) {
    using detail::splitmix64;
    return splitmix64(splitmix64(splitmix64(seed ^ tag) + a) + b);
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw Error("environment." + field + ": " + why);
}

bool is_probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string doc_name(std::size_t i, std::size_t count) {
    const auto width = std::to_string(count).size();
    auto digits = std::to_string(i + 1);
    return "doc" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

struct LeafIndex {
    std::vector<Taxonomy::NodeIndex> leaves;
    // Sibling leaves (same parent, excluding self) per leaf.
    std::unordered_map<Taxonomy::NodeIndex, std::vector<Taxonomy::NodeIndex>> siblings;
};

LeafIndex index_leaves(const Taxonomy& t) {
    LeafIndex out;
    out.leaves = t.leaves();
    for (auto leaf : out.leaves) {
        auto& sib = out.siblings[leaf];
        if (const auto p = t.parent(leaf)) {
            for (auto c : t.children(*p)) {
                if (c != leaf && t.is_leaf(c)) sib.push_back(c);
            }
        }
    }
    return out;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

}  // namespace

void EnvironmentConfig::validate() const {
    require(taxonomy_depth >= 2, "taxonomy_depth", "must be >= 2");
    require(taxonomy_branching >= 2, "taxonomy_branching", "must be >= 2");
    double nodes = 0.0;
    for (std::size_t d = 0; d < taxonomy_depth && nodes <= 1e6; ++d) {
        nodes += std::pow(static_cast<double>(taxonomy_branching), static_cast<double>(d));
    }
    require(nodes <= 1e6, "taxonomy_depth", "generated taxonomies would exceed 10^6 concepts");
    require(clusters >= 1, "clusters", "must be >= 1");
    require(critical_clusters <= clusters, "critical_clusters", "must not exceed clusters");
    require(situation_count >= clusters, "situation_count", "must be >= clusters");
    require(docs_per_situation >= 1, "docs_per_situation", "must be >= 1");
    require(is_probability(cluster_overlap), "cluster_overlap", "must lie in [0, 1]");
    require(is_probability(variant_rate), "variant_rate", "must lie in [0, 1]");
    require(good_docs <= docs_per_situation, "good_docs", "must not exceed docs_per_situation");
    require(is_probability(good_prob), "good_prob", "must lie in [0, 1]");
    require(is_probability(poor_prob_min), "poor_prob_min", "must lie in [0, 1]");
    require(is_probability(poor_prob_max), "poor_prob_max", "must lie in [0, 1]");
    require(poor_prob_min <= poor_prob_max, "poor_prob_max", "must be >= poor_prob_min");
    require(is_probability(decoy_prob), "decoy_prob", "must lie in [0, 1]");
    if (decoy_prob > 0.0) {
        require(good_docs + 1 <= docs_per_situation, "good_docs",
                "decoy layout needs docs_per_situation > good_docs");
    }
}

Taxonomy balanced_taxonomy(Dimension dim, std::size_t depth, std::size_t branching) {
    const std::string root(1, static_cast<char>(std::toupper(to_string(dim)[0])));
    std::vector<std::pair<std::string, std::string>> edges{{root, "-"}};
    std::vector<std::string> level{root};
    for (std::size_t d = 2; d <= depth; ++d) {
        std::vector<std::string> next;
        for (const auto& parent : level) {
            for (std::size_t b = 0; b < branching; ++b) {
                auto name = parent + "." + std::to_string(b);
                edges.emplace_back(name, parent);
                next.push_back(std::move(name));
            }
        }
        level = std::move(next);
    }
    return Taxonomy::from_edges(dim, edges);
}

Environment generate_environment(const EnvironmentConfig& cfg, const ContextModel* taxonomies,
                                 std::span<const Situation> expert_critical) {
    cfg.validate();
    Environment env = taxonomies
                          ? Environment(cfg, *taxonomies)
                          : Environment(cfg, ContextModel(balanced_taxonomy(Dimension::Location, cfg.taxonomy_depth,
                                                                            cfg.taxonomy_branching),
                                                          balanced_taxonomy(Dimension::Time, cfg.taxonomy_depth,
                                                                            cfg.taxonomy_branching),
                                                          balanced_taxonomy(Dimension::Social, cfg.taxonomy_depth,
                                                                            cfg.taxonomy_branching)));
    const auto& model = env.model_;
    Rng rng(detail::splitmix64(cfg.seed));

    std::array<LeafIndex, 3> leaves;
    for (auto dim : kDimensions) leaves[static_cast<int>(dim)] = index_leaves(model.taxonomy(dim));

    env.expert_critical_.assign(expert_critical.begin(), expert_critical.end());
    for (const auto& s : env.expert_critical_) model.resolve(s);

    // Prototypes.
    std::unordered_set<Situation, SituationHash> used;
    auto random_key = [&] {
        SituationKey k;
        for (int j = 0; j < 3; ++j) k.nodes[j] = pick(leaves[j].leaves, rng);
        return k;
    };
    constexpr int kAttempts = 1000;
    std::vector<SituationKey> critical_keys;
    for (std::size_t c = 0; c < cfg.clusters; ++c) {
        const bool critical = c < cfg.critical_clusters;
        SituationKey key;
        bool placed = false;
        if (critical && c < env.expert_critical_.size()) {
            key = model.resolve(env.expert_critical_[c]);
            placed = !used.contains(env.expert_critical_[c]);
        }
        for (int attempt = 0; !placed && attempt < kAttempts; ++attempt) {
            key = random_key();
            if (!critical && !critical_keys.empty()) {
                const auto& anchor = pick(critical_keys, rng);
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                for (int j = 0; j < 3; ++j) {
                    if (unit(rng) < cfg.cluster_overlap) key.nodes[j] = anchor.nodes[j];
                }
            }
            placed = !used.contains(model.describe(key));
        }
        if (!placed) throw Error("environment: taxonomies too small for the requested clusters");
        Cluster cl;
        cl.prototype = model.describe(key);
        cl.key = key;
        cl.critical = critical;
        used.insert(cl.prototype);
        if (critical) critical_keys.push_back(key);
        env.clusters_.push_back(std::move(cl));
    }

    // Situation pool: prototypes first, then sibling variants round-robin.
    for (std::size_t c = 0; c < cfg.clusters; ++c) {
        env.pool_.push_back({env.clusters_[c].prototype, env.clusters_[c].key, c});
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = cfg.clusters; i < cfg.situation_count; ++i) {
        const auto c = i % cfg.clusters;
        const auto& proto = env.clusters_[c].key;
        bool placed = false;
        SituationKey key;
        for (int attempt = 0; !placed && attempt < kAttempts; ++attempt) {
            key = proto;
            for (int j = 0; j < 3; ++j) {
                const auto& sib = leaves[j].siblings[proto.nodes[j]];
                if (!sib.empty() && unit(rng) < cfg.variant_rate) key.nodes[j] = pick(sib, rng);
            }
            placed = !used.contains(model.describe(key));
        }
        if (!placed) throw Error("environment: cannot place " + std::to_string(cfg.situation_count) +
                                 " distinct situations; raise variant_rate or taxonomy size");
        auto s = model.describe(key);
        used.insert(s);
        env.pool_.push_back({std::move(s), key, c});
    }

    // Catalog and click model.
    const auto k = cfg.docs_per_situation;
    for (std::size_t d = 0; d < k; ++d) {
        env.documents_.emplace_back(doc_name(d, k));
        env.doc_index_.emplace(env.documents_.back(), d);
    }
    std::uniform_real_distribution<double> poor(cfg.poor_prob_min, cfg.poor_prob_max);
    for (auto& cl : env.clusters_) {
        cl.early_probs.resize(k);
        for (auto& p : cl.early_probs) p = poor(rng);
        if (cfg.decoy_prob > 0.0) {
            cl.early_probs[0] = cfg.decoy_prob;
            for (std::size_t d = k - cfg.good_docs; d < k; ++d) cl.early_probs[d] = cfg.good_prob;
            cl.late_probs = cl.early_probs;
            continue;
        }
        // Older documents are the more relevant ones until the drift reverses the order.
        for (std::size_t d = 0; d < cfg.good_docs; ++d) cl.early_probs[d] = cfg.good_prob;
        std::sort(cl.early_probs.begin(), cl.early_probs.end(), std::greater<>());
        cl.late_probs = cl.early_probs;
        if (!cl.critical && cfg.drift_iteration > 0) {
            for (std::size_t d = 0; d < cfg.good_docs; ++d) cl.late_probs[d] = poor(rng);
            std::sort(cl.late_probs.begin(), cl.late_probs.end());
            for (std::size_t d = k - cfg.good_docs; d < k; ++d) cl.late_probs[d] = cfg.good_prob;
        }
    }
    return env;
}

std::optional<std::size_t> Environment::document_index(const DocumentId& id) const {
    const auto it = doc_index_.find(id);
    if (it == doc_index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Environment::situation_at(std::uint64_t iteration) const {
    const double u = detail::unit_from_hash(mix(config_.seed, kStreamTag, iteration));
    const auto i = static_cast<std::size_t>(u * static_cast<double>(pool_.size()));
    return std::min(i, pool_.size() - 1);
}

double Environment::click_probability(std::size_t cluster, std::size_t doc,
                                      std::uint64_t iteration) const {
    const auto& cl = clusters_.at(cluster);
    const bool late = config_.drift_iteration > 0 && iteration >= config_.drift_iteration;
    return (late ? cl.late_probs : cl.early_probs).at(doc);
}

bool Environment::click(std::uint64_t iteration, std::size_t cluster, std::size_t doc) const {
    const double u = detail::unit_from_hash(mix(config_.seed, kClickTag, iteration, doc));
    return u < click_probability(cluster, doc, iteration);
}

double Environment::reading_time(std::uint64_t iteration, std::size_t doc) const {
    return 20.0 + 100.0 * detail::unit_from_hash(mix(config_.seed, kReadTag, iteration, doc));
}

CaseBase Environment::bootstrap_case_base() const {
    CaseBase cb;
    for (const auto& cl : clusters_) {
        DocumentMap docs;
        for (const auto& d : documents_) docs.emplace(d, DocumentStats{});
        if (config_.decoy_prob > 0.0 && config_.decoy_prior_wins > 0) {
            auto& decoy = docs.at(documents_.front());
            decoy.clicks = decoy.recommendations = config_.decoy_prior_wins;
        }
        cb.add(cl.prototype, std::move(docs));
    }
    return cb;
}

CriticalSituationSet Environment::initial_critical_set(double threshold_b) const {
    CriticalSituationSet sc(threshold_b);
    for (const auto& cl : clusters_) {
        if (cl.critical) sc.insert(cl.prototype, model_);
    }
    for (const auto& s : expert_critical_) sc.insert(s, model_);
    return sc;
}

GoldClustering Environment::gold_sample(std::size_t n) const {
    if (n > pool_.size()) {
        throw Error("gold sample of " + std::to_string(n) + " exceeds the " +
                    std::to_string(pool_.size()) + " environment situations");
    }
    std::vector<std::size_t> order(pool_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(mix(config_.seed, 0x901dULL, n));
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(n);
    std::sort(order.begin(), order.end());
    GoldClustering gold;
    for (auto i : order) {
        gold.situations.push_back(pool_[i].key);
        gold.labels.push_back(pool_[i].cluster);
    }
    return gold;
}

}  // namespace sitrec
