#include <set>

#include "doctest.h"
#include "sitrec/environment.hpp"

using namespace sitrec;

namespace {

void same(const Environment& a, const Environment& b) {
    REQUIRE(a.pool().size() == b.pool().size());
    for (std::size_t i = 0; i < a.pool().size(); ++i) {
        CHECK(a.pool()[i].situation == b.pool()[i].situation);
        CHECK(a.pool()[i].cluster == b.pool()[i].cluster);
    }
    for (std::size_t c = 0; c < a.clusters().size(); ++c) {
        CHECK(a.clusters()[c].early_probs == b.clusters()[c].early_probs);
        CHECK(a.clusters()[c].late_probs == b.clusters()[c].late_probs);
    }
    for (std::uint64_t t = 1; t <= 200; ++t) CHECK(a.situation_at(t) == b.situation_at(t));
}

}  // namespace

TEST_CASE("balanced taxonomy") {
    const auto t = balanced_taxonomy(Dimension::Time, 3, 2);
    CHECK(t.size() == 7);
    CHECK(t.root().str() == "T");
    CHECK(t.depth(ConceptId("T.1.0")) == 3);
    CHECK(t.leaves().size() == 4);
}

TEST_CASE("generation is deterministic in the seed") {
    EnvironmentConfig cfg;
    cfg.seed = 77;
    same(generate_environment(cfg), generate_environment(cfg));
    cfg.seed = 78;
    const auto other = generate_environment(cfg);
    cfg.seed = 77;
    const auto base = generate_environment(cfg);
    bool differs = false;
    for (std::size_t i = 0; i < base.pool().size(); ++i) differs |= base.pool()[i].situation != other.pool()[i].situation;
    CHECK(differs);
}

TEST_CASE("config echo") {
    EnvironmentConfig cfg;
    cfg.situation_count = 100;
    cfg.docs_per_situation = 15;
    const auto env = generate_environment(cfg);
    CHECK(env.pool().size() == 100);
    CHECK(env.documents().size() == 15);
    CHECK(env.documents().front().str() == "doc01");
    std::set<Situation> distinct;
    for (const auto& p : env.pool()) distinct.insert(p.situation);
    CHECK(distinct.size() == 100);
    CHECK(env.clusters().size() == cfg.clusters);
    CHECK(env.clusters()[0].critical);
    CHECK_FALSE(env.clusters().back().critical);
}

TEST_CASE("click model layout") {
    EnvironmentConfig cfg;
    cfg.drift_iteration = 500;
    const auto env = generate_environment(cfg);
    const auto k = cfg.docs_per_situation;
    for (std::size_t c = 0; c < env.clusters().size(); ++c) {
        const auto& cl = env.clusters()[c];
        for (std::size_t d = 0; d < cfg.good_docs; ++d) CHECK(cl.early_probs[d] == cfg.good_prob);
        CHECK(std::is_sorted(cl.early_probs.rbegin(), cl.early_probs.rend()));
        CHECK(env.click_probability(c, 0, 499) == cfg.good_prob);
        if (cl.critical) {
            CHECK(cl.late_probs == cl.early_probs);
        } else {
            CHECK(env.click_probability(c, k - 1, 500) == cfg.good_prob);
            CHECK(env.click_probability(c, 0, 500) <= cfg.poor_prob_max);
        }
    }
}

TEST_CASE("decoy layout and bootstrap") {
    EnvironmentConfig cfg;
    cfg.decoy_prob = 0.3;
    cfg.decoy_prior_wins = 5;
    const auto env = generate_environment(cfg);
    for (const auto& cl : env.clusters()) {
        CHECK(cl.early_probs.front() == 0.3);
        CHECK(cl.early_probs.back() == cfg.good_prob);
        CHECK(cl.late_probs == cl.early_probs);
    }
    const auto cb = env.bootstrap_case_base();
    CHECK(cb.size() == cfg.clusters);
    const auto& docs = cb.entry(0).documents;
    CHECK(docs.size() == cfg.docs_per_situation);
    CHECK(docs.at(DocumentId("doc01")) == DocumentStats{5, 5, 0.0});
    CHECK(docs.at(DocumentId("doc15")) == DocumentStats{});
}

TEST_CASE("bernoulli clicks converge to the configured probability") {
    EnvironmentConfig cfg;
    cfg.clusters = 2;
    cfg.critical_clusters = 1;
    cfg.situation_count = 2;
    cfg.good_docs = 1;
    cfg.good_prob = 0.8;
    cfg.poor_prob_min = cfg.poor_prob_max = 0.1;
    cfg.drift_iteration = 0;
    const auto env = generate_environment(cfg);
    int good = 0;
    int poor = 0;
    for (std::uint64_t t = 1; t <= 10000; ++t) {
        good += env.click(t, 0, 0);
        poor += env.click(t, 1, 5);
    }
    CHECK(good / 10000.0 == doctest::Approx(0.8).epsilon(0.03 / 0.8));
    CHECK(poor / 10000.0 == doctest::Approx(0.1).epsilon(0.3));
}

TEST_CASE("situation stream covers the pool") {
    const auto env = generate_environment(EnvironmentConfig{});
    std::set<std::size_t> seen;
    for (std::uint64_t t = 1; t <= 5000; ++t) seen.insert(env.situation_at(t));
    CHECK(seen.size() == env.pool().size());
}

TEST_CASE("expert situations become critical prototypes") {
    const auto model = ContextModel(balanced_taxonomy(Dimension::Location, 4, 3),
                                    balanced_taxonomy(Dimension::Time, 4, 3),
                                    balanced_taxonomy(Dimension::Social, 4, 3));
    const std::vector<Situation> expert{{ConceptId("L.0.0.0"), ConceptId("T.1.1.1"), ConceptId("S.2.2.2")}};
    const auto env = generate_environment(EnvironmentConfig{}, &model, expert);
    CHECK(env.clusters()[0].prototype == expert[0]);
    const auto sc = env.initial_critical_set(2.4);
    CHECK(sc.size() == 2);
    CHECK(sc.contains(expert[0]));
}

TEST_CASE("gold sample") {
    const auto env = generate_environment(EnvironmentConfig{});
    const auto gold = env.gold_sample(20);
    CHECK(gold.situations.size() == 20);
    CHECK(gold.labels.size() == 20);
    CHECK_THROWS_AS(env.gold_sample(1000), Error);
}

TEST_CASE("invalid configs name the field") {
    const auto message = [](auto mutate) {
        EnvironmentConfig cfg;
        mutate(cfg);
        try {
            cfg.validate();
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message([](EnvironmentConfig& c) { c.good_prob = 1.5; }).starts_with("environment.good_prob"));
    CHECK(message([](EnvironmentConfig& c) { c.situation_count = 0; }).starts_with("environment.situation_count"));
    CHECK(message([](EnvironmentConfig& c) { c.critical_clusters = 9; }).starts_with("environment.critical_clusters"));
    CHECK(message([](EnvironmentConfig& c) { c.taxonomy_depth = 30; }).starts_with("environment.taxonomy_depth"));
    CHECK(message([](EnvironmentConfig&) {}).empty());
}
