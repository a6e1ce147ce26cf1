#include "sitrec/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sitrec {

RunResult run_trials(const Environment& env, Policy& policy, CaseBase& cb, CriticalSituationSet* sc,
                     const RunOptions& opts) {
    if (opts.iterations < 1) throw Error("run_trials: iterations must be >= 1");
    if (opts.list_size < 1) throw Error("run_trials: list_size must be >= 1");
    if (opts.checkpoint_interval < 1) throw Error("run_trials: checkpoint_interval must be >= 1");
    if (cb.empty()) throw Error("run_trials: the case base needs at least one situation entry");
    if (policy.is_contextual() && (!sc || sc->empty())) {
        throw Error("run_trials: contextual policy '" + policy.name() + "' needs a non-empty critical-situation set");
    }

    const auto& model = env.model();
    std::vector<SituationKey> keys;
    keys.reserve(cb.size());
    for (const auto& e : cb.entries()) keys.push_back(model.resolve(e.situation));

    RunResult result;
    result.critical_initial = sc ? sc->size() : 0;
    if (opts.keep_records) result.records.reserve(opts.iterations);
    Rng rng(opts.seed);

    for (std::uint64_t t = 1; t <= opts.iterations; ++t) {
        const auto& current = env.pool()[env.situation_at(t)];

        // Retrieve the closest past situation; its documents are the candidates.
        const auto nearest = nearest_past_situation(current.key, keys, model);

        std::vector<DocumentId> recommended;
        EpsilonChoice choice;
        bool critical = false;
        if (policy.is_contextual()) {
            auto sel = contextual_select(current.situation, *sc, model, cb, nearest.index, opts.list_size, t, rng);
            recommended = std::move(sel.documents);
            choice.epsilon = sel.criticality.epsilon;
            critical = sel.criticality.is_critical;
        } else {
            const SelectionContext ctx{cb.entry(nearest.index).documents, opts.list_size, t, rng};
            choice = policy.choose_epsilon(ctx);
            recommended = select_documents(ctx, choice.epsilon);
        }

        // Rewards are recorded under the current situation.
        const auto before = cb.size();
        const auto entry = cb.seed_from(current.situation, nearest.index);
        if (cb.size() != before) keys.push_back(current.key);

        std::vector<std::uint8_t> rewards;
        rewards.reserve(recommended.size());
        std::uint64_t clicks = 0;
        for (const auto& doc : recommended) {
            const auto d = env.document_index(doc);
            const bool clicked = d && env.click(t, current.cluster, *d);
            cb.record_feedback(entry, doc, clicked, clicked ? env.reading_time(t, *d) : 0.0);
            rewards.push_back(clicked ? 1 : 0);
            clicks += clicked;
        }
        policy.observe(choice, static_cast<double>(clicks) / static_cast<double>(recommended.size()));

        result.clicks += clicks;
        result.recommendations += recommended.size();
        result.critical_trials += critical;
        if (t % opts.checkpoint_interval == 0 || t == opts.iterations) {
            result.series.push_back({t,
                                     static_cast<double>(result.clicks) / static_cast<double>(result.recommendations),
                                     result.clicks, result.recommendations});
        }
        if (opts.keep_records) {
            result.records.push_back(
                {t, current.situation, choice.epsilon, critical, std::move(recommended), std::move(rewards)});
        }
    }
    result.critical_final = sc ? sc->size() : 0;
    return result;
}

double ComparisonTable::mean_final_ctr(const std::string& policy) const {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& r : runs) {
        if (r.policy == policy) {
            total += r.final_ctr;
            ++n;
        }
    }
    return n ? total / static_cast<double>(n) : 0.0;
}

std::vector<std::string> ComparisonTable::policy_names() const {
    std::vector<std::string> names;
    for (const auto& r : runs) {
        if (names.empty() || names.back() != r.policy) names.push_back(r.policy);
    }
    return names;
}

std::uint64_t policy_seed(std::uint64_t run_seed, const std::string& policy_name) {
    // FNV-1a keeps the seed independent of std::hash.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : policy_name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return detail::splitmix64(run_seed ^ detail::splitmix64(h));
}

ComparisonTable compare_policies(const EnvironmentConfig& env_cfg, const ContextModel* taxonomies,
                                 std::span<const Situation> expert_critical,
                                 std::span<const NamedPolicy> policies, std::span<const std::uint64_t> seeds,
                                 RunOptions opts) {
    if (policies.empty()) throw Error("compare_policies: no policies");
    if (seeds.empty()) throw Error("compare_policies: no seeds");
    for (std::size_t i = 0; i < policies.size(); ++i) {
        for (std::size_t j = i + 1; j < policies.size(); ++j) {
            if (policies[i].name == policies[j].name) {
                throw Error("compare_policies: duplicate policy name '" + policies[i].name + "'");
            }
        }
    }

    ComparisonTable table;
    opts.keep_records = false;
    for (const auto seed : seeds) {
        auto cfg = env_cfg;
        cfg.seed = seed;
        const auto env = generate_environment(cfg, taxonomies, expert_critical);
        for (const auto& np : policies) {
            Policy policy(np.name, np.config);
            auto cb = env.bootstrap_case_base();
            std::optional<CriticalSituationSet> sc;
            if (const auto* ctx = std::get_if<policy::Contextual>(&np.config)) {
                sc = env.initial_critical_set(ctx->threshold_b);
            }
            auto run_opts = opts;
            run_opts.seed = policy_seed(seed, np.name);
            auto result = run_trials(env, policy, cb, sc ? &*sc : nullptr, run_opts);
            table.runs.push_back({np.name, seed, result.series, result.critical_final - result.critical_initial,
                                  result.final_ctr()});
        }
    }
    std::stable_sort(table.runs.begin(), table.runs.end(), [](const PolicyRun& a, const PolicyRun& b) {
        if (a.policy != b.policy) return a.policy < b.policy;
        return a.seed < b.seed;
    });
    return table;
}

void write_comparison_csv(const ComparisonTable& table, std::ostream& out) {
    out << "policy,seed,iteration,avg_ctr\n";
    char buf[32];
    for (const auto& run : table.runs) {
        for (const auto& cp : run.series) {
            std::snprintf(buf, sizeof buf, "%.6f", cp.average_ctr);
            out << run.policy << ',' << run.seed << ',' << cp.iteration << ',' << buf << '\n';
        }
    }
}

SweepResult threshold_sweep(const GoldClustering& gold, const ContextModel& model,
                            std::span<const double> b_values) {
    if (gold.situations.size() < 2) throw Error("threshold sweep: the gold sample needs at least two situations");
    if (gold.labels.size() != gold.situations.size()) throw Error("threshold sweep: one label per situation required");
    if (b_values.empty()) throw Error("threshold sweep: no threshold values");
    const double max_b = model.weights().total();
    for (double b : b_values) {
        if (!std::isfinite(b) || b < 0.0 || b > max_b + 1e-9) {
            throw Error("threshold sweep: threshold " + std::to_string(b) + " outside [0, " +
                        std::to_string(max_b) + "]");
        }
    }

    struct Pair {
        double sim;
        bool same;
    };
    std::vector<Pair> pairs;
    const auto n = gold.situations.size();
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            pairs.push_back({model.similarity(gold.situations[i], gold.situations[j]),
                             gold.labels[i] == gold.labels[j]});
        }
    }

    SweepResult result;
    for (double b : b_values) {
        std::uint64_t predicted = 0;
        std::uint64_t correct = 0;
        for (const auto& p : pairs) {
            const bool positive = p.sim >= b;
            predicted += positive;
            correct += positive == p.same;
        }
        result.curve.push_back({b, static_cast<double>(correct) / static_cast<double>(pairs.size()), predicted});
    }
    for (std::size_t i = 1; i < result.curve.size(); ++i) {
        const auto& c = result.curve[i];
        const auto& best = result.curve[result.best];
        if (c.precision > best.precision || (c.precision == best.precision && c.threshold_b > best.threshold_b)) {
            result.best = i;
        }
    }
    return result;
}

std::vector<double> threshold_grid(double min, double max, double step) {
    if (!(step > 0.0) || !(max >= min)) throw Error("threshold grid: need step > 0 and max >= min");
    const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(std::round((min + static_cast<double>(i) * step) * 1e9) / 1e9);
    }
    return out;
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
    out << "threshold_b,precision,predicted_pairs\n";
    char buf[64];
    for (const auto& p : sweep.curve) {
        std::snprintf(buf, sizeof buf, "%.4f,%.6f,", p.threshold_b, p.precision);
        out << buf << p.predicted_pairs << '\n';
    }
}

}  // namespace sitrec
