#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sitrec/environment.hpp"
#include "sitrec/policies.hpp"

namespace sitrec {

/// What happened in one trial.
struct TrialRecord {
    std::uint64_t iteration = 0;
    Situation situation;
    double epsilon_used = 0.0;
    bool critical = false;  // contextual policy only
    std::vector<DocumentId> recommended;
    std::vector<std::uint8_t> rewards;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Cumulative click-through rate after `iteration` trials.
struct CtrCheckpoint {
    std::uint64_t iteration = 0;
    double average_ctr = 0.0;
    std::uint64_t clicks = 0;
    std::uint64_t recommendations = 0;

    friend bool operator==(const CtrCheckpoint&, const CtrCheckpoint&) = default;
};

using CtrSeries = std::vector<CtrCheckpoint>;

struct RunOptions {
    std::uint64_t iterations = 10000;
    std::size_t list_size = 10;
    std::uint64_t checkpoint_interval = 1000;
    std::uint64_t seed = 1;  // policy randomness
    bool keep_records = true;
};

struct RunResult {
    std::vector<TrialRecord> records;  // empty unless keep_records
    CtrSeries series;
    std::size_t critical_initial = 0;
    std::size_t critical_final = 0;
    std::uint64_t clicks = 0;
    std::uint64_t recommendations = 0;
    std::uint64_t critical_trials = 0;

    double final_ctr() const { return series.empty() ? 0.0 : series.back().average_ctr; }
};

/// Runs the retrieve / select / record loop for `opts.iterations` trials.
///
/// Each trial takes the environment's situation, retrieves the most similar
/// case-base situation, lets `policy` rank that situation's documents, draws
/// clicks, and records them under the current situation (creating its entry,
/// seeded with the retrieved situation's documents at zero counts, if new).
/// `sc` is required for the contextual policy and grows as it runs.
RunResult run_trials(const Environment& env, Policy& policy, CaseBase& cb, CriticalSituationSet* sc,
                     const RunOptions& opts);

struct NamedPolicy {
    std::string name;
    PolicyConfig config;
};

struct PolicyRun {
    std::string policy;
    std::uint64_t seed = 0;
    CtrSeries series;
    std::size_t critical_growth = 0;
    double final_ctr = 0.0;
};

/// Runs sorted by (policy name, seed).
struct ComparisonTable {
    std::vector<PolicyRun> runs;

    /// Mean final CTR of `policy` over its seeds.
    double mean_final_ctr(const std::string& policy) const;
    std::vector<std::string> policy_names() const;
};

/// Runs every policy on the environment generated for each seed (the seed
/// replaces env_cfg.seed), so all policies see the same situations and
/// click draws. Policy randomness is seeded from (seed, policy name).
ComparisonTable compare_policies(const EnvironmentConfig& env_cfg, const ContextModel* taxonomies,
                                 std::span<const Situation> expert_critical,
                                 std::span<const NamedPolicy> policies, std::span<const std::uint64_t> seeds,
                                 RunOptions opts);

/// Seed for a policy's own random stream.
std::uint64_t policy_seed(std::uint64_t run_seed, const std::string& policy_name);

/// `policy,seed,iteration,avg_ctr`, one row per checkpoint.
void write_comparison_csv(const ComparisonTable& table, std::ostream& out);

struct SweepPoint {
    double threshold_b = 0.0;
    double precision = 0.0;
    std::uint64_t predicted_pairs = 0;
};

struct SweepResult {
    std::vector<SweepPoint> curve;
    std::size_t best = 0;  // index into curve

    const SweepPoint& optimum() const { return curve.at(best); }
};

/// Scores each threshold by pairwise agreement with the gold grouping: a
/// pair is predicted "same group" iff its similarity is >= B, and precision is
/// the fraction of pairs predicted correctly. The optimum is the largest B
/// among those with the highest precision.
SweepResult threshold_sweep(const GoldClustering& gold, const ContextModel& model,
                            std::span<const double> b_values);

/// min, min+step, ..., max (inclusive, snapped to 1e-9).
std::vector<double> threshold_grid(double min, double max, double step);

/// `threshold_b,precision,predicted_pairs`.
void write_sweep_csv(const SweepResult& sweep, std::ostream& out);

}  // namespace sitrec
