#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sitrec/situation.hpp"
#include "sitrec/rng.hpp"
#include "sitrec/usermodel.hpp"

namespace sitrec {

namespace policy {

/// Always recommends the best-known documents.
struct Exploit {};

/// Fixed exploration probability per recommended slot.
struct EpsGreedy {
    double epsilon = 0.1;
};

/// Fully random during the first epsilon * total_iterations trials, greedy afterwards.
struct EpsBeginning {
    double epsilon = 0.1;
    std::uint64_t total_iterations = 10000;
};

/// epsilon_t = min(1, epsilon0 / t).
struct EpsDecreasingRatio {
    double epsilon0 = 0.5;
};

/// Starts at `start` and drops by `step` every `period` trials, never below `floor`.
struct EpsDecreasingStep {
    double start = 0.99;
    double step = 0.01;
    std::uint64_t period = 100;
    double floor = 0.0;
};

/// Samples epsilon from a candidate set re-weighted by exponentiated gradient.
struct ExpGradient {
    std::vector<double> candidates = default_candidates();
    double floor = 0.1;
    double rate = 0.1;

    static std::vector<double> default_candidates();
};

/// Epsilon from the similarity to the closest critical situation.
struct Contextual {
    double threshold_b = 2.4;
};

}  // namespace policy

using PolicyConfig =
    std::variant<policy::Exploit, policy::EpsGreedy, policy::EpsBeginning, policy::EpsDecreasingRatio,
                 policy::EpsDecreasingStep, policy::ExpGradient, policy::Contextual>;

/// Throws sitrec::Error when a parameter is out of range.
void validate(const PolicyConfig& cfg);
std::string describe(const PolicyConfig& cfg);

/// Exponentiated-gradient weights over candidate epsilons.
///
/// p_i = (1 - floor) * w_i / sum(w) + floor / K. Weights are kept in log
/// space so long runs neither overflow nor underflow.
class EgState {
public:
    EgState(std::vector<double> candidates, double floor, double rate);
    explicit EgState(const policy::ExpGradient& cfg)
        : EgState(cfg.candidates, cfg.floor, cfg.rate) {}

    const std::vector<double>& candidates() const noexcept { return candidates_; }
    const std::vector<double>& log_weights() const noexcept { return log_weights_; }
    double floor() const noexcept { return floor_; }
    double rate() const noexcept { return rate_; }

    std::vector<double> probabilities() const;
    double probability(std::size_t i) const { return probabilities().at(i); }
    std::size_t sample(Rng& rng) const;

    /// w_i *= exp(rate * reward / p_i) for the chosen candidate, with p_i its
    /// probability before the update. `reward` must lie in [0, 1].
    void update(std::size_t index, double reward);

private:
    std::vector<double> candidates_;
    std::vector<double> log_weights_;
    double floor_;
    double rate_;
};

struct EpsilonInputs {
    double nearest_critical_sim = 0.0;
    double threshold_b = 2.4;
};

/// Everything a policy sees when filling one recommendation list.
struct SelectionContext {
    const DocumentMap& candidates;
    std::size_t list_size;
    std::uint64_t iteration;  // 1-based trial index
    Rng& rng;
    std::optional<EpsilonInputs> epsilon_inputs{};
};

struct EpsilonChoice {
    double epsilon = 0.0;
    std::optional<std::size_t> eg_index;  // set when sampled from an EgState
};

/// Exploration probability this trial. Contextual needs ctx.epsilon_inputs;
/// ExpGradient needs `eg` and draws from ctx.rng.
EpsilonChoice effective_epsilon(const PolicyConfig& cfg, const SelectionContext& ctx,
                                const EgState* eg = nullptr);

/// Fills min(list_size, |candidates|) slots without replacement. Each slot
/// draws q ~ U[0,1): q > epsilon takes the highest-CTR remaining document
/// (ties to the smallest id), otherwise a uniformly random remaining one.
std::vector<DocumentId> select_documents(const SelectionContext& ctx, double epsilon);

struct ContextualSelection {
    std::vector<DocumentId> documents;
    Criticality criticality;
    bool registered = false;  // current situation newly added to the critical set
};

/// Critical situations are served with epsilon 0 and added to `sc`; others
/// use epsilon = 1 - sim/B. `nearest_past` indexes the case-base entry whose
/// documents are the candidates.
ContextualSelection contextual_select(const Situation& current, CriticalSituationSet& sc,
                                      const ContextModel& model, const CaseBase& cb,
                                      std::size_t nearest_past, std::size_t list_size,
                                      std::uint64_t iteration, Rng& rng);

/// A named, stateful policy instance (holds the EG weights when needed).
class Policy {
public:
    Policy(std::string name, PolicyConfig cfg);

    const std::string& name() const noexcept { return name_; }
    const PolicyConfig& config() const noexcept { return config_; }
    bool is_contextual() const noexcept {
        return std::holds_alternative<policy::Contextual>(config_);
    }
    const EgState* eg_state() const noexcept { return eg_ ? &*eg_ : nullptr; }

    EpsilonChoice choose_epsilon(const SelectionContext& ctx) const;
    /// Feeds the trial reward (click fraction in [0, 1]) back to an EG policy.
    void observe(const EpsilonChoice& choice, double reward);

private:
    std::string name_;
    PolicyConfig config_;
    std::optional<EgState> eg_;
};

}  // namespace sitrec
