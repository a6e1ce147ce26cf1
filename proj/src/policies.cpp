#include "sitrec/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sitrec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_probability(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw Error(std::string(what) + " must lie in [0, 1]");
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::vector<double> policy::ExpGradient::default_candidates() {
    std::vector<double> c;
    for (int i = 0; i <= 9; ++i) c.push_back(i / 10.0);
    return c;
}

void validate(const PolicyConfig& cfg) {
    std::visit(overloaded{
                   [](const policy::Exploit&) {},
                   [](const policy::EpsGreedy& p) { require_probability(p.epsilon, "epsilon"); },
                   [](const policy::EpsBeginning& p) {
                       require_probability(p.epsilon, "epsilon");
                       if (p.total_iterations < 1) throw Error("total_iterations must be >= 1");
                   },
                   [](const policy::EpsDecreasingRatio& p) {
                       require_probability(p.epsilon0, "epsilon0");
                   },
                   [](const policy::EpsDecreasingStep& p) {
                       require_probability(p.start, "epsilon");
                       require_probability(p.floor, "step floor");
                       if (!std::isfinite(p.step) || p.step < 0.0) throw Error("step must be >= 0");
                       if (p.period < 1) throw Error("period must be >= 1");
                       if (p.floor > p.start) throw Error("step floor exceeds the starting epsilon");
                   },
                   [](const policy::ExpGradient& p) {
                       if (p.candidates.empty()) throw Error("eg_candidates must be non-empty");
                       for (double c : p.candidates) require_probability(c, "eg_candidates entry");
                       if (!(p.floor > 0.0 && p.floor < 1.0)) throw Error("eg_floor must lie in (0, 1)");
                       if (!(p.rate > 0.0) || !std::isfinite(p.rate)) throw Error("eg_rate must be > 0");
                   },
                   [](const policy::Contextual& p) {
                       if (!(p.threshold_b > 0.0) || !std::isfinite(p.threshold_b)) {
                           throw Error("threshold_b must be > 0");
                       }
                   },
               },
               cfg);
}

std::string describe(const PolicyConfig& cfg) {
    return std::visit(
        overloaded{
            [](const policy::Exploit&) { return std::string("exploit"); },
            [](const policy::EpsGreedy& p) { return "eps-greedy(" + fmt(p.epsilon) + ")"; },
            [](const policy::EpsBeginning& p) {
                return "eps-beginning(" + fmt(p.epsilon) + ", I=" + std::to_string(p.total_iterations) + ")";
            },
            [](const policy::EpsDecreasingRatio& p) {
                return "eps-decreasing(" + fmt(p.epsilon0) + "/t)";
            },
            [](const policy::EpsDecreasingStep& p) {
                return "eps-decreasing(" + fmt(p.start) + " - " + fmt(p.step) + " every " +
                       std::to_string(p.period) + ")";
            },
            [](const policy::ExpGradient& p) {
                return "eg(" + std::to_string(p.candidates.size()) + " candidates)";
            },
            [](const policy::Contextual& p) { return "contextual(B=" + fmt(p.threshold_b) + ")"; },
        },
        cfg);
}

EgState::EgState(std::vector<double> candidates, double floor, double rate)
    : candidates_(std::move(candidates)), log_weights_(candidates_.size(), 0.0), floor_(floor), rate_(rate) {
    validate(policy::ExpGradient{candidates_, floor_, rate_});
}

std::vector<double> EgState::probabilities() const {
    const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
    std::vector<double> p(log_weights_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(log_weights_[i] - top);
        total += p[i];
    }
    const double k = static_cast<double>(p.size());
    for (auto& v : p) v = (1.0 - floor_) * v / total + floor_ / k;
    return p;
}

std::size_t EgState::sample(Rng& rng) const {
    const auto p = probabilities();
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return p.size() - 1;
}

void EgState::update(std::size_t index, double reward) {
    if (index >= candidates_.size()) throw Error("eg update: candidate index out of range");
    require_probability(reward, "eg reward");
    const double p = probability(index);
    log_weights_[index] += rate_ * reward / p;
}

EpsilonChoice effective_epsilon(const PolicyConfig& cfg, const SelectionContext& ctx,
                                const EgState* eg) {
    const auto t = static_cast<double>(ctx.iteration);
    return std::visit(
        overloaded{
            [](const policy::Exploit&) { return EpsilonChoice{0.0, {}}; },
            [](const policy::EpsGreedy& p) { return EpsilonChoice{p.epsilon, {}}; },
            [&](const policy::EpsBeginning& p) {
                const double cutoff = p.epsilon * static_cast<double>(p.total_iterations);
                return EpsilonChoice{t <= cutoff ? 1.0 : 0.0, {}};
            },
            [&](const policy::EpsDecreasingRatio& p) {
                return EpsilonChoice{std::min(1.0, p.epsilon0 / std::max(t, 1.0)), {}};
            },
            [&](const policy::EpsDecreasingStep& p) {
                const auto drops = (std::max<std::uint64_t>(ctx.iteration, 1) - 1) / p.period;
                const double e = p.start - p.step * static_cast<double>(drops);
                return EpsilonChoice{std::clamp(e, p.floor, p.start), {}};
            },
            [&](const policy::ExpGradient&) {
                if (!eg) throw Error("eg policy selected without EG state");
                const auto i = eg->sample(ctx.rng);
                return EpsilonChoice{eg->candidates()[i], i};
            },
            [&](const policy::Contextual&) {
                if (!ctx.epsilon_inputs) throw Error("contextual policy requires critical-situation inputs");
                const auto& in = *ctx.epsilon_inputs;
                return EpsilonChoice{contextual_epsilon(in.nearest_critical_sim, in.threshold_b), {}};
            },
        },
        cfg);
}

std::vector<DocumentId> select_documents(const SelectionContext& ctx, double epsilon) {
    if (ctx.candidates.empty()) throw Error("select_documents: empty candidate set");
    require_probability(epsilon, "epsilon");

    struct Ranked {
        double ctr;
        const DocumentId* id;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(ctx.candidates.size());
    for (const auto& [id, stats] : ctx.candidates) ranked.push_back({get_ctr(stats), &id});
    // The map iterates ids ascending, so a stable sort on CTR keeps the id tie-break.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.ctr > b.ctr; });

    const std::size_t n = std::min(ctx.list_size, ranked.size());
    std::vector<DocumentId> out;
    out.reserve(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t slot = 0; slot < n; ++slot) {
        const double q = unit(ctx.rng);
        std::size_t pick = 0;
        if (!(q > epsilon)) {
            pick = std::uniform_int_distribution<std::size_t>(0, ranked.size() - 1)(ctx.rng);
        }
        out.push_back(*ranked[pick].id);
        ranked.erase(ranked.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return out;
}

ContextualSelection contextual_select(const Situation& current, CriticalSituationSet& sc,
                                      const ContextModel& model, const CaseBase& cb,
                                      std::size_t nearest_past, std::size_t list_size,
                                      std::uint64_t iteration, Rng& rng) {
    ContextualSelection out;
    out.criticality = criticality(current, sc, model);
    const SelectionContext ctx{cb.entry(nearest_past).documents, list_size, iteration, rng,
                               EpsilonInputs{out.criticality.nearest_critical_sim, sc.threshold()}};
    const double eps = effective_epsilon(policy::Contextual{sc.threshold()}, ctx).epsilon;
    out.documents = select_documents(ctx, eps);
    if (out.criticality.is_critical) out.registered = sc.insert(current, model);
    return out;
}

Policy::Policy(std::string name, PolicyConfig cfg) : name_(std::move(name)), config_(std::move(cfg)) {
    validate(config_);
    if (const auto* eg = std::get_if<policy::ExpGradient>(&config_)) eg_.emplace(*eg);
}

EpsilonChoice Policy::choose_epsilon(const SelectionContext& ctx) const {
    return effective_epsilon(config_, ctx, eg_state());
}

void Policy::observe(const EpsilonChoice& choice, double reward) {
    if (eg_ && choice.eg_index) eg_->update(*choice.eg_index, reward);
}

}  // namespace sitrec
