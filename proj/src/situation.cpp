#include "sitrec/situation.hpp"

#include <cmath>
#include <sstream>

#include "text_util.hpp"

namespace sitrec {

const ConceptId& Situation::at(Dimension dim) const {
    switch (dim) {
        case Dimension::Location: return location;
        case Dimension::Time: return time;
        case Dimension::Social: return social;
    }
    return location;
}

std::string to_string(const Situation& s) {
    return "(" + s.location.str() + ", " + s.time.str() + ", " + s.social.str() + ")";
}

void SimilarityWeights::validate() const {
    bool any_positive = false;
    for (double a : alpha) {
        if (!std::isfinite(a) || a < 0.0) throw Error("similarity weights must be finite and >= 0");
        any_positive = any_positive || a > 0.0;
    }
    if (!any_positive) throw Error("at least one similarity weight must be > 0");
}

ContextModel::ContextModel(Taxonomy location, Taxonomy time, Taxonomy social,
                           SimilarityWeights weights)
    : taxonomies_{std::move(location), std::move(time), std::move(social)}, weights_(weights) {
    weights_.validate();
    for (auto dim : kDimensions) {
        if (taxonomy(dim).dimension() != dim) {
            throw Error("taxonomy for " + std::string(to_string(dim)) + " is tagged as " +
                        std::string(to_string(taxonomy(dim).dimension())));
        }
    }
}

SituationKey ContextModel::resolve(const Situation& s) const {
    SituationKey key;
    for (auto dim : kDimensions) {
        key.nodes[static_cast<int>(dim)] = taxonomy(dim).index_of(s.at(dim));
    }
    return key;
}

Situation ContextModel::describe(const SituationKey& key) const {
    return Situation{taxonomies_[0].concept_at(key.nodes[0]), taxonomies_[1].concept_at(key.nodes[1]),
                     taxonomies_[2].concept_at(key.nodes[2])};
}

std::array<double, 3> ContextModel::per_dimension(const SituationKey& a,
                                                  const SituationKey& b) const {
    return {taxonomies_[0].similarity(a.nodes[0], b.nodes[0]),
            taxonomies_[1].similarity(a.nodes[1], b.nodes[1]),
            taxonomies_[2].similarity(a.nodes[2], b.nodes[2])};
}

double ContextModel::similarity(const SituationKey& a, const SituationKey& b) const {
    const auto sims = per_dimension(a, b);
    double total = 0.0;
    for (int j = 0; j < 3; ++j) total += weights_.alpha[j] * sims[j];
    return total;
}

double ContextModel::similarity(const Situation& a, const Situation& b) const {
    return similarity(resolve(a), resolve(b));
}

NearestSituation nearest_past_situation(const SituationKey& current,
                                        std::span<const SituationKey> past,
                                        const ContextModel& model) {
    if (past.empty()) throw Error("nearest situation: the past-situation list is empty");
    NearestSituation best{0, model.similarity(current, past[0])};
    for (std::size_t i = 1; i < past.size(); ++i) {
        const double s = model.similarity(current, past[i]);
        if (s > best.similarity) best = {i, s};
    }
    return best;
}

NearestSituation nearest_past_situation(const Situation& current, std::span<const Situation> past,
                                        const ContextModel& model) {
    std::vector<SituationKey> keys;
    keys.reserve(past.size());
    for (const auto& s : past) keys.push_back(model.resolve(s));
    return nearest_past_situation(model.resolve(current), keys, model);
}

double contextual_epsilon(double sim, double threshold_b) {
    if (!(threshold_b > 0.0)) throw Error("threshold B must be > 0");
    if (sim >= threshold_b) return 0.0;
    const double eps = 1.0 - sim / threshold_b;
    return eps > 1.0 ? 1.0 : eps;
}

CriticalSituationSet::CriticalSituationSet(double threshold_b) : threshold_(threshold_b) {
    if (!std::isfinite(threshold_b) || threshold_b <= 0.0) {
        throw Error("threshold_b must be finite and > 0");
    }
}

std::size_t SituationHash::operator()(const Situation& s) const noexcept {
    std::size_t h = std::hash<ConceptId>{}(s.location);
    h = h * 1000003u ^ std::hash<ConceptId>{}(s.time);
    h = h * 1000003u ^ std::hash<ConceptId>{}(s.social);
    return h;
}

bool CriticalSituationSet::insert(const Situation& s, const ContextModel& model) {
    if (lookup_.contains(s)) return false;
    keys_.push_back(model.resolve(s));
    members_.push_back(s);
    lookup_.insert(s);
    return true;
}

Criticality criticality(const SituationKey& current, const CriticalSituationSet& sc,
                        const ContextModel& model) {
    if (sc.empty()) throw Error("criticality: the critical-situation set is empty");
    const auto nearest = nearest_past_situation(current, sc.keys(), model);
    const double m = nearest.similarity;
    if (m >= sc.threshold()) return {true, 0.0, m};
    return {false, contextual_epsilon(m, sc.threshold()), m};
}

Criticality criticality(const Situation& current, const CriticalSituationSet& sc,
                        const ContextModel& model) {
    return criticality(model.resolve(current), sc, model);
}

namespace {
std::string join(const std::vector<Diagnostic>& diags) {
    std::ostringstream os;
    for (std::size_t i = 0; i < diags.size(); ++i) {
        if (i) os << "; ";
        os << "line " << diags[i].line << ": " << diags[i].message;
    }
    return os.str();
}
}  // namespace

SituationParseError::SituationParseError(std::vector<Diagnostic> diagnostics)
    : Error("situations: " + join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<Situation> parse_situations(std::string_view text, const ContextModel* model) {
    std::vector<Situation> out;
    std::vector<Diagnostic> diags;
    const auto lines = detail::lines_of(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (detail::is_skippable(lines[n])) continue;
        const auto fields = detail::split(lines[n], '\t');
        if (fields.size() != 3) {
            diags.push_back({n + 1, "expected 'location<TAB>time<TAB>social', got " +
                                        std::to_string(fields.size()) + " field(s)"});
            continue;
        }
        std::array<std::string, 3> parts;
        bool ok = true;
        for (int j = 0; j < 3; ++j) {
            const auto f = detail::trim(fields[j]);
            if (f.empty() || detail::has_whitespace(f)) {
                diags.push_back({n + 1, "invalid concept id '" + std::string(f) + "'"});
                ok = false;
                break;
            }
            parts[j] = std::string(f);
        }
        if (!ok) continue;
        Situation s{ConceptId(parts[0]), ConceptId(parts[1]), ConceptId(parts[2])};
        if (model) {
            try {
                model->resolve(s);
            } catch (const UnknownConceptError& e) {
                diags.push_back({n + 1, e.what()});
                continue;
            }
        }
        out.push_back(std::move(s));
    }
    if (!diags.empty()) throw SituationParseError(std::move(diags));
    return out;
}

}  // namespace sitrec
