#include "sitrec/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "text_util.hpp"

namespace sitrec {

std::string to_string(const ConfigIssue& issue) {
    if (issue.line == 0) return issue.file + ": " + issue.message;
    return issue.file + ":" + std::to_string(issue.line) + ": " + issue.message;
}

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::string out = std::to_string(issues.size()) + " configuration error(s)";
    for (const auto& i : issues) out += "\n  " + to_string(i);
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

namespace {

using detail::parse_double;
using detail::parse_int;
using detail::trim;

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct Section {
    std::string name;
    std::size_t line = 0;
    std::vector<Entry> entries;
};

class Parser {
public:
    explicit Parser(std::string file) : file_(std::move(file)) {}

    std::vector<ConfigIssue> issues;

    void issue(std::size_t line, std::string message) { issues.push_back({file_, line, std::move(message)}); }

    std::vector<Section> sections(std::string_view text) {
        std::vector<Section> out;
        std::set<std::string> seen;
        const auto lines = detail::lines_of(text);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const auto n = i + 1;
            const auto line = trim(lines[i]);
            if (line.empty() || line.front() == '#' || line.front() == ';') continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    issue(n, "malformed section header");
                    continue;
                }
                std::string name(trim(line.substr(1, line.size() - 2)));
                if (!seen.insert(name).second) issue(n, "duplicate section [" + name + "]");
                out.push_back({std::move(name), n, {}});
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                issue(n, "expected 'key = value'");
                continue;
            }
            std::string key(trim(line.substr(0, eq)));
            std::string value(trim(line.substr(eq + 1)));
            if (key.empty()) {
                issue(n, "missing key before '='");
                continue;
            }
            if (out.empty()) {
                issue(n, "key '" + key + "' outside any section");
                continue;
            }
            auto& entries = out.back().entries;
            if (std::any_of(entries.begin(), entries.end(), [&](const Entry& e) { return e.key == key; })) {
                issue(n, "duplicate key '" + key + "' in [" + out.back().name + "]");
                continue;
            }
            entries.push_back({std::move(key), std::move(value), n});
        }
        return out;
    }

    template <typename Int>
    std::optional<Int> integer(const Entry& e) {
        auto v = parse_int<Int>(e.value);
        if (!v) issue(e.line, e.key + ": expected a non-negative integer, got '" + e.value + "'");
        return v;
    }

    std::optional<double> real(const Entry& e) {
        auto v = parse_double(e.value);
        if (!v || !std::isfinite(*v)) {
            issue(e.line, e.key + ": expected a number, got '" + e.value + "'");
            return std::nullopt;
        }
        return v;
    }

    template <typename Int>
    std::optional<std::vector<Int>> integer_list(const Entry& e) {
        return list<Int>(e, [](std::string_view s) { return parse_int<Int>(s); }, "integers");
    }

    std::optional<std::vector<double>> real_list(const Entry& e) {
        return list<double>(e, [](std::string_view s) { return parse_double(s); }, "numbers");
    }

private:
    template <typename T, typename F>
    std::optional<std::vector<T>> list(const Entry& e, F parse, const char* what) {
        std::vector<T> out;
        std::string normalized = e.value;
        std::replace(normalized.begin(), normalized.end(), ',', ' ');
        for (auto tok : detail::split(normalized, ' ')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            const auto v = parse(tok);
            if (!v) {
                issue(e.line, e.key + ": expected a list of " + std::string(what) + ", got '" + e.value + "'");
                return std::nullopt;
            }
            out.push_back(*v);
        }
        if (out.empty()) {
            issue(e.line, e.key + ": empty list");
            return std::nullopt;
        }
        return out;
    }

    std::string file_;
};

using EnvSetter = std::function<void(Parser&, const Entry&, EnvironmentConfig&)>;

template <typename Field>
EnvSetter size_field(Field EnvironmentConfig::*field) {
    return [field](Parser& p, const Entry& e, EnvironmentConfig& cfg) {
        if (auto v = p.integer<Field>(e)) cfg.*field = *v;
    };
}

EnvSetter real_field(double EnvironmentConfig::*field) {
    return [field](Parser& p, const Entry& e, EnvironmentConfig& cfg) {
        if (auto v = p.real(e)) cfg.*field = *v;
    };
}

const std::map<std::string, EnvSetter>& environment_fields() {
    static const std::map<std::string, EnvSetter> fields{
        {"taxonomy_depth", size_field(&EnvironmentConfig::taxonomy_depth)},
        {"taxonomy_branching", size_field(&EnvironmentConfig::taxonomy_branching)},
        {"clusters", size_field(&EnvironmentConfig::clusters)},
        {"critical_clusters", size_field(&EnvironmentConfig::critical_clusters)},
        {"situation_count", size_field(&EnvironmentConfig::situation_count)},
        {"docs_per_situation", size_field(&EnvironmentConfig::docs_per_situation)},
        {"cluster_overlap", real_field(&EnvironmentConfig::cluster_overlap)},
        {"variant_rate", real_field(&EnvironmentConfig::variant_rate)},
        {"good_docs", size_field(&EnvironmentConfig::good_docs)},
        {"good_prob", real_field(&EnvironmentConfig::good_prob)},
        {"poor_prob_min", real_field(&EnvironmentConfig::poor_prob_min)},
        {"poor_prob_max", real_field(&EnvironmentConfig::poor_prob_max)},
        {"drift_iteration", size_field(&EnvironmentConfig::drift_iteration)},
        {"decoy_prob", real_field(&EnvironmentConfig::decoy_prob)},
        {"decoy_prior_wins", size_field(&EnvironmentConfig::decoy_prior_wins)},
    };
    return fields;
}

const std::array<std::string, 3> kAlphaKeys{"alpha_location", "alpha_time", "alpha_social"};
const std::array<std::string, 3> kTaxonomyKeys{"location_taxonomy", "time_taxonomy", "social_taxonomy"};

std::size_t line_of(const Section& s, const std::string& key) {
    for (const auto& e : s.entries) {
        if (e.key == key) return e.line;
    }
    return s.line;
}

void apply_environment(Parser& p, const Section& s, RunConfig& cfg) {
    const auto& fields = environment_fields();
    for (const auto& e : s.entries) {
        if (const auto it = fields.find(e.key); it != fields.end()) {
            it->second(p, e, cfg.environment);
            continue;
        }
        if (const auto a = std::find(kAlphaKeys.begin(), kAlphaKeys.end(), e.key); a != kAlphaKeys.end()) {
            if (auto v = p.real(e)) cfg.weights.alpha[a - kAlphaKeys.begin()] = *v;
            continue;
        }
        if (const auto t = std::find(kTaxonomyKeys.begin(), kTaxonomyKeys.end(), e.key); t != kTaxonomyKeys.end()) {
            cfg.taxonomy_paths[t - kTaxonomyKeys.begin()] = e.value;
            continue;
        }
        if (e.key == "critical_seed") {
            cfg.critical_seed_path = e.value;
            continue;
        }
        p.issue(e.line, "unknown key '" + e.key + "' in [environment]");
    }
    try {
        cfg.environment.validate();
    } catch (const Error& err) {
        // Messages read "environment.<field>: ...".
        const std::string msg = err.what();
        const auto dot = msg.find('.');
        const auto colon = msg.find(':');
        const auto field = dot < colon && colon != std::string::npos ? msg.substr(dot + 1, colon - dot - 1) : "";
        p.issue(line_of(s, field), msg);
    }
    try {
        cfg.weights.validate();
    } catch (const Error& err) {
        p.issue(s.line, std::string("similarity weights: ") + err.what());
    }
    const auto set = std::count_if(cfg.taxonomy_paths.begin(), cfg.taxonomy_paths.end(),
                                   [](const std::string& path) { return !path.empty(); });
    if (set != 0 && set != 3) {
        p.issue(s.line, "location_taxonomy, time_taxonomy and social_taxonomy must be given together");
    }
}

void apply_run(Parser& p, const Section& s, RunConfig& cfg) {
    for (const auto& e : s.entries) {
        if (e.key == "iterations") {
            if (auto v = p.integer<std::uint64_t>(e)) {
                if (*v < 1) p.issue(e.line, "iterations must be >= 1");
                cfg.run.iterations = *v;
            }
        } else if (e.key == "list_size") {
            if (auto v = p.integer<std::size_t>(e)) {
                if (*v < 1) p.issue(e.line, "list_size must be >= 1");
                cfg.run.list_size = *v;
            }
        } else if (e.key == "checkpoint_interval") {
            if (auto v = p.integer<std::uint64_t>(e)) {
                if (*v < 1) p.issue(e.line, "checkpoint_interval must be >= 1");
                cfg.run.checkpoint_interval = *v;
            }
        } else if (e.key == "seeds") {
            if (auto v = p.integer_list<std::uint64_t>(e)) {
                auto sorted = *v;
                std::sort(sorted.begin(), sorted.end());
                if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
                    p.issue(e.line, "seeds: duplicate seed");
                }
                cfg.seeds = std::move(*v);
            }
        } else {
            p.issue(e.line, "unknown key '" + e.key + "' in [run]");
        }
    }
}

// Keys each policy kind accepts besides `policy`.
const std::map<std::string, std::set<std::string>>& policy_kinds() {
    static const std::map<std::string, std::set<std::string>> kinds{
        {"exploit", {}},
        {"eps_greedy", {"epsilon"}},
        {"eps_beginning", {"epsilon", "total_iterations"}},
        {"eps_decreasing_ratio", {"epsilon0"}},
        {"eps_decreasing_step", {"epsilon", "step", "period", "epsilon_floor"}},
        {"eg", {"eg_candidates", "eg_floor", "eg_rate"}},
        {"contextual", {"threshold_b"}},
    };
    return kinds;
}

const std::set<std::string> kPolicyKeys{"policy",        "epsilon",       "epsilon0", "total_iterations",
                                        "step",          "period",        "eg_candidates", "eg_floor",
                                        "eg_rate",       "threshold_b",   "epsilon_floor"};

void apply_policy(Parser& p, const Section& s, const std::string& name, RunConfig& cfg) {
    const std::string label = "[" + s.name + "]";
    const Entry* kind_entry = nullptr;
    for (const auto& e : s.entries) {
        if (e.key == "policy") kind_entry = &e;
    }
    if (!kind_entry) {
        p.issue(s.line, label + ": missing key 'policy'");
        return;
    }
    const auto& kinds = policy_kinds();
    const auto kind = kinds.find(kind_entry->value);
    if (kind == kinds.end()) {
        std::string known;
        for (const auto& [k, _] : kinds) known += (known.empty() ? "" : ", ") + k;
        p.issue(kind_entry->line, "policy: unknown kind '" + kind_entry->value + "' (expected one of " + known + ")");
        return;
    }

    std::map<std::string, const Entry*> params;
    bool ok = true;
    for (const auto& e : s.entries) {
        if (e.key == "policy") continue;
        if (!kPolicyKeys.contains(e.key)) {
            p.issue(e.line, "unknown key '" + e.key + "' in " + label);
            ok = false;
        } else if (!kind->second.contains(e.key)) {
            p.issue(e.line, "key '" + e.key + "' does not apply to policy " + kind->first);
            ok = false;
        } else {
            params[e.key] = &e;
        }
    }
    const auto real = [&](const std::string& key, double fallback) {
        const auto it = params.find(key);
        if (it == params.end()) return fallback;
        const auto v = p.real(*it->second);
        ok = ok && v.has_value();
        return v.value_or(fallback);
    };
    const auto count = [&](const std::string& key, std::uint64_t fallback) {
        const auto it = params.find(key);
        if (it == params.end()) return fallback;
        const auto v = p.integer<std::uint64_t>(*it->second);
        ok = ok && v.has_value();
        return v.value_or(fallback);
    };

    PolicyConfig pc;
    const auto& k = kind->first;
    if (k == "exploit") {
        pc = policy::Exploit{};
    } else if (k == "eps_greedy") {
        pc = policy::EpsGreedy{real("epsilon", policy::EpsGreedy{}.epsilon)};
    } else if (k == "eps_beginning") {
        pc = policy::EpsBeginning{real("epsilon", policy::EpsBeginning{}.epsilon),
                                  count("total_iterations", cfg.run.iterations)};
    } else if (k == "eps_decreasing_ratio") {
        pc = policy::EpsDecreasingRatio{real("epsilon0", policy::EpsDecreasingRatio{}.epsilon0)};
    } else if (k == "eps_decreasing_step") {
        const policy::EpsDecreasingStep d;
        pc = policy::EpsDecreasingStep{real("epsilon", d.start), real("step", d.step), count("period", d.period),
                                       real("epsilon_floor", d.floor)};
    } else if (k == "eg") {
        policy::ExpGradient eg;
        if (const auto it = params.find("eg_candidates"); it != params.end()) {
            if (auto v = p.real_list(*it->second)) {
                eg.candidates = std::move(*v);
            } else {
                ok = false;
            }
        }
        eg.floor = real("eg_floor", eg.floor);
        eg.rate = real("eg_rate", eg.rate);
        pc = std::move(eg);
    } else {
        const double b = real("threshold_b", policy::Contextual{}.threshold_b);
        const double max_b = cfg.weights.total();
        if (!(b > 0.0) || b > max_b) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "threshold_b = %g outside (0, %g], the sum of the similarity weights",
                          b, max_b);
            p.issue(line_of(s, "threshold_b"), buf);
            ok = false;
        }
        pc = policy::Contextual{b};
    }
    if (!ok) return;
    try {
        validate(pc);
    } catch (const Error& err) {
        p.issue(s.line, label + ": " + err.what());
        return;
    }
    cfg.policies.push_back({name, std::move(pc)});
}

void apply_sweep(Parser& p, const Section& s, RunConfig& cfg) {
    SweepConfig sw;
    for (const auto& e : s.entries) {
        if (e.key == "sample_size") {
            if (auto v = p.integer<std::size_t>(e)) sw.sample_size = *v;
        } else if (e.key == "b_min") {
            if (auto v = p.real(e)) sw.b_min = *v;
        } else if (e.key == "b_max") {
            if (auto v = p.real(e)) sw.b_max = *v;
        } else if (e.key == "b_step") {
            if (auto v = p.real(e)) sw.b_step = *v;
        } else {
            p.issue(e.line, "unknown key '" + e.key + "' in [sweep]");
        }
    }
    if (sw.sample_size == 0) {
        p.issue(line_of(s, "sample_size"), "[sweep] sample_size: the gold sample is empty");
    } else if (sw.sample_size < 2) {
        p.issue(line_of(s, "sample_size"), "[sweep] sample_size: the gold sample needs at least two situations");
    } else if (sw.sample_size > cfg.environment.situation_count) {
        p.issue(line_of(s, "sample_size"), "[sweep] sample_size exceeds environment situation_count (" +
                                               std::to_string(cfg.environment.situation_count) + ")");
    }
    const double max_b = cfg.weights.total();
    if (sw.b_min < 0.0) p.issue(line_of(s, "b_min"), "[sweep] b_min must be >= 0");
    if (sw.b_max > max_b + 1e-9) {
        p.issue(line_of(s, "b_max"), "[sweep] b_max exceeds the sum of the similarity weights");
    }
    if (sw.b_max < sw.b_min) p.issue(line_of(s, "b_max"), "[sweep] b_max must be >= b_min");
    if (!(sw.b_step > 0.0)) p.issue(line_of(s, "b_step"), "[sweep] b_step must be > 0");
    cfg.sweep = sw;
}

std::pair<RunConfig, std::vector<ConfigIssue>> parse_impl(std::string_view text, const std::string& file) {
    Parser p(file);
    RunConfig cfg;
    const auto sections = p.sections(text);

    // Environment and run first: policy defaults and bounds depend on them.
    const Section* env = nullptr;
    const Section* run = nullptr;
    for (const auto& s : sections) {
        if (s.name == "environment") env = &s;
        if (s.name == "run") run = &s;
    }
    if (env) apply_environment(p, *env, cfg);
    if (run) apply_run(p, *run, cfg);

    for (const auto& s : sections) {
        if (s.name == "environment" || s.name == "run") continue;
        if (s.name == "sweep") {
            apply_sweep(p, s, cfg);
        } else if (s.name.starts_with("policy.")) {
            const auto name = s.name.substr(7);
            if (name.empty() || detail::has_whitespace(name) || name.find(',') != std::string::npos) {
                p.issue(s.line, "policy name must be non-empty, without spaces or commas");
                continue;
            }
            apply_policy(p, s, name, cfg);
        } else {
            p.issue(s.line, "unknown section [" + s.name + "]");
        }
    }
    const bool any_policy = std::any_of(sections.begin(), sections.end(),
                                        [](const Section& s) { return s.name.starts_with("policy."); });
    if (!any_policy && !cfg.sweep) p.issue(0, "no [policy.<name>] or [sweep] section");
    return {std::move(cfg), std::move(p.issues)};
}

std::string resolve(const std::filesystem::path& base, const std::string& path) {
    const std::filesystem::path p(path);
    return (p.is_absolute() ? p : base / p).lexically_normal().generic_string();
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::string& file) {
    auto [cfg, issues] = parse_impl(text, file);
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

Environment Bundle::environment(std::uint64_t seed) const {
    auto cfg = config.environment;
    cfg.seed = seed;
    return generate_environment(cfg, &model, expert_critical);
}

Bundle load_bundle(const std::string& path) {
    const auto text = detail::read_file(path);
    auto [cfg, issues] = parse_impl(text, path);
    const auto base = std::filesystem::path(path).parent_path();

    std::vector<std::optional<Taxonomy>> taxonomies(3);
    if (!cfg.taxonomy_paths[0].empty() && !cfg.taxonomy_paths[1].empty() && !cfg.taxonomy_paths[2].empty()) {
        for (auto dim : kDimensions) {
            const auto file = resolve(base, cfg.taxonomy_paths[static_cast<int>(dim)]);
            try {
                taxonomies[static_cast<int>(dim)] = Taxonomy::parse(detail::read_file(file), dim);
            } catch (const TaxonomyParseError& err) {
                for (const auto& d : err.diagnostics()) issues.push_back({file, d.line, d.message});
            } catch (const Error& err) {
                issues.push_back({file, 0, err.what()});
            }
        }
    } else if (issues.empty()) {
        const auto& e = cfg.environment;
        for (auto dim : kDimensions) {
            taxonomies[static_cast<int>(dim)] = balanced_taxonomy(dim, e.taxonomy_depth, e.taxonomy_branching);
        }
    }

    const bool have_model = std::all_of(taxonomies.begin(), taxonomies.end(), [](const auto& t) { return t.has_value(); });
    std::optional<ContextModel> model;
    if (have_model) {
        try {
            model.emplace(std::move(*taxonomies[0]), std::move(*taxonomies[1]), std::move(*taxonomies[2]),
                          cfg.weights);
        } catch (const Error& err) {
            issues.push_back({path, 0, err.what()});
        }
    }

    std::vector<Situation> expert;
    if (!cfg.critical_seed_path.empty()) {
        const auto file = resolve(base, cfg.critical_seed_path);
        try {
            expert = parse_situations(detail::read_file(file), model ? &*model : nullptr);
        } catch (const SituationParseError& err) {
            for (const auto& d : err.diagnostics()) issues.push_back({file, d.line, d.message});
        } catch (const Error& err) {
            issues.push_back({file, 0, err.what()});
        }
    }

    if (!issues.empty()) throw ConfigError(std::move(issues));
    return Bundle{path, std::move(cfg), std::move(*model), std::move(expert)};
}

}  // namespace sitrec
