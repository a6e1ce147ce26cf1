#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sitrec/environment.hpp"
#include "sitrec/simulator.hpp"

namespace sitrec {

/// A problem in a configuration bundle, located by file and line.
struct ConfigIssue {
    std::string file;
    std::size_t line = 0;  // 0 when not tied to a line
    std::string message;
};

/// "file:line: message" (or "file: message").
std::string to_string(const ConfigIssue& issue);

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct SweepConfig {
    std::size_t sample_size = 60;
    double b_min = 0.0;
    double b_max = 3.0;
    double b_step = 0.1;
};

/// Contents of a run-config file.
///
///     [environment]   EnvironmentConfig fields, alpha_location / alpha_time /
///                     alpha_social, location_taxonomy / time_taxonomy /
///                     social_taxonomy and critical_seed (paths)
///     [run]           iterations, list_size, checkpoint_interval, seeds
///     [policy.NAME]   policy = exploit | eps_greedy | eps_beginning |
///                     eps_decreasing_ratio | eps_decreasing_step | eg | contextual
///     [sweep]         sample_size, b_min, b_max, b_step
///
/// Paths are relative to the config file.
struct RunConfig {
    EnvironmentConfig environment;
    SimilarityWeights weights;
    std::array<std::string, 3> taxonomy_paths;  // all empty: generated taxonomies
    std::string critical_seed_path;
    RunOptions run;
    std::vector<std::uint64_t> seeds{1};
    std::vector<NamedPolicy> policies;
    std::optional<SweepConfig> sweep;
};

/// Parses config text; `file` labels the issues. Throws ConfigError listing
/// every problem found.
RunConfig parse_run_config(std::string_view text, const std::string& file);

/// A config with its taxonomies and critical-situation seed loaded.
struct Bundle {
    std::string path;
    RunConfig config;
    ContextModel model;
    std::vector<Situation> expert_critical;

    Environment environment(std::uint64_t seed) const;
};

/// Reads the config at `path` and the files it names. Throws ConfigError with
/// the issues of every file involved.
Bundle load_bundle(const std::string& path);

}  // namespace sitrec
