#include "sitrec/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sitrec {

namespace {

namespace fs = std::filesystem;

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw Error("error while writing " + path.string());
}

fs::path prepare_output(const std::string& dir) {
    if (dir.empty()) throw Error("--out is required");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
    return fs::path(dir);
}

template <typename Kind>
const NamedPolicy* first_of_kind(const std::vector<NamedPolicy>& policies) {
    for (const auto& p : policies) {
        if (std::holds_alternative<Kind>(p.config)) return &p;
    }
    return nullptr;
}

std::vector<const PolicyRun*> runs_of(const ComparisonTable& table, const std::string& policy) {
    std::vector<const PolicyRun*> out;
    for (const auto& r : table.runs) {
        if (r.policy == policy) out.push_back(&r);
    }
    return out;
}

}  // namespace

int cmd_validate(const std::string& config_path, std::ostream& out) {
    try {
        const auto bundle = load_bundle(config_path);
        const auto& cfg = bundle.config;
        out << config_path << ": " << cfg.policies.size() << " policies, " << cfg.seeds.size() << " seeds"
            << (cfg.sweep ? ", sweep" : "") << '\n';
        out << "0 errors\n";
        return exit_code::ok;
    } catch (const ConfigError& err) {
        for (const auto& issue : err.issues()) out << to_string(issue) << '\n';
        out << err.issues().size() << (err.issues().size() == 1 ? " error\n" : " errors\n");
        return exit_code::validation;
    }
}

std::string format_summary(const RunConfig& cfg, const ComparisonTable& table) {
    std::ostringstream out;
    out << "iterations " << cfg.run.iterations << ", list size " << cfg.run.list_size << ", checkpoint every "
        << cfg.run.checkpoint_interval << "\nseeds";
    for (auto s : cfg.seeds) out << ' ' << s;
    out << "\n\nfinal average CTR\n";

    std::size_t width = 6;
    for (const auto& p : cfg.policies) width = std::max(width, p.name.size());
    std::string best;
    double best_ctr = -1.0;
    for (const auto& p : cfg.policies) {
        const double mean = table.mean_final_ctr(p.name);
        out << "  " << p.name << std::string(width - p.name.size() + 2, ' ') << fixed(mean) << "  "
            << describe(p.config) << "\n    per seed:";
        for (const auto* r : runs_of(table, p.name)) out << ' ' << fixed(r->final_ctr);
        out << '\n';
        if (mean > best_ctr) {
            best_ctr = mean;
            best = p.name;
        }
    }
    out << "\nbest policy: " << best << " (" << fixed(best_ctr) << ")\n";

    const auto* ctx = first_of_kind<policy::Contextual>(cfg.policies);
    const auto* exploit = first_of_kind<policy::Exploit>(cfg.policies);
    if (ctx) {
        const auto runs = runs_of(table, ctx->name);
        double total = 0.0;
        out << "critical-situation growth (" << ctx->name << "):";
        for (const auto* r : runs) {
            out << ' ' << r->critical_growth;
            total += static_cast<double>(r->critical_growth);
        }
        out << " (mean " << fixed(total / static_cast<double>(runs.size()), 1) << ")\n";
    }
    if (ctx && exploit) {
        const double base = table.mean_final_ctr(exploit->name);
        out << ctx->name << " / " << exploit->name << " final CTR factor: "
            << (base > 0.0 ? fixed(table.mean_final_ctr(ctx->name) / base, 3) : std::string("n/a"))
            << "\n    per seed:";
        const auto c = runs_of(table, ctx->name);
        const auto e = runs_of(table, exploit->name);
        for (std::size_t i = 0; i < c.size() && i < e.size(); ++i) {
            out << ' ' << (e[i]->final_ctr > 0.0 ? fixed(c[i]->final_ctr / e[i]->final_ctr, 3) : std::string("n/a"));
        }
        out << '\n';
    }
    return out.str();
}

ComparisonTable cmd_run(const std::string& config_path, const std::string& output_dir,
                        std::optional<std::uint64_t> seed_override, std::ostream& log) {
    auto bundle = load_bundle(config_path);
    auto& cfg = bundle.config;
    if (cfg.policies.empty()) throw ConfigError({{config_path, 0, "run needs at least one [policy.<name>] section"}});
    if (seed_override) cfg.seeds = {*seed_override};
    const auto dir = prepare_output(output_dir);

    auto table = compare_policies(cfg.environment, &bundle.model, bundle.expert_critical, cfg.policies, cfg.seeds,
                                  cfg.run);
    std::ostringstream csv;
    write_comparison_csv(table, csv);
    write_file(dir / "comparison.csv", csv.str());
    const auto summary = format_summary(cfg, table);
    write_file(dir / "summary.txt", summary);
    log << summary;
    return table;
}

SweepResult cmd_sweep(const std::string& config_path, const std::string& output_dir,
                      std::optional<std::uint64_t> seed_override, std::ostream& out) {
    const auto bundle = load_bundle(config_path);
    const auto& cfg = bundle.config;
    if (!cfg.sweep) throw ConfigError({{config_path, 0, "sweep needs a [sweep] section"}});
    const auto dir = prepare_output(output_dir);

    const auto seed = seed_override.value_or(cfg.seeds.front());
    const auto env = bundle.environment(seed);
    const auto gold = env.gold_sample(cfg.sweep->sample_size);
    const auto grid = threshold_grid(cfg.sweep->b_min, cfg.sweep->b_max, cfg.sweep->b_step);
    auto result = threshold_sweep(gold, bundle.model, grid);

    std::ostringstream csv;
    write_sweep_csv(result, csv);
    write_file(dir / "sweep.csv", csv.str());
    const auto& best = result.optimum();
    out << "optimal threshold_b = " << fixed(best.threshold_b, 2) << ", precision = " << fixed(best.precision)
        << " (" << gold.situations.size() << " situations, seed " << seed << ")\n";
    return result;
}

int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    try {
        switch (inv.command) {
            case Command::Validate: return cmd_validate(inv.config_path, out);
            case Command::Run: cmd_run(inv.config_path, inv.output_dir, inv.seed_override, out); break;
            case Command::Sweep: cmd_sweep(inv.config_path, inv.output_dir, inv.seed_override, out); break;
        }
        return exit_code::ok;
    } catch (const ConfigError& e) {
        for (const auto& issue : e.issues()) err << to_string(issue) << '\n';
        return exit_code::validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::runtime;
    }
}

}  // namespace sitrec
