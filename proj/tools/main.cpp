#include <iostream>

#include "CLI11.hpp"
#include "sitrec/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Situation-aware exploration/exploitation for document recommendation"};
    app.require_subcommand(1);

    sitrec::CliInvocation inv;
    std::uint64_t seed = 0;

    auto add = [&](const char* name, const char* help, sitrec::Command cmd, bool needs_out) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", inv.config_path, "run-config file")->required()->check(CLI::ExistingFile);
        auto* out = sub->add_option("--out", inv.output_dir, "output directory");
        if (needs_out) out->required();
        sub->add_option("--seed", seed, "replace the configured seeds by this one");
        sub->callback([&inv, sub, cmd, &seed] {
            inv.command = cmd;
            if (sub->count("--seed") > 0) inv.seed_override = seed;
        });
    };
    add("run", "compare the configured policies", sitrec::Command::Run, true);
    add("sweep", "calibrate the similarity threshold", sitrec::Command::Sweep, true);
    add("validate", "check the config, taxonomies and critical seed", sitrec::Command::Validate, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return sitrec::exit_code::validation;
    }
    return sitrec::dispatch(inv, std::cout, std::cerr);
}
