// irrevflow <subcommand> --config cfg.json --out dir [--seed k]
// Exit status: 0 all checks pass, 1 a check failed, 2 configuration error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "irrevflow/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Lyapunov operator, irreversible semigroup and time observable experiments"};
    app.set_version_flag("--version", irrevflow::version);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    for (const auto& name : irrevflow::kind_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "overrides the configuration seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    irrevflow::ExperimentConfig cfg;
    irrevflow::RunReport report;
    try {
        const auto kind = irrevflow::parse_kind(app.get_subcommands().front()->get_name());
        std::ifstream in(config_path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw irrevflow::config_error(std::string("config: invalid JSON: ") + e.what());
        }
        cfg = irrevflow::parse_config(j, kind);
        if (seed) cfg.seed = cfg.state.seed = *seed;
        report = irrevflow::run(cfg);
    } catch (const irrevflow::config_error& e) {
        std::cerr << "irrevflow: configuration error: " << e.what() << '\n';
        return 2;
    }

    try {
        irrevflow::write_outputs(report, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "irrevflow: " << e.what() << '\n';
        return 2;
    }
    for (const auto& c : report.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << irrevflow::format_double(c.value) << ' '
                  << c.relation << ' ' << irrevflow::format_double(c.tolerance) << '\n';
    }
    std::cout << (report.passed() ? "all checks passed" : "some checks failed") << " ("
              << report.wall_time << " s)\n";
    return report.passed() ? 0 : 1;
}
