// gpelab command line: run scenarios, verify invariant suites, describe
// builtin systems.  Exit codes: 0 ok, 1 failed checks, 2 parse error,
// 3 validation failure, 4 resource cap, 5 internal error.

#include "gpelab/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonFlags {
    std::string out_dir;
    double tol = -1;
    double cap_cells = -1;
    double cap_bits = -1;
    double seed = -1;

    void apply(gpe::Scenario& sc) const {
        if (!out_dir.empty()) sc.out_dir = out_dir;
        if (tol > 0) sc.tolerance = tol;
        if (cap_cells > 0) sc.cap_cells = static_cast<std::uint64_t>(cap_cells);
        if (cap_bits > 0) sc.cap_bits = static_cast<std::size_t>(cap_bits);
        if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
    }
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--out", flags.out_dir, "output directory (overrides the scenario)");
    cmd->add_option("--tol", flags.tol, "tolerance override");
    cmd->add_option("--cap-cells", flags.cap_cells, "cell-count cap override");
    cmd->add_option("--cap-bits", flags.cap_bits, "coordinate bit-length cap override");
    cmd->add_option("--seed", flags.seed, "sample seed override");
}

int describe_system(const std::string& name) {
    if (name == "billiard-square") {
        gpe::print_table(std::cout, gpe::BilliardTable::unit_square());
        return gpe::kOk;
    }
    if (name == "billiard-triangle") {
        gpe::print_table(std::cout, gpe::BilliardTable::right_triangle());
        return gpe::kOk;
    }
    auto it = gpe::builtin_systems().find(name);
    if (it == gpe::builtin_systems().end()) {
        std::cerr << "unknown system: " << name << "\navailable:";
        for (const auto& [key, fn] : gpe::builtin_systems()) std::cerr << " " << key;
        std::cerr << " billiard-square billiard-triangle\n";
        return gpe::kParseError;
    }
    gpe::GpeSystem g = it->second();
    gpe::print_gpe(std::cout, g);
    std::cout << "# validation: " << (g.validate().ok() ? "ok" : "FAILED") << "\n";
    return gpe::kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact polygon-exchange and billiard growth laboratory"};
    app.require_subcommand(1);

    std::string scenario_path, system_name;
    CommonFlags run_flags, verify_flags;

    CLI::App* run_cmd = app.add_subcommand("run", "run a scenario and write its artifacts");
    run_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    add_common_flags(run_cmd, run_flags);

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the invariant suite for a scenario");
    verify_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    add_common_flags(verify_cmd, verify_flags);

    CLI::App* describe_cmd = app.add_subcommand("describe", "print a builtin system");
    describe_cmd->add_option("name", system_name, "system name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (describe_cmd->parsed()) return describe_system(system_name);

        gpe::Scenario sc;
        try {
            sc = gpe::parse_scenario_file(scenario_path);
        } catch (const gpe::ParseError& e) {
            std::cerr << "parse error: " << e.what() << "\n";
            return gpe::kParseError;
        }

        if (run_cmd->parsed()) {
            run_flags.apply(sc);
            gpe::RunOutcome outcome = gpe::run_scenario(sc);
            for (const auto& f : outcome.written) std::cout << "wrote " << f << "\n";
            if (!outcome.message.empty()) std::cerr << outcome.message << "\n";
            return outcome.exit_code;
        }

        verify_flags.apply(sc);
        gpe::VerifyReport report = gpe::verify_scenario(sc);
        for (const auto& check : report.checks) {
            std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name;
            if (!check.pass && !check.detail.empty()) std::cout << " — " << check.detail;
            std::cout << "\n";
        }
        return report.all_pass() ? gpe::kOk : gpe::kCheckFailed;
    } catch (const gpe::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return gpe::kParseError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return gpe::kValidationFailed;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return gpe::kInternalError;
    }
}
