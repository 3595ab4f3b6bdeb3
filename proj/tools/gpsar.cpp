#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "gpsar/pipeline.hpp"

namespace {

struct CliArgs {
    std::string scenario_path;
    std::string out_dir = "out";
    gpsar::RunOptions opts;
};

void add_common_flags(CLI::App* cmd, CliArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.opts.seed_override, "override the scenario seed")
        ->each([&args](const std::string&) { args.opts.has_seed_override = true; });
    cmd->add_option("--workers", args.opts.workers, "worker threads for focusing")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--pad-factor", args.opts.pad_factor, "range-compression zero-pad factor")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--er", args.opts.er_override,
                    "override the soil relative permittivity (>= 1)");
    cmd->add_flag("--truth-trajectory", args.opts.truth_trajectory,
                  "focus on the ground-truth trajectory instead of the estimate");
    cmd->add_flag("--monostatic", args.opts.monostatic,
                  "collapse tx/rx to their midpoint during focusing");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circular SAR ground-penetrating radar simulator and processor"};
    app.require_subcommand(1);

    CliArgs args;
    using Runner = void (*)(const gpsar::Scenario&, const std::string&, const gpsar::RunOptions&);
    const std::pair<const char*, std::pair<const char*, Runner>> stages[] = {
        {"simulate", {"synthesize raw recordings for every aperture", gpsar::run_simulate}},
        {"estimate", {"estimate the platform trajectory from IMU + total station", gpsar::run_estimate}},
        {"focus", {"back-project recordings into a focused image volume", gpsar::run_focus}},
        {"profile", {"extract depth profiles over the configured boxes", gpsar::run_profile}},
        {"hist", {"amplitude histogram of the peak focus plane", gpsar::run_hist}},
        {"detect", {"CFAR detection, grouping and scoring", gpsar::run_detect}},
        {"psf", {"point-spread-function metrics at the volume peak", gpsar::run_psf}},
        {"all", {"run every stage in order", gpsar::run_all}},
    };
    Runner selected = nullptr;
    for (const auto& [name, entry] : stages) {
        CLI::App* cmd = app.add_subcommand(name, entry.first);
        add_common_flags(cmd, args);
        const Runner fn = entry.second;
        cmd->callback([&selected, fn] { selected = fn; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const gpsar::Scenario scenario = gpsar::load_scenario(args.scenario_path);
        selected(scenario, args.out_dir, args.opts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
