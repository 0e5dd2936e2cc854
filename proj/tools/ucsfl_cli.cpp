// Copyright (c) 2026 The ucsfl Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "ucsfl/experiment.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("-c,--config", opts.config_path, "key = value configuration file");
    cmd->add_option("-s,--set", opts.overrides, "override a setting, e.g. --set network.seed=3")->take_all();
    cmd->add_option("-o,--out", opts.out_dir, "output directory (default: $UCSFL_OUTPUT_DIR or .)");
}

ucsfl::KeyValueConfig load(const CommonOptions& opts) {
    ucsfl::KeyValueConfig kv;
    if (!opts.config_path.empty()) kv.merge_file(opts.config_path);
    for (const auto& o : opts.overrides) kv.set(o);
    return kv;
}

std::string output_dir(const CommonOptions& opts) {
    if (!opts.out_dir.empty()) return opts.out_dir;
    if (const char* env = std::getenv("UCSFL_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

using Runner = ucsfl::OutputFiles (*)(const ucsfl::ExperimentConfig&);

int run(const CommonOptions& opts, Runner runner) {
    const ucsfl::KeyValueConfig kv = load(opts);
    const ucsfl::ExperimentConfig cfg = ucsfl::to_experiment(kv);
    ucsfl::OutputFiles files = runner(cfg);
    files["effective_config.txt"] = kv.to_text();
    const std::string dir = output_dir(opts);
    ucsfl::write_outputs(dir, files);
    for (const auto& [name, _] : files) std::cout << dir << '/' << name << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ucsfl: split federated learning over user-centric cell-free MIMO"};
    app.require_subcommand(1);

    CommonOptions nbcd_opts, mais_opts, sweep_opts, conv_opts, check_opts;
    auto* nbcd = app.add_subcommand("run-nbcd", "one short-term power/beamforming solve with its trace");
    add_common(nbcd, nbcd_opts);
    auto* mais = app.add_subcommand("run-mais", "split/cluster search per sweep point, with baselines");
    add_common(mais, mais_opts);
    auto* sweep = app.add_subcommand("run-latency-sweep", "fixed strategies and baselines over a sweep");
    add_common(sweep, sweep_opts);
    auto* conv = app.add_subcommand("run-convergence", "quadratic-task rounds against the bound");
    add_common(conv, conv_opts);
    auto* check = app.add_subcommand("validate-config", "parse, validate and print the effective configuration");
    add_common(check, check_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*nbcd) return run(nbcd_opts, &ucsfl::run_nbcd);
        if (*mais) return run(mais_opts, &ucsfl::run_mais);
        if (*sweep) return run(sweep_opts, &ucsfl::run_latency_sweep);
        if (*conv) return run(conv_opts, &ucsfl::run_convergence);
        if (*check) {
            const ucsfl::KeyValueConfig kv = load(check_opts);
            (void)ucsfl::to_experiment(kv);
            std::cout << kv.to_text();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
