/*
 * Copyright 2026 The partsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "partsim/cli.hpp"

namespace {

void add_common_flags(CLI::App* cmd, partsim::RunSpec& spec, std::string& stagger,
                      std::string& weight_mode, std::string& producer_consumer,
                      std::string& write_outputs) {
    cmd->add_option("--model", spec.model_path, "model CSV path")->required();
    cmd->add_option("--machine", spec.machine_path, "machine config path")->required();
    cmd->add_option("--partitions", spec.partitions, "number of partitions");
    cmd->add_option("--images", spec.images, "images per pass across all partitions");
    cmd->add_option("--passes", spec.passes, "passes over the model");
    cmd->add_option("--stagger", stagger, "none|uniform|random")
        ->check(CLI::IsMember({"none", "uniform", "random"}));
    cmd->add_option("--seed", spec.stagger.seed, "seed for random stagger");
    cmd->add_option("--weight-mode", weight_mode, "fit-once|reload")
        ->check(CLI::IsMember({"fit-once", "reload"}));
    cmd->add_option("--producer-consumer", producer_consumer, "on|off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--write-outputs", write_outputs, "always|fit")
        ->check(CLI::IsMember({"always", "fit"}));
    cmd->add_option("--dt", spec.dt, "simulation step in seconds (default: auto)");
    cmd->add_option("--workspace-factor", spec.workspace_factor,
                    "per-partition workspace scale for capacity checks");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partsim - bandwidth-contention simulator for partitioned CNN inference"};
    app.require_subcommand(1);

    partsim::RunSpec spec;
    std::string stagger = "uniform";
    std::string weight_mode = "fit-once";
    std::string producer_consumer = "off";
    std::string write_outputs = "always";
    std::string mode = "partitions";

    auto* cost = app.add_subcommand("cost", "per-layer cost report and weight traffic ratio");
    add_common_flags(cost, spec, stagger, weight_mode, producer_consumer, write_outputs);
    cost->add_option("--out", spec.out_path, "write per-layer cost CSV here");

    auto* simulate = app.add_subcommand("simulate", "run one simulation and print summary stats");
    add_common_flags(simulate, spec, stagger, weight_mode, producer_consumer, write_outputs);
    simulate->add_option("--trace", spec.trace_path, "write bandwidth trace CSV here");

    auto* sweep = app.add_subcommand("sweep", "sweep partition count or core count");
    add_common_flags(sweep, spec, stagger, weight_mode, producer_consumer, write_outputs);
    sweep->add_option("--mode", mode, "partitions|cores")
        ->check(CLI::IsMember({"partitions", "cores"}));
    sweep->add_option("--values", spec.values, "sweep values (comma separated)")
        ->delimiter(',');
    sweep->add_option("--out", spec.out_path, "write sweep CSV here");

    auto* validate = app.add_subcommand("validate", "chain and DRAM-capacity validation");
    add_common_flags(validate, spec, stagger, weight_mode, producer_consumer, write_outputs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (cost->parsed()) spec.command = partsim::Command::cost;
    if (simulate->parsed()) spec.command = partsim::Command::simulate;
    if (sweep->parsed()) spec.command = partsim::Command::sweep;
    if (validate->parsed()) spec.command = partsim::Command::validate;

    spec.stagger.mode = stagger == "none"      ? partsim::StaggerMode::none
                        : stagger == "uniform" ? partsim::StaggerMode::uniform
                                               : partsim::StaggerMode::random;
    spec.policy.weight_mode = weight_mode == "fit-once" ? partsim::WeightMode::fit_once
                                                        : partsim::WeightMode::reload_per_image;
    spec.policy.producer_consumer = producer_consumer == "on";
    spec.policy.write_outputs_always = write_outputs == "always";
    spec.mode = mode == "cores" ? partsim::SweepMode::cores : partsim::SweepMode::partitions;

    if (simulate->parsed() && simulate->count("--dt") > 0 && spec.dt <= 0.0) {
        std::cerr << "error: --dt must be > 0\n";
        return 2;
    }

    return partsim::run_command(spec, std::cout, std::cerr);
}
