// Copyright 2026 The gentrify authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gentrify/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string work_dir;
    std::string mode;
    long long seed = -1;
    bool json_output = false;
};

int run(const std::string& stage, const CommonArgs& args) {
    using gentrify::pipeline::PipelineConfig;
    try {
        PipelineConfig config = args.config_path.empty()
                                    ? PipelineConfig{}
                                    : PipelineConfig::from_json_file(args.config_path);
        if (!args.work_dir.empty()) {
            config.work_dir = args.work_dir;
        }
        if (!args.mode.empty()) {
            config.mil.mode = gentrify::mil::mil_mode_from_string(args.mode);
        }
        if (args.seed >= 0) {
            const auto seed = static_cast<std::uint64_t>(args.seed);
            config.synth.seed = seed;
            config.encoder.seed = gentrify::derive_seed(seed, "encoder");
            config.mil.seed = gentrify::derive_seed(seed, "mil");
            config.split.seed = gentrify::derive_seed(seed, "split");
            config.ingest.seed = gentrify::derive_seed(seed, "ingest");
        }

        const nlohmann::json summary = gentrify::pipeline::run_stage(config, stage);
        if (args.json_output) {
            std::cout << summary.dump(2) << "\n";
        } else if (stage == "eval") {
            std::cout << gentrify::read_file(config.work_dir + "/metrics_table.txt");
        } else {
            std::cout << stage << ": done";
            for (const auto& [key, value] : summary.items()) {
                if (key != "stage") {
                    std::cout << "  " << key << "=" << value.dump();
                }
            }
            std::cout << "\n";
        }
        return 0;
    } catch (const gentrify::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Street-level gentrification detection pipeline"};
    app.require_subcommand(1);

    CommonArgs args;
    struct StageSpec {
        const char* name;
        const char* help;
    };
    const StageSpec stages[] = {
        {"ingest", "Turn permit/business records and a street-view archive into training data"},
        {"synth", "Generate the synthetic oracle city"},
        {"train-step1", "Train the Siamese change detector on weak labels"},
        {"embed", "Cache pair embeddings for all neighborhood containers"},
        {"train-step2", "Train the gated-attention neighborhood classifier"},
        {"eval", "Evaluate on the held-out tracts and print the metrics table"},
        {"analyze", "Export attention-weight curves and extreme evidence pairs"},
        {"map", "Export the label/prediction discrepancy map as GeoJSON"},
        {"fetch", "Download street-view imagery (network; needs fetch.base_url)"},
    };
    for (const auto& spec : stages) {
        auto* sub = app.add_subcommand(spec.name, spec.help);
        sub->add_option("--config", args.config_path, "Pipeline config JSON");
        sub->add_option("--work-dir", args.work_dir, "Artifact directory (overrides config)");
        sub->add_option("--seed", args.seed, "Master seed (overrides all stage seeds)");
        sub->add_option("--mode", args.mode,
                        "MIL mode: full|mean_pool|pretrained_mean_pool|e2e (overrides config)");
        sub->add_flag("--json", args.json_output, "Machine-readable output");
    }

    CLI11_PARSE(app, argc, argv);
    return run(app.get_subcommands().front()->get_name(), args);
}
