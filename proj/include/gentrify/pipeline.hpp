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

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gentrify/encoder.hpp"
#include "gentrify/fetch.hpp"
#include "gentrify/mil.hpp"
#include "gentrify/synthcity.hpp"

namespace gentrify::pipeline {

struct IngestPaths {
    std::string archive_manifest;
    std::string permits_csv;
    std::string businesses_csv;
    std::string tracts_geojson;
    std::string roads_geojson;
    std::string labels_csv;
    std::string naics_mapping; // optional; built-in defaults otherwise
    std::string cpi_table;
};

struct IngestConfig {
    double spacing_m = 75.0; // road sampling interval
    double radius_m = 15.0;  // event-to-image matching radius
    double min_value = 60'000.0;
    int base_year = 2020;
    std::size_t k_min = 100;
    std::size_t k_max = 200;
    std::uint64_t seed = 17;
};

struct SplitConfig {
    double ratio = 0.7;
    std::uint64_t seed = 13;
};

/// Everything a run needs; JSON file + flag overrides. Seeds are explicit
/// (never wall clock), so identical configs reproduce identical artifacts.
struct PipelineConfig {
    std::string city = "synthcity";
    std::string work_dir = "work";
    IngestPaths paths;
    synth::SynthConfig synth;
    enc::EncoderConfig encoder;
    mil::MilConfig mil;
    IngestConfig ingest;
    SplitConfig split;
    fetch::FetchConfig fetch;

    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig from_json_file(const std::string& path);
    [[nodiscard]] nlohmann::json to_json() const;
};

inline const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = {"ingest",      "synth",   "train-step1",
                                                   "embed",       "train-step2", "eval",
                                                   "analyze",     "map",     "fetch"};
    return names;
}

/// Runs one stage; reads prior artifacts from the work dir, writes its own.
/// Idempotent per stage. Throws ValidationError (CLI exit 1) or Error (exit
/// 2). Returns a machine-readable summary.
nlohmann::json run_stage(const PipelineConfig& config, const std::string& stage);

} // namespace gentrify::pipeline
