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

#include <cstdint>
#include <string>
#include <vector>

#include "gentrify/geo.hpp"
#include "gentrify/image.hpp"
#include "gentrify/ingest.hpp"

namespace gentrify::synth {

/// Synthetic-city generator settings. Generation is a pure function of
/// (seed, config): repeated runs produce byte-identical artifacts.
struct SynthConfig {
    std::uint64_t seed = 1;
    int n_tracts = 60;        // >= 4, laid out on a square-ish grid
    int k = 100;              // bag size
    double rho_gentrifying = 0.15; // positive-pair fraction in gentrifying bags
    double rho_non = 0.02;         // ... in non-gentrifying bags
    int image_side = 64;
    double nuisance_level = 0.6; // [0,1]; scales brightness jitter, vehicles,
                                 // and the per-bag shared brightness bias
    int step1_pairs = 2000;      // balanced 50/50, disjoint from bag pairs
};

void validate_config(const SynthConfig& config);

/// One rendered pair plus the generator's own edit log (the oracle for
/// change localization).
struct ScenePair {
    ImageTensor earlier;
    ImageTensor later;
    int label = 0;
    bool has_edit = false;
    int edit_x0 = 0, edit_y0 = 0, edit_x1 = 0, edit_y1 = 0; // half-open box
    std::string edit_kind; // add | remove | recolor
};

/// Neighborhood-level rendering bias shared by every pair of a bag: capture
/// conditions, traffic, season and built density that mean pooling cannot
/// average away.
struct SceneBias {
    double tint_later_r = 0.0; // capture tint of the later session
    double tint_later_g = 0.0;
    double tint_later_b = 0.0;
    double tint_earlier_r = 0.0; // capture tint of the earlier session
    double tint_earlier_g = 0.0;
    double tint_earlier_b = 0.0;
    int extra_vehicles = 0;   // on top of the per-pair draw
    int extra_billboards = 0; // signage on facades, later session only
    int extra_canopy = 0;     // tree canopy growing over facades by the later capture
    double brick_r = 0.0;     // architecture tone drift, both sessions equally
    double brick_g = 0.0;
    double brick_b = 0.0;
    double season = 0.0;      // [0,1]: vegetation browning in the later session
    /// Probability that a passing bus / scaffolding band blocks part of the
    /// later capture. Deployment-time nuisance: bag sampling draws it, the
    /// weak-label training set does not (out-of-distribution by design).
    double occlusion_rate = 0.0;
    /// Per-building probability of a weathered repaint (brick-palette tone
    /// shift) by the later capture: a decade of aging, not meaningful change.
    double weathering_rate = 0.0;
    int building_lo = 2;      // per-scene building count range (inclusive)
    int building_hi = 5;
};

/// Renders a base scene (road band, flat-color buildings, vegetation
/// speckle). change=true applies one structural building edit; nuisance
/// edits (brightness/tint jitter, vehicles on the road band) appear only
/// when nuisance_level > 0.
ScenePair render_scene_pair(std::uint64_t seed, bool change, const SynthConfig& config,
                            const SceneBias& bias = {});

/// Renders and writes the two PNGs under images_dir, returning the pair
/// metadata. image_id_prefix names the files; location/heading are stamped
/// into the metadata.
std::pair<ingest::TimedPair, ingest::PairLabel> gen_scene_pair(std::uint64_t seed, bool change,
                                                               const SynthConfig& config,
                                                               const std::string& images_dir,
                                                               const std::string& image_id_prefix,
                                                               const geo::GeoCoordinate& location,
                                                               double heading,
                                                               const SceneBias& bias = {});

struct PlantedPositive {
    std::string tract_id;
    std::string pair_id;
    std::string edit_kind;
};

struct GenResult {
    std::size_t n_tracts = 0;
    std::size_t n_bag_pairs = 0;
    std::size_t n_step1_pairs = 0;
    std::size_t n_planted = 0;
};

/// Writes the full synthetic city under out_dir: images/, archive.jsonl,
/// step1_pairs.jsonl, containers.jsonl, tracts.geojson, labels.csv and
/// oracle.jsonl (the planted positives). Output formats match the ingest
/// module's manifests, so the downstream pipeline is format-blind.
GenResult gen_city(const SynthConfig& config, const std::string& out_dir);

std::vector<PlantedPositive> read_oracle_jsonl(const std::string& path);

} // namespace gentrify::synth
