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

#include <map>
#include <string>
#include <vector>

#include "gentrify/geo.hpp"
#include "gentrify/mil.hpp"

namespace gentrify::analysis {

/// Attention weights of one bag in descending order; non-increasing, sums to 1.
std::vector<double> sorted_weight_curve(const mil::Bag& bag, const mil::AttentionParams& params);

struct WeightedPair {
    std::string pair_id;
    double weight = 0.0;
};

struct ExtremePairs {
    std::vector<WeightedPair> top;    // highest weights, descending
    std::vector<WeightedPair> bottom; // lowest weights, ascending
    bool truncated = false;           // K < 2k: both sides hold the whole bag
};

/// The k highest- and k lowest-weight pairs of a bag; ties broken by pair_id.
ExtremePairs extreme_pairs(const mil::Bag& bag, const mil::AttentionParams& params, std::size_t k = 20);

struct DiscrepancyRecord {
    std::string tract_id;
    std::string label;      // gentrifying | non_gentrifying
    std::string prediction; // gentrifying | non_gentrifying
    std::string klass;      // agree_gentrifying | agree_non_gentrifying | discrepancy | miss
};

/// Truth table per tract: discrepancy = labeled non-gentrifying but predicted
/// gentrifying; miss = the reverse. Label and prediction key sets must match.
std::vector<DiscrepancyRecord> discrepancy_classes(const std::map<std::string, std::string>& labels,
                                                   const std::map<std::string, std::string>& predictions);

/// GeoJSON FeatureCollection with tract_id/label/prediction/klass properties
/// plus a "fill" styling hint per class.
std::string export_map(const std::vector<geo::TractPolygon>& tracts,
                       const std::vector<DiscrepancyRecord>& classes);

struct CurveReport {
    // csv rows: tract_id, rank, weight, label
    std::string curves_csv;
    // csv rows: tract_id, label, top10_mass
    std::string summary_csv;
    std::map<std::string, double> top10_mass; // per tract
};

CurveReport curve_report(const std::vector<mil::Bag>& bags, const mil::AttentionParams& params);

/// Line chart of the sorted curves, grouped by label (red = gentrifying,
/// blue = non-gentrifying). Format picked by extension: .svg or .png.
void render_curve_plot(const std::string& path, const std::vector<mil::Bag>& bags,
                       const mil::AttentionParams& params);

} // namespace gentrify::analysis
