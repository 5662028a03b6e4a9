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

#include "gentrify/common.hpp"

namespace gentrify::eval {

struct Metrics {
    double accuracy = 0.0;
    double balanced_accuracy = 0.0; // (tpr + tnr) / 2
    double recall = 0.0;            // tpr
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;
};

/// Binary confusion metrics. y_true must contain both classes (balanced
/// accuracy is undefined otherwise and the call fails loudly).
Metrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred);

struct SplitResult {
    std::vector<std::size_t> train; // sorted indices
    std::vector<std::size_t> test;
    bool stratified = true; // false when a class had < 2 members
};

/// Stratified split: per-stratum train counts are floored, then the remaining
/// slots (up to round(ratio * n)) go to the largest fractional remainders,
/// ties broken by label order. Deterministic under seed. Classes with < 2
/// members force a plain (unstratified) split with a warning.
SplitResult stratified_split(const std::vector<int>& labels, double ratio, std::uint64_t seed);

/// One row of the report table.
struct ReportRow {
    std::string city;
    std::string model;
    Metrics metrics;
};

/// Plain-text table with columns: Eval City, Model, Acc., Balanced Acc.
std::string format_metrics_table(const std::vector<ReportRow>& rows);

std::string metrics_to_json(const ReportRow& row);

} // namespace gentrify::eval
