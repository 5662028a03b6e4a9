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

#include "gentrify/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace gentrify::eval {

Metrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw ValidationError("compute_metrics: length mismatch");
    }
    if (y_true.empty()) {
        throw ValidationError("compute_metrics: empty input");
    }
    Metrics m;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if ((y_true[i] != 0 && y_true[i] != 1) || (y_pred[i] != 0 && y_pred[i] != 1)) {
            throw ValidationError("compute_metrics: labels must be 0 or 1");
        }
        if (y_true[i] == 1) {
            y_pred[i] == 1 ? ++m.tp : ++m.fn;
        } else {
            y_pred[i] == 1 ? ++m.fp : ++m.tn;
        }
    }
    const long pos = m.tp + m.fn;
    const long neg = m.tn + m.fp;
    if (pos == 0 || neg == 0) {
        throw ValidationError("compute_metrics: balanced accuracy is undefined when y_true has a single class");
    }
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(pos + neg);
    const double tpr = static_cast<double>(m.tp) / static_cast<double>(pos);
    const double tnr = static_cast<double>(m.tn) / static_cast<double>(neg);
    m.balanced_accuracy = (tpr + tnr) / 2.0;
    m.recall = tpr;
    return m;
}

SplitResult stratified_split(const std::vector<int>& labels, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ValidationError("split ratio must lie strictly between 0 and 1");
    }
    if (labels.empty()) {
        throw ValidationError("stratified_split: no items");
    }

    std::map<int, std::vector<std::size_t>> strata; // label order = map order
    for (std::size_t i = 0; i < labels.size(); ++i) {
        strata[labels[i]].push_back(i);
    }

    SplitResult result;
    const bool can_stratify = std::all_of(strata.begin(), strata.end(),
                                          [](const auto& s) { return s.second.size() >= 2; });
    if (!can_stratify) {
        std::fprintf(stderr, "warning: a class has < 2 members; falling back to a plain split\n");
        result.stratified = false;
        std::vector<std::size_t> order(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            order[i] = i;
        }
        Rng rng(derive_seed(seed, "plain-split"));
        rng.shuffle(order);
        const auto n_train = static_cast<std::size_t>(
            std::llround(ratio * static_cast<double>(labels.size())));
        result.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        result.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    } else {
        const auto total_train = static_cast<std::size_t>(
            std::llround(ratio * static_cast<double>(labels.size())));
        struct StratumPlan {
            int label;
            std::vector<std::size_t> order;
            std::size_t take;
            double remainder;
        };
        std::vector<StratumPlan> plans;
        std::size_t taken = 0;
        for (auto& [label, idx] : strata) {
            Rng rng(derive_seed(seed, "stratum-" + std::to_string(label)));
            rng.shuffle(idx);
            const double exact = ratio * static_cast<double>(idx.size());
            auto take = static_cast<std::size_t>(std::floor(exact + 1e-9));
            take = std::min(take, idx.size() - 1); // keep at least one test item per stratum
            plans.push_back({label, idx, take, exact - std::floor(exact + 1e-9)});
            taken += take;
        }
        // Hand the remaining train slots to the largest remainders (label
        // order breaks ties via stable_sort over the ordered map).
        std::vector<std::size_t> by_remainder(plans.size());
        for (std::size_t i = 0; i < plans.size(); ++i) {
            by_remainder[i] = i;
        }
        std::stable_sort(by_remainder.begin(), by_remainder.end(), [&plans](std::size_t a, std::size_t b) {
            return plans[a].remainder > plans[b].remainder;
        });
        for (std::size_t slot = 0; taken < total_train && slot < by_remainder.size(); ++slot) {
            auto& plan = plans[by_remainder[slot]];
            if (plan.take + 1 < plan.order.size()) {
                ++plan.take;
                ++taken;
            }
        }
        for (const auto& plan : plans) {
            result.train.insert(result.train.end(), plan.order.begin(),
                                plan.order.begin() + static_cast<std::ptrdiff_t>(plan.take));
            result.test.insert(result.test.end(),
                               plan.order.begin() + static_cast<std::ptrdiff_t>(plan.take),
                               plan.order.end());
        }
    }
    std::sort(result.train.begin(), result.train.end());
    std::sort(result.test.begin(), result.test.end());
    return result;
}

std::string format_metrics_table(const std::vector<ReportRow>& rows) {
    std::size_t city_w = std::string("Eval City").size();
    std::size_t model_w = std::string("Model").size();
    for (const auto& r : rows) {
        city_w = std::max(city_w, r.city.size());
        model_w = std::max(model_w, r.model.size());
    }
    std::ostringstream out;
    auto pad = [](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    out << pad("Eval City", city_w) << " | " << pad("Model", model_w) << " | Acc.  | Balanced Acc.\n";
    out << std::string(city_w, '-') << "-+-" << std::string(model_w, '-') << "-+-------+--------------\n";
    for (const auto& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f  | %.2f", r.metrics.accuracy, r.metrics.balanced_accuracy);
        out << pad(r.city, city_w) << " | " << pad(r.model, model_w) << " | " << buf << "\n";
    }
    return out.str();
}

std::string metrics_to_json(const ReportRow& row) {
    const json j = {
        {"eval_city", row.city},
        {"model", row.model},
        {"accuracy", row.metrics.accuracy},
        {"balanced_accuracy", row.metrics.balanced_accuracy},
        {"recall", row.metrics.recall},
        {"confusion", {{"tp", row.metrics.tp}, {"fp", row.metrics.fp}, {"tn", row.metrics.tn}, {"fn", row.metrics.fn}}},
    };
    return j.dump(2);
}

} // namespace gentrify::eval
