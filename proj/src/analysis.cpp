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

#include "gentrify/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gentrify/image.hpp"

using nlohmann::json;

namespace gentrify::analysis {

namespace {

std::vector<WeightedPair> weighted_pairs(const mil::Bag& bag, const mil::AttentionParams& params) {
    const Eigen::VectorXd a = mil::attention_weights(bag.H, params);
    std::vector<WeightedPair> out;
    out.reserve(bag.pair_ids.size());
    for (std::size_t i = 0; i < bag.pair_ids.size(); ++i) {
        out.push_back({bag.pair_ids[i], a(static_cast<Eigen::Index>(i))});
    }
    return out;
}

std::string klass_of(const std::string& label, const std::string& prediction) {
    const bool lab_g = label == "gentrifying";
    const bool pred_g = prediction == "gentrifying";
    if (lab_g && pred_g) return "agree_gentrifying";
    if (!lab_g && !pred_g) return "agree_non_gentrifying";
    if (!lab_g && pred_g) return "discrepancy";
    return "miss";
}

std::string fill_of(const std::string& klass) {
    if (klass == "agree_gentrifying") return "#d7301f";
    if (klass == "agree_non_gentrifying") return "#2b8cbe";
    if (klass == "discrepancy") return "#fdae61";
    return "#756bb1"; // miss
}

} // namespace

std::vector<double> sorted_weight_curve(const mil::Bag& bag, const mil::AttentionParams& params) {
    const Eigen::VectorXd a = mil::attention_weights(bag.H, params);
    std::vector<double> weights(a.data(), a.data() + a.size());
    std::sort(weights.begin(), weights.end(), std::greater<>());
    return weights;
}

ExtremePairs extreme_pairs(const mil::Bag& bag, const mil::AttentionParams& params, std::size_t k) {
    auto pairs = weighted_pairs(bag, params);
    ExtremePairs out;
    // Descending by weight, pair_id ascending on ties.
    std::sort(pairs.begin(), pairs.end(), [](const WeightedPair& x, const WeightedPair& y) {
        if (x.weight != y.weight) {
            return x.weight > y.weight;
        }
        return x.pair_id < y.pair_id;
    });
    const std::size_t n = pairs.size();
    if (n < 2 * k) {
        out.truncated = true;
        out.top = pairs;
        out.bottom.assign(pairs.rbegin(), pairs.rend());
        return out;
    }
    out.top.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(k));
    out.bottom.assign(pairs.rbegin(), pairs.rbegin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

std::vector<DiscrepancyRecord> discrepancy_classes(const std::map<std::string, std::string>& labels,
                                                   const std::map<std::string, std::string>& predictions) {
    std::vector<std::string> only_labels;
    std::vector<std::string> only_predictions;
    for (const auto& [id, _] : labels) {
        if (!predictions.count(id)) {
            only_labels.push_back(id);
        }
    }
    for (const auto& [id, _] : predictions) {
        if (!labels.count(id)) {
            only_predictions.push_back(id);
        }
    }
    if (!only_labels.empty() || !only_predictions.empty()) {
        std::ostringstream msg;
        msg << "discrepancy_classes: tract key sets differ;";
        if (!only_labels.empty()) {
            msg << " label-only:";
            for (const auto& id : only_labels) {
                msg << ' ' << id;
            }
            msg << ';';
        }
        if (!only_predictions.empty()) {
            msg << " prediction-only:";
            for (const auto& id : only_predictions) {
                msg << ' ' << id;
            }
        }
        throw ValidationError(msg.str());
    }
    std::vector<DiscrepancyRecord> out;
    out.reserve(labels.size());
    for (const auto& [id, label] : labels) {
        const auto& prediction = predictions.at(id);
        out.push_back({id, label, prediction, klass_of(label, prediction)});
    }
    return out;
}

std::string export_map(const std::vector<geo::TractPolygon>& tracts,
                       const std::vector<DiscrepancyRecord>& classes) {
    std::map<std::string, const geo::TractPolygon*> by_id;
    for (const auto& t : tracts) {
        by_id[t.tract_id] = &t;
    }
    json features = json::array();
    for (const auto& rec : classes) {
        const auto it = by_id.find(rec.tract_id);
        if (it == by_id.end()) {
            throw ValidationError("export_map: no polygon for tract " + rec.tract_id);
        }
        json ring = json::array();
        for (const auto& c : it->second->ring) {
            ring.push_back(json::array({c.lon, c.lat}));
        }
        features.push_back(json{
            {"type", "Feature"},
            {"properties",
             {{"tract_id", rec.tract_id},
              {"label", rec.label},
              {"prediction", rec.prediction},
              {"klass", rec.klass},
              {"fill", fill_of(rec.klass)}}},
            {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
        });
    }
    return json{{"type", "FeatureCollection"}, {"features", features}}.dump(2) + "\n";
}

CurveReport curve_report(const std::vector<mil::Bag>& bags, const mil::AttentionParams& params) {
    bool has_pos = false;
    bool has_neg = false;
    for (const auto& b : bags) {
        (b.label == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw ValidationError("curve_report: need at least one bag of each class");
    }
    CurveReport report;
    std::ostringstream curves;
    std::ostringstream summary;
    curves << "tract_id,rank,weight,label\n";
    summary << "tract_id,label,top10_mass\n";
    for (const auto& bag : bags) {
        const auto curve = sorted_weight_curve(bag, params);
        const char* label = bag.label == 1 ? "gentrifying" : "non_gentrifying";
        double mass = 0.0;
        for (std::size_t rank = 0; rank < curve.size(); ++rank) {
            if (rank < 10) {
                mass += curve[rank];
            }
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,%zu,%.12g,%s\n", bag.tract_id.c_str(), rank + 1,
                          curve[rank], label);
            curves << buf;
        }
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%s,%.12g\n", bag.tract_id.c_str(), label, mass);
        summary << buf;
        report.top10_mass[bag.tract_id] = mass;
    }
    report.curves_csv = curves.str();
    report.summary_csv = summary.str();
    return report;
}

// ---------------------------------------------------------------------------
// Plotting. The CSV is the contract; this chart is a convenience, kept
// dependency-free: direct SVG text or a Bresenham rasterizer for PNG.

namespace {

struct PlotGeometry {
    static constexpr int width = 640;
    static constexpr int height = 420;
    static constexpr int margin = 40;

    std::size_t max_rank;
    double max_weight;

    [[nodiscard]] double x_at(std::size_t rank) const {
        return margin + (width - 2.0 * margin) * (max_rank <= 1 ? 0.0 : static_cast<double>(rank) /
                                                      static_cast<double>(max_rank - 1));
    }
    [[nodiscard]] double y_at(double weight) const {
        return height - margin - (height - 2.0 * margin) * (weight / max_weight);
    }
};

void draw_line_rgb(ImageTensor& img, int x0, int y0, int x1, int y1, int r, int g, int b) {
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (x0 >= 0 && x0 < img.side && y0 >= 0 && y0 < img.side) {
            img.at(0, y0, x0) = static_cast<std::uint8_t>(r);
            img.at(1, y0, x0) = static_cast<std::uint8_t>(g);
            img.at(2, y0, x0) = static_cast<std::uint8_t>(b);
        }
        if (x0 == x1 && y0 == y1) {
            break;
        }
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

} // namespace

void render_curve_plot(const std::string& path, const std::vector<mil::Bag>& bags,
                       const mil::AttentionParams& params) {
    std::vector<std::pair<int, std::vector<double>>> curves;
    std::size_t max_rank = 1;
    double max_weight = 0.0;
    for (const auto& bag : bags) {
        auto curve = sorted_weight_curve(bag, params);
        max_rank = std::max(max_rank, curve.size());
        if (!curve.empty()) {
            max_weight = std::max(max_weight, curve.front());
        }
        curves.emplace_back(bag.label, std::move(curve));
    }
    if (max_weight <= 0.0) {
        max_weight = 1.0;
    }
    const PlotGeometry geom{max_rank, max_weight};

    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".svg") == 0) {
        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << PlotGeometry::width
            << "\" height=\"" << PlotGeometry::height << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<line x1=\"40\" y1=\"380\" x2=\"600\" y2=\"380\" stroke=\"black\"/>\n"
            << "<line x1=\"40\" y1=\"40\" x2=\"40\" y2=\"380\" stroke=\"black\"/>\n"
            << "<text x=\"250\" y=\"410\" font-size=\"13\">pair rank (descending weight)</text>\n"
            << "<text x=\"8\" y=\"30\" font-size=\"13\">a_i</text>\n";
        for (const auto& [label, curve] : curves) {
            svg << "<polyline fill=\"none\" stroke=\"" << (label == 1 ? "#d7301f" : "#2b8cbe")
                << "\" stroke-width=\"1\" points=\"";
            for (std::size_t rank = 0; rank < curve.size(); ++rank) {
                char buf[48];
                std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", geom.x_at(rank), geom.y_at(curve[rank]));
                svg << buf;
            }
            svg << "\"/>\n";
        }
        svg << "</svg>\n";
        write_file_atomic(path, svg.str());
        return;
    }
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0) {
        // Square canvas: reuse the deterministic PNG writer.
        const int side = PlotGeometry::width;
        ImageTensor img(side);
        std::fill(img.data.begin(), img.data.end(), 255);
        draw_line_rgb(img, PlotGeometry::margin, PlotGeometry::height - PlotGeometry::margin,
                      PlotGeometry::width - PlotGeometry::margin,
                      PlotGeometry::height - PlotGeometry::margin, 0, 0, 0);
        draw_line_rgb(img, PlotGeometry::margin, PlotGeometry::margin, PlotGeometry::margin,
                      PlotGeometry::height - PlotGeometry::margin, 0, 0, 0);
        for (const auto& [label, curve] : curves) {
            const int r = label == 1 ? 215 : 43;
            const int g = label == 1 ? 48 : 140;
            const int b = label == 1 ? 31 : 190;
            for (std::size_t rank = 0; rank + 1 < curve.size(); ++rank) {
                draw_line_rgb(img, static_cast<int>(geom.x_at(rank)), static_cast<int>(geom.y_at(curve[rank])),
                              static_cast<int>(geom.x_at(rank + 1)),
                              static_cast<int>(geom.y_at(curve[rank + 1])), r, g, b);
            }
        }
        write_png_rgb8(path, img);
        return;
    }
    throw ValidationError("render_curve_plot: unsupported extension (use .svg or .png): " + path);
}

} // namespace gentrify::analysis
