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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gentrify/analysis.hpp"
#include "gentrify/image.hpp"

using namespace gentrify;
using namespace gentrify::analysis;
using gentrify::mil::AttentionParams;
using gentrify::mil::Bag;

namespace {

Bag make_bag(const std::string& tract_id, int label, int M, int K, Rng& rng, double spread = 1.0) {
    Bag bag;
    bag.tract_id = tract_id;
    bag.label = label;
    bag.H.resize(M, K);
    for (int j = 0; j < K; ++j) {
        for (int i = 0; i < M; ++i) {
            bag.H(i, j) = rng.uniform(-spread, spread);
        }
        bag.pair_ids.push_back(tract_id + "_p" + std::to_string(j));
    }
    return bag;
}

AttentionParams spread_params(int W, int M, Rng& rng) {
    AttentionParams p = mil::init_attention(W, M, rng.next());
    for (Eigen::Index i = 0; i < p.w.rows(); ++i) {
        p.w(i, 0) = rng.uniform(-2, 2);
    }
    return p;
}

} // namespace

TEST_CASE("sorted weight curves") {
    Rng rng(51);
    const AttentionParams params = spread_params(4, 6, rng);

    SUBCASE("uniform bag gives a flat curve at 1/K") {
        Bag bag = make_bag("flat", 1, 6, 5, rng);
        for (int j = 1; j < 5; ++j) {
            bag.H.col(j) = bag.H.col(0);
        }
        const auto curve = sorted_weight_curve(bag, params);
        for (const double w : curve) {
            CHECK(w == doctest::Approx(0.2).epsilon(1e-12));
        }
    }
    SUBCASE("K=100 means the average weight is 0.01") {
        const Bag bag = make_bag("avg", 1, 6, 100, rng);
        const auto curve = sorted_weight_curve(bag, params);
        double sum = 0.0;
        for (const double w : curve) {
            sum += w;
        }
        CHECK(sum / 100.0 == doctest::Approx(0.01).epsilon(1e-9));
    }
    SUBCASE("random bag: non-increasing, sums to one, equals the sorted weights") {
        const Bag bag = make_bag("rand", 0, 6, 17, rng, 3.0);
        const auto curve = sorted_weight_curve(bag, params);
        double sum = 0.0;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            if (i > 0) {
                CHECK(curve[i] <= curve[i - 1]);
            }
            sum += curve[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

        const Eigen::VectorXd a = mil::attention_weights(bag.H, params);
        std::vector<double> expected(a.data(), a.data() + a.size());
        std::sort(expected.begin(), expected.end(), std::greater<>());
        for (std::size_t i = 0; i < curve.size(); ++i) {
            CHECK(curve[i] == expected[i]);
        }
    }
}

TEST_CASE("extreme pairs") {
    Rng rng(52);
    const AttentionParams params = spread_params(4, 6, rng);

    SUBCASE("k = K/2 partitions the bag, top and bottom disjoint") {
        const Bag bag = make_bag("part", 1, 6, 10, rng, 3.0);
        const ExtremePairs ex = extreme_pairs(bag, params, 5);
        CHECK_FALSE(ex.truncated);
        CHECK(ex.top.size() == 5);
        CHECK(ex.bottom.size() == 5);
        std::set<std::string> seen;
        for (const auto& wp : ex.top) {
            seen.insert(wp.pair_id);
        }
        for (const auto& wp : ex.bottom) {
            CHECK(seen.count(wp.pair_id) == 0);
            seen.insert(wp.pair_id);
        }
        CHECK(seen.size() == 10);
        // top descending, bottom ascending
        for (std::size_t i = 1; i < ex.top.size(); ++i) {
            CHECK(ex.top[i].weight <= ex.top[i - 1].weight);
        }
        for (std::size_t i = 1; i < ex.bottom.size(); ++i) {
            CHECK(ex.bottom[i].weight >= ex.bottom[i - 1].weight);
        }
    }
    SUBCASE("default k is 20") {
        const Bag bag = make_bag("k20", 1, 6, 50, rng, 3.0);
        const ExtremePairs ex = extreme_pairs(bag, params);
        CHECK(ex.top.size() == 20);
        CHECK(ex.bottom.size() == 20);
    }
    SUBCASE("small bag is returned whole, flagged") {
        const Bag bag = make_bag("small", 1, 6, 8, rng);
        const ExtremePairs ex = extreme_pairs(bag, params, 5);
        CHECK(ex.truncated);
        CHECK(ex.top.size() == 8);
        CHECK(ex.bottom.size() == 8);
    }
    SUBCASE("ties break by pair id") {
        Bag bag = make_bag("tie", 1, 6, 6, rng);
        for (int j = 1; j < 6; ++j) {
            bag.H.col(j) = bag.H.col(0); // identical weights
        }
        const ExtremePairs ex = extreme_pairs(bag, params, 3);
        CHECK(ex.top[0].pair_id == "tie_p0");
        CHECK(ex.top[1].pair_id == "tie_p1");
        CHECK(ex.top[2].pair_id == "tie_p2");
        CHECK(ex.bottom[0].pair_id == "tie_p5");
    }
}

TEST_CASE("discrepancy classes follow the truth table") {
    const std::map<std::string, std::string> labels{
        {"t1", "gentrifying"},     {"t2", "gentrifying"},     {"t3", "non_gentrifying"},
        {"t4", "non_gentrifying"}, {"t5", "non_gentrifying"}, {"t6", "gentrifying"},
        {"t7", "non_gentrifying"}, {"t8", "gentrifying"},
    };
    const std::map<std::string, std::string> predictions{
        {"t1", "gentrifying"},     {"t2", "non_gentrifying"}, {"t3", "gentrifying"},
        {"t4", "non_gentrifying"}, {"t5", "gentrifying"},     {"t6", "gentrifying"},
        {"t7", "non_gentrifying"}, {"t8", "non_gentrifying"},
    };
    const auto classes = discrepancy_classes(labels, predictions);
    REQUIRE(classes.size() == 8);
    std::map<std::string, int> counts;
    std::map<std::string, std::string> by_tract;
    for (const auto& rec : classes) {
        ++counts[rec.klass];
        by_tract[rec.tract_id] = rec.klass;
    }
    CHECK(counts["agree_gentrifying"] == 2);     // t1, t6
    CHECK(counts["agree_non_gentrifying"] == 2); // t4, t7
    CHECK(counts["discrepancy"] == 2);           // t3, t5
    CHECK(counts["miss"] == 2);                  // t2, t8
    CHECK(by_tract["t3"] == "discrepancy");
    CHECK(by_tract["t2"] == "miss");

    SUBCASE("key mismatches are reported with offenders") {
        auto extra = predictions;
        extra["t9"] = "gentrifying";
        try {
            discrepancy_classes(labels, extra);
            FAIL("expected a ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("t9") != std::string::npos);
        }
    }
}

TEST_CASE("map export is valid GeoJSON with one feature per tract") {
    std::vector<geo::TractPolygon> tracts;
    std::vector<DiscrepancyRecord> classes;
    for (int i = 0; i < 4; ++i) {
        const double lon0 = i * 1.0;
        tracts.push_back(geo::TractPolygon{
            "t" + std::to_string(i),
            {geo::GeoCoordinate{0, lon0}, geo::GeoCoordinate{0, lon0 + 0.5},
             geo::GeoCoordinate{0.5, lon0 + 0.5}, geo::GeoCoordinate{0.5, lon0},
             geo::GeoCoordinate{0, lon0}}});
        classes.push_back({"t" + std::to_string(i), i % 2 ? "gentrifying" : "non_gentrifying",
                           "gentrifying", i % 2 ? "agree_gentrifying" : "discrepancy"});
    }
    const std::string text = export_map(tracts, classes);
    const auto doc = nlohmann::json::parse(text);
    CHECK(doc["type"] == "FeatureCollection");
    REQUIRE(doc["features"].size() == 4);
    int discrepancies = 0;
    for (const auto& f : doc["features"]) {
        CHECK(f["properties"].contains("tract_id"));
        CHECK(f["properties"].contains("fill"));
        if (f["properties"]["klass"] == "discrepancy") {
            ++discrepancies;
        }
    }
    CHECK(discrepancies == 2);

    // the geodata reader accepts the exported map
    CHECK(geo::parse_tracts_geojson(text).size() == 4);

    CHECK_THROWS_AS(export_map({}, classes), ValidationError);
}

TEST_CASE("curve report aggregates csv rows and top-10 mass") {
    Rng rng(53);
    const AttentionParams params = spread_params(4, 6, rng);
    std::vector<Bag> bags;
    bags.push_back(make_bag("g1", 1, 6, 15, rng, 3.0));
    bags.push_back(make_bag("n1", 0, 6, 12, rng, 3.0));
    const CurveReport report = curve_report(bags, params);

    // one csv row per pair plus header
    const auto line_count = std::count(report.curves_csv.begin(), report.curves_csv.end(), '\n');
    CHECK(line_count == 1 + 15 + 12);
    CHECK(report.curves_csv.rfind("tract_id,rank,weight,label", 0) == 0);
    CHECK(report.top10_mass.size() == 2);
    for (const auto& [tract, mass] : report.top10_mass) {
        CHECK(mass > 0.0);
        CHECK(mass <= 1.0 + 1e-12);
    }
    CHECK(report.summary_csv.find("g1,gentrifying,") != std::string::npos);
    CHECK(report.summary_csv.find("n1,non_gentrifying,") != std::string::npos);

    SUBCASE("uniform attention gives identical curves across classes") {
        AttentionParams flat = mil::init_attention(4, 6, 1); // w = 0: all scores equal
        const CurveReport r2 = curve_report(bags, flat);
        CHECK(r2.top10_mass.at("g1") == doctest::Approx(10.0 / 15.0).epsilon(1e-9));
        CHECK(r2.top10_mass.at("n1") == doctest::Approx(10.0 / 12.0).epsilon(1e-9));
    }
    SUBCASE("needs both classes") {
        std::vector<Bag> one{bags[0]};
        CHECK_THROWS_AS(curve_report(one, params), ValidationError);
    }
}

TEST_CASE("curve plot renders svg and png") {
    Rng rng(54);
    const AttentionParams params = spread_params(4, 6, rng);
    std::vector<Bag> bags;
    bags.push_back(make_bag("g1", 1, 6, 20, rng, 3.0));
    bags.push_back(make_bag("n1", 0, 6, 20, rng, 3.0));

    const auto dir = std::filesystem::temp_directory_path() / "gentrify_plot_test";
    std::filesystem::create_directories(dir);
    const std::string svg_path = (dir / "curves.svg").string();
    render_curve_plot(svg_path, bags, params);
    const std::string svg = read_file(svg_path);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);

    const std::string png_path = (dir / "curves.png").string();
    render_curve_plot(png_path, bags, params);
    const ImageTensor img = read_png_rgb8(png_path);
    CHECK(img.side == 640);

    CHECK_THROWS_AS(render_curve_plot((dir / "curves.pdf").string(), bags, params), ValidationError);
    std::filesystem::remove_all(dir);
}
