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

#include <filesystem>
#include <map>
#include <set>

#include "gentrify/synthcity.hpp"

using namespace gentrify;
using namespace gentrify::synth;

TEST_CASE("scene pairs are byte-deterministic") {
    SynthConfig config;
    config.image_side = 64;
    const ScenePair a = render_scene_pair(1234, true, config);
    const ScenePair b = render_scene_pair(1234, true, config);
    CHECK(a.earlier == b.earlier);
    CHECK(a.later == b.later);
    CHECK(a.edit_kind == b.edit_kind);
    const ScenePair c = render_scene_pair(1235, true, config);
    CHECK(a.earlier != c.earlier);
}

TEST_CASE("no change and no nuisance means identical frames") {
    SynthConfig config;
    config.nuisance_level = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ScenePair pair = render_scene_pair(seed, false, config);
        CHECK(pair.earlier == pair.later);
        CHECK(pair.label == 0);
        CHECK_FALSE(pair.has_edit);
    }
}

TEST_CASE("structural edits stay inside the logged bounding box") {
    SynthConfig config;
    config.nuisance_level = 0.0;
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        const ScenePair pair = render_scene_pair(seed, true, config);
        REQUIRE(pair.has_edit);
        CHECK(pair.label == 1);
        int diffs_inside = 0;
        for (int y = 0; y < config.image_side; ++y) {
            for (int x = 0; x < config.image_side; ++x) {
                bool differs = false;
                for (int c = 0; c < 3; ++c) {
                    differs |= pair.earlier.at(c, y, x) != pair.later.at(c, y, x);
                }
                const bool inside =
                    x >= pair.edit_x0 && x < pair.edit_x1 && y >= pair.edit_y0 && y < pair.edit_y1;
                if (differs) {
                    CHECK(inside); // zero nuisance: all change lives in the box
                    ++diffs_inside;
                }
            }
        }
        CHECK(diffs_inside > 0);
    }
}

TEST_CASE("nuisance edits change pixels without flipping the label") {
    SynthConfig config;
    config.nuisance_level = 1.0;
    int changed = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ScenePair pair = render_scene_pair(seed, false, config);
        CHECK(pair.label == 0);
        if (!(pair.earlier == pair.later)) {
            ++changed;
        }
    }
    CHECK(changed == 10); // vehicles always present at full nuisance
}

TEST_CASE("config validation") {
    SynthConfig ok;
    CHECK_NOTHROW(validate_config(ok));
    SynthConfig bad = ok;
    bad.n_tracts = 3;
    CHECK_THROWS_AS(validate_config(bad), ValidationError);
    bad = ok;
    bad.rho_non = 0.2; // >= rho_gentrifying
    CHECK_THROWS_AS(validate_config(bad), ValidationError);
    bad = ok;
    bad.rho_gentrifying = 0.001; // rho*K rounds to zero
    bad.rho_non = 0.0;
    CHECK_THROWS_AS(validate_config(bad), ValidationError);
    bad = ok;
    bad.nuisance_level = 1.5;
    CHECK_THROWS_AS(validate_config(bad), ValidationError);
    bad = ok;
    bad.image_side = 8;
    CHECK_THROWS_AS(validate_config(bad), ValidationError);
}

TEST_CASE("generated city matches its own oracle") {
    const auto dir = std::filesystem::temp_directory_path() / "gentrify_city_test";
    std::filesystem::remove_all(dir);

    SynthConfig config;
    config.seed = 7;
    config.n_tracts = 8;
    config.k = 12;
    config.rho_gentrifying = 0.25; // 3 positives per gentrifying bag
    config.rho_non = 0.05;         // 1 positive per non-gentrifying bag
    config.image_side = 32;
    config.step1_pairs = 20;
    const GenResult result = gen_city(config, dir.string());
    CHECK(result.n_tracts == 8);
    CHECK(result.n_bag_pairs == 8 * 12);
    CHECK(result.n_step1_pairs == 20);
    CHECK(result.n_planted == 4 * 3 + 4 * 1);

    const auto containers = ingest::read_containers_jsonl((dir / "containers.jsonl").string());
    REQUIRE(containers.size() == 8);
    const auto oracle = read_oracle_jsonl((dir / "oracle.jsonl").string());
    CHECK(oracle.size() == result.n_planted);

    std::map<std::string, std::set<std::string>> planted_by_tract;
    for (const auto& p : oracle) {
        planted_by_tract[p.tract_id].insert(p.pair_id);
    }
    std::set<std::string> bag_pair_ids;
    for (const auto& c : containers) {
        CHECK(c.pairs.size() == 12);
        const std::size_t expected =
            c.label == ingest::TractLabel::gentrifying ? 3 : 1;
        CHECK(planted_by_tract[c.tract.tract_id].size() == expected);
        for (const auto& pair : c.pairs) {
            bag_pair_ids.insert(pair.pair_id());
            // every pair site lies inside its tract polygon
            CHECK(geo::point_in_tract(pair.earlier.location, c.tract));
            // pixels exist on disk, relative to the city dir
            CHECK(file_exists((dir / pair.earlier.pixels_ref).string()));
            CHECK(file_exists((dir / pair.later.pixels_ref).string()));
        }
    }

    // step-1 pairs: balanced and disjoint from the bags
    const auto step1 = ingest::read_pairs_jsonl((dir / "step1_pairs.jsonl").string());
    REQUIRE(step1.size() == 20);
    int positives = 0;
    for (const auto& [pair, label] : step1) {
        positives += label.y;
        CHECK(bag_pair_ids.count(pair.pair_id()) == 0);
        CHECK(label.source == ingest::LabelSource::synthetic);
    }
    CHECK(positives == 10);

    // bag-eligibility date windows hold for every bag pair
    for (const auto& c : containers) {
        for (const auto& pair : c.pairs) {
            CHECK(pair.earlier.capture_date <= Date{2010, 12, 31});
            CHECK(Date{2018, 1, 1} <= pair.later.capture_date);
        }
    }

    // tracts parse and are disjoint; labels cover every tract
    const auto tracts = geo::read_tracts_geojson((dir / "tracts.geojson").string());
    CHECK(tracts.size() == 8);
    const auto labels = ingest::read_labels_csv((dir / "labels.csv").string());
    for (const auto& t : tracts) {
        CHECK(labels.count(t.tract_id) == 1);
    }

    // archive manifest covers bag and step-1 images
    const auto archive = ingest::read_archive_manifest((dir / "archive.jsonl").string());
    CHECK(archive.size() == 2 * (result.n_bag_pairs + result.n_step1_pairs));

    SUBCASE("regeneration is byte-identical") {
        const auto dir2 = std::filesystem::temp_directory_path() / "gentrify_city_test2";
        std::filesystem::remove_all(dir2);
        gen_city(config, dir2.string());
        CHECK(read_file((dir / "containers.jsonl").string()) ==
              read_file((dir2 / "containers.jsonl").string()));
        CHECK(read_file((dir / "oracle.jsonl").string()) ==
              read_file((dir2 / "oracle.jsonl").string()));
        CHECK(read_file((dir / "tracts.geojson").string()) ==
              read_file((dir2 / "tracts.geojson").string()));
        // spot-check one image byte stream
        const auto& ref = containers[0].pairs[0].earlier.pixels_ref;
        CHECK(read_file((dir / ref).string()) == read_file((dir2 / ref).string()));
        std::filesystem::remove_all(dir2);
    }

    std::filesystem::remove_all(dir);
}
