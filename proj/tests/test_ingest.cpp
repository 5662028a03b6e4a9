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

#include "gentrify/ingest.hpp"

using namespace gentrify;
using namespace gentrify::ingest;
using geo::GeoCoordinate;

namespace {

const std::string kFixtures = GENTRIFY_FIXTURE_DIR;

StreetViewImage image_at(std::string id, GeoCoordinate loc, double heading, const char* date) {
    StreetViewImage img;
    img.image_id = std::move(id);
    img.location = loc;
    img.heading = heading;
    img.capture_date = Date::parse(date);
    return img;
}

CpiTable flat_cpi() {
    CpiTable cpi;
    for (int y = 2007; y <= 2022; ++y) {
        cpi[y] = 1.0;
    }
    return cpi;
}

} // namespace

TEST_CASE("timed pair construction enforces its invariants") {
    const GeoCoordinate here{37.0, -122.0};
    const auto a = image_at("a", here, 90.0, "2009-05-01");
    const auto b = image_at("b", here, 92.0, "2019-05-01");
    const TimedPair pair = make_timed_pair(a, b);
    CHECK(pair.pair_id() == "a__b");

    CHECK_THROWS_AS(make_timed_pair(b, a), ValidationError); // reversed dates
    auto far = b;
    far.location.lat += 0.001; // ~111 m
    CHECK_THROWS_AS(make_timed_pair(a, far), ValidationError);
    auto turned = b;
    turned.heading = 120.0;
    CHECK_THROWS_AS(make_timed_pair(a, turned), ValidationError);
    // heading wraps mod 360: 359 vs 2 is a 3 degree difference
    auto wrap_a = image_at("w1", here, 359.0, "2009-05-01");
    auto wrap_b = image_at("w2", here, 2.0, "2019-05-01");
    CHECK_NOTHROW(make_timed_pair(wrap_a, wrap_b));
}

TEST_CASE("inflation adjustment") {
    CpiTable cpi{{2010, 1.0}, {2020, 1.0}};
    CHECK(adjust_for_inflation(100.0, 2010, cpi, 2020) == 100.0);
    cpi[2010] = 2.0;
    CHECK(adjust_for_inflation(100.0, 2010, cpi, 2020) == 50.0);
    CHECK_THROWS_AS(adjust_for_inflation(1.0, 1999, cpi, 2020), Error);
    CHECK_THROWS_AS(adjust_for_inflation(1.0, 2010, cpi, 1999), Error);

    // shipped CPI-U table: $60,000 in 2010 dollars, 2020 base
    const CpiTable real = read_cpi_table(kFixtures + "/../../data/cpi_u_annual.json");
    CHECK(adjust_for_inflation(60000.0, 2010, real, 2020) ==
          doctest::Approx(71214.0917929).epsilon(1e-9));
}

TEST_CASE("permit filtering: thresholds and categories") {
    const CpiTable cpi = flat_cpi();
    PermitRecord rec;
    rec.issued_date = Date::parse("2010-01-01");
    rec.location = GeoCoordinate{10.0, 20.0};
    rec.year = 2010;

    SUBCASE("adjusted value just under the threshold is excluded") {
        rec.category = "new";
        rec.job_value_nominal = 59'999.0;
        CHECK(filter_permits({rec}, cpi).empty());
        rec.job_value_nominal = 60'000.0;
        CHECK(filter_permits({rec}, cpi).size() == 1);
    }
    SUBCASE("non-kept categories never qualify") {
        rec.category = "demolition";
        rec.job_value_nominal = 500'000.0;
        CHECK(filter_permits({rec}, cpi).empty());
    }
    SUBCASE("same location-year permits aggregate") {
        rec.category = "new";
        rec.job_value_nominal = 30'000.0;
        PermitRecord rec2 = rec;
        rec2.issued_date = Date::parse("2010-03-03");
        CHECK(filter_permits({rec, rec2}, cpi).size() == 1);
        CHECK(filter_permits({rec, rec2}, cpi)[0].event_date == Date::parse("2010-01-01"));
        rec2.year = 2011; // different year: no group reaches 60k
        CHECK(filter_permits({rec, rec2}, cpi).empty());
    }
}

TEST_CASE("permit fixture yields the four hand-derived events") {
    CpiTable cpi{{2009, 200.0}, {2010, 210.0}, {2020, 252.0}};
    const auto parsed = parse_permits_csv(read_csv(kFixtures + "/permits_10.csv"));
    CHECK(parsed.skipped_rows == 0);
    REQUIRE(parsed.records.size() == 10);

    PermitFilterConfig config;
    config.base_year = 2020;
    const auto events = filter_permits(parsed.records, cpi, config);
    REQUIRE(events.size() == 4);
    std::set<std::string> dates;
    for (const auto& e : events) {
        CHECK(e.source == EventSource::permit);
        dates.insert(e.event_date.str());
    }
    CHECK(dates == std::set<std::string>{"2009-03-01", "2010-04-02", "2020-01-20", "2009-09-09"});
}

TEST_CASE("raising min_value never adds permit events") {
    const CpiTable cpi = flat_cpi();
    Rng rng(17);
    std::vector<PermitRecord> records;
    const char* categories[] = {"new", "alteration", "addition", "demolition", "roofing"};
    for (int i = 0; i < 200; ++i) {
        PermitRecord rec;
        rec.year = 2008 + static_cast<int>(rng.uniform_int(10));
        rec.issued_date = Date{rec.year, 1 + static_cast<int>(rng.uniform_int(12)), 1};
        rec.category = categories[rng.uniform_int(5)];
        rec.location = GeoCoordinate{rng.uniform(10.0, 10.001), rng.uniform(20.0, 20.001)};
        rec.job_value_nominal = rng.uniform(0.0, 120'000.0);
        records.push_back(rec);
    }
    auto key_set = [](const std::vector<ChangeEvent>& events) {
        std::set<std::pair<std::int64_t, std::int64_t>> keys;
        for (const auto& e : events) {
            keys.insert(rounded_location_key(e.location));
        }
        return keys;
    };
    PermitFilterConfig lo;
    lo.min_value = 20'000.0;
    std::vector<ChangeEvent> prev = filter_permits(records, cpi, lo);
    for (double threshold = 30'000.0; threshold <= 90'000.0; threshold += 10'000.0) {
        PermitFilterConfig hi;
        hi.min_value = threshold;
        const auto next = filter_permits(records, cpi, hi);
        CHECK(next.size() <= prev.size());
        const auto prev_keys = key_set(prev);
        for (const auto& k : key_set(next)) {
            CHECK(prev_keys.count(k) == 1);
        }
        prev = next;
    }
}

TEST_CASE("NAICS classification") {
    const NaicsMapping mapping = default_naics_mapping();
    CHECK(classify_naics("445110", mapping) == NaicsClass::essential);     // grocery
    CHECK(classify_naics("812310", mapping) == NaicsClass::essential);     // laundry
    CHECK(classify_naics("722515", mapping) == NaicsClass::discretionary); // coffee shop
    CHECK(classify_naics("712110", mapping) == NaicsClass::discretionary); // art gallery
    CHECK(classify_naics("999999", mapping) == NaicsClass::other);
    CHECK_THROWS_AS(classify_naics("44x110", mapping), ValidationError);
    CHECK_THROWS_AS(classify_naics("", mapping), ValidationError);

    // longest prefix wins regardless of listing order
    const NaicsMapping layered{{"44", NaicsClass::essential}, {"4451", NaicsClass::discretionary}};
    CHECK(classify_naics("445110", layered) == NaicsClass::discretionary);
    const NaicsMapping reversed{{"4451", NaicsClass::discretionary}, {"44", NaicsClass::essential}};
    CHECK(classify_naics("445110", reversed) == NaicsClass::discretionary);
}

TEST_CASE("business conversions") {
    const NaicsMapping mapping = default_naics_mapping();
    auto rec = [](const char* id, const char* naics, double lat, double lon, int year) {
        return BusinessRecord{id, naics, GeoCoordinate{lat, lon}, year};
    };

    SUBCASE("laundry to coffee shop at one premises") {
        const auto events = detect_business_conversions(
            {rec("a", "812310", 40.0, -75.0, 2008), rec("b", "722515", 40.0, -75.0, 2015)}, mapping);
        REQUIRE(events.size() == 1);
        CHECK(events[0].event_date == Date{2015, 7, 1});
        CHECK(events[0].source == EventSource::business);
    }
    SUBCASE("no class flip, no event") {
        CHECK(detect_business_conversions(
                  {rec("a", "445110", 40.0, -75.0, 2008), rec("b", "445110", 40.0, -75.0, 2019)},
                  mapping)
                  .empty());
    }
    SUBCASE("discretionary must follow the essential year") {
        CHECK(detect_business_conversions(
                  {rec("a", "722515", 40.0, -75.0, 2010), rec("b", "445110", 40.0, -75.0, 2012)},
                  mapping)
                  .empty());
    }
    SUBCASE("earliest qualifying discretionary year is chosen") {
        const auto events = detect_business_conversions({rec("a", "445110", 40.0, -75.0, 2008),
                                                         rec("b", "722511", 40.0, -75.0, 2012),
                                                         rec("c", "722511", 40.0, -75.0, 2009)},
                                                        mapping);
        REQUIRE(events.size() == 1);
        CHECK(events[0].event_date.year == 2009);
    }
}

TEST_CASE("business fixture yields three conversions, order independent") {
    const auto parsed = parse_businesses_csv(read_csv(kFixtures + "/businesses_12.csv"));
    CHECK(parsed.skipped_rows == 0);
    REQUIRE(parsed.records.size() == 12);
    const NaicsMapping mapping = default_naics_mapping();

    const auto events = detect_business_conversions(parsed.records, mapping);
    REQUIRE(events.size() == 3);
    std::set<int> years;
    for (const auto& e : events) {
        years.insert(e.event_date.year);
    }
    CHECK(years == std::set<int>{2015, 2011, 2013});

    auto shuffled = parsed.records;
    Rng rng(3);
    rng.shuffle(shuffled);
    const auto again = detect_business_conversions(shuffled, mapping);
    REQUIRE(again.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(again[i].event_date == events[i].event_date);
        CHECK(rounded_location_key(again[i].location) == rounded_location_key(events[i].location));
    }
}

TEST_CASE("weak label construction follows the pre/post rule") {
    const GeoCoordinate site{37.5, -122.1};
    const ChangeEvent event{site, Date::parse("2015-06-01"), EventSource::permit};

    SUBCASE("canonical example: images 2009, 2012, 2019") {
        const std::vector<StreetViewImage> archive{
            image_at("i2009", site, 0, "2009-04-01"),
            image_at("i2012", site, 0, "2012-08-15"),
            image_at("i2019", site, 0, "2019-03-03"),
        };
        const auto result = build_weak_labeled_pairs({event}, archive);
        CHECK(result.skipped.empty());
        REQUIRE(result.pairs.size() == 2);
        const auto& [positive, pos_label] = result.pairs[0];
        CHECK(pos_label.y == 1);
        CHECK(pos_label.source == LabelSource::permit);
        CHECK(positive.earlier.image_id == "i2012");
        CHECK(positive.later.image_id == "i2019");
        const auto& [negative, neg_label] = result.pairs[1];
        CHECK(neg_label.y == 0);
        CHECK(negative.earlier.image_id == "i2009");
        CHECK(negative.later.image_id == "i2012");
    }
    SUBCASE("only post-event images: insufficient_pre_images") {
        const std::vector<StreetViewImage> archive{image_at("a", site, 0, "2019-01-01"),
                                                   image_at("b", site, 0, "2020-01-01")};
        const auto result = build_weak_labeled_pairs({event}, archive);
        CHECK(result.pairs.empty());
        REQUIRE(result.skipped.size() == 1);
        CHECK(result.skipped[0].second == SkipReason::insufficient_pre_images);
    }
    SUBCASE("nothing within the radius: no_nearby_views") {
        const std::vector<StreetViewImage> archive{
            image_at("far", GeoCoordinate{37.5, -122.101}, 0, "2009-01-01")}; // ~88 m away
        const auto result = build_weak_labeled_pairs({event}, archive);
        REQUIRE(result.skipped.size() == 1);
        CHECK(result.skipped[0].second == SkipReason::no_nearby_views);
    }
    SUBCASE("two pre images but nothing after: no_post_image") {
        const std::vector<StreetViewImage> archive{image_at("a", site, 0, "2008-01-01"),
                                                   image_at("b", site, 0, "2012-01-01")};
        const auto result = build_weak_labeled_pairs({event}, archive);
        REQUIRE(result.skipped.size() == 1);
        CHECK(result.skipped[0].second == SkipReason::no_post_image);
    }
}

TEST_CASE("weak label fixture matches an exhaustive per-event oracle") {
    Rng rng(91);
    std::vector<ChangeEvent> events;
    std::vector<StreetViewImage> archive;
    std::vector<std::vector<StreetViewImage>> per_event_images(30);

    for (int e = 0; e < 30; ++e) {
        const GeoCoordinate site{35.0 + 0.01 * e, -120.0};
        events.push_back(
            {site, Date{2012 + static_cast<int>(rng.uniform_int(4)), 6, 15}, EventSource::business});
        const int n_img = static_cast<int>(rng.uniform_int(7)); // 0..6
        const bool nearby = rng.uniform() > 0.15;
        for (int i = 0; i < n_img; ++i) {
            const Date capture{2007 + static_cast<int>(rng.uniform_int(16)),
                               1 + static_cast<int>(rng.uniform_int(12)),
                               1 + static_cast<int>(rng.uniform_int(28))};
            auto img = image_at("e" + std::to_string(e) + "_i" + std::to_string(i),
                                nearby ? site : GeoCoordinate{site.lat, site.lon + 0.001}, 0.0,
                                capture.str().c_str());
            archive.push_back(img);
            if (nearby) {
                per_event_images[static_cast<std::size_t>(e)].push_back(img);
            }
        }
    }

    const auto result = build_weak_labeled_pairs(events, archive, 15.0);

    // Independent re-derivation, one event at a time.
    std::size_t expected_pairs = 0;
    std::vector<std::pair<std::size_t, SkipReason>> expected_skips;
    for (std::size_t e = 0; e < events.size(); ++e) {
        auto imgs = per_event_images[e];
        std::sort(imgs.begin(), imgs.end(), [](const auto& a, const auto& b) {
            return std::make_pair(a.capture_date, a.image_id) <
                   std::make_pair(b.capture_date, b.image_id);
        });
        std::vector<StreetViewImage> pre;
        std::vector<StreetViewImage> post;
        for (const auto& img : imgs) {
            if (img.capture_date < events[e].event_date) {
                pre.push_back(img);
            } else if (events[e].event_date < img.capture_date) {
                post.push_back(img);
            }
        }
        if (imgs.empty()) {
            expected_skips.emplace_back(e, SkipReason::no_nearby_views);
        } else if (pre.size() < 2) {
            expected_skips.emplace_back(e, SkipReason::insufficient_pre_images);
        } else if (post.empty()) {
            expected_skips.emplace_back(e, SkipReason::no_post_image);
        } else {
            // exactly one positive (latest pre, first post) and one negative
            const auto want_pos = pre.back().image_id + "__" + post.front().image_id;
            const auto want_neg = pre[pre.size() - 2].image_id + "__" + pre.back().image_id;
            bool found_pos = false;
            bool found_neg = false;
            for (const auto& [pair, label] : result.pairs) {
                if (pair.pair_id() == want_pos) {
                    found_pos = true;
                    CHECK(label.y == 1);
                }
                if (pair.pair_id() == want_neg) {
                    found_neg = true;
                    CHECK(label.y == 0);
                }
            }
            CHECK(found_pos);
            CHECK(found_neg);
            expected_pairs += 2;
        }
    }
    CHECK(result.pairs.size() == expected_pairs);
    REQUIRE(result.skipped.size() == expected_skips.size());
    for (std::size_t i = 0; i < expected_skips.size(); ++i) {
        CHECK(result.skipped[i].first == expected_skips[i].first);
        CHECK(result.skipped[i].second == expected_skips[i].second);
    }
}

TEST_CASE("container construction clamps, samples and assigns") {
    // two adjacent square tracts
    auto square = [](std::string id, double lon0) {
        return geo::TractPolygon{std::move(id),
                                 {GeoCoordinate{0.0, lon0}, GeoCoordinate{0.0, lon0 + 0.1},
                                  GeoCoordinate{0.1, lon0 + 0.1}, GeoCoordinate{0.1, lon0},
                                  GeoCoordinate{0.0, lon0}}};
    };
    const std::vector<geo::TractPolygon> tracts{square("A", 0.0), square("B", 0.1)};
    const std::map<std::string, TractLabel> labels{{"A", TractLabel::gentrifying},
                                                   {"B", TractLabel::non_gentrifying}};

    // sites: 12 in A, 3 in B, plus one site lacking a post-2018 image
    std::vector<StreetViewImage> archive;
    auto add_site = [&archive](const std::string& id, GeoCoordinate where, bool with_later) {
        archive.push_back(image_at(id + "_e1", where, 0, "2008-05-05"));
        archive.push_back(image_at(id + "_e2", where, 0, "2010-06-06")); // the pre-cutoff pick
        if (with_later) {
            archive.push_back(image_at(id + "_l1", where, 0, "2019-07-07")); // post-cutoff pick
            archive.push_back(image_at(id + "_l2", where, 0, "2021-08-08"));
        }
    };
    for (int i = 0; i < 12; ++i) {
        add_site("a" + std::to_string(i), GeoCoordinate{0.005 + 0.007 * i, 0.02 + 0.005 * i}, true);
    }
    for (int i = 0; i < 3; ++i) {
        add_site("b" + std::to_string(i), GeoCoordinate{0.02 + 0.01 * i, 0.15}, true);
    }
    add_site("nolater", GeoCoordinate{0.09, 0.09}, false);

    ContainerBuildConfig config;
    config.k_min = 4;
    config.k_max = 8;
    config.seed = 77;
    const auto result = build_neighborhood_containers(archive, tracts, labels, config);
    REQUIRE(result.containers.size() == 2);

    const auto& bag_a = result.containers[0];
    CHECK(bag_a.tract.tract_id == "A");
    CHECK(bag_a.pairs.size() == 8); // clamped to k_max from 12 candidates
    CHECK_FALSE(bag_a.warning_low_candidates);
    CHECK(bag_a.label == TractLabel::gentrifying);
    for (const auto& p : bag_a.pairs) {
        CHECK(p.earlier.capture_date <= Date{2010, 12, 31});
        CHECK(Date{2018, 1, 1} <= p.later.capture_date);
        CHECK(p.earlier.image_id.find("_e2") != std::string::npos); // latest pre-cutoff
        CHECK(p.later.image_id.find("_l1") != std::string::npos);   // earliest post-cutoff
        CHECK(geo::point_in_tract(p.earlier.location, bag_a.tract));
    }

    const auto& bag_b = result.containers[1];
    CHECK(bag_b.pairs.size() == 3); // below k_min: keep all, flag it
    CHECK(bag_b.warning_low_candidates);

    // deterministic under seed
    const auto again = build_neighborhood_containers(archive, tracts, labels, config);
    REQUIRE(again.containers.size() == 2);
    for (std::size_t i = 0; i < bag_a.pairs.size(); ++i) {
        CHECK(again.containers[0].pairs[i].pair_id() == bag_a.pairs[i].pair_id());
    }

    // brute-force spatial join: every sampled site lands in the bag whose
    // polygon contains it
    for (const auto& container : result.containers) {
        for (const auto& p : container.pairs) {
            const auto* assigned = geo::assign_tract(p.earlier.location, tracts);
            REQUIRE(assigned != nullptr);
            CHECK(assigned->tract_id == container.tract.tract_id);
        }
    }

    SUBCASE("missing label is rejected") {
        const std::map<std::string, TractLabel> partial{{"A", TractLabel::gentrifying}};
        CHECK_THROWS_AS(build_neighborhood_containers(archive, tracts, partial, config),
                        ValidationError);
    }
    SUBCASE("tract with zero candidates is excluded and reported") {
        const std::vector<geo::TractPolygon> more{square("A", 0.0), square("B", 0.1),
                                                  square("C", 0.3)};
        auto with_c = labels;
        with_c["C"] = TractLabel::non_gentrifiable;
        const auto r = build_neighborhood_containers(archive, more, with_c, config);
        CHECK(r.containers.size() == 2);
        REQUIRE(r.excluded_tracts.size() == 1);
        CHECK(r.excluded_tracts[0] == "C");
    }
}

TEST_CASE("manifest round trips") {
    const auto dir = std::filesystem::temp_directory_path() / "gentrify_manifest_test";
    std::filesystem::create_directories(dir);
    const GeoCoordinate site{37.0, -122.0};

    const auto e1 = image_at("m1", site, 45.0, "2009-01-02");
    const auto l1 = image_at("m2", site, 45.0, "2019-03-04");
    const std::vector<std::pair<TimedPair, PairLabel>> pairs{
        {make_timed_pair(e1, l1), PairLabel{1, LabelSource::synthetic}}};
    const std::string pairs_path = (dir / "pairs.jsonl").string();
    write_pairs_jsonl(pairs_path, pairs);
    const auto pairs_back = read_pairs_jsonl(pairs_path);
    REQUIRE(pairs_back.size() == 1);
    CHECK(pairs_back[0].first.pair_id() == "m1__m2");
    CHECK(pairs_back[0].second.y == 1);

    const std::string archive_path = (dir / "archive.jsonl").string();
    write_archive_manifest(archive_path, {e1, l1});
    CHECK(read_archive_manifest(archive_path).size() == 2);
    auto out_of_window = e1;
    out_of_window.capture_date = Date{2023, 1, 1};
    write_archive_manifest(archive_path, {out_of_window});
    CHECK_THROWS_AS(read_archive_manifest(archive_path), ValidationError);

    NeighborhoodContainer c;
    c.tract = geo::TractPolygon{"T1",
                                {GeoCoordinate{36.9, -122.1}, GeoCoordinate{36.9, -121.9},
                                 GeoCoordinate{37.1, -121.9}, GeoCoordinate{37.1, -122.1},
                                 GeoCoordinate{36.9, -122.1}}};
    c.label = TractLabel::gentrifying;
    c.pairs.push_back(make_timed_pair(e1, l1));
    const std::string containers_path = (dir / "containers.jsonl").string();
    write_containers_jsonl(containers_path, {c});
    const auto back = read_containers_jsonl(containers_path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].tract.tract_id == "T1");
    CHECK(back[0].label == TractLabel::gentrifying);
    CHECK(back[0].tract.ring == c.tract.ring);
    REQUIRE(back[0].pairs.size() == 1);
    CHECK(back[0].pairs[0].pair_id() == "m1__m2");

    const std::map<std::string, TractLabel> labels{{"T1", TractLabel::gentrifying},
                                                   {"T2", TractLabel::non_gentrifiable}};
    const std::string labels_path = (dir / "labels.csv").string();
    write_labels_csv(labels_path, labels);
    CHECK(read_labels_csv(labels_path) == labels);

    const std::vector<ChangeEvent> events{{site, Date{2015, 7, 1}, EventSource::business}};
    const std::string events_path = (dir / "events.jsonl").string();
    write_events_jsonl(events_path, events);
    const auto events_back = read_events_jsonl(events_path);
    REQUIRE(events_back.size() == 1);
    CHECK(events_back[0].event_date == Date{2015, 7, 1});
    CHECK(events_back[0].source == EventSource::business);

    std::filesystem::remove_all(dir);
}

TEST_CASE("permit csv parsing counts unparseable rows") {
    const CsvTable table = parse_csv("issued_date,category,lat,lon,job_value\n"
                                     "2010-01-01,new,10.0,20.0,50000\n"
                                     "not-a-date,new,10.0,20.0,50000\n"
                                     "2010-02-02,new,999.0,20.0,50000\n"
                                     "2010-03-03,new,10.0,20.0,-5\n");
    const auto parsed = parse_permits_csv(table);
    CHECK(parsed.records.size() == 1);
    CHECK(parsed.skipped_rows == 3);

    CHECK_THROWS_AS(parse_permits_csv(parse_csv("a,b\n1,2\n")), ValidationError);

    // remappable headers
    const CsvTable remapped = parse_csv("date,type,latitude,longitude,value\n"
                                        "2010-01-01,new,10.0,20.0,50000\n");
    const std::map<std::string, std::string> column_map{{"issued_date", "date"},
                                                        {"category", "type"},
                                                        {"lat", "latitude"},
                                                        {"lon", "longitude"},
                                                        {"job_value", "value"}};
    CHECK(parse_permits_csv(remapped, column_map).records.size() == 1);
}
