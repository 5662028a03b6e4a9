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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gentrify/common.hpp"
#include "gentrify/geo.hpp"

namespace gentrify::ingest {

// ---------------------------------------------------------------------------
// Domain types

struct StreetViewImage {
    std::string image_id;
    geo::GeoCoordinate location;
    double heading = 0.0; // degrees, [0, 360)
    Date capture_date;
    std::string pixels_ref; // path to an RGB raster
};

/// Two co-located street-view images at ordered capture dates. Construct via
/// make_timed_pair, which enforces date order and the 5 m / 5 degree
/// co-location tolerances.
struct TimedPair {
    StreetViewImage earlier;
    StreetViewImage later;

    [[nodiscard]] std::string pair_id() const { return earlier.image_id + "__" + later.image_id; }
};

inline constexpr double kPairLocationToleranceM = 5.0;
inline constexpr double kPairHeadingToleranceDeg = 5.0;

TimedPair make_timed_pair(StreetViewImage earlier, StreetViewImage later); // throws ValidationError

enum class LabelSource { permit, business, synthetic };

struct PairLabel {
    int y = 0; // 1 iff the pair straddles a change event
    LabelSource source = LabelSource::synthetic;
};

struct PermitRecord {
    Date issued_date;
    std::string category;
    geo::GeoCoordinate location;
    double job_value_nominal = 0.0; // USD, >= 0
    int year = 0;
};

struct BusinessRecord {
    std::string business_id;
    std::string naics; // 6-digit code
    geo::GeoCoordinate location;
    int year = 0;
};

enum class EventSource { permit, business };

struct ChangeEvent {
    geo::GeoCoordinate location;
    Date event_date;
    EventSource source = EventSource::permit;
};

enum class TractLabel { gentrifying, non_gentrifying, non_gentrifiable };

std::string to_string(TractLabel label);
TractLabel tract_label_from_string(std::string_view text);

struct NeighborhoodContainer {
    geo::TractPolygon tract;
    std::vector<TimedPair> pairs;
    TractLabel label = TractLabel::non_gentrifying;
    bool warning_low_candidates = false; // fewer candidates than k_min
};

// ---------------------------------------------------------------------------
// CPI / inflation

/// Annual CPI index table (year -> index).
using CpiTable = std::map<int, double>;

CpiTable read_cpi_table(const std::string& path); // JSON {"2010": 218.056, ...}

/// value * cpi[base_year] / cpi[year]; throws Error when either year is
/// missing from the table.
double adjust_for_inflation(double value, int year, const CpiTable& cpi, int base_year);

// ---------------------------------------------------------------------------
// Permits

struct PermitFilterConfig {
    double min_value = 60'000.0; // inflation-adjusted USD, per location-year
    std::vector<std::string> kept_categories = {"new", "alteration", "addition"};
    int base_year = 2020;
};

/// Sums inflation-adjusted job values of kept-category permits per
/// (location rounded to 5 decimal degrees, year) and emits one event per
/// group whose sum reaches min_value, dated by the group's earliest issue.
std::vector<ChangeEvent> filter_permits(const std::vector<PermitRecord>& records, const CpiTable& cpi,
                                        const PermitFilterConfig& config = {});

struct PermitParseResult {
    std::vector<PermitRecord> records;
    std::size_t skipped_rows = 0; // unparseable rows, counted, never silently dropped
};

/// Expected columns: issued_date, category, lat, lon, job_value (plus
/// optional year; defaults to the issue year). Header names are remappable.
PermitParseResult parse_permits_csv(const CsvTable& table,
                                    const std::map<std::string, std::string>& column_map = {});

// ---------------------------------------------------------------------------
// Businesses

enum class NaicsClass { essential, discretionary, other };

std::string to_string(NaicsClass c);

/// Longest-prefix classification table, e.g. {"445": essential}.
using NaicsMapping = std::vector<std::pair<std::string, NaicsClass>>;

NaicsMapping default_naics_mapping();
NaicsMapping read_naics_mapping(const std::string& path); // JSON {"445": "essential", ...}

NaicsClass classify_naics(const std::string& code, const NaicsMapping& mapping);

/// One event per rounded location where an essential business in year t1 is
/// followed by a discretionary business in some later year t2 > t1; the event
/// year is the earliest such t2, dated July 1 (directories are annual
/// snapshots).
std::vector<ChangeEvent> detect_business_conversions(const std::vector<BusinessRecord>& records,
                                                     const NaicsMapping& mapping);

struct BusinessParseResult {
    std::vector<BusinessRecord> records;
    std::size_t skipped_rows = 0;
};

/// Expected columns: business_id, naics, lat, lon, year.
BusinessParseResult parse_businesses_csv(const CsvTable& table,
                                         const std::map<std::string, std::string>& column_map = {});

// ---------------------------------------------------------------------------
// Weak-labeled pairs

enum class SkipReason { no_nearby_views, insufficient_pre_images, no_post_image };

std::string to_string(SkipReason r);

struct WeakLabelResult {
    std::vector<std::pair<TimedPair, PairLabel>> pairs;
    std::vector<std::pair<std::size_t, SkipReason>> skipped; // (event index, reason)
};

/// For each event with >= 2 images before and >= 1 after its date within
/// radius_m (restricted to one co-located camera site so pair tolerances
/// hold): positive pair = (latest pre, earliest post), negative pair = the
/// two latest pre images in date order.
WeakLabelResult build_weak_labeled_pairs(const std::vector<ChangeEvent>& events,
                                         const std::vector<StreetViewImage>& archive,
                                         double radius_m = 15.0);

// ---------------------------------------------------------------------------
// Neighborhood containers

struct ContainerBuildConfig {
    std::size_t k_min = 100;
    std::size_t k_max = 200;
    std::uint64_t seed = 0;
    Date earlier_cutoff = Date{2010, 12, 31}; // earlier image no later than this
    Date later_cutoff = Date{2018, 1, 1};     // later image no earlier than this
};

struct ContainerBuildResult {
    std::vector<NeighborhoodContainer> containers;
    std::vector<std::string> excluded_tracts; // zero candidates
};

/// Forms one candidate pair per camera site (latest pre-cutoff image, earliest
/// post-cutoff image), assigns sites to tracts, and samples
/// K = clamp(candidates, k_min, k_max) pairs per tract without replacement.
ContainerBuildResult build_neighborhood_containers(const std::vector<StreetViewImage>& archive,
                                                   const std::vector<geo::TractPolygon>& tracts,
                                                   const std::map<std::string, TractLabel>& labels,
                                                   const ContainerBuildConfig& config);

// ---------------------------------------------------------------------------
// Manifest (JSON Lines) serialization shared by real and synthetic data

std::string image_to_jsonl(const StreetViewImage& img);
StreetViewImage image_from_jsonl(const std::string& line);
std::vector<StreetViewImage> read_archive_manifest(const std::string& path);
void write_archive_manifest(const std::string& path, const std::vector<StreetViewImage>& images);

void write_events_jsonl(const std::string& path, const std::vector<ChangeEvent>& events);
std::vector<ChangeEvent> read_events_jsonl(const std::string& path);

void write_pairs_jsonl(const std::string& path,
                       const std::vector<std::pair<TimedPair, PairLabel>>& pairs);
std::vector<std::pair<TimedPair, PairLabel>> read_pairs_jsonl(const std::string& path);

void write_containers_jsonl(const std::string& path, const std::vector<NeighborhoodContainer>& containers);
std::vector<NeighborhoodContainer> read_containers_jsonl(const std::string& path);

std::map<std::string, TractLabel> read_labels_csv(const std::string& path); // tract_id,label
void write_labels_csv(const std::string& path, const std::map<std::string, TractLabel>& labels);

/// Grouping key used for permits, conversions, and site clustering:
/// coordinates rounded to 5 decimal degrees (~1.1 m).
std::pair<std::int64_t, std::int64_t> rounded_location_key(const geo::GeoCoordinate& c);

} // namespace gentrify::ingest
