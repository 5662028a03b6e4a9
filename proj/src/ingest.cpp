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

#include "gentrify/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace gentrify::ingest {

namespace {

std::string lower_trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    std::string out(s.substr(b, e - b));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double heading_difference(double a, double b) {
    double d = std::fmod(std::abs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

/// Camera-site key: rounded coordinate plus heading to the nearest degree.
struct SiteKey {
    std::int64_t lat_key;
    std::int64_t lon_key;
    int heading_key;

    auto operator<=>(const SiteKey&) const = default;
};

SiteKey site_key(const StreetViewImage& img) {
    const auto [lat_key, lon_key] = rounded_location_key(img.location);
    return SiteKey{lat_key, lon_key,
                   static_cast<int>(std::llround(img.heading)) % 360};
}

void sort_by_date(std::vector<const StreetViewImage*>& images) {
    std::sort(images.begin(), images.end(), [](const StreetViewImage* a, const StreetViewImage* b) {
        return std::tie(a->capture_date, a->image_id) < std::tie(b->capture_date, b->image_id);
    });
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ValidationError("not a number: '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ValidationError("not an integer: '" + s + "'");
    }
    return v;
}

std::string mapped(const std::map<std::string, std::string>& column_map, const std::string& logical) {
    const auto it = column_map.find(logical);
    return it == column_map.end() ? logical : it->second;
}

int require_column(const CsvTable& table, const std::map<std::string, std::string>& column_map,
                   const std::string& logical) {
    const std::string name = mapped(column_map, logical);
    const int idx = table.column(name);
    if (idx < 0) {
        throw ValidationError("CSV is missing column '" + name + "'");
    }
    return idx;
}

json image_to_json(const StreetViewImage& img) {
    return json{{"image_id", img.image_id}, {"lat", img.location.lat},
                {"lon", img.location.lon}, {"heading", img.heading},
                {"capture_date", img.capture_date.str()}, {"path", img.pixels_ref}};
}

StreetViewImage image_from_json(const json& j) {
    StreetViewImage img;
    img.image_id = j.at("image_id").get<std::string>();
    img.location = geo::make_coordinate(j.at("lat").get<double>(), j.at("lon").get<double>());
    img.heading = j.at("heading").get<double>();
    img.capture_date = Date::parse(j.at("capture_date").get<std::string>());
    img.pixels_ref = j.value("path", "");
    return img;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

} // namespace

std::pair<std::int64_t, std::int64_t> rounded_location_key(const geo::GeoCoordinate& c) {
    return {static_cast<std::int64_t>(std::llround(c.lat * 1e5)),
            static_cast<std::int64_t>(std::llround(c.lon * 1e5))};
}

TimedPair make_timed_pair(StreetViewImage earlier, StreetViewImage later) {
    if (!(earlier.capture_date < later.capture_date)) {
        throw ValidationError("timed pair: earlier capture date must precede the later one (" +
                              earlier.capture_date.str() + " vs " + later.capture_date.str() + ")");
    }
    const double dist = geo::haversine_distance(earlier.location, later.location);
    if (dist > kPairLocationToleranceM) {
        throw ValidationError("timed pair: images are " + std::to_string(dist) + " m apart (max 5)");
    }
    if (heading_difference(earlier.heading, later.heading) > kPairHeadingToleranceDeg) {
        throw ValidationError("timed pair: heading difference exceeds 5 degrees");
    }
    return TimedPair{std::move(earlier), std::move(later)};
}

std::string to_string(TractLabel label) {
    switch (label) {
    case TractLabel::gentrifying: return "gentrifying";
    case TractLabel::non_gentrifying: return "non_gentrifying";
    case TractLabel::non_gentrifiable: return "non_gentrifiable";
    }
    return "non_gentrifying";
}

TractLabel tract_label_from_string(std::string_view text) {
    if (text == "gentrifying") return TractLabel::gentrifying;
    if (text == "non_gentrifying") return TractLabel::non_gentrifying;
    if (text == "non_gentrifiable") return TractLabel::non_gentrifiable;
    throw ValidationError("unknown tract label '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// CPI

CpiTable read_cpi_table(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("invalid CPI table: ") + e.what());
    }
    CpiTable table;
    for (const auto& [year, value] : doc.items()) {
        table[parse_int(year)] = value.get<double>();
    }
    return table;
}

double adjust_for_inflation(double value, int year, const CpiTable& cpi, int base_year) {
    const auto y = cpi.find(year);
    if (y == cpi.end()) {
        throw Error("CPI table has no entry for year " + std::to_string(year));
    }
    const auto b = cpi.find(base_year);
    if (b == cpi.end()) {
        throw Error("CPI table has no entry for base year " + std::to_string(base_year));
    }
    return value * b->second / y->second;
}

// ---------------------------------------------------------------------------
// Permits

std::vector<ChangeEvent> filter_permits(const std::vector<PermitRecord>& records, const CpiTable& cpi,
                                        const PermitFilterConfig& config) {
    std::vector<std::string> kept;
    kept.reserve(config.kept_categories.size());
    for (const auto& c : config.kept_categories) {
        kept.push_back(lower_trim(c));
    }

    struct Group {
        double adjusted_sum = 0.0;
        Date earliest;
        bool any = false;
    };
    std::map<std::tuple<std::int64_t, std::int64_t, int>, Group> groups;
    for (const auto& rec : records) {
        if (std::find(kept.begin(), kept.end(), lower_trim(rec.category)) == kept.end()) {
            continue;
        }
        const auto [lat_key, lon_key] = rounded_location_key(rec.location);
        auto& group = groups[{lat_key, lon_key, rec.year}];
        group.adjusted_sum += adjust_for_inflation(rec.job_value_nominal, rec.year, cpi, config.base_year);
        if (!group.any || rec.issued_date < group.earliest) {
            group.earliest = rec.issued_date;
            group.any = true;
        }
    }

    std::vector<ChangeEvent> events;
    for (const auto& [key, group] : groups) {
        if (group.adjusted_sum >= config.min_value) {
            const auto& [lat_key, lon_key, year] = key;
            events.push_back(ChangeEvent{
                geo::GeoCoordinate{static_cast<double>(lat_key) / 1e5, static_cast<double>(lon_key) / 1e5},
                group.earliest, EventSource::permit});
        }
    }
    return events;
}

PermitParseResult parse_permits_csv(const CsvTable& table,
                                    const std::map<std::string, std::string>& column_map) {
    PermitParseResult result;
    const int c_date = require_column(table, column_map, "issued_date");
    const int c_cat = require_column(table, column_map, "category");
    const int c_lat = require_column(table, column_map, "lat");
    const int c_lon = require_column(table, column_map, "lon");
    const int c_value = require_column(table, column_map, "job_value");
    const int c_year = table.column(mapped(column_map, "year")); // optional

    for (const auto& row : table.rows) {
        try {
            PermitRecord rec;
            rec.issued_date = Date::parse(row.at(static_cast<std::size_t>(c_date)));
            rec.category = row.at(static_cast<std::size_t>(c_cat));
            rec.location = geo::make_coordinate(parse_double(row.at(static_cast<std::size_t>(c_lat))),
                                                parse_double(row.at(static_cast<std::size_t>(c_lon))));
            rec.job_value_nominal = parse_double(row.at(static_cast<std::size_t>(c_value)));
            if (rec.job_value_nominal < 0.0) {
                throw ValidationError("negative job value");
            }
            rec.year = c_year >= 0 ? parse_int(row.at(static_cast<std::size_t>(c_year)))
                                   : rec.issued_date.year;
            result.records.push_back(std::move(rec));
        } catch (const std::exception&) {
            ++result.skipped_rows;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Businesses

std::string to_string(NaicsClass c) {
    switch (c) {
    case NaicsClass::essential: return "essential";
    case NaicsClass::discretionary: return "discretionary";
    case NaicsClass::other: return "other";
    }
    return "other";
}

NaicsMapping default_naics_mapping() {
    // Documented defaults mirroring the usual examples: grocery stores and
    // laundries are essential retail; full-service restaurants, coffee shops
    // and art galleries are discretionary.
    return {
        {"4451", NaicsClass::essential},   // grocery stores
        {"8123", NaicsClass::essential},   // drycleaning and laundry services
        {"722511", NaicsClass::discretionary}, // full-service restaurants
        {"722515", NaicsClass::discretionary}, // snack and coffee shops
        {"7121", NaicsClass::discretionary},   // museums and art galleries
    };
}

NaicsMapping read_naics_mapping(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("invalid NAICS mapping: ") + e.what());
    }
    NaicsMapping mapping;
    for (const auto& [prefix, klass] : doc.items()) {
        const std::string k = klass.get<std::string>();
        if (k == "essential") {
            mapping.emplace_back(prefix, NaicsClass::essential);
        } else if (k == "discretionary") {
            mapping.emplace_back(prefix, NaicsClass::discretionary);
        } else {
            throw ValidationError("NAICS class must be essential or discretionary, got '" + k + "'");
        }
    }
    return mapping;
}

NaicsClass classify_naics(const std::string& code, const NaicsMapping& mapping) {
    if (code.empty() || !std::all_of(code.begin(), code.end(),
                                     [](unsigned char c) { return std::isdigit(c); })) {
        throw ValidationError("malformed NAICS code '" + code + "'");
    }
    std::size_t best_len = 0;
    NaicsClass best = NaicsClass::other;
    for (const auto& [prefix, klass] : mapping) {
        if (prefix.size() > best_len && code.size() >= prefix.size() &&
            code.compare(0, prefix.size(), prefix) == 0) {
            best_len = prefix.size();
            best = klass;
        }
    }
    return best;
}

std::vector<ChangeEvent> detect_business_conversions(const std::vector<BusinessRecord>& records,
                                                     const NaicsMapping& mapping) {
    struct YearClasses {
        std::vector<int> essential_years;
        std::vector<int> discretionary_years;
    };
    std::map<std::pair<std::int64_t, std::int64_t>, YearClasses> by_location;
    for (const auto& rec : records) {
        const NaicsClass klass = classify_naics(rec.naics, mapping);
        if (klass == NaicsClass::other) {
            continue;
        }
        auto& entry = by_location[rounded_location_key(rec.location)];
        (klass == NaicsClass::essential ? entry.essential_years : entry.discretionary_years)
            .push_back(rec.year);
    }

    std::vector<ChangeEvent> events;
    for (const auto& [key, entry] : by_location) {
        if (entry.essential_years.empty() || entry.discretionary_years.empty()) {
            continue;
        }
        const int first_essential =
            *std::min_element(entry.essential_years.begin(), entry.essential_years.end());
        int event_year = 0;
        bool found = false;
        for (const int t2 : entry.discretionary_years) {
            if (t2 > first_essential && (!found || t2 < event_year)) {
                event_year = t2;
                found = true;
            }
        }
        if (found) {
            events.push_back(ChangeEvent{
                geo::GeoCoordinate{static_cast<double>(key.first) / 1e5,
                                   static_cast<double>(key.second) / 1e5},
                Date{event_year, 7, 1}, EventSource::business});
        }
    }
    return events;
}

BusinessParseResult parse_businesses_csv(const CsvTable& table,
                                         const std::map<std::string, std::string>& column_map) {
    BusinessParseResult result;
    const int c_id = require_column(table, column_map, "business_id");
    const int c_naics = require_column(table, column_map, "naics");
    const int c_lat = require_column(table, column_map, "lat");
    const int c_lon = require_column(table, column_map, "lon");
    const int c_year = require_column(table, column_map, "year");
    for (const auto& row : table.rows) {
        try {
            BusinessRecord rec;
            rec.business_id = row.at(static_cast<std::size_t>(c_id));
            rec.naics = row.at(static_cast<std::size_t>(c_naics));
            rec.location = geo::make_coordinate(parse_double(row.at(static_cast<std::size_t>(c_lat))),
                                                parse_double(row.at(static_cast<std::size_t>(c_lon))));
            rec.year = parse_int(row.at(static_cast<std::size_t>(c_year)));
            if (rec.year < 2007 || rec.year > 2020) {
                throw ValidationError("year outside the 2007-2020 directory window");
            }
            result.records.push_back(std::move(rec));
        } catch (const std::exception&) {
            ++result.skipped_rows;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Weak-labeled pairs

std::string to_string(SkipReason r) {
    switch (r) {
    case SkipReason::no_nearby_views: return "no_nearby_views";
    case SkipReason::insufficient_pre_images: return "insufficient_pre_images";
    case SkipReason::no_post_image: return "no_post_image";
    }
    return "no_nearby_views";
}

WeakLabelResult build_weak_labeled_pairs(const std::vector<ChangeEvent>& events,
                                         const std::vector<StreetViewImage>& archive,
                                         double radius_m) {
    WeakLabelResult result;
    for (std::size_t ei = 0; ei < events.size(); ++ei) {
        const auto& event = events[ei];
        std::map<SiteKey, std::vector<const StreetViewImage*>> sites;
        for (const auto& img : archive) {
            if (geo::haversine_distance(img.location, event.location) <= radius_m) {
                sites[site_key(img)].push_back(&img);
            }
        }
        if (sites.empty()) {
            result.skipped.emplace_back(ei, SkipReason::no_nearby_views);
            continue;
        }

        // Pick the best-covered qualifying co-located site; ties go to the
        // smallest site key (map order).
        const std::vector<const StreetViewImage*>* best_site = nullptr;
        std::size_t max_pre_any_site = 0;
        for (auto& [key, images] : sites) {
            sort_by_date(images);
            std::size_t pre = 0;
            bool post = false;
            for (const auto* img : images) {
                if (img->capture_date < event.event_date) {
                    ++pre;
                } else if (event.event_date < img->capture_date) {
                    post = true;
                }
            }
            max_pre_any_site = std::max(max_pre_any_site, pre);
            if (pre >= 2 && post && (best_site == nullptr || images.size() > best_site->size())) {
                best_site = &images;
            }
        }

        if (best_site == nullptr) {
            result.skipped.emplace_back(ei, max_pre_any_site < 2 ? SkipReason::insufficient_pre_images
                                                                 : SkipReason::no_post_image);
            continue;
        }

        std::vector<const StreetViewImage*> pre;
        const StreetViewImage* first_post = nullptr;
        for (const auto* img : *best_site) {
            if (img->capture_date < event.event_date) {
                pre.push_back(img);
            } else if (event.event_date < img->capture_date && first_post == nullptr) {
                first_post = img;
            }
        }
        const LabelSource source =
            event.source == EventSource::permit ? LabelSource::permit : LabelSource::business;
        result.pairs.emplace_back(make_timed_pair(*pre.back(), *first_post), PairLabel{1, source});
        result.pairs.emplace_back(make_timed_pair(*pre[pre.size() - 2], *pre.back()),
                                  PairLabel{0, source});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Neighborhood containers

ContainerBuildResult build_neighborhood_containers(const std::vector<StreetViewImage>& archive,
                                                   const std::vector<geo::TractPolygon>& tracts,
                                                   const std::map<std::string, TractLabel>& labels,
                                                   const ContainerBuildConfig& config) {
    for (const auto& t : tracts) {
        if (!labels.count(t.tract_id)) {
            throw ValidationError("no label for tract " + t.tract_id);
        }
    }

    std::map<SiteKey, std::vector<const StreetViewImage*>> sites;
    for (const auto& img : archive) {
        sites[site_key(img)].push_back(&img);
    }

    std::map<std::string, std::vector<TimedPair>> candidates;
    for (auto& [key, images] : sites) {
        sort_by_date(images);
        const StreetViewImage* earlier = nullptr;
        const StreetViewImage* later = nullptr;
        for (const auto* img : images) {
            if (!(config.earlier_cutoff < img->capture_date)) {
                earlier = img; // latest pre-cutoff capture
            }
            if (!(img->capture_date < config.later_cutoff) && later == nullptr) {
                later = img; // earliest post-cutoff capture
            }
        }
        if (earlier == nullptr || later == nullptr) {
            continue;
        }
        const auto* tract = geo::assign_tract(earlier->location, tracts);
        if (tract == nullptr) {
            continue;
        }
        candidates[tract->tract_id].push_back(make_timed_pair(*earlier, *later));
    }

    ContainerBuildResult result;
    for (const auto& tract : tracts) {
        auto it = candidates.find(tract.tract_id);
        if (it == candidates.end() || it->second.empty()) {
            result.excluded_tracts.push_back(tract.tract_id);
            continue;
        }
        auto& pool = it->second;
        std::sort(pool.begin(), pool.end(), [](const TimedPair& a, const TimedPair& b) {
            return a.pair_id() < b.pair_id();
        });

        NeighborhoodContainer container;
        container.tract = tract;
        container.label = labels.at(tract.tract_id);
        if (pool.size() > config.k_max) {
            Rng rng(derive_seed(config.seed, "bag-" + tract.tract_id));
            auto picks = rng.sample_without_replacement(pool.size(), config.k_max);
            std::sort(picks.begin(), picks.end());
            for (const std::size_t p : picks) {
                container.pairs.push_back(pool[p]);
            }
        } else {
            container.pairs = pool;
            if (pool.size() < config.k_min) {
                container.warning_low_candidates = true;
            }
        }
        result.containers.push_back(std::move(container));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Manifests

std::string image_to_jsonl(const StreetViewImage& img) {
    return image_to_json(img).dump();
}

StreetViewImage image_from_jsonl(const std::string& line) {
    return image_from_json(json::parse(line));
}

std::vector<StreetViewImage> read_archive_manifest(const std::string& path) {
    std::vector<StreetViewImage> images;
    for (const auto& line : split_lines(read_file(path))) {
        StreetViewImage img = image_from_jsonl(line);
        const Date lo{2007, 1, 1};
        const Date hi{2022, 12, 31};
        if (img.capture_date < lo || hi < img.capture_date) {
            throw ValidationError("archive image " + img.image_id + " captured outside 2007-2022: " +
                                  img.capture_date.str());
        }
        images.push_back(std::move(img));
    }
    return images;
}

void write_archive_manifest(const std::string& path, const std::vector<StreetViewImage>& images) {
    std::ostringstream out;
    for (const auto& img : images) {
        out << image_to_jsonl(img) << '\n';
    }
    write_file_atomic(path, out.str());
}

void write_events_jsonl(const std::string& path, const std::vector<ChangeEvent>& events) {
    std::ostringstream out;
    for (const auto& e : events) {
        out << json{{"lat", e.location.lat},
                    {"lon", e.location.lon},
                    {"event_date", e.event_date.str()},
                    {"source", e.source == EventSource::permit ? "permit" : "business"}}
                   .dump()
            << '\n';
    }
    write_file_atomic(path, out.str());
}

std::vector<ChangeEvent> read_events_jsonl(const std::string& path) {
    std::vector<ChangeEvent> events;
    for (const auto& line : split_lines(read_file(path))) {
        const json j = json::parse(line);
        events.push_back(ChangeEvent{
            geo::make_coordinate(j.at("lat").get<double>(), j.at("lon").get<double>()),
            Date::parse(j.at("event_date").get<std::string>()),
            j.at("source").get<std::string>() == "permit" ? EventSource::permit
                                                          : EventSource::business});
    }
    return events;
}

namespace {

const char* label_source_name(LabelSource s) {
    switch (s) {
    case LabelSource::permit: return "permit";
    case LabelSource::business: return "business";
    case LabelSource::synthetic: return "synthetic";
    }
    return "synthetic";
}

LabelSource label_source_from(const std::string& s) {
    if (s == "permit") return LabelSource::permit;
    if (s == "business") return LabelSource::business;
    return LabelSource::synthetic;
}

} // namespace

void write_pairs_jsonl(const std::string& path,
                       const std::vector<std::pair<TimedPair, PairLabel>>& pairs) {
    std::ostringstream out;
    for (const auto& [pair, label] : pairs) {
        out << json{{"pair_id", pair.pair_id()},
                    {"y", label.y},
                    {"source", label_source_name(label.source)},
                    {"earlier", image_to_json(pair.earlier)},
                    {"later", image_to_json(pair.later)}}
                   .dump()
            << '\n';
    }
    write_file_atomic(path, out.str());
}

std::vector<std::pair<TimedPair, PairLabel>> read_pairs_jsonl(const std::string& path) {
    std::vector<std::pair<TimedPair, PairLabel>> pairs;
    for (const auto& line : split_lines(read_file(path))) {
        const json j = json::parse(line);
        pairs.emplace_back(
            make_timed_pair(image_from_json(j.at("earlier")), image_from_json(j.at("later"))),
            PairLabel{j.at("y").get<int>(), label_source_from(j.at("source").get<std::string>())});
    }
    return pairs;
}

void write_containers_jsonl(const std::string& path,
                            const std::vector<NeighborhoodContainer>& containers) {
    std::ostringstream out;
    for (const auto& c : containers) {
        json ring = json::array();
        for (const auto& v : c.tract.ring) {
            ring.push_back(json::array({v.lon, v.lat}));
        }
        json pairs = json::array();
        for (const auto& p : c.pairs) {
            pairs.push_back(json{{"pair_id", p.pair_id()},
                                 {"earlier", image_to_json(p.earlier)},
                                 {"later", image_to_json(p.later)}});
        }
        out << json{{"tract_id", c.tract.tract_id},
                    {"label", to_string(c.label)},
                    {"warning_low_candidates", c.warning_low_candidates},
                    {"ring", ring},
                    {"pairs", pairs}}
                   .dump()
            << '\n';
    }
    write_file_atomic(path, out.str());
}

std::vector<NeighborhoodContainer> read_containers_jsonl(const std::string& path) {
    std::vector<NeighborhoodContainer> containers;
    for (const auto& line : split_lines(read_file(path))) {
        const json j = json::parse(line);
        NeighborhoodContainer c;
        c.tract.tract_id = j.at("tract_id").get<std::string>();
        for (const auto& v : j.at("ring")) {
            c.tract.ring.push_back(geo::make_coordinate(v[1].get<double>(), v[0].get<double>()));
        }
        c.label = tract_label_from_string(j.at("label").get<std::string>());
        c.warning_low_candidates = j.value("warning_low_candidates", false);
        for (const auto& p : j.at("pairs")) {
            c.pairs.push_back(
                make_timed_pair(image_from_json(p.at("earlier")), image_from_json(p.at("later"))));
        }
        containers.push_back(std::move(c));
    }
    return containers;
}

std::map<std::string, TractLabel> read_labels_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int c_id = table.column("tract_id");
    const int c_label = table.column("label");
    if (c_id < 0 || c_label < 0) {
        throw ValidationError("labels CSV needs columns tract_id,label");
    }
    std::map<std::string, TractLabel> labels;
    for (const auto& row : table.rows) {
        labels[row.at(static_cast<std::size_t>(c_id))] =
            tract_label_from_string(row.at(static_cast<std::size_t>(c_label)));
    }
    return labels;
}

void write_labels_csv(const std::string& path, const std::map<std::string, TractLabel>& labels) {
    std::ostringstream out;
    out << "tract_id,label\n";
    for (const auto& [id, label] : labels) {
        out << id << ',' << to_string(label) << '\n';
    }
    write_file_atomic(path, out.str());
}

} // namespace gentrify::ingest
