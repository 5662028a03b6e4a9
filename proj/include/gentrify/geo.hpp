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

namespace gentrify::geo {

/// WGS84 degrees. lat in [-90, 90], lon in [-180, 180).
struct GeoCoordinate {
    double lat = 0.0;
    double lon = 0.0;

    auto operator<=>(const GeoCoordinate&) const = default;
};

bool valid_coordinate(const GeoCoordinate& c);
GeoCoordinate make_coordinate(double lat, double lon); // throws ValidationError

/// Census-tract boundary: a single closed ring (first == last vertex, at
/// least 4 vertices counting the closing one), simple, no holes.
struct TractPolygon {
    std::string tract_id;
    std::vector<GeoCoordinate> ring;
};

/// Road polylines; every polyline has >= 2 vertices and positive length.
struct RoadNetwork {
    std::vector<std::vector<GeoCoordinate>> segments;
};

inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Great-circle distance in meters on a spherical Earth.
double haversine_distance(const GeoCoordinate& a, const GeoCoordinate& b);

/// Walks each polyline by cumulative arc length and emits the start vertex
/// plus one interpolated point per spacing_m step. The end vertex is emitted
/// only when it falls exactly on a step. With jitter enabled the seed offsets
/// each polyline's phase by a uniform fraction of the spacing; with jitter
/// off (default) the seed is unused and output depends on geometry alone.
std::vector<GeoCoordinate> sample_road_points(const RoadNetwork& network, double spacing_m,
                                              std::uint64_t seed, bool jitter = false);

/// Even-odd ray-casting containment in the lon/lat plane. Points on the
/// boundary count as inside.
bool point_in_tract(const GeoCoordinate& p, const TractPolygon& poly);

/// Containing tract, with boundary ties broken by lexicographically smallest
/// tract_id so every point lands in at most one tract. nullptr when outside
/// all of them. `tracts` must already be sorted by tract_id (the loaders
/// guarantee this).
const TractPolygon* assign_tract(const GeoCoordinate& p, const std::vector<TractPolygon>& tracts);

void validate_polygon(const TractPolygon& poly);            // throws ValidationError
void validate_tract_set(const std::vector<TractPolygon>& tracts);
void validate_network(const RoadNetwork& network);

// GeoJSON I/O. Tract features must be Polygon geometries (single ring; holes
// and MultiPolygon are rejected) carrying a "tract_id" property. Road
// features may be LineString or MultiLineString. Returned tracts are sorted
// by tract_id.
std::vector<TractPolygon> read_tracts_geojson(const std::string& path);
std::vector<TractPolygon> parse_tracts_geojson(const std::string& text);
RoadNetwork read_roads_geojson(const std::string& path);
RoadNetwork parse_roads_geojson(const std::string& text);
std::string tracts_to_geojson(const std::vector<TractPolygon>& tracts);

} // namespace gentrify::geo
