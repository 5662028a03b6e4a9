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

#include "gentrify/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace gentrify::geo {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

double sq(double x) { return x * x; }

struct Vec2 {
    double x; // lon
    double y; // lat
};

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const GeoCoordinate& p, const GeoCoordinate& a, const GeoCoordinate& b) {
    const Vec2 o{a.lon, a.lat};
    const Vec2 q{b.lon, b.lat};
    const Vec2 t{p.lon, p.lat};
    const double scale = std::max({std::abs(a.lon), std::abs(b.lon), std::abs(a.lat),
                                   std::abs(b.lat), std::abs(p.lon), std::abs(p.lat), 1.0});
    if (std::abs(cross(o, q, t)) > 1e-12 * sq(scale)) {
        return false;
    }
    return p.lon >= std::min(a.lon, b.lon) - 1e-15 && p.lon <= std::max(a.lon, b.lon) + 1e-15 &&
           p.lat >= std::min(a.lat, b.lat) - 1e-15 && p.lat <= std::max(a.lat, b.lat) + 1e-15;
}

// Proper segment intersection test (shared endpoints do not count).
bool segments_cross(const GeoCoordinate& a, const GeoCoordinate& b, const GeoCoordinate& c,
                    const GeoCoordinate& d) {
    const Vec2 p{a.lon, a.lat};
    const Vec2 q{b.lon, b.lat};
    const Vec2 r{c.lon, c.lat};
    const Vec2 s{d.lon, d.lat};
    const double d1 = cross(p, q, r);
    const double d2 = cross(p, q, s);
    const double d3 = cross(r, s, p);
    const double d4 = cross(r, s, q);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

GeoCoordinate lerp(const GeoCoordinate& a, const GeoCoordinate& b, double t) {
    return GeoCoordinate{a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon)};
}

json coordinate_to_json(const GeoCoordinate& c) {
    return json::array({c.lon, c.lat});
}

GeoCoordinate coordinate_from_json(const json& j) {
    if (!j.is_array() || j.size() < 2) {
        throw ValidationError("GeoJSON position must be [lon, lat]");
    }
    return make_coordinate(j[1].get<double>(), j[0].get<double>());
}

} // namespace

bool valid_coordinate(const GeoCoordinate& c) {
    return c.lat >= -90.0 && c.lat <= 90.0 && c.lon >= -180.0 && c.lon < 180.0;
}

GeoCoordinate make_coordinate(double lat, double lon) {
    const GeoCoordinate c{lat, lon};
    if (!valid_coordinate(c)) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "coordinate out of range: lat=%g lon=%g", lat, lon);
        throw ValidationError(buf);
    }
    return c;
}

double haversine_distance(const GeoCoordinate& a, const GeoCoordinate& b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlam = (b.lon - a.lon) * kDegToRad;
    const double h = sq(std::sin(dphi / 2)) + std::cos(phi1) * std::cos(phi2) * sq(std::sin(dlam / 2));
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

std::vector<GeoCoordinate> sample_road_points(const RoadNetwork& network, double spacing_m,
                                              std::uint64_t seed, bool jitter) {
    if (!(spacing_m > 0.0)) {
        throw ValidationError("sample_road_points: spacing_m must be positive");
    }
    if (spacing_m < 50.0 || spacing_m > 100.0) {
        std::fprintf(stderr, "warning: road sampling spacing %.1f m is outside the usual 50-100 m range\n",
                     spacing_m);
    }
    std::vector<GeoCoordinate> out;
    Rng rng(seed);
    for (const auto& line : network.segments) {
        if (line.size() < 2) {
            continue;
        }
        std::vector<double> cum(line.size(), 0.0);
        for (std::size_t i = 1; i < line.size(); ++i) {
            cum[i] = cum[i - 1] + haversine_distance(line[i - 1], line[i]);
        }
        const double total = cum.back();
        const double phase = jitter ? rng.uniform() * spacing_m : 0.0;
        std::size_t seg = 1;
        for (double pos = phase; pos <= total; pos += spacing_m) {
            while (seg + 1 < line.size() && cum[seg] < pos) {
                ++seg;
            }
            const double seg_len = cum[seg] - cum[seg - 1];
            const double t = seg_len > 0.0 ? (pos - cum[seg - 1]) / seg_len : 0.0;
            out.push_back(lerp(line[seg - 1], line[seg], std::clamp(t, 0.0, 1.0)));
        }
    }
    return out;
}

bool point_in_tract(const GeoCoordinate& p, const TractPolygon& poly) {
    const auto& ring = poly.ring;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        if (on_segment(p, ring[i], ring[i + 1])) {
            return true;
        }
    }
    bool inside = false;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const auto& a = ring[i];
        const auto& b = ring[i + 1];
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
            if (p.lon < x) {
                inside = !inside;
            }
        }
    }
    return inside;
}

const TractPolygon* assign_tract(const GeoCoordinate& p, const std::vector<TractPolygon>& tracts) {
    for (const auto& t : tracts) {
        if (point_in_tract(p, t)) {
            return &t;
        }
    }
    return nullptr;
}

void validate_polygon(const TractPolygon& poly) {
    const auto& ring = poly.ring;
    if (ring.size() < 4) {
        throw ValidationError("tract " + poly.tract_id + ": ring needs >= 4 vertices");
    }
    if (ring.front() != ring.back()) {
        throw ValidationError("tract " + poly.tract_id + ": ring is not closed");
    }
    for (const auto& c : ring) {
        if (!valid_coordinate(c)) {
            throw ValidationError("tract " + poly.tract_id + ": vertex out of range");
        }
    }
    const std::size_t n = ring.size() - 1; // edges
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (segments_cross(ring[i], ring[i + 1], ring[j], ring[j + 1])) {
                throw ValidationError("tract " + poly.tract_id + ": self-intersecting ring");
            }
        }
    }
}

void validate_tract_set(const std::vector<TractPolygon>& tracts) {
    for (const auto& t : tracts) {
        validate_polygon(t);
    }
    for (std::size_t i = 0; i < tracts.size(); ++i) {
        for (std::size_t j = i + 1; j < tracts.size(); ++j) {
            if (tracts[i].tract_id == tracts[j].tract_id) {
                throw ValidationError("duplicate tract_id: " + tracts[i].tract_id);
            }
            // Disjoint interiors: no edge crossings and no vertex of one ring
            // strictly interior to the other.
            const auto& a = tracts[i].ring;
            const auto& b = tracts[j].ring;
            for (std::size_t u = 0; u + 1 < a.size(); ++u) {
                for (std::size_t v = 0; v + 1 < b.size(); ++v) {
                    if (segments_cross(a[u], a[u + 1], b[v], b[v + 1])) {
                        throw ValidationError("tracts " + tracts[i].tract_id + " and " +
                                              tracts[j].tract_id + " overlap");
                    }
                }
            }
            auto strictly_inside = [](const GeoCoordinate& p, const TractPolygon& poly) {
                for (std::size_t e = 0; e + 1 < poly.ring.size(); ++e) {
                    if (on_segment(p, poly.ring[e], poly.ring[e + 1])) {
                        return false;
                    }
                }
                return point_in_tract(p, poly);
            };
            for (std::size_t u = 0; u + 1 < a.size(); ++u) {
                if (strictly_inside(a[u], tracts[j])) {
                    throw ValidationError("tract " + tracts[i].tract_id + " lies inside " +
                                          tracts[j].tract_id);
                }
            }
            for (std::size_t v = 0; v + 1 < b.size(); ++v) {
                if (strictly_inside(b[v], tracts[i])) {
                    throw ValidationError("tract " + tracts[j].tract_id + " lies inside " +
                                          tracts[i].tract_id);
                }
            }
        }
    }
}

void validate_network(const RoadNetwork& network) {
    for (const auto& line : network.segments) {
        if (line.size() < 2) {
            throw ValidationError("road polyline needs >= 2 vertices");
        }
        double total = 0.0;
        for (std::size_t i = 1; i < line.size(); ++i) {
            total += haversine_distance(line[i - 1], line[i]);
        }
        if (!(total > 0.0)) {
            throw ValidationError("road polyline has zero length");
        }
    }
}

std::vector<TractPolygon> parse_tracts_geojson(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("invalid GeoJSON: ") + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection") {
        throw ValidationError("expected a GeoJSON FeatureCollection");
    }
    std::vector<TractPolygon> tracts;
    for (const auto& feature : doc.value("features", json::array())) {
        const auto& geom = feature.at("geometry");
        const std::string type = geom.value("type", "");
        if (type != "Polygon") {
            throw ValidationError("unsupported tract geometry '" + type + "' (only Polygon)");
        }
        const auto& rings = geom.at("coordinates");
        if (!rings.is_array() || rings.empty()) {
            throw ValidationError("Polygon without coordinates");
        }
        if (rings.size() > 1) {
            throw ValidationError("polygons with holes are not supported");
        }
        TractPolygon poly;
        if (!feature.contains("properties") || !feature["properties"].contains("tract_id")) {
            throw ValidationError("tract feature missing 'tract_id' property");
        }
        poly.tract_id = feature["properties"]["tract_id"].get<std::string>();
        for (const auto& pos : rings[0]) {
            poly.ring.push_back(coordinate_from_json(pos));
        }
        tracts.push_back(std::move(poly));
    }
    std::sort(tracts.begin(), tracts.end(),
              [](const auto& a, const auto& b) { return a.tract_id < b.tract_id; });
    validate_tract_set(tracts);
    return tracts;
}

std::vector<TractPolygon> read_tracts_geojson(const std::string& path) {
    return parse_tracts_geojson(read_file(path));
}

RoadNetwork parse_roads_geojson(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("invalid GeoJSON: ") + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection") {
        throw ValidationError("expected a GeoJSON FeatureCollection");
    }
    RoadNetwork network;
    auto add_line = [&network](const json& coords) {
        std::vector<GeoCoordinate> line;
        for (const auto& pos : coords) {
            line.push_back(coordinate_from_json(pos));
        }
        network.segments.push_back(std::move(line));
    };
    for (const auto& feature : doc.value("features", json::array())) {
        const auto& geom = feature.at("geometry");
        const std::string type = geom.value("type", "");
        if (type == "LineString") {
            add_line(geom.at("coordinates"));
        } else if (type == "MultiLineString") {
            for (const auto& part : geom.at("coordinates")) {
                add_line(part);
            }
        } else {
            throw ValidationError("unsupported road geometry '" + type + "'");
        }
    }
    validate_network(network);
    return network;
}

RoadNetwork read_roads_geojson(const std::string& path) {
    return parse_roads_geojson(read_file(path));
}

std::string tracts_to_geojson(const std::vector<TractPolygon>& tracts) {
    json features = json::array();
    for (const auto& t : tracts) {
        json ring = json::array();
        for (const auto& c : t.ring) {
            ring.push_back(coordinate_to_json(c));
        }
        features.push_back(json{{"type", "Feature"},
                                {"properties", {{"tract_id", t.tract_id}}},
                                {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}}});
    }
    return json{{"type", "FeatureCollection"}, {"features", features}}.dump(2) + "\n";
}

} // namespace gentrify::geo
