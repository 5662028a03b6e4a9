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

#include "gentrify/synthcity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace gentrify::synth {

namespace {

struct Rect {
    int x0, y0, x1, y1; // half-open
};

struct Rgb {
    std::uint8_t r, g, b;
};

void fill_rect(ImageTensor& img, const Rect& rect, Rgb color) {
    for (int y = std::max(0, rect.y0); y < std::min(img.side, rect.y1); ++y) {
        for (int x = std::max(0, rect.x0); x < std::min(img.side, rect.x1); ++x) {
            img.at(0, y, x) = color.r;
            img.at(1, y, x) = color.g;
            img.at(2, y, x) = color.b;
        }
    }
}

std::uint8_t clamp_u8(int v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

void add_tint(ImageTensor& img, int dr, int dg, int db) {
    if (dr == 0 && dg == 0 && db == 0) {
        return;
    }
    const int delta[3] = {dr, dg, db};
    const std::size_t plane = static_cast<std::size_t>(img.side) * img.side;
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < plane; ++i) {
            auto& v = img.data[c * plane + i];
            v = clamp_u8(static_cast<int>(v) + delta[c]);
        }
    }
}

Rgb pick_color(Rng& rng, int r_lo, int r_hi, int g_lo, int g_hi, int b_lo, int b_hi) {
    return Rgb{static_cast<std::uint8_t>(r_lo + rng.uniform_int(static_cast<std::uint64_t>(r_hi - r_lo))),
               static_cast<std::uint8_t>(g_lo + rng.uniform_int(static_cast<std::uint64_t>(g_hi - g_lo))),
               static_cast<std::uint8_t>(b_lo + rng.uniform_int(static_cast<std::uint64_t>(b_hi - b_lo)))};
}

// Palettes are disjoint in the green channel (even under the +-25 drift),
// so "recolor" always changes the pixels.
Rgb shift(Rgb c, double dr, double dg, double db) {
    return Rgb{clamp_u8(static_cast<int>(std::lround(c.r + dr))),
               clamp_u8(static_cast<int>(std::lround(c.g + dg))),
               clamp_u8(static_cast<int>(std::lround(c.b + db)))};
}
Rgb brick_color(Rng& rng) { return pick_color(rng, 120, 190, 80, 135, 60, 110); }
Rgb fresh_color(Rng& rng) { return pick_color(rng, 200, 250, 195, 240, 170, 220); }
Rgb ground_color(Rng& rng) { return pick_color(rng, 100, 130, 110, 140, 95, 120); }
Rgb road_color(Rng& rng) { return pick_color(rng, 70, 90, 70, 90, 72, 92); }
Rgb vegetation_color(Rng& rng) { return pick_color(rng, 40, 80, 110, 160, 40, 80); }
Rgb vehicle_color(Rng& rng) { return pick_color(rng, 60, 250, 60, 250, 60, 250); }

struct Scene {
    Rgb ground;
    Rect road;
    std::vector<Rect> buildings;
    std::vector<std::pair<int, int>> vegetation; // (y, x) speckle pixels
};

int scaled(int side, double f) { return std::max(1, static_cast<int>(std::lround(side * f))); }

Scene render_base(ImageTensor& img, Rng& rng, int building_lo, int building_hi, double brick_r,
                  double brick_g, double brick_b) {
    const int s = img.side;
    Scene scene;
    scene.ground = ground_color(rng);
    fill_rect(img, Rect{0, 0, s, s}, scene.ground);

    scene.road = Rect{0, scaled(s, 0.62), s, scaled(s, 0.82)};
    fill_rect(img, scene.road, road_color(rng));

    const int span = std::max(1, building_hi - building_lo + 1);
    const int n_buildings = building_lo + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(span)));
    int cursor = 1 + static_cast<int>(rng.uniform_int(4));
    for (int b = 0; b < n_buildings; ++b) {
        const int w = scaled(s, 0.10) + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(scaled(s, 0.09))));
        const int h = scaled(s, 0.12) + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(scaled(s, 0.20))));
        const int y1 = scaled(s, 0.60);
        const Rect rect{cursor, std::max(1, y1 - h), cursor + w, y1};
        if (rect.x1 > s - 1) {
            break;
        }
        fill_rect(img, rect, shift(brick_color(rng), brick_r, brick_g, brick_b));
        scene.buildings.push_back(rect);
        cursor = rect.x1 + 1 + static_cast<int>(rng.uniform_int(5));
    }
    // The band always fits at least two buildings at these proportions.
    while (scene.buildings.size() < 2) {
        const int w = scaled(s, 0.12);
        const int x0 = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(s - w - 2)));
        const Rect rect{x0, scaled(s, 0.3), x0 + w, scaled(s, 0.6)};
        fill_rect(img, rect, shift(brick_color(rng), brick_r, brick_g, brick_b));
        scene.buildings.push_back(rect);
    }

    const int speckles = s;
    for (int i = 0; i < speckles; ++i) {
        const int x = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(s)));
        const int y = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(s)));
        if (y >= scene.road.y0 && y < scene.road.y1) {
            continue; // keep the roadway clear
        }
        const Rgb c = vegetation_color(rng);
        img.at(0, y, x) = c.r;
        img.at(1, y, x) = c.g;
        img.at(2, y, x) = c.b;
        scene.vegetation.emplace_back(y, x);
    }
    return scene;
}

} // namespace

void validate_config(const SynthConfig& config) {
    if (config.n_tracts < 4) {
        throw ValidationError("synth: n_tracts must be >= 4 (>= 2 per class)");
    }
    if (config.k < 1) {
        throw ValidationError("synth: bag size K must be positive");
    }
    if (!(config.rho_non >= 0.0 && config.rho_non < config.rho_gentrifying &&
          config.rho_gentrifying <= 1.0)) {
        throw ValidationError("synth: need 0 <= rho_non < rho_gentrifying <= 1");
    }
    if (std::llround(config.rho_gentrifying * config.k) < 1) {
        throw ValidationError("synth: rho_gentrifying * K < 1 leaves no planted signal");
    }
    if (config.image_side < 16) {
        throw ValidationError("synth: image_side must be >= 16");
    }
    if (config.nuisance_level < 0.0 || config.nuisance_level > 1.0) {
        throw ValidationError("synth: nuisance_level must lie in [0,1]");
    }
}

ScenePair render_scene_pair(std::uint64_t seed, bool change, const SynthConfig& config,
                            const SceneBias& bias) {
    ScenePair out;
    Rng rng(derive_seed(seed, "scene"));
    out.earlier = ImageTensor(config.image_side);
    const Scene scene = render_base(out.earlier, rng, bias.building_lo, bias.building_hi,
                                    bias.brick_r, bias.brick_g, bias.brick_b);
    out.later = out.earlier;
    out.label = change ? 1 : 0;

    // Facade weathering: some buildings fade to a different brick tone over
    // the decade. Applied before the structural edit so a renovated building
    // stays fresh.
    if (config.nuisance_level > 0.0 && bias.weathering_rate > 0.0) {
        for (const Rect& building : scene.buildings) {
            if (rng.uniform() < bias.weathering_rate) {
                fill_rect(out.later, building,
                          shift(brick_color(rng), bias.brick_r, bias.brick_g, bias.brick_b));
            }
        }
    }

    if (change) {
        const int kind = static_cast<int>(rng.uniform_int(3));
        Rect box{};
        if (kind == 0) { // add a building
            const int s = config.image_side;
            const int w = scaled(s, 0.09) +
                          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(scaled(s, 0.07))));
            const int h = scaled(s, 0.14) +
                          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(scaled(s, 0.18))));
            const int x0 = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(s - w - 2)));
            box = Rect{x0, std::max(1, scaled(s, 0.60) - h), x0 + w, scaled(s, 0.60)};
            fill_rect(out.later, box, fresh_color(rng));
            out.edit_kind = "add";
        } else {
            const std::size_t pick = rng.uniform_int(scene.buildings.size());
            box = scene.buildings[pick];
            if (kind == 1) { // remove: back to bare ground
                fill_rect(out.later, box, scene.ground);
                out.edit_kind = "remove";
            } else { // renovate
                fill_rect(out.later, box, fresh_color(rng));
                out.edit_kind = "recolor";
            }
        }
        out.has_edit = true;
        out.edit_x0 = box.x0;
        out.edit_y0 = box.y0;
        out.edit_x1 = box.x1;
        out.edit_y1 = box.y1;
    }

    if (config.nuisance_level > 0.0) {
        // Vehicles range from cars up to delivery trucks; their change mass
        // rivals a small building edit, which is what makes mean pooling
        // struggle while per-instance scoring stays easy.
        const int n_vehicles =
            static_cast<int>(rng.uniform_int(4)) + std::max(0, bias.extra_vehicles);
        for (int v = 0; v < n_vehicles; ++v) {
            const int s = config.image_side;
            const int w = std::max(2, scaled(s, 0.06) +
                                          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(
                                              std::max(1, scaled(s, 0.19))))));
            const int h = std::max(1, scaled(s, 0.03) +
                                          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(
                                              std::max(1, scaled(s, 0.06))))));
            const int road_h = scene.road.y1 - scene.road.y0;
            const int hh = std::min(h, road_h - 2);
            const int x0 = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(std::max(1, s - w))));
            const int y0 = scene.road.y0 + 1 +
                           static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(
                               std::max(1, road_h - hh - 1))));
            fill_rect(out.later, Rect{x0, y0, x0 + w, y0 + hh}, vehicle_color(rng));
        }

        // Tree canopy grown over parts of the block by the later capture.
        const int n_canopy =
            static_cast<int>(rng.uniform_int(2)) + std::max(0, bias.extra_canopy);
        for (int t = 0; t < n_canopy; ++t) {
            const int s = config.image_side;
            const int w = scaled(s, 0.12) +
                          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(scaled(s, 0.13))));
            const int h = scaled(s, 0.12) +
                          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(scaled(s, 0.13))));
            const int x0 = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(std::max(1, s - w))));
            const int y0 = scaled(s, 0.05) +
                           static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(
                               std::max(1, scaled(s, 0.55) - h))));
            fill_rect(out.later, Rect{x0, y0, x0 + w, y0 + h}, vegetation_color(rng));
        }

        // Camera blocking: a vehicle or scaffolding band right in front of
        // the camera in the later capture.
        if (bias.occlusion_rate > 0.0 && rng.uniform() < bias.occlusion_rate) {
            const int s = config.image_side;
            const int w = scaled(s, 0.15) +
                          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(scaled(s, 0.15))));
            const int x0 = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(std::max(1, s - w))));
            const Rgb dark = pick_color(rng, 30, 60, 30, 60, 32, 64);
            fill_rect(out.later, Rect{x0, 0, x0 + w, s}, dark);
        }

        // Signage turnover on facades: small fresh-palette patches that look
        // like renovations to naive statistics but are too small to be one.
        const int n_billboards =
            static_cast<int>(rng.uniform_int(3)) + std::max(0, bias.extra_billboards);
        for (int b = 0; b < n_billboards && !scene.buildings.empty(); ++b) {
            const Rect& host = scene.buildings[rng.uniform_int(scene.buildings.size())];
            const int s = config.image_side;
            const int bw = std::max(2, scaled(s, 0.04) +
                                           static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(
                                               std::max(1, scaled(s, 0.06))))));
            const int bh = std::max(2, scaled(s, 0.04) +
                                           static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(
                                               std::max(1, scaled(s, 0.05))))));
            const int host_w = host.x1 - host.x0;
            const int host_h = host.y1 - host.y0;
            if (host_w <= bw + 1 || host_h <= bh + 1) {
                continue;
            }
            const int x0 = host.x0 + 1 +
                           static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(host_w - bw - 1)));
            const int y0 = host.y0 + 1 +
                           static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(host_h - bh - 1)));
            fill_rect(out.later, Rect{x0, y0, x0 + bw, y0 + bh}, fresh_color(rng));
        }

        // Seasonal browning of the (static) vegetation pixels in the later
        // capture.
        const double season = std::clamp(bias.season, 0.0, 1.0) * config.nuisance_level;
        if (season > 0.0) {
            for (const auto& [y, x] : scene.vegetation) {
                const double t = season * rng.uniform(0.5, 1.0);
                auto blend = [t](std::uint8_t from, int to) {
                    return clamp_u8(static_cast<int>(std::lround(from + t * (to - from))));
                };
                out.later.at(0, y, x) = blend(out.later.at(0, y, x), 155);
                out.later.at(1, y, x) = blend(out.later.at(1, y, x), 110);
                out.later.at(2, y, x) = blend(out.later.at(2, y, x), 45);
            }
        }

        // Independent capture tints for the two sessions, per-pair jitter on
        // top of the per-bag bias.
        const double amp = 15.0 * config.nuisance_level;
        add_tint(out.later,
                 static_cast<int>(std::lround(rng.uniform(-amp, amp) + bias.tint_later_r)),
                 static_cast<int>(std::lround(rng.uniform(-amp, amp) + bias.tint_later_g)),
                 static_cast<int>(std::lround(rng.uniform(-amp, amp) + bias.tint_later_b)));
        add_tint(out.earlier,
                 static_cast<int>(std::lround(rng.uniform(-amp, amp) + bias.tint_earlier_r)),
                 static_cast<int>(std::lround(rng.uniform(-amp, amp) + bias.tint_earlier_g)),
                 static_cast<int>(std::lround(rng.uniform(-amp, amp) + bias.tint_earlier_b)));
    }
    return out;
}

std::pair<ingest::TimedPair, ingest::PairLabel> gen_scene_pair(std::uint64_t seed, bool change,
                                                               const SynthConfig& config,
                                                               const std::string& images_dir,
                                                               const std::string& image_id_prefix,
                                                               const geo::GeoCoordinate& location,
                                                               double heading,
                                                               const SceneBias& bias) {
    const ScenePair scene = render_scene_pair(seed, change, config, bias);

    Rng date_rng(derive_seed(seed, "dates"));
    const Date earlier_date{2008 + static_cast<int>(date_rng.uniform_int(3)),
                            1 + static_cast<int>(date_rng.uniform_int(12)),
                            1 + static_cast<int>(date_rng.uniform_int(28))};
    const Date later_date{2018 + static_cast<int>(date_rng.uniform_int(3)),
                          1 + static_cast<int>(date_rng.uniform_int(12)),
                          1 + static_cast<int>(date_rng.uniform_int(28))};

    ingest::StreetViewImage earlier;
    earlier.image_id = image_id_prefix + "_e";
    earlier.location = location;
    earlier.heading = heading;
    earlier.capture_date = earlier_date;
    earlier.pixels_ref = images_dir + "/" + image_id_prefix + "_e.png";

    ingest::StreetViewImage later = earlier;
    later.image_id = image_id_prefix + "_l";
    later.capture_date = later_date;
    later.pixels_ref = images_dir + "/" + image_id_prefix + "_l.png";

    write_png_rgb8(earlier.pixels_ref, scene.earlier);
    write_png_rgb8(later.pixels_ref, scene.later);

    return {ingest::make_timed_pair(std::move(earlier), std::move(later)),
            ingest::PairLabel{scene.label, ingest::LabelSource::synthetic}};
}

namespace {

/// Manifests refer to pixels relative to the output dir, keeping the
/// generated city relocatable.
void relativize(ingest::TimedPair& pair, const std::string& out_dir) {
    const std::string prefix = out_dir + "/";
    for (auto* img : {&pair.earlier, &pair.later}) {
        if (img->pixels_ref.rfind(prefix, 0) == 0) {
            img->pixels_ref = img->pixels_ref.substr(prefix.size());
        }
    }
}

} // namespace

GenResult gen_city(const SynthConfig& config, const std::string& out_dir) {
    validate_config(config);
    ensure_dir(out_dir);
    const std::string images_dir = out_dir + "/images";

    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(config.n_tracts))));
    const double lat0 = 30.0;
    const double lon0 = -100.0;
    const double cell = 0.01; // degrees

    GenResult result;
    std::vector<geo::TractPolygon> tracts;
    std::map<std::string, ingest::TractLabel> labels;
    std::vector<ingest::NeighborhoodContainer> containers;
    std::vector<ingest::StreetViewImage> archive;
    std::vector<PlantedPositive> oracle;

    for (int t = 0; t < config.n_tracts; ++t) {
        char id_buf[16];
        std::snprintf(id_buf, sizeof(id_buf), "T%03d", t);
        const std::string tract_id = id_buf;
        const int row = t / cols;
        const int col = t % cols;
        // Edges come from grid indices so neighbors share bit-identical
        // boundary coordinates.
        const double lat_lo = lat0 + row * cell;
        const double lat_hi = lat0 + (row + 1) * cell;
        const double lon_lo = lon0 + col * cell;
        const double lon_hi = lon0 + (col + 1) * cell;

        geo::TractPolygon poly;
        poly.tract_id = tract_id;
        poly.ring = {geo::GeoCoordinate{lat_lo, lon_lo}, geo::GeoCoordinate{lat_lo, lon_hi},
                     geo::GeoCoordinate{lat_hi, lon_hi}, geo::GeoCoordinate{lat_hi, lon_lo},
                     geo::GeoCoordinate{lat_lo, lon_lo}};
        tracts.push_back(poly);

        const bool gentrifying = t % 2 == 0;
        const ingest::TractLabel label =
            gentrifying ? ingest::TractLabel::gentrifying : ingest::TractLabel::non_gentrifying;
        labels[tract_id] = label;

        const double rho = gentrifying ? config.rho_gentrifying : config.rho_non;
        const auto n_pos = static_cast<std::size_t>(std::llround(rho * config.k));
        Rng tract_rng(derive_seed(config.seed, "tract-" + tract_id));
        auto planted = tract_rng.sample_without_replacement(static_cast<std::size_t>(config.k), n_pos);
        std::sort(planted.begin(), planted.end());

        // Shared neighborhood character: capture tints, traffic level,
        // season and built density are correlated within a bag, so they do
        // not average out of the bag mean.
        SceneBias bag_bias;
        bag_bias.tint_later_r = tract_rng.uniform(-30.0, 30.0) * config.nuisance_level;
        bag_bias.tint_later_g = tract_rng.uniform(-30.0, 30.0) * config.nuisance_level;
        bag_bias.tint_later_b = tract_rng.uniform(-30.0, 30.0) * config.nuisance_level;
        bag_bias.tint_earlier_r = tract_rng.uniform(-30.0, 30.0) * config.nuisance_level;
        bag_bias.tint_earlier_g = tract_rng.uniform(-30.0, 30.0) * config.nuisance_level;
        bag_bias.tint_earlier_b = tract_rng.uniform(-30.0, 30.0) * config.nuisance_level;
        bag_bias.extra_vehicles = config.nuisance_level > 0.0
                                      ? static_cast<int>(tract_rng.uniform_int(6))
                                      : 0;
        bag_bias.extra_billboards = config.nuisance_level > 0.0
                                        ? static_cast<int>(tract_rng.uniform_int(4))
                                        : 0;
        bag_bias.extra_canopy = config.nuisance_level > 0.0
                                    ? static_cast<int>(tract_rng.uniform_int(3))
                                    : 0;
        bag_bias.brick_r = tract_rng.uniform(-25.0, 25.0) * config.nuisance_level;
        bag_bias.brick_g = tract_rng.uniform(-25.0, 25.0) * config.nuisance_level;
        bag_bias.brick_b = tract_rng.uniform(-25.0, 25.0) * config.nuisance_level;
        bag_bias.occlusion_rate = tract_rng.uniform(0.0, 0.18) * config.nuisance_level;
        bag_bias.weathering_rate = tract_rng.uniform(0.0, 0.7) * config.nuisance_level;
        bag_bias.season = tract_rng.uniform();
        bag_bias.building_lo = 2 + static_cast<int>(tract_rng.uniform_int(3)); // 2..4
        bag_bias.building_hi = bag_bias.building_lo + 1;

        ingest::NeighborhoodContainer container;
        container.tract = poly;
        container.label = label;
        for (int p = 0; p < config.k; ++p) {
            char pair_buf[32];
            std::snprintf(pair_buf, sizeof(pair_buf), "%s_p%03d", tract_id.c_str(), p);
            const bool positive = std::binary_search(planted.begin(), planted.end(),
                                                     static_cast<std::size_t>(p));
            const geo::GeoCoordinate site{
                lat_lo + cell * (0.1 + 0.8 * tract_rng.uniform()),
                lon_lo + cell * (0.1 + 0.8 * tract_rng.uniform())};
            const double heading = 90.0 * static_cast<double>(tract_rng.uniform_int(4));
            auto [pair, pair_label] = gen_scene_pair(
                derive_seed(config.seed, std::string(pair_buf) + "-scene"), positive, config,
                images_dir + "/" + tract_id, pair_buf, site, heading, bag_bias);
            relativize(pair, out_dir);
            if (positive) {
                const ScenePair rendered = render_scene_pair(
                    derive_seed(config.seed, std::string(pair_buf) + "-scene"), true, config, bag_bias);
                oracle.push_back({tract_id, pair.pair_id(), rendered.edit_kind});
            }
            archive.push_back(pair.earlier);
            archive.push_back(pair.later);
            container.pairs.push_back(std::move(pair));
            ++result.n_bag_pairs;
        }
        containers.push_back(std::move(container));
        ++result.n_tracts;
    }

    // Step-1 training pairs: balanced 50/50, rendered from an independent
    // seed stream and placed on a strip south of the city (no bag overlap).
    std::vector<std::pair<ingest::TimedPair, ingest::PairLabel>> step1;
    Rng step1_rng(derive_seed(config.seed, "step1-sites"));
    for (int i = 0; i < config.step1_pairs; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "s%05d", i);
        const bool change = i % 2 == 1;
        const geo::GeoCoordinate site{lat0 - 1.0 + 0.5 * step1_rng.uniform(),
                                      lon0 + 0.5 * step1_rng.uniform()};
        const double heading = 90.0 * static_cast<double>(step1_rng.uniform_int(4));
        // Step-1 pairs see the full per-pair spread of scene densities,
        // tints, traffic and season, with no bag-level correlation.
        SceneBias step1_bias;
        step1_bias.building_lo = 2;
        step1_bias.building_hi = 5;
        if (config.nuisance_level > 0.0) {
            step1_bias.extra_vehicles = static_cast<int>(step1_rng.uniform_int(6));
            step1_bias.extra_billboards = static_cast<int>(step1_rng.uniform_int(4));
            step1_bias.extra_canopy = static_cast<int>(step1_rng.uniform_int(3));
            step1_bias.weathering_rate = step1_rng.uniform(0.0, 0.7) * config.nuisance_level;
            step1_bias.brick_r = step1_rng.uniform(-25.0, 25.0) * config.nuisance_level;
            step1_bias.brick_g = step1_rng.uniform(-25.0, 25.0) * config.nuisance_level;
            step1_bias.brick_b = step1_rng.uniform(-25.0, 25.0) * config.nuisance_level;
            step1_bias.season = step1_rng.uniform();
            step1_bias.tint_later_r = step1_rng.uniform(-30.0, 30.0) * config.nuisance_level;
            step1_bias.tint_later_g = step1_rng.uniform(-30.0, 30.0) * config.nuisance_level;
            step1_bias.tint_later_b = step1_rng.uniform(-30.0, 30.0) * config.nuisance_level;
            step1_bias.tint_earlier_r = step1_rng.uniform(-30.0, 30.0) * config.nuisance_level;
            step1_bias.tint_earlier_g = step1_rng.uniform(-30.0, 30.0) * config.nuisance_level;
            step1_bias.tint_earlier_b = step1_rng.uniform(-30.0, 30.0) * config.nuisance_level;
        }
        auto pair = gen_scene_pair(derive_seed(config.seed, std::string(buf) + "-scene"), change,
                                   config, images_dir + "/step1", buf, site, heading, step1_bias);
        relativize(pair.first, out_dir);
        archive.push_back(pair.first.earlier);
        archive.push_back(pair.first.later);
        step1.push_back(std::move(pair));
        ++result.n_step1_pairs;
    }

    result.n_planted = oracle.size();

    ingest::write_archive_manifest(out_dir + "/archive.jsonl", archive);
    ingest::write_pairs_jsonl(out_dir + "/step1_pairs.jsonl", step1);
    ingest::write_containers_jsonl(out_dir + "/containers.jsonl", containers);
    write_file_atomic(out_dir + "/tracts.geojson", geo::tracts_to_geojson(tracts));
    ingest::write_labels_csv(out_dir + "/labels.csv", labels);

    std::ostringstream oracle_out;
    for (const auto& planted : oracle) {
        oracle_out << json{{"tract_id", planted.tract_id},
                           {"pair_id", planted.pair_id},
                           {"edit_kind", planted.edit_kind}}
                          .dump()
                   << '\n';
    }
    write_file_atomic(out_dir + "/oracle.jsonl", oracle_out.str());
    return result;
}

std::vector<PlantedPositive> read_oracle_jsonl(const std::string& path) {
    std::vector<PlantedPositive> out;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const json j = json::parse(line);
        out.push_back({j.at("tract_id").get<std::string>(), j.at("pair_id").get<std::string>(),
                       j.value("edit_kind", "")});
    }
    return out;
}

} // namespace gentrify::synth
