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

#include "gentrify/fetch.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

using nlohmann::json;

namespace gentrify::fetch {

namespace {

struct HostPath {
    std::string host; // scheme://host:port
    std::string base_path;
};

HostPath split_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ValidationError("fetch base_url must include a scheme: " + base_url);
    }
    const auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {base_url, ""};
    }
    return {base_url.substr(0, path_start), base_url.substr(path_start)};
}

class RateLimiter {
public:
    explicit RateLimiter(double rps) : min_interval_(rps > 0.0 ? 1.0 / rps : 0.0) {}

    void wait() {
        if (min_interval_ <= 0.0) {
            return;
        }
        const auto now = std::chrono::steady_clock::now();
        if (has_last_) {
            const auto next = last_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                          std::chrono::duration<double>(min_interval_));
            if (now < next) {
                std::this_thread::sleep_for(next - now);
            }
        }
        last_ = std::chrono::steady_clock::now();
        has_last_ = true;
    }

private:
    double min_interval_;
    bool has_last_ = false;
    std::chrono::steady_clock::time_point last_;
};

struct HttpOutcome {
    bool ok = false;
    bool quota = false;
    std::string body;
    std::string error;
};

std::string cache_path(const FetchConfig& config, const std::string& request, const char* ext) {
    return config.cache_dir + "/" + to_hex(fnv1a64(request)) + ext;
}

std::string coord_query(const geo::GeoCoordinate& c) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "lat=%.6f&lon=%.6f", c.lat, c.lon);
    return buf;
}

} // namespace

FetchResult fetch_street_views(const std::vector<geo::GeoCoordinate>& coords, const DateRange& range,
                               const FetchConfig& config) {
    if (config.base_url.empty()) {
        throw ValidationError("fetch: base_url is not configured");
    }
    const char* key_raw = std::getenv(config.api_key_env.c_str());
    const std::string api_key = key_raw != nullptr ? key_raw : "";
    const HostPath url = split_url(config.base_url);
    ensure_dir(config.cache_dir);

    httplib::Client client(url.host);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    RateLimiter limiter(config.rate_limit_rps);

    FetchResult result;

    // Returns the response body, consulting the cache first. A 429 anywhere
    // flips result.quota_stopped and makes further work stop cleanly.
    auto request = [&](const std::string& path_query, const char* ext) -> HttpOutcome {
        HttpOutcome outcome;
        const std::string cached = cache_path(config, path_query, ext);
        if (file_exists(cached)) {
            outcome.ok = true;
            outcome.body = read_file(cached);
            ++result.cache_hits;
            return outcome;
        }
        std::string with_key = path_query;
        if (!api_key.empty()) {
            with_key += "&key=" + api_key;
        }
        double backoff = config.backoff_initial_s;
        for (int attempt = 1; attempt <= config.max_retries; ++attempt) {
            limiter.wait();
            ++result.network_requests;
            auto res = client.Get(with_key);
            if (res && res->status == 200) {
                write_file_atomic(cached, res->body);
                outcome.ok = true;
                outcome.body = std::move(res->body);
                return outcome;
            }
            if (res && res->status == 429) {
                outcome.quota = true;
                outcome.error = "quota exhausted (HTTP 429)";
                return outcome;
            }
            outcome.error = res ? "HTTP " + std::to_string(res->status)
                                : "transport error " + httplib::to_string(res.error());
            if (attempt < config.max_retries) {
                std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
                backoff *= 2.0;
            }
        }
        return outcome;
    };

    for (std::size_t ci = 0; ci < coords.size(); ++ci) {
        const auto& coord = coords[ci];
        result.resume_cursor = ci;
        const std::string dates_query = url.base_path + "/dates?" + coord_query(coord);
        const HttpOutcome dates_out = request(dates_query, ".json");
        if (dates_out.quota) {
            result.quota_stopped = true;
            return result;
        }
        if (!dates_out.ok) {
            result.failures.push_back({coord, "dates", dates_out.error});
            continue;
        }

        std::vector<Date> dates;
        try {
            const json doc = json::parse(dates_out.body);
            for (const auto& d : doc.at("dates")) {
                const Date date = Date::parse(d.get<std::string>());
                if (!(date < range.first) && !(range.last < date)) {
                    dates.push_back(date);
                }
            }
        } catch (const std::exception& e) {
            result.failures.push_back({coord, "dates", std::string("bad dates payload: ") + e.what()});
            continue;
        }

        for (const Date& date : dates) {
            char heading_buf[32];
            std::snprintf(heading_buf, sizeof(heading_buf), "&heading=%.0f", config.heading);
            const std::string image_query = url.base_path + "/image?" + coord_query(coord) +
                                            "&date=" + date.str() + heading_buf;
            const HttpOutcome image_out = request(image_query, ".png");
            if (image_out.quota) {
                result.quota_stopped = true;
                return result;
            }
            if (!image_out.ok) {
                result.failures.push_back({coord, "image", image_out.error});
                continue;
            }
            ingest::StreetViewImage img;
            img.image_id = to_hex(fnv1a64(image_query));
            img.location = coord;
            img.heading = config.heading;
            img.capture_date = date;
            img.pixels_ref = cache_path(config, image_query, ".png");
            result.images.push_back(std::move(img));
        }
    }
    result.resume_cursor = coords.size();
    return result;
}

void write_fetch_manifest(const std::string& path, const FetchResult& result) {
    std::ostringstream out;
    for (const auto& img : result.images) {
        out << ingest::image_to_jsonl(img) << '\n';
    }
    for (const auto& f : result.failures) {
        out << json{{"failure", true},
                    {"lat", f.location.lat},
                    {"lon", f.location.lon},
                    {"stage", f.stage},
                    {"error", f.error}}
                   .dump()
            << '\n';
    }
    if (result.quota_stopped) {
        out << json{{"quota_stopped", true}, {"resume_cursor", result.resume_cursor}}.dump() << '\n';
    }
    write_file_atomic(path, out.str());
}

} // namespace gentrify::fetch
