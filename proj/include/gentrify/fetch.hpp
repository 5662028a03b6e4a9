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
#include <optional>
#include <string>
#include <vector>

#include "gentrify/common.hpp"
#include "gentrify/geo.hpp"
#include "gentrify/ingest.hpp"

namespace gentrify::fetch {

/// Street-view fetch endpoint contract:
///   GET {base_url}/dates?lat=..&lon=..&key=..        -> {"dates": ["YYYY-MM-DD", ...]}
///   GET {base_url}/image?lat=..&lon=..&date=..&heading=..&key=.. -> PNG bytes
/// The API key is read from the environment variable named by api_key_env
/// and is never written to disk.
struct FetchConfig {
    std::string base_url;               // e.g. "http://localhost:8080"
    std::string api_key_env = "GENTRIFY_API_KEY";
    double rate_limit_rps = 2.0;        // request starts per second
    std::string cache_dir = "fetch_cache";
    int max_retries = 3;                // attempts per request
    double backoff_initial_s = 0.5;     // doubles per retry
    double heading = 0.0;
};

struct DateRange {
    Date first{2007, 1, 1};
    Date last{2022, 12, 31};
};

struct FetchFailure {
    geo::GeoCoordinate location;
    std::string stage; // "dates" or "image"
    std::string error;
};

struct FetchResult {
    std::vector<ingest::StreetViewImage> images;
    std::vector<FetchFailure> failures;
    std::size_t network_requests = 0; // actual HTTP round trips (cache misses)
    std::size_t cache_hits = 0;
    bool quota_stopped = false;        // HTTP 429: stopped cleanly
    std::size_t resume_cursor = 0;     // index of the first unprocessed coordinate
};

/// Downloads available capture dates and images for each coordinate.
/// Responses land in a content-addressed on-disk cache (atomic
/// write-then-rename), so re-runs are idempotent and cached runs make zero
/// network calls. Per-request failures are retried with exponential backoff
/// and then recorded; they never abort the batch. Quota exhaustion (429)
/// stops cleanly with a resumable cursor.
FetchResult fetch_street_views(const std::vector<geo::GeoCoordinate>& coords, const DateRange& range,
                               const FetchConfig& config);

/// Appends manifest lines (one JSON object per image or failure) for a run.
void write_fetch_manifest(const std::string& path, const FetchResult& result);

} // namespace gentrify::fetch
