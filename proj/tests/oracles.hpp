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
//
// Test-only reference implementations, written with plain loops and scalar
// math so they share no code with the library paths they check.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gentrify/geo.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>; // row-major
using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec y(m.size(), 0.0);
    for (std::size_t r = 0; r < m.size(); ++r) {
        for (std::size_t c = 0; c < x.size(); ++c) {
            y[r] += m[r][c] * x[c];
        }
    }
    return y;
}

inline double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Gated-attention weights, straight from the printed formula:
/// a_i = exp(w.(tanh(V h_i) * sigm(U h_i))) / sum_j exp(...).
inline Vec gated_attention_weights(const std::vector<Vec>& hs, const Mat& V, const Mat& U,
                                   const Vec& w) {
    Vec scores(hs.size(), 0.0);
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const Vec vh = matvec(V, hs[i]);
        const Vec uh = matvec(U, hs[i]);
        double s = 0.0;
        for (std::size_t r = 0; r < w.size(); ++r) {
            s += w[r] * std::tanh(vh[r]) * sigm(uh[r]);
        }
        scores[i] = s;
    }
    double denom = 0.0;
    for (const double s : scores) {
        denom += std::exp(s);
    }
    Vec a(hs.size(), 0.0);
    for (std::size_t i = 0; i < hs.size(); ++i) {
        a[i] = std::exp(scores[i]) / denom;
    }
    return a;
}

/// n = sum_i a_i h_i, accumulated one instance at a time.
inline Vec weighted_sum(const std::vector<Vec>& hs, const Vec& a) {
    Vec n(hs.front().size(), 0.0);
    for (std::size_t i = 0; i < hs.size(); ++i) {
        for (std::size_t d = 0; d < n.size(); ++d) {
            n[d] += a[i] * hs[i][d];
        }
    }
    return n;
}

/// sigmoid(beta . h), the Eq. (2)/(6) scalar path.
inline double linear_sigmoid_score(const Vec& coeff, const Vec& h) {
    return sigm(dot(coeff, h));
}

inline double binary_cross_entropy(double p, int y) {
    const double eps = 1e-7;
    const double pc = std::min(std::max(p, eps), 1.0 - eps);
    return -(y == 1 ? std::log(pc) : std::log(1.0 - pc));
}

/// Winding-number containment in the lon/lat plane (non-boundary points).
inline bool point_in_polygon_winding(const gentrify::geo::GeoCoordinate& p,
                                     const std::vector<gentrify::geo::GeoCoordinate>& ring) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const double ax = ring[i].lon - p.lon;
        const double ay = ring[i].lat - p.lat;
        const double bx = ring[i + 1].lon - p.lon;
        const double by = ring[i + 1].lat - p.lat;
        total += std::atan2(ax * by - ay * bx, ax * bx + ay * by);
    }
    return std::abs(total) > 3.141592653589793; // ~2*pi inside, ~0 outside
}

/// Independent arc-length walk: how many points a polyline yields at the
/// given spacing (start vertex included, end only on an exact step).
inline std::size_t arc_walk_point_count(const std::vector<gentrify::geo::GeoCoordinate>& line,
                                        double spacing_m) {
    double total = 0.0;
    for (std::size_t i = 1; i < line.size(); ++i) {
        total += gentrify::geo::haversine_distance(line[i - 1], line[i]);
    }
    std::size_t count = 0;
    for (double pos = 0.0; pos <= total; pos += spacing_m) {
        ++count;
    }
    return count;
}

} // namespace oracle
