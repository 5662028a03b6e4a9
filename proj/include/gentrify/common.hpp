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
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gentrify {

/// Runtime failure (I/O, missing artifact, protocol error). CLI exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid input or configuration. CLI exit code 1.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// ---------------------------------------------------------------------------
// Calendar dates

/// Proleptic Gregorian calendar date. Comparisons are lexicographic on
/// (year, month, day), which matches chronological order.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    /// Days since 1970-01-01 (may be negative).
    [[nodiscard]] std::int64_t serial_days() const;
    [[nodiscard]] std::string str() const; // "YYYY-MM-DD"

    static Date from_serial_days(std::int64_t days);
    static Date parse(std::string_view text); // throws ValidationError
    static bool is_valid(int y, int m, int d);
};

// ---------------------------------------------------------------------------
// Deterministic randomness
//
// All stochastic steps draw from this wrapper instead of std::*_distribution
// so that a given seed reproduces byte-identical artifacts regardless of the
// standard library build.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_int(i)]);
        }
    }

    /// k distinct indices drawn uniformly from [0, n), in draw order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 eng_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(const void* data, std::size_t size);

/// Stable per-component seed derived from a master seed and a tag, so that
/// adding or reordering consumers does not shift anyone else's stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

// ---------------------------------------------------------------------------
// Filesystem helpers

std::string read_file(const std::string& path);
/// Write via temp file + rename so concurrent readers never see partial content.
void write_file_atomic(const std::string& path, std::string_view content);
void ensure_dir(const std::string& path);
bool file_exists(const std::string& path);

std::string to_hex(std::uint64_t value);

// ---------------------------------------------------------------------------
// Minimal CSV (comma separated, double-quote escaping, optional \r\n)

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index for `name`, or -1.
    [[nodiscard]] int column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

} // namespace gentrify
