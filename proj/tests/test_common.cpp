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

#include <filesystem>
#include <set>

#include "gentrify/common.hpp"

using namespace gentrify;

TEST_CASE("dates parse, format and order") {
    const Date d = Date::parse("2015-06-01");
    CHECK(d.year == 2015);
    CHECK(d.month == 6);
    CHECK(d.day == 1);
    CHECK(d.str() == "2015-06-01");
    CHECK(Date::parse("2010-12-31") < Date::parse("2011-01-01"));
    CHECK(Date::from_serial_days(Date::parse("2020-02-29").serial_days()) == Date{2020, 2, 29});
    CHECK(Date{1970, 1, 1}.serial_days() == 0);
    CHECK(Date{1970, 1, 2}.serial_days() == 1);

    CHECK_THROWS_AS(Date::parse("2015-13-01"), ValidationError);
    CHECK_THROWS_AS(Date::parse("2015-02-30"), ValidationError);
    CHECK_THROWS_AS(Date::parse("2021-2-3"), ValidationError);
    CHECK_THROWS_AS(Date::parse("garbage"), ValidationError);
}

TEST_CASE("rng streams are deterministic and well formed") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next() == b.next());
    }
    Rng c(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(c.uniform_int(7) < 7);
    }
    CHECK_THROWS_AS(c.uniform_int(0), ValidationError);

    Rng d(7);
    auto picks = d.sample_without_replacement(50, 20);
    CHECK(picks.size() == 20);
    CHECK(std::set<std::size_t>(picks.begin(), picks.end()).size() == 20);
    CHECK_THROWS_AS(d.sample_without_replacement(3, 4), ValidationError);

    std::vector<int> v1{1, 2, 3, 4, 5, 6};
    std::vector<int> v2 = v1;
    Rng s1(9);
    Rng s2(9);
    s1.shuffle(v1);
    s2.shuffle(v2);
    CHECK(v1 == v2);
}

TEST_CASE("derive_seed separates streams") {
    CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
    CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
    CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
}

TEST_CASE("atomic file write round trip") {
    const std::string path = (std::filesystem::temp_directory_path() / "gentrify_io_test.txt").string();
    write_file_atomic(path, "hello\nworld");
    CHECK(read_file(path) == "hello\nworld");
    write_file_atomic(path, "second");
    CHECK(read_file(path) == "second");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_file(path), Error);
}

TEST_CASE("csv parser handles quotes and crlf") {
    const CsvTable t = parse_csv("a,b,c\r\n1,\"x,y\",\"he said \"\"hi\"\"\"\n2,,3\n");
    REQUIRE(t.header.size() == 3);
    CHECK(t.column("b") == 1);
    CHECK(t.column("missing") == -1);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "x,y");
    CHECK(t.rows[0][2] == "he said \"hi\"");
    CHECK(t.rows[1][1].empty());
}
