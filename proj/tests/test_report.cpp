// Copyright 2026 The cylsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cylsim/report.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

using namespace cylsim;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

std::size_t count_substr(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

ScanReport small_scan_report() {
    ScanConfig cfg;
    cfg.angles = linspace(0.0, kPi, 5);
    cfg.trials = 5000;
    cfg.seed = 1;
    return run_bipartite_scan(cfg);
}

}  // namespace

TEST(FormatNumber, RoundTrips) {
    RngStream rng(10, {});
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.uniform01() - 0.5) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
        EXPECT_EQ(std::stod(format_number(x)), x);
    }
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(1.0), "1");
}

TEST(FormatFixed, DropsNegativeZero) {
    EXPECT_EQ(format_fixed(-0.0), "0.00");
    EXPECT_EQ(format_fixed(-0.001), "0.00");
    EXPECT_EQ(format_fixed(1.234, 1), "1.2");
}

TEST(BipartiteCsv, HeaderAndRows) {
    const auto report = small_scan_report();
    const auto lines = lines_of(bipartite_csv(report));
    ASSERT_EQ(lines.size(), 6u);
    EXPECT_EQ(lines[0], "delta_rad,n_pp,n_pm,n_mp,n_mm,n_p0,n_0p,n_m0,n_0m,n_00,q_hat,q_se,q_oracle,s_hat,d_hat,c_hat");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        ASSERT_EQ(f.size(), 16u);
        const auto& row = report.rows[i - 1];
        EXPECT_EQ(std::stod(f[0]), row.delta);
        std::uint64_t total = 0;
        for (int k = 1; k <= 9; ++k) total += std::stoull(f[static_cast<std::size_t>(k)]);
        EXPECT_EQ(total, row.tally.trials);
        EXPECT_EQ(std::stod(f[10]), row.q.value);
        EXPECT_EQ(std::stod(f[12]), predicted_Q(row.delta, ParticleKind::photon()));
    }
}

TEST(ChshCsv, FourTerms) {
    ChshConfig cfg;
    cfg.trials = 2000;
    const auto lines = lines_of(chsh_csv(run_chsh(cfg)));
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[1].substr(0, 3), "ab,");
    EXPECT_EQ(lines[4].substr(0, 5), "a'b',");
}

TEST(EfficiencyOutputs, TableListsReferenceLines) {
    const auto report = small_scan_report();
    const auto table = efficiency_table(report.pooled_efficiency, report.oracle_efficiency);
    EXPECT_NE(table.find("0.8183"), std::string::npos);
    EXPECT_NE(table.find("0.6366"), std::string::npos);
    EXPECT_NE(table.find("0.7780"), std::string::npos);
    EXPECT_NE(table.find("0.8284"), std::string::npos);
    const auto csv = lines_of(efficiency_csv(report.pooled_efficiency, report.oracle_efficiency));
    EXPECT_EQ(csv[0], "quantity,estimate,std_error,oracle");
    EXPECT_EQ(csv.size(), 6u);
}

TEST(Svg, RejectsEmptyInput) {
    EXPECT_THROW(emit_svg(std::span<const SvgSeries>{}), ConfigError);
    SvgSeries s;
    EXPECT_THROW(emit_svg(std::span<const SvgSeries>(&s, 1)), ConfigError);
    s.x = {0.0, 1.0};
    s.y = {1.0};
    EXPECT_THROW(emit_svg(std::span<const SvgSeries>(&s, 1)), ConfigError);
}

TEST(Svg, PointsErrorBarsAndCurve) {
    SvgSeries s;
    s.x = linspace(0.0, kPi, 13);
    for (double x : s.x) {
        s.y.push_back(10 + 5 * std::cos(2 * x));
        s.y_err.push_back(0.5);
    }
    s.fit = SineFit{10.0, 5.0, 0.0, 2.0, 0.0};
    const auto svg = emit_svg(std::span<const SvgSeries>(&s, 1), "t");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_EQ(count_substr(svg, "<circle"), 13u);
    EXPECT_EQ(count_substr(svg, "<line"), 13u);
    ASSERT_EQ(count_substr(svg, "<polyline"), 1u);
    const auto start = svg.find("points=\"", svg.find("<polyline")) + 8;
    const auto pts = svg.substr(start, svg.find('"', start) - start);
    EXPECT_EQ(split(pts, ' ').size(), static_cast<std::size_t>(kSvgCurvePoints));
    EXPECT_EQ(svg, emit_svg(std::span<const SvgSeries>(&s, 1), "t"));
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(ConfigText, ParsesKeyValueLines) {
    const auto kv = parse_config_text("# comment\n\ntrials = 5000\n--seed=7\r\nangles=0,45\n");
    ASSERT_EQ(kv.size(), 3u);
    EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"trials", "5000"}));
    EXPECT_EQ(kv[1].first, "seed");
    EXPECT_EQ(kv[1].second, "7");
    EXPECT_EQ(kv[2].second, "0,45");
    EXPECT_THROW(parse_config_text("trials 5000\n"), ConfigError);
    EXPECT_THROW(parse_config_text("=5\n"), ConfigError);
}

TEST(Angles, CountAndList) {
    const auto counted = parse_angles("13");
    ASSERT_EQ(counted.size(), 13u);
    EXPECT_EQ(counted.front(), 0.0);
    EXPECT_DOUBLE_EQ(counted.back(), kPi);
    const auto listed = parse_angles("0, 22.5,-45,+90");
    ASSERT_EQ(listed.size(), 4u);
    EXPECT_DOUBLE_EQ(listed[1], kPi / 8);
    EXPECT_DOUBLE_EQ(listed[2], -kPi / 4);
    EXPECT_DOUBLE_EQ(listed[3], kPi / 2);
    EXPECT_THROW(parse_angles(""), ConfigError);
    EXPECT_THROW(parse_angles("0"), ConfigError);
    EXPECT_THROW(parse_angles("x"), ConfigError);
    EXPECT_THROW(parse_angles("1,abc"), ConfigError);
}

TEST(Json, ScanReportKeys) {
    const auto j = to_json(small_scan_report());
    ASSERT_TRUE(j.contains("rows"));
    EXPECT_EQ(j["rows"].size(), 5u);
    EXPECT_TRUE(j.contains("pooled_efficiency"));
    EXPECT_TRUE(j.contains("oracle_efficiency"));
    const auto m = to_json(RunManifest{"bipartite", Json::object(), 5, std::string(kVersion), 0.25, {"a.csv"}});
    EXPECT_EQ(m["seed"], 5);
    EXPECT_EQ(m["version"], "0.1.0");
    EXPECT_EQ(m["outputs"][0], "a.csv");
}
