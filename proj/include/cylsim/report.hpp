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

// Serialization of experiment results: CSV tables, JSON reports with a run
// manifest, static SVG fringe plots, and the key=value config file format.
// Everything here is byte-deterministic given its inputs; wall-clock data
// appears only in RunManifest.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "cylsim/experiments.hpp"
#include "json.hpp"

namespace cylsim {

inline constexpr std::string_view kVersion = "0.1.0";

/// Shortest-free, round-trip safe rendering: 17 significant digits.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Fixed-point rendering for SVG coordinates.
inline std::string format_fixed(double v, int digits = 2) {
    if (v == 0.0) v = 0.0;  // drop negative zero
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    std::string s(buf, res.ptr);
    if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kBipartiteCsvHeader =
    "delta_rad,n_pp,n_pm,n_mp,n_mm,n_p0,n_0p,n_m0,n_0m,n_00,q_hat,q_se,q_oracle,s_hat,d_hat,c_hat";

inline std::string bipartite_csv(const ScanReport& report) {
    std::ostringstream out;
    out << kBipartiteCsvHeader << '\n';
    using O = Outcome;
    for (const auto& row : report.rows) {
        const auto& t = row.tally;
        out << format_number(row.delta) << ',' << t.count(O::plus, O::plus) << ',' << t.count(O::plus, O::minus) << ','
            << t.count(O::minus, O::plus) << ',' << t.count(O::minus, O::minus) << ',' << t.count(O::plus, O::none)
            << ',' << t.count(O::none, O::plus) << ',' << t.count(O::minus, O::none) << ','
            << t.count(O::none, O::minus) << ',' << t.count(O::none, O::none) << ',' << format_number(row.q.value)
            << ',' << format_number(row.q.std_error) << ',' << format_number(row.q_oracle) << ','
            << format_number(row.efficiency.singles.value) << ',' << format_number(row.efficiency.doubles.value)
            << ',' << format_number(row.efficiency.conditional.value) << '\n';
    }
    return out.str();
}

inline constexpr std::string_view kChshCsvHeader =
    "term,angle_a_rad,angle_b_rad,n_pp,n_pm,n_mp,n_mm,coincidences,trials,q_hat,q_se,q_oracle";

inline std::string chsh_csv(const ChshReport& report) {
    static constexpr std::array<std::string_view, 4> kNames = {"ab", "ab'", "a'b", "a'b'"};
    std::ostringstream out;
    out << kChshCsvHeader << '\n';
    using O = Outcome;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& term = report.terms[i];
        const auto& t = term.tally;
        out << kNames[i] << ',' << format_number(term.angle_a) << ',' << format_number(term.angle_b) << ','
            << t.count(O::plus, O::plus) << ',' << t.count(O::plus, O::minus) << ',' << t.count(O::minus, O::plus)
            << ',' << t.count(O::minus, O::minus) << ',' << t.coincidences() << ',' << t.trials << ','
            << format_number(term.q.value) << ',' << format_number(term.q.std_error) << ','
            << format_number(term.q_oracle) << '\n';
    }
    return out.str();
}

inline constexpr std::string_view kSwapCsvHeader =
    "theta_rad,plus_mean,plus_sd,minus_mean,minus_sd,plus_total,minus_total,accepted_total,plus_fit,minus_fit";

inline std::string swap_csv(const PbwzReport& report) {
    std::ostringstream out;
    out << kSwapCsvHeader << '\n';
    for (const auto& row : report.rows) {
        std::uint64_t plus = 0, minus = 0, accepted = 0;
        for (const auto& c : row.reps) {
            plus += c.plus;
            minus += c.minus;
            accepted += c.accepted;
        }
        out << format_number(row.angle) << ',' << format_number(row.plus_mean) << ',' << format_number(row.plus_sd)
            << ',' << format_number(row.minus_mean) << ',' << format_number(row.minus_sd) << ',' << plus << ','
            << minus << ',' << accepted << ',' << format_number(report.plus_fit(row.angle)) << ','
            << format_number(report.minus_fit(row.angle)) << '\n';
    }
    return out.str();
}

inline constexpr std::string_view kGhzCsvHeader =
    "settings,p1,p2,p3,p4,groups,routed_coincidences,port_coincidences,fourfold,fourfold_transmitted,fourfold_reflected";

inline std::string ghz_csv(const GhzTable& table) {
    std::ostringstream out;
    out << kGhzCsvHeader << '\n';
    auto line = [&out](const GhzResult& r) {
        const auto& c = r.counts;
        out << settings_label(r.settings);
        for (auto p : r.settings) out << ',' << to_string(p);
        out << ',' << c.groups << ',' << c.routed_coincidences << ',' << c.port_coincidences << ',' << c.fourfold
            << ',' << c.fourfold_transmitted << ',' << c.fourfold_reflected << '\n';
    };
    for (const auto& r : table.hv) line(r);
    line(table.all_plus);
    line(table.last_minus);
    return out.str();
}

inline constexpr std::string_view kEfficiencyCsvHeader = "quantity,estimate,std_error,oracle";

/// Clauser's bound on the conditional efficiency needed for a 2x2 test, 2(sqrt2 - 1).
inline const double kClauserBound = 2.0 * (std::sqrt(2.0) - 1.0);

inline std::string efficiency_csv(const EfficiencyEstimate& est, const EfficiencyTriple& oracle) {
    std::ostringstream out;
    out << kEfficiencyCsvHeader << '\n';
    auto line = [&](std::string_view name, const Estimate& e, double o) {
        out << name << ',' << format_number(e.value) << ',' << format_number(e.std_error) << ',' << format_number(o)
            << '\n';
    };
    line("S", est.singles, oracle.singles);
    line("S_a", est.singles_a, oracle.singles);
    line("S_b", est.singles_b, oracle.singles);
    line("D", est.doubles, oracle.doubles);
    line("C", est.conditional, oracle.conditional);
    return out.str();
}

/// Human-readable efficiency table with the reference conditional
/// efficiencies (Clauser 2x2 bound and the cylinder model).
inline std::string efficiency_table(const EfficiencyEstimate& est, const EfficiencyTriple& oracle) {
    auto fmt = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
        return std::string(buf, res.ptr);
    };
    std::ostringstream out;
    out << "quantity     estimate   std_err    oracle\n";
    auto line = [&](std::string_view name, const Estimate& e, double o) {
        std::string n(name);
        n.resize(12, ' ');
        out << n << ' ' << fmt(e.value) << "     " << fmt(e.std_error) << "     " << fmt(o) << '\n';
    };
    line("singles S", est.singles, oracle.singles);
    line("doubles D", est.doubles, oracle.doubles);
    line("cond. C", est.conditional, oracle.conditional);
    out << "\nreference conditional efficiencies\n";
    out << "  Clauser (2x2 bound)   " << fmt(kClauserBound) << '\n';
    out << "  cylinder model        " << fmt(oracle.conditional) << '\n';
    out << "  lossless (D = S)      " << fmt(1.0) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// JSON

using Json = nlohmann::ordered_json;

inline Json to_json(const Estimate& e) { return Json{{"value", e.value}, {"std_error", e.std_error}}; }

inline Json to_json(const EfficiencyEstimate& e) {
    return Json{{"singles", to_json(e.singles)},
                {"singles_a", to_json(e.singles_a)},
                {"singles_b", to_json(e.singles_b)},
                {"doubles", to_json(e.doubles)},
                {"conditional", to_json(e.conditional)}};
}

inline Json to_json(const EfficiencyTriple& e) {
    return Json{{"singles", e.singles}, {"doubles", e.doubles}, {"conditional", e.conditional}};
}

inline Json to_json(const CoincidenceTally& t) {
    Json counts = Json::array();
    for (const auto& row : t.counts) counts.push_back(Json(row));
    return Json{{"order", "-1,0,+1"}, {"counts", counts}, {"trials", t.trials}};
}

inline Json to_json(const MomentMatrix& m) {
    Json rows = Json::array();
    for (const auto& row : m.e) rows.push_back(Json(row));
    return rows;
}

inline Json to_json(const SineFit& f) {
    return Json{{"offset", f.offset}, {"cos_coef", f.cos_coef}, {"sin_coef", f.sin_coef},
                {"k", f.k},           {"rms", f.rms},           {"amplitude", f.amplitude()}};
}

inline Json to_json(const VisibilityResult& v) {
    return Json{{"value", v.value}, {"source", v.source == VisibilitySource::fit ? "fit" : "extremal"}};
}

inline Json to_json(const ScanReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(Json{{"delta_rad", row.delta},
                            {"tally", to_json(row.tally)},
                            {"q", to_json(row.q)},
                            {"q_oracle", row.q_oracle},
                            {"efficiency", to_json(row.efficiency)},
                            {"moments", to_json(row.moments)},
                            {"moment_std_errors", to_json(row.moment_se)}});
    }
    return Json{{"experiment", "bipartite"},
                {"kind", r.config.kind.n},
                {"source", to_string(r.config.source)},
                {"trials_per_angle", r.config.trials},
                {"seed", r.config.seed},
                {"rows", rows},
                {"pooled_efficiency", to_json(r.pooled_efficiency)},
                {"oracle_efficiency", to_json(r.oracle_efficiency)}};
}

inline Json to_json(const ChshReport& r) {
    Json terms = Json::array();
    for (const auto& t : r.terms) {
        terms.push_back(Json{{"angle_a_rad", t.angle_a},
                             {"angle_b_rad", t.angle_b},
                             {"tally", to_json(t.tally)},
                             {"q", to_json(t.q)},
                             {"q_oracle", t.q_oracle}});
    }
    return Json{{"experiment", "chsh"},
                {"kind", r.config.kind.n},
                {"source", to_string(r.config.source)},
                {"trials_per_setting", r.config.trials},
                {"seed", r.config.seed},
                {"terms", terms},
                {"statistic", to_json(r.statistic)},
                {"oracle", r.oracle}};
}

inline Json to_json(const PbwzReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json plus = Json::array(), minus = Json::array(), accepted = Json::array();
        for (const auto& c : row.reps) {
            plus.push_back(c.plus);
            minus.push_back(c.minus);
            accepted.push_back(c.accepted);
        }
        rows.push_back(Json{{"theta_rad", row.angle},
                            {"plus_mean", row.plus_mean},
                            {"plus_sd", row.plus_sd},
                            {"minus_mean", row.minus_mean},
                            {"minus_sd", row.minus_sd},
                            {"plus_counts", plus},
                            {"minus_counts", minus},
                            {"accepted", accepted}});
    }
    const auto& c = r.config;
    return Json{{"experiment", "swap"},
                {"groups_per_rep", c.groups},
                {"repetitions", c.repetitions},
                {"station1_angle_rad", c.station1_angle},
                {"bsm_axis_rad", c.bsm_axis},
                {"bsm_rule", to_string(c.bsm_rule)},
                {"seed", c.seed},
                {"rows", rows},
                {"plus_fit", to_json(r.plus_fit)},
                {"minus_fit", to_json(r.minus_fit)},
                {"plus_visibility", to_json(r.plus_visibility)},
                {"minus_visibility", to_json(r.minus_visibility)},
                {"visibility", r.visibility},
                {"complementary", r.complementary}};
}

inline Json to_json(const GhzResult& r) {
    const auto& c = r.counts;
    return Json{{"settings", settings_label(r.settings)},
                {"groups", c.groups},
                {"routed_coincidences", c.routed_coincidences},
                {"port_coincidences", c.port_coincidences},
                {"fourfold", c.fourfold},
                {"fourfold_transmitted", c.fourfold_transmitted},
                {"fourfold_reflected", c.fourfold_reflected}};
}

inline Json to_json(const GhzTable& t) {
    Json hv = Json::array();
    for (const auto& r : t.hv) hv.push_back(to_json(r));
    return Json{{"experiment", "ghz"},
                {"frame_flipped_pieces", kFlippedPieces},
                {"wiring", "P2'=P3''=P3, P2''=P3'=P2"},
                {"hv", hv},
                {"all_plus", to_json(t.all_plus)},
                {"last_minus", to_json(t.last_minus)},
                {"visibility", to_json(t.diagonal_visibility)}};
}

/// Run metadata. Only this object carries wall-clock information.
struct RunManifest {
    std::string subcommand;
    Json config;
    std::uint64_t seed = 0;
    std::string version{kVersion};
    double duration_seconds = 0.0;
    std::vector<std::string> outputs;
};

inline Json to_json(const RunManifest& m) {
    return Json{{"subcommand", m.subcommand}, {"config", m.config},
                {"seed", m.seed},             {"version", m.version},
                {"duration_seconds", m.duration_seconds}, {"outputs", m.outputs}};
}

// ---------------------------------------------------------------------------
// SVG

struct SvgSeries {
    std::string label;
    std::vector<double> x;       // radians
    std::vector<double> y;
    std::vector<double> y_err;   // empty or same size as y
    std::optional<SineFit> fit;
    bool filled = true;          // filled or open point glyphs
};

inline constexpr int kSvgCurvePoints = 256;

/// Static fringe plot: points, error bars and the fitted curve as a polyline.
inline std::string emit_svg(std::span<const SvgSeries> series, std::string_view title = "",
                            std::string_view x_label = "angle (deg)", std::string_view y_label = "counts") {
    if (series.empty()) throw ConfigError("emit_svg: no series");
    double x_min = INFINITY, x_max = -INFINITY, y_min = 0.0, y_max = -INFINITY;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size()) throw ConfigError("emit_svg: empty or ragged series");
        if (!s.y_err.empty() && s.y_err.size() != s.y.size()) throw ConfigError("emit_svg: error bars do not match points");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double err = s.y_err.empty() ? 0.0 : s.y_err[i];
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i] - err);
            y_max = std::max(y_max, s.y[i] + err);
        }
        if (s.fit) {
            for (int j = 0; j < kSvgCurvePoints; ++j) {
                const double v = (*s.fit)(s.x.front() + (s.x.back() - s.x.front()) * j / (kSvgCurvePoints - 1));
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        }
    }
    if (x_max <= x_min) x_max = x_min + 1.0;
    if (y_max <= y_min) y_max = y_min + 1.0;
    y_max += 0.05 * (y_max - y_min);

    constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * (kW - kLeft - kRight); };
    auto py = [&](double y) { return kH - kBottom - (y - y_min) / (y_max - y_min) * (kH - kTop - kBottom); };
    auto f = [](double v) { return format_fixed(v, 2); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
        << kW << ' ' << kH << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kW - kLeft - kRight << "\" height=\""
        << kH - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!title.empty())
        out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
            << title << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_min + (x_max - x_min) * i / 4.0;
        const double yv = y_min + (y_max - y_min) * i / 4.0;
        out << "<text x=\"" << f(px(xv)) << "\" y=\"" << f(kH - kBottom + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_fixed(radians_to_degrees(xv), 1) << "</text>\n";
        out << "<text x=\"" << f(kLeft - 6) << "\" y=\"" << f(py(yv) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_fixed(yv, 1)
            << "</text>\n";
    }
    out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << kH / 2 << ")\">" << y_label << "</text>\n";

    for (const auto& s : series) {
        out << "<g class=\"series\" data-label=\"" << s.label << "\">\n";
        if (s.fit) {
            out << "<polyline fill=\"none\" stroke=\"black\" stroke-dasharray=\"3,3\" points=\"";
            for (int j = 0; j < kSvgCurvePoints; ++j) {
                const double x = s.x.front() + (s.x.back() - s.x.front()) * j / (kSvgCurvePoints - 1);
                if (j > 0) out << ' ';
                out << f(px(x)) << ',' << f(py((*s.fit)(x)));
            }
            out << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!s.y_err.empty()) {
                out << "<line x1=\"" << f(px(s.x[i])) << "\" y1=\"" << f(py(s.y[i] - s.y_err[i])) << "\" x2=\""
                    << f(px(s.x[i])) << "\" y2=\"" << f(py(s.y[i] + s.y_err[i])) << "\" stroke=\"black\"/>\n";
            }
            out << "<circle cx=\"" << f(px(s.x[i])) << "\" cy=\"" << f(py(s.y[i])) << "\" r=\"4\" fill=\""
                << (s.filled ? "black" : "white") << "\" stroke=\"black\"/>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

/// Fringe plot of the two swapping series (filled = D1-, open = D1+).
inline std::string swap_svg(const PbwzReport& r) {
    std::vector<SvgSeries> series(2);
    series[0].label = "D1-D4";
    series[1].label = "D1+D4";
    series[1].filled = false;
    for (const auto& row : r.rows) {
        for (auto* s : {&series[0], &series[1]}) s->x.push_back(row.angle);
        series[0].y.push_back(row.minus_mean);
        series[0].y_err.push_back(row.minus_sd);
        series[1].y.push_back(row.plus_mean);
        series[1].y_err.push_back(row.plus_sd);
    }
    series[0].fit = r.minus_fit;
    series[1].fit = r.plus_fit;
    return emit_svg(series, "fourfold coincidences vs detector-4 angle", "detector-4 angle (deg)",
                    "mean fourfold counts");
}

/// Correlation curve of a bipartite scan with the closed-form curve overlaid.
inline std::string bipartite_svg(const ScanReport& r) {
    SvgSeries s;
    s.label = "q_hat";
    for (const auto& row : r.rows) {
        s.x.push_back(row.delta);
        s.y.push_back(row.q.value);
        s.y_err.push_back(row.q.std_error);
    }
    const auto kind = r.config.kind;
    // (-1)^n cos(n delta) written as a sinusoid fit.
    s.fit = SineFit{0.0, kind.parity(), 0.0, static_cast<double>(kind.n), 0.0};
    return emit_svg(std::span<const SvgSeries>(&s, 1), "coincidence correlation", "relative angle (deg)", "Q");
}

// ---------------------------------------------------------------------------
// Config file and angle lists

/// Parses `key=value` lines; blank lines and lines starting with '#' are
/// skipped. Keys are returned without leading dashes, in file order.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
    auto trim = [](std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return std::string_view{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string_view key = trim(line.substr(0, eq));
        while (key.starts_with('-')) key.remove_prefix(1);
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return out;
}

/// "<n>" -> n angles evenly spaced over [0, 180] degrees inclusive;
/// "a,b,c" -> explicit list in degrees. Returned in radians.
inline std::vector<double> parse_angles(std::string_view spec) {
    if (spec.empty()) throw ConfigError("angles: empty specification");
    if (spec.find_first_of(",.") == std::string_view::npos && spec.find('-') == std::string_view::npos) {
        std::size_t n = 0;
        const auto res = std::from_chars(spec.data(), spec.data() + spec.size(), n);
        if (res.ec != std::errc{} || res.ptr != spec.data() + spec.size() || n == 0)
            throw ConfigError("angles: expected a positive count or a comma-separated list, got '" + std::string(spec) + "'");
        return linspace(0.0, kPi, n);
    }
    std::vector<double> out;
    while (!spec.empty()) {
        const auto comma = spec.find(',');
        std::string_view item = spec.substr(0, comma);
        spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (item.empty()) continue;
        if (item.front() == '+') item.remove_prefix(1);
        double deg = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), deg);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
            throw ConfigError("angles: cannot parse '" + std::string(item) + "'");
        out.push_back(degrees_to_radians(deg));
    }
    if (out.empty()) throw ConfigError("angles: empty list");
    return out;
}

}  // namespace cylsim
