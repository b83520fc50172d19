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

// cylsim command-line driver.
//
//   cylsim bipartite  --kind photon --trials 1000000 --angles 25 --seed 42 --out scan.csv
//   cylsim chsh       --angles 0,45,22.5,67.5 --trials 1000000 --out chsh.csv
//   cylsim swap       --groups 1800 --reps 64 --angles 13 --out swap.csv --svg swap.svg
//   cylsim ghz        --groups 100000 --out ghz.csv
//   cylsim efficiency --trials 1000000 --angles 25
//
// Each data file <out> is accompanied by <out-stem>.json holding the full
// report and the run manifest. Exit codes: 0 ok, 2 bad usage, 3 runtime/IO.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cylsim/cylsim.hpp"

namespace {

using cylsim::Json;

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

class IoError : public cylsim::Error {
   public:
    using cylsim::Error::Error;
};

struct CommonOptions {
    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::string out;
    std::string svg;
    std::string config;
};

void add_common(CLI::App* sub, CommonOptions& o, const std::string& default_out) {
    o.out = default_out;
    sub->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
    sub->add_option("--out", o.out, "output CSV path")->capture_default_str();
    sub->add_option("--config", o.config, "key=value config file; flags override it");
}

cylsim::ParticleKind parse_kind(const std::string& s) {
    if (s == "photon") return cylsim::ParticleKind::photon();
    if (s == "electron") return cylsim::ParticleKind::electron();
    throw cylsim::ConfigError("unknown particle kind '" + s + "' (photon|electron)");
}

std::string kind_name(cylsim::ParticleKind k) { return k.n == 1 ? "electron" : (k.n == 2 ? "photon" : std::to_string(k.n)); }

void write_file(const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << data;
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

std::string json_path_for(const std::string& out) {
    std::filesystem::path p(out);
    p.replace_extension(".json");
    if (p.string() == out) p += ".report.json";
    return p.string();
}

Json degrees(const std::vector<double>& radians) {
    Json a = Json::array();
    for (double r : radians) a.push_back(cylsim::radians_to_degrees(r));
    return a;
}

class Timer {
   public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

   private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void finish(const std::string& subcommand, const CommonOptions& common, Json config, Json report,
            std::vector<std::pair<std::string, std::string>> files, const Timer& timer) {
    cylsim::RunManifest manifest;
    manifest.subcommand = subcommand;
    manifest.config = std::move(config);
    manifest.seed = common.seed;
    const std::string json_path = json_path_for(common.out);
    for (const auto& [path, _] : files) manifest.outputs.push_back(path);
    manifest.outputs.push_back(json_path);
    for (const auto& [path, data] : files) write_file(path, data);
    manifest.duration_seconds = timer.seconds();
    report["manifest"] = cylsim::to_json(manifest);
    write_file(json_path, report.dump(2) + "\n");
}

/// Expands `--config <file>` into key=value flags placed right after the
/// subcommand name, so explicit flags (parsed later) take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    if (args.size() < 2) return args;
    std::string path;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream f(path);
    if (!f) throw cylsim::ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    std::vector<std::string> out(args.begin(), args.begin() + 2);
    for (const auto& [key, value] : cylsim::parse_config_text(buf.str())) {
        if (key == "config") continue;
        out.push_back("--" + key + "=" + value);
    }
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cylsim: Monte Carlo of the lossy cylinder detector model"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cylsim::kVersion));

    // bipartite / efficiency share scan options.
    struct ScanOptions {
        CommonOptions common;
        std::string kind = "photon";
        std::string source = "antiparallel";
        std::uint64_t trials = 1'000'000;
        std::string angles = "25";
    };
    ScanOptions bip, eff;
    auto add_scan = [&](CLI::App* sub, ScanOptions& o, const std::string& default_out) {
        add_common(sub, o.common, default_out);
        sub->add_option("--kind", o.kind, "photon|electron")->capture_default_str();
        sub->add_option("--source", o.source, "antiparallel|orthogonal")->capture_default_str();
        sub->add_option("--trials", o.trials, "pairs per angle")->capture_default_str();
        sub->add_option("--angles", o.angles, "count over [0,180] deg, or comma list in degrees")->capture_default_str();
    };
    auto* bip_cmd = app.add_subcommand("bipartite", "two-detector correlation scan");
    add_scan(bip_cmd, bip, "bipartite.csv");
    bip_cmd->add_option("--svg", bip.common.svg, "optional correlation plot");
    auto* eff_cmd = app.add_subcommand("efficiency", "singles/doubles/conditional efficiency table");
    add_scan(eff_cmd, eff, "efficiency.csv");

    CommonOptions chsh;
    std::string chsh_kind = "photon", chsh_source = "antiparallel", chsh_angles = "0,45,22.5,67.5";
    std::uint64_t chsh_trials = 1'000'000;
    auto* chsh_cmd = app.add_subcommand("chsh", "CHSH statistic from four coincidence-conditioned settings");
    add_common(chsh_cmd, chsh, "chsh.csv");
    chsh_cmd->add_option("--kind", chsh_kind, "photon|electron")->capture_default_str();
    chsh_cmd->add_option("--source", chsh_source, "antiparallel|orthogonal")->capture_default_str();
    chsh_cmd->add_option("--trials", chsh_trials, "pairs per setting")->capture_default_str();
    chsh_cmd->add_option("--angles", chsh_angles, "a,a',b,b' in degrees")->capture_default_str();

    CommonOptions swap;
    std::uint64_t swap_groups = 1800, swap_reps = 64;
    std::string swap_angles = "13", swap_rule = "opposite";
    double swap_station1 = 45.0, swap_bsm_axis = 22.5;
    auto* swap_cmd = app.add_subcommand("swap", "four-piece entanglement swapping fringes");
    add_common(swap_cmd, swap, "swap.csv");
    swap_cmd->add_option("--groups", swap_groups, "groups per angle per repetition")->capture_default_str();
    swap_cmd->add_option("--reps", swap_reps, "repetitions per angle")->capture_default_str();
    swap_cmd->add_option("--angles", swap_angles, "detector-4 angles: count over [0,180] deg or list")->capture_default_str();
    swap_cmd->add_option("--station1", swap_station1, "station-1 analyzer angle, degrees")->capture_default_str();
    swap_cmd->add_option("--bsm-axis", swap_bsm_axis, "central analyzer angle, degrees")->capture_default_str();
    swap_cmd->add_option("--bsm-rule", swap_rule, "opposite|same|none")->capture_default_str();
    swap_cmd->add_option("--svg", swap.svg, "optional fringe plot");

    CommonOptions ghz;
    std::uint64_t ghz_groups = 100'000;
    auto* ghz_cmd = app.add_subcommand("ghz", "four-piece GHZ setup: 16 H/V settings and the two +-45 settings");
    add_common(ghz_cmd, ghz, "ghz.csv");
    ghz_cmd->add_option("--groups", ghz_groups, "groups per setting")->capture_default_str();

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = expand_config(args);
    } catch (const cylsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    const Timer timer;
    try {
        if (*bip_cmd || *eff_cmd) {
            const bool is_bip = static_cast<bool>(*bip_cmd);
            const ScanOptions& o = is_bip ? bip : eff;
            cylsim::ScanConfig cfg;
            cfg.kind = parse_kind(o.kind);
            cfg.source = cylsim::parse_source_kind(o.source);
            cfg.angles = cylsim::parse_angles(o.angles);
            cfg.trials = o.trials;
            cfg.seed = o.common.seed;
            const auto report = cylsim::run_bipartite_scan(cfg, o.common.threads);
            const Json config = {{"kind", kind_name(cfg.kind)}, {"source", cylsim::to_string(cfg.source)},
                                 {"trials", cfg.trials},        {"angles_deg", degrees(cfg.angles)},
                                 {"seed", cfg.seed},            {"threads", o.common.threads}};
            if (is_bip) {
                std::vector<std::pair<std::string, std::string>> files{{o.common.out, cylsim::bipartite_csv(report)}};
                if (!o.common.svg.empty()) files.emplace_back(o.common.svg, cylsim::bipartite_svg(report));
                finish("bipartite", o.common, config, cylsim::to_json(report), files, timer);
                double worst = 0.0;
                for (const auto& row : report.rows) worst = std::max(worst, std::abs(row.q.value - row.q_oracle));
                std::cout << "bipartite: " << report.rows.size() << " angles x " << cfg.trials
                          << " pairs, max |q_hat - q_oracle| = " << cylsim::format_number(worst) << "\n";
            } else {
                const auto& est = report.pooled_efficiency;
                finish("efficiency", o.common, config, cylsim::to_json(report),
                       {{o.common.out, cylsim::efficiency_csv(est, report.oracle_efficiency)}}, timer);
                std::cout << cylsim::efficiency_table(est, report.oracle_efficiency);
            }
        } else if (*chsh_cmd) {
            const auto angles = cylsim::parse_angles(chsh_angles);
            if (angles.size() != 4) throw cylsim::ConfigError("chsh: --angles needs exactly four values a,a',b,b'");
            cylsim::ChshConfig cfg;
            cfg.kind = parse_kind(chsh_kind);
            cfg.source = cylsim::parse_source_kind(chsh_source);
            cfg.a = angles[0];
            cfg.a_prime = angles[1];
            cfg.b = angles[2];
            cfg.b_prime = angles[3];
            cfg.trials = chsh_trials;
            cfg.seed = chsh.seed;
            const auto report = cylsim::run_chsh(cfg, chsh.threads);
            const Json config = {{"kind", kind_name(cfg.kind)}, {"source", cylsim::to_string(cfg.source)},
                                 {"trials", cfg.trials},        {"angles_deg", degrees(angles)},
                                 {"seed", cfg.seed},            {"threads", chsh.threads}};
            finish("chsh", chsh, config, cylsim::to_json(report), {{chsh.out, cylsim::chsh_csv(report)}}, timer);
            std::cout << "chsh: S = " << cylsim::format_number(report.statistic.value) << " +- "
                      << cylsim::format_number(report.statistic.std_error)
                      << " (oracle " << cylsim::format_number(report.oracle) << ")\n";
        } else if (*swap_cmd) {
            cylsim::PbwzConfig cfg;
            cfg.groups = swap_groups;
            cfg.repetitions = swap_reps;
            cfg.detector4_angles = cylsim::parse_angles(swap_angles);
            cfg.station1_angle = cylsim::degrees_to_radians(swap_station1);
            cfg.bsm_axis = cylsim::degrees_to_radians(swap_bsm_axis);
            cfg.bsm_rule = cylsim::parse_bsm_rule(swap_rule);
            cfg.seed = swap.seed;
            const auto report = cylsim::run_pbwz(cfg, swap.threads);
            const Json config = {{"groups", cfg.groups},
                                 {"reps", cfg.repetitions},
                                 {"angles_deg", degrees(cfg.detector4_angles)},
                                 {"station1_deg", swap_station1},
                                 {"bsm_axis_deg", swap_bsm_axis},
                                 {"bsm_rule", cylsim::to_string(cfg.bsm_rule)},
                                 {"seed", cfg.seed},
                                 {"threads", swap.threads}};
            std::vector<std::pair<std::string, std::string>> files{{swap.out, cylsim::swap_csv(report)}};
            if (!swap.svg.empty()) files.emplace_back(swap.svg, cylsim::swap_svg(report));
            finish("swap", swap, config, cylsim::to_json(report), files, timer);
            std::cout << "swap: visibility D1+ " << cylsim::format_number(report.plus_visibility.value) << ", D1- "
                      << cylsim::format_number(report.minus_visibility.value) << ", mean "
                      << cylsim::format_number(report.visibility)
                      << (report.complementary ? " (complementary)" : " (not complementary)") << "\n";
        } else if (*ghz_cmd) {
            if (ghz_groups < 1) throw cylsim::ConfigError("ghz: groups must be >= 1");
            const auto table = cylsim::run_ghz_table(ghz_groups, ghz.seed, ghz.threads);
            const Json config = {{"groups", ghz_groups}, {"seed", ghz.seed}, {"threads", ghz.threads}};
            finish("ghz", ghz, config, cylsim::to_json(table), {{ghz.out, cylsim::ghz_csv(table)}}, timer);
            std::cout << "settings   fourfold\n";
            auto line = [](const cylsim::GhzResult& r) {
                std::string label = cylsim::settings_label(r.settings);
                label.resize(std::max<std::size_t>(label.size(), 18), ' ');
                std::cout << label << ' ' << r.counts.fourfold << "\n";
            };
            for (const auto& r : table.hv) line(r);
            line(table.all_plus);
            line(table.last_minus);
            std::cout << "visibility (+45 pair) = " << cylsim::format_number(table.diagonal_visibility.value) << "\n";
        }
    } catch (const cylsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
