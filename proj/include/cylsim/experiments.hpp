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

// Experiment protocols built on the cylinder detector:
//
//   * bipartite correlation scan over relative analyzer angles,
//   * CHSH statistic from four coincidence-conditioned settings,
//   * four-piece entanglement swapping (two rods, a Bell-state acceptance
//     rule on the inner pieces, fringes of the outer pieces),
//   * four-piece GHZ setup with a central polarizing beam splitter.
//
// Every experiment splits its work into cells of at most kTrialsPerCell
// trials. A cell owns an RngStream keyed by (experiment, setting, chunk) and
// a private accumulator, so results are identical for any worker count.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cylsim/angles.hpp"
#include "cylsim/cylinder.hpp"
#include "cylsim/error.hpp"
#include "cylsim/parallel.hpp"
#include "cylsim/rng.hpp"
#include "cylsim/sources.hpp"
#include "cylsim/statistics.hpp"

namespace cylsim {

inline constexpr std::uint64_t kTrialsPerCell = std::uint64_t{1} << 16;

/// n evenly spaced angles from first to last inclusive (radians).
inline std::vector<double> linspace(double first, double last, std::size_t n) {
    std::vector<double> out;
    if (n == 0) return out;
    if (n == 1) return {first};
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(first + (last - first) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

namespace detail {

struct CellRange {
    std::size_t setting = 0;
    std::uint64_t chunk = 0;
    std::uint64_t count = 0;
};

/// Splits `per_setting` trials of each of `settings` settings into cells.
inline std::vector<CellRange> split_cells(std::size_t settings, std::uint64_t per_setting) {
    std::vector<CellRange> cells;
    const std::uint64_t chunks = (per_setting + kTrialsPerCell - 1) / kTrialsPerCell;
    cells.reserve(settings * chunks);
    for (std::size_t s = 0; s < settings; ++s)
        for (std::uint64_t c = 0; c < chunks; ++c)
            cells.push_back({s, c, std::min(kTrialsPerCell, per_setting - c * kTrialsPerCell)});
    return cells;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bipartite scan

struct ScanConfig {
    ParticleKind kind = ParticleKind::photon();
    SourceKind source = SourceKind::antiparallel_singlet;
    std::vector<double> angles;  // relative angles a - b, radians
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 0;
    /// Draw detector A's angle uniformly per trial (B follows at a - delta).
    bool randomize_rotation = true;
    /// Common offset added to both analyzers and every emitted orientation.
    double global_rotation = 0.0;

    void validate() const {
        ParticleKind::make(kind.n);
        if (angles.empty()) throw ConfigError("scan: angle list is empty");
        if (trials < 1) throw ConfigError("scan: trials must be >= 1");
    }
};

struct ScanRow {
    double delta = 0.0;
    CoincidenceTally tally;
    Estimate q;
    double q_oracle = 0.0;
    EfficiencyEstimate efficiency;
    MomentMatrix moments;
    MomentMatrix moment_se;
};

struct ScanReport {
    ScanConfig config;
    std::vector<ScanRow> rows;
    CoincidenceTally pooled;
    EfficiencyEstimate pooled_efficiency;
    EfficiencyTriple oracle_efficiency;
};

/// Tallies `trials` pairs with detector A at angle_a and B at angle_b.
inline CoincidenceTally run_pair_trials(ParticleKind kind, SourceKind source, double angle_a, double angle_b,
                                        bool randomize_rotation, double global_rotation, std::uint64_t trials,
                                        RngStream& rng) {
    CoincidenceTally t;
    for (std::uint64_t i = 0; i < trials; ++i) {
        const double base = randomize_rotation ? rng.uniform_angle() : 0.0;
        auto [first, second] = emit_pair(rng, source);
        if (global_rotation != 0.0) {
            first.theta = wrap_two_pi(first.theta + global_rotation);
            second.theta = wrap_two_pi(second.theta + global_rotation);
        }
        const DetectorConfig det_a{wrap_two_pi(base + angle_a + global_rotation), kind};
        const DetectorConfig det_b{wrap_two_pi(base + angle_b + global_rotation), kind};
        t.add(respond(det_a, first), respond(det_b, second));
    }
    return t;
}

inline ScanRow make_scan_row(double delta, const CoincidenceTally& t, ParticleKind kind) {
    ScanRow row;
    row.delta = delta;
    row.tally = t;
    row.q = estimate_Q(t);
    row.q_oracle = predicted_Q(delta, kind);
    row.efficiency = efficiency_from_tally(t);
    row.moments = empirical_moments(t);
    row.moment_se = moment_std_errors(t);
    return row;
}

/// Correlation scan: for each relative angle delta, detectors at (a, a - delta).
inline ScanReport run_bipartite_scan(const ScanConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    const auto cells = detail::split_cells(cfg.angles.size(), cfg.trials);
    auto tallies = run_cells<CoincidenceTally>(cells.size(), threads, [&](std::size_t i) {
        const auto& cell = cells[i];
        RngStream rng(cfg.seed, {experiment_id::kBipartite, cell.setting, cell.chunk});
        const double delta = cfg.angles[cell.setting];
        return run_pair_trials(cfg.kind, cfg.source, 0.0, -delta, cfg.randomize_rotation, cfg.global_rotation,
                               cell.count, rng);
    });

    std::vector<CoincidenceTally> per_angle(cfg.angles.size());
    for (std::size_t i = 0; i < cells.size(); ++i) per_angle[cells[i].setting] += tallies[i];

    ScanReport report;
    report.config = cfg;
    for (std::size_t s = 0; s < per_angle.size(); ++s) {
        report.rows.push_back(make_scan_row(cfg.angles[s], per_angle[s], cfg.kind));
        report.pooled += per_angle[s];
    }
    report.pooled_efficiency = efficiency_from_tally(report.pooled);
    report.oracle_efficiency = predicted_efficiencies();
    return report;
}

// ---------------------------------------------------------------------------
// CHSH

struct ChshConfig {
    ParticleKind kind = ParticleKind::photon();
    SourceKind source = SourceKind::antiparallel_singlet;
    double a = 0.0;
    double a_prime = kPi / 4.0;
    double b = kPi / 8.0;
    double b_prime = 3.0 * kPi / 8.0;
    std::uint64_t trials = 1'000'000;  // per setting
    std::uint64_t seed = 0;

    void validate() const {
        ParticleKind::make(kind.n);
        if (trials < 1) throw ConfigError("chsh: trials must be >= 1");
    }
};

struct ChshTerm {
    double angle_a = 0.0;
    double angle_b = 0.0;
    CoincidenceTally tally;
    Estimate q;
    double q_oracle = 0.0;
};

struct ChshReport {
    ChshConfig config;
    std::array<ChshTerm, 4> terms;  // (a,b), (a,b'), (a',b), (a',b')
    Estimate statistic;
    double oracle = 0.0;
};

/// |Q(a,b) - Q(a,b')| + |Q(a',b) + Q(a',b')|.
inline double chsh_combination(double q_ab, double q_abp, double q_apb, double q_apbp) {
    return std::abs(q_ab - q_abp) + std::abs(q_apb + q_apbp);
}

inline ChshReport run_chsh(const ChshConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    const std::array<std::pair<double, double>, 4> settings = {
        {{cfg.a, cfg.b}, {cfg.a, cfg.b_prime}, {cfg.a_prime, cfg.b}, {cfg.a_prime, cfg.b_prime}}};
    const auto cells = detail::split_cells(settings.size(), cfg.trials);
    auto tallies = run_cells<CoincidenceTally>(cells.size(), threads, [&](std::size_t i) {
        const auto& cell = cells[i];
        RngStream rng(cfg.seed, {experiment_id::kChsh, cell.setting, cell.chunk});
        const auto [angle_a, angle_b] = settings[cell.setting];
        return run_pair_trials(cfg.kind, cfg.source, angle_a, angle_b, false, 0.0, cell.count, rng);
    });

    ChshReport report;
    report.config = cfg;
    for (std::size_t s = 0; s < settings.size(); ++s) {
        report.terms[s].angle_a = settings[s].first;
        report.terms[s].angle_b = settings[s].second;
    }
    for (std::size_t i = 0; i < cells.size(); ++i) report.terms[cells[i].setting].tally += tallies[i];

    double var = 0.0;
    std::array<double, 4> q{}, oracle{};
    for (std::size_t s = 0; s < 4; ++s) {
        auto& term = report.terms[s];
        term.q = estimate_Q(term.tally);
        term.q_oracle = predicted_Q(term.angle_a - term.angle_b, cfg.kind);
        q[s] = term.q.value;
        oracle[s] = term.q_oracle;
        var += term.q.std_error * term.q.std_error;
    }
    report.statistic = {chsh_combination(q[0], q[1], q[2], q[3]), std::sqrt(var)};
    report.oracle = chsh_combination(oracle[0], oracle[1], oracle[2], oracle[3]);
    return report;
}

// ---------------------------------------------------------------------------
// Entanglement swapping

/// Acceptance rule for pieces 2 and 3 at the central analyzer.
enum class BsmRule {
    opposite_channels,  // both detected, opposite signs (antisymmetric state)
    same_channel,       // both detected, equal signs
    accept_all,         // no conditioning (control)
};

inline std::string_view to_string(BsmRule rule) {
    switch (rule) {
        case BsmRule::opposite_channels:
            return "opposite";
        case BsmRule::same_channel:
            return "same";
        case BsmRule::accept_all:
            return "none";
    }
    return "?";
}

inline BsmRule parse_bsm_rule(std::string_view s) {
    if (s == "opposite") return BsmRule::opposite_channels;
    if (s == "same") return BsmRule::same_channel;
    if (s == "none" || s == "all") return BsmRule::accept_all;
    throw ConfigError("unknown BSM rule '" + std::string(s) + "'");
}

struct PbwzConfig {
    std::uint64_t groups = 1800;      // per angle per repetition
    std::uint64_t repetitions = 64;   // per angle
    std::vector<double> detector4_angles = linspace(0.0, kPi, 13);
    double station1_angle = kPi / 4.0;
    double bsm_axis = kPi / 8.0;
    BsmRule bsm_rule = BsmRule::opposite_channels;
    ParticleKind kind = ParticleKind::photon();
    SourceKind source = SourceKind::orthogonal_pdc;
    std::uint64_t seed = 0;
    double global_rotation = 0.0;

    void validate() const {
        ParticleKind::make(kind.n);
        if (groups < 1) throw ConfigError("swap: groups must be >= 1");
        if (repetitions < 1) throw ConfigError("swap: repetitions must be >= 1");
        if (detector4_angles.empty()) throw ConfigError("swap: angle list is empty");
    }
};

/// Fourfold counts of one (angle, repetition) cell.
struct PbwzCounts {
    std::uint64_t plus = 0;      // D1+ D4
    std::uint64_t minus = 0;     // D1- D4
    std::uint64_t accepted = 0;  // groups passing the central acceptance rule
};

struct PbwzRow {
    double angle = 0.0;
    std::vector<PbwzCounts> reps;
    double plus_mean = 0.0, plus_sd = 0.0;
    double minus_mean = 0.0, minus_sd = 0.0;
};

struct PbwzReport {
    PbwzConfig config;
    std::vector<PbwzRow> rows;
    SineFit plus_fit;
    SineFit minus_fit;
    VisibilityResult plus_visibility;
    VisibilityResult minus_visibility;
    double visibility = 0.0;  // mean of the two series
    bool complementary = false;  // fitted fringes in antiphase
};

inline bool bsm_accepts(BsmRule rule, Outcome two, Outcome three) {
    switch (rule) {
        case BsmRule::opposite_channels:
            return two != Outcome::none && three != Outcome::none && two != three;
        case BsmRule::same_channel:
            return two != Outcome::none && two == three;
        case BsmRule::accept_all:
            return true;
    }
    return false;
}

/// Runs `groups` four-piece groups with detector 4 at `angle4`.
inline PbwzCounts run_pbwz_groups(const PbwzConfig& cfg, double angle4, std::uint64_t groups, RngStream& rng) {
    const double rot = cfg.global_rotation;
    const DetectorConfig station1{wrap_two_pi(cfg.station1_angle + rot), cfg.kind};
    const DetectorConfig central{wrap_two_pi(cfg.bsm_axis + rot), cfg.kind};
    const DetectorConfig station4{wrap_two_pi(angle4 + rot), cfg.kind};
    PbwzCounts out;
    for (std::uint64_t g = 0; g < groups; ++g) {
        auto quad = emit_quad(rng, cfg.source);
        if (rot != 0.0)
            for (auto& piece : quad) piece.theta = wrap_two_pi(piece.theta + rot);
        if (!bsm_accepts(cfg.bsm_rule, respond(central, quad[1]), respond(central, quad[2]))) continue;
        ++out.accepted;
        if (respond(station4, quad[3]) != Outcome::plus) continue;
        const Outcome one = respond(station1, quad[0]);
        if (one == Outcome::plus) ++out.plus;
        if (one == Outcome::minus) ++out.minus;
    }
    return out;
}

namespace detail {

inline std::pair<double, double> mean_sd(std::span<const double> xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return {mean, sd};
}

}  // namespace detail

/// Swapping protocol: fourfold counts per detector-4 angle, one series per
/// station-1 channel, each fitted to a sinusoid in 2*theta.
inline PbwzReport run_pbwz(const PbwzConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    const std::size_t n_angles = cfg.detector4_angles.size();
    const std::size_t n_cells = n_angles * cfg.repetitions;
    auto counts = run_cells<PbwzCounts>(n_cells, threads, [&](std::size_t i) {
        const std::size_t angle = i / cfg.repetitions;
        const std::uint64_t rep = i % cfg.repetitions;
        RngStream rng(cfg.seed, {experiment_id::kPbwz, angle, rep});
        return run_pbwz_groups(cfg, cfg.detector4_angles[angle], cfg.groups, rng);
    });

    PbwzReport report;
    report.config = cfg;
    std::vector<AnglePoint> plus_points, minus_points;
    std::uint64_t total = 0;
    for (std::size_t a = 0; a < n_angles; ++a) {
        PbwzRow row;
        row.angle = cfg.detector4_angles[a];
        row.reps.assign(counts.begin() + static_cast<std::ptrdiff_t>(a * cfg.repetitions),
                        counts.begin() + static_cast<std::ptrdiff_t>((a + 1) * cfg.repetitions));
        std::vector<double> plus, minus;
        for (const auto& c : row.reps) {
            plus.push_back(static_cast<double>(c.plus));
            minus.push_back(static_cast<double>(c.minus));
            total += c.plus + c.minus;
        }
        std::tie(row.plus_mean, row.plus_sd) = detail::mean_sd(plus);
        std::tie(row.minus_mean, row.minus_sd) = detail::mean_sd(minus);
        plus_points.push_back({row.angle, row.plus_mean});
        minus_points.push_back({row.angle, row.minus_mean});
        report.rows.push_back(std::move(row));
    }
    if (total == 0) throw UndefinedEstimate("swap: no fourfold coincidences at any angle");

    const auto k = static_cast<double>(cfg.kind.n);  // fringe frequency in the detector-4 angle
    report.plus_fit = sine_fit(plus_points, k);
    report.minus_fit = sine_fit(minus_points, k);
    report.plus_visibility = visibility(report.plus_fit);
    report.minus_visibility = visibility(report.minus_fit);
    report.visibility = 0.5 * (report.plus_visibility.value + report.minus_visibility.value);
    report.complementary = report.plus_fit.cos_coef * report.minus_fit.cos_coef +
                               report.plus_fit.sin_coef * report.minus_fit.sin_coef <
                           0.0;
    return report;
}

// ---------------------------------------------------------------------------
// GHZ

enum class PbsChannel { transmitted, reflected };

/// Central beam splitter: H-class pieces (within 45 degrees of horizontal)
/// are transmitted, V-class reflected. Pieces longer than the boundary
/// height at the splitter axis (angle 0) are absorbed.
inline std::optional<PbsChannel> pbs_route(const HiddenState& state) {
    if (state.ell > boundary_height(state.theta, ParticleKind::photon())) return std::nullopt;
    const double psi = wrap_period(state.theta + kPi / 4.0, kPi) - kPi / 4.0;  // [-pi/4, 3pi/4)
    return psi < kPi / 4.0 ? PbsChannel::transmitted : PbsChannel::reflected;
}

inline std::string_view to_string(PbsChannel c) { return c == PbsChannel::transmitted ? "transmitted" : "reflected"; }

/// Orientation seen from the frame of a counter-propagating partner.
inline double partner_view(double theta) { return wrap_two_pi(-theta); }

enum class Polarizer { H, V, plus45, minus45 };

inline double polarizer_angle(Polarizer p) {
    switch (p) {
        case Polarizer::H:
            return 0.0;
        case Polarizer::V:
            return kPi / 2.0;
        case Polarizer::plus45:
            return kPi / 4.0;
        case Polarizer::minus45:
            return -kPi / 4.0;
    }
    return 0.0;
}

inline std::string_view to_string(Polarizer p) {
    switch (p) {
        case Polarizer::H:
            return "H";
        case Polarizer::V:
            return "V";
        case Polarizer::plus45:
            return "+45";
        case Polarizer::minus45:
            return "-45";
    }
    return "?";
}

inline Polarizer parse_polarizer(std::string_view s) {
    if (s == "H" || s == "h") return Polarizer::H;
    if (s == "V" || s == "v") return Polarizer::V;
    if (s == "+45" || s == "45" || s == "+") return Polarizer::plus45;
    if (s == "-45" || s == "-") return Polarizer::minus45;
    throw ConfigError("unknown polarizer setting '" + std::string(s) + "'");
}

/// A single-channel polarizer passes a piece when it lands in the '+' lobe
/// centered on the polarizer axis, i.e. the '+' channel of a photon cylinder
/// rotated to (axis - pi/4).
inline bool polarizer_passes(double axis, const HiddenState& state) {
    return respond(DetectorConfig{wrap_two_pi(axis - kPi / 4.0), ParticleKind::photon()}, state) == Outcome::plus;
}

using GhzSettings = std::array<Polarizer, 4>;

inline std::string settings_label(const GhzSettings& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0 && (s[i] == Polarizer::plus45 || s[i] == Polarizer::minus45 || s[i - 1] == Polarizer::plus45 ||
                      s[i - 1] == Polarizer::minus45))
            out += ',';
        out += to_string(s[i]);
    }
    return out;
}

/// Polarizers behind the two output ports of the central splitter. Port X
/// receives reflected piece 2 and transmitted piece 3 and carries P2; port Y
/// receives transmitted piece 2 and reflected piece 3 and carries P3.
struct GhzWiring {
    Polarizer p2_transmitted;  // P2' = P3
    Polarizer p2_reflected;    // P2'' = P2
    Polarizer p3_transmitted;  // P3' = P2
    Polarizer p3_reflected;    // P3'' = P3
};

/// Pieces (1-based) analyzed in the mirrored frame. One piece of each rod,
/// both travelling the same direction.
inline constexpr std::array<int, 2> kFlippedPieces = {2, 4};

class GhzConfig {
   public:
    static GhzConfig make(GhzSettings settings, std::uint64_t groups, std::uint64_t seed) {
        if (groups < 1) throw ConfigError("ghz: groups must be >= 1");
        return GhzConfig(settings, groups, seed);
    }

    const GhzSettings& settings() const { return settings_; }
    std::uint64_t groups() const { return groups_; }
    std::uint64_t seed() const { return seed_; }
    const GhzWiring& wiring() const { return wiring_; }

    /// Stream setting index: base-4 encoding of the four polarizers.
    std::uint64_t setting_index() const {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < 4; ++i) idx = idx * 4 + static_cast<std::uint64_t>(settings_[i]);
        return idx;
    }

   private:
    GhzConfig(GhzSettings s, std::uint64_t groups, std::uint64_t seed)
        : settings_(s), groups_(groups), seed_(seed), wiring_{s[2], s[1], s[1], s[2]} {}

    GhzSettings settings_;
    std::uint64_t groups_;
    std::uint64_t seed_;
    GhzWiring wiring_;
};

struct GhzCounts {
    std::uint64_t groups = 0;
    std::uint64_t routed_coincidences = 0;  // pieces 2 and 3 leave through the same splitter channel
    std::uint64_t port_coincidences = 0;    // ... and both pass their port polarizers
    std::uint64_t fourfold = 0;             // ... and pieces 1 and 4 pass P1 and P4
    std::uint64_t fourfold_transmitted = 0; // via (2', 3')
    std::uint64_t fourfold_reflected = 0;   // via (2'', 3'')

    GhzCounts& operator+=(const GhzCounts& o) {
        groups += o.groups;
        routed_coincidences += o.routed_coincidences;
        port_coincidences += o.port_coincidences;
        fourfold += o.fourfold;
        fourfold_transmitted += o.fourfold_transmitted;
        fourfold_reflected += o.fourfold_reflected;
        return *this;
    }
    friend bool operator==(const GhzCounts&, const GhzCounts&) = default;
};

struct GhzResult {
    GhzSettings settings{};
    GhzCounts counts;
};

inline GhzCounts run_ghz_groups(const GhzConfig& cfg, std::uint64_t groups, RngStream& rng) {
    const auto& s = cfg.settings();
    const auto& w = cfg.wiring();
    GhzCounts out;
    out.groups = groups;
    for (std::uint64_t g = 0; g < groups; ++g) {
        auto quad = emit_quad(rng, SourceKind::orthogonal_pdc);
        for (int piece : kFlippedPieces) {
            auto& st = quad[static_cast<std::size_t>(piece - 1)];
            st.theta = partner_view(st.theta);
        }
        const auto route2 = pbs_route(quad[1]);
        const auto route3 = pbs_route(quad[2]);
        if (!route2 || !route3 || *route2 != *route3) continue;
        ++out.routed_coincidences;

        const bool transmitted = *route2 == PbsChannel::transmitted;
        const Polarizer pol2 = transmitted ? w.p2_transmitted : w.p2_reflected;
        const Polarizer pol3 = transmitted ? w.p3_transmitted : w.p3_reflected;
        if (!polarizer_passes(polarizer_angle(pol2), quad[1]) || !polarizer_passes(polarizer_angle(pol3), quad[2]))
            continue;
        ++out.port_coincidences;

        if (!polarizer_passes(polarizer_angle(s[0]), quad[0]) || !polarizer_passes(polarizer_angle(s[3]), quad[3]))
            continue;
        ++out.fourfold;
        ++(transmitted ? out.fourfold_transmitted : out.fourfold_reflected);
    }
    return out;
}

/// Runs several settings, parallel over (setting, chunk) cells.
inline std::vector<GhzResult> run_ghz_batch(std::span<const GhzConfig> configs, unsigned threads = 0) {
    struct Cell {
        std::size_t config;
        std::uint64_t chunk;
        std::uint64_t count;
    };
    std::vector<Cell> cells;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        const std::uint64_t n = configs[c].groups();
        for (std::uint64_t k = 0; k * kTrialsPerCell < n; ++k) cells.push_back({c, k, std::min(kTrialsPerCell, n - k * kTrialsPerCell)});
    }
    auto counts = run_cells<GhzCounts>(cells.size(), threads, [&](std::size_t i) {
        const auto& cell = cells[i];
        const auto& cfg = configs[cell.config];
        RngStream rng(cfg.seed(), {experiment_id::kGhz, cfg.setting_index(), cell.chunk});
        return run_ghz_groups(cfg, cell.count, rng);
    });
    std::vector<GhzResult> results(configs.size());
    for (std::size_t c = 0; c < configs.size(); ++c) results[c].settings = configs[c].settings();
    for (std::size_t i = 0; i < cells.size(); ++i) results[cells[i].config].counts += counts[i];
    return results;
}

inline GhzResult run_ghz(const GhzConfig& cfg, unsigned threads = 0) {
    return run_ghz_batch(std::span<const GhzConfig>(&cfg, 1), threads).front();
}

/// The 16 H/V settings followed by (+45,+45,+45,+45) and (+45,+45,+45,-45).
struct GhzTable {
    std::vector<GhzResult> hv;  // P1..P4 in HHHH, HHHV, ... order
    GhzResult all_plus;
    GhzResult last_minus;
    VisibilityResult diagonal_visibility;
};

inline std::vector<GhzSettings> hv_settings() {
    std::vector<GhzSettings> out;
    for (unsigned bits = 0; bits < 16; ++bits) {
        GhzSettings s{};
        for (unsigned i = 0; i < 4; ++i) s[i] = (bits >> (3 - i)) & 1u ? Polarizer::V : Polarizer::H;
        out.push_back(s);
    }
    return out;
}

inline GhzTable run_ghz_table(std::uint64_t groups, std::uint64_t seed, unsigned threads = 0) {
    std::vector<GhzConfig> configs;
    for (const auto& s : hv_settings()) configs.push_back(GhzConfig::make(s, groups, seed));
    const auto P = Polarizer::plus45;
    configs.push_back(GhzConfig::make({P, P, P, P}, groups, seed));
    configs.push_back(GhzConfig::make({P, P, P, Polarizer::minus45}, groups, seed));
    auto results = run_ghz_batch(configs, threads);

    GhzTable table;
    table.hv.assign(results.begin(), results.begin() + 16);
    table.all_plus = results[16];
    table.last_minus = results[17];
    table.diagonal_visibility =
        visibility(static_cast<double>(table.all_plus.counts.fourfold), static_cast<double>(table.last_minus.counts.fourfold));
    return table;
}

}  // namespace cylsim
