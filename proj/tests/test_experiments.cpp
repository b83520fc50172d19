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

#include "cylsim/experiments.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

using namespace cylsim;

namespace {

ScanConfig small_scan(ParticleKind kind, SourceKind source, std::uint64_t trials) {
    ScanConfig cfg;
    cfg.kind = kind;
    cfg.source = source;
    cfg.angles = linspace(0.0, kPi, 7);
    cfg.trials = trials;
    cfg.seed = 11;
    return cfg;
}

PbwzConfig small_pbwz(BsmRule rule) {
    PbwzConfig cfg;
    cfg.groups = 1800;
    cfg.repetitions = 8;
    cfg.bsm_rule = rule;
    cfg.seed = 5;
    return cfg;
}

/// Fitted fringe as a 2-vector (cos, sin) coefficient.
double fringe_dot(const SineFit& a, const SineFit& b) { return a.cos_coef * b.cos_coef + a.sin_coef * b.sin_coef; }

}  // namespace

TEST(Linspace, Endpoints) {
    const auto xs = linspace(0.0, kPi, 13);
    ASSERT_EQ(xs.size(), 13u);
    EXPECT_EQ(xs.front(), 0.0);
    EXPECT_EQ(xs.back(), kPi);
    EXPECT_NEAR(xs[6], kPi / 2, 1e-15);
    EXPECT_TRUE(linspace(0, 1, 0).empty());
    EXPECT_EQ(linspace(2, 3, 1), std::vector<double>{2.0});
}

TEST(SplitCells, CoversAllTrials) {
    const auto cells = detail::split_cells(3, 2 * kTrialsPerCell + 5);
    ASSERT_EQ(cells.size(), 9u);
    std::uint64_t total = 0;
    for (const auto& c : cells) total += c.count;
    EXPECT_EQ(total, 3 * (2 * kTrialsPerCell + 5));
    EXPECT_EQ(cells[2].count, 5u);
    EXPECT_EQ(cells[2].chunk, 2u);
}

TEST(BipartiteScan, MatchesClosedFormWithinFourSigma) {
    for (auto kind : {ParticleKind::photon(), ParticleKind::electron()}) {
        const auto report = run_bipartite_scan(small_scan(kind, SourceKind::antiparallel_singlet, 200000));
        ASSERT_EQ(report.rows.size(), 7u);
        for (const auto& row : report.rows) {
            EXPECT_EQ(row.tally.trials, 200000u);
            EXPECT_NEAR(row.q.value, predicted_Q(row.delta, kind), 4 * row.q.std_error + 1e-12)
                << "n=" << kind.n << " delta=" << row.delta;
        }
        EXPECT_EQ(report.pooled.trials, 7u * 200000u);
        const auto oracle = predicted_efficiencies();
        EXPECT_NEAR(report.pooled_efficiency.singles.value, oracle.singles,
                    4 * report.pooled_efficiency.singles.std_error);
        EXPECT_NEAR(report.pooled_efficiency.doubles.value, oracle.doubles,
                    4 * report.pooled_efficiency.doubles.std_error);
    }
}

TEST(BipartiteScan, PerfectCorrelationAtZeroRelativeAngle) {
    struct Case {
        ParticleKind kind;
        SourceKind source;
        double expected;
    };
    for (const auto& c : {Case{ParticleKind::photon(), SourceKind::antiparallel_singlet, 1.0},
                          Case{ParticleKind::electron(), SourceKind::antiparallel_singlet, -1.0},
                          Case{ParticleKind::photon(), SourceKind::orthogonal_pdc, -1.0}}) {
        ScanConfig cfg = small_scan(c.kind, c.source, 50000);
        cfg.angles = {0.0};
        const auto report = run_bipartite_scan(cfg);
        EXPECT_EQ(report.rows[0].q.value, c.expected);
    }
}

TEST(BipartiteScan, IdenticalForAnyWorkerCount) {
    ScanConfig cfg = small_scan(ParticleKind::photon(), SourceKind::antiparallel_singlet, 3 * kTrialsPerCell + 17);
    const auto one = run_bipartite_scan(cfg, 1);
    const auto many = run_bipartite_scan(cfg, 5);
    ASSERT_EQ(one.rows.size(), many.rows.size());
    for (std::size_t i = 0; i < one.rows.size(); ++i) EXPECT_EQ(one.rows[i].tally, many.rows[i].tally);
}

TEST(BipartiteScan, SeedChangesCounts) {
    ScanConfig cfg = small_scan(ParticleKind::photon(), SourceKind::antiparallel_singlet, 10000);
    const auto a = run_bipartite_scan(cfg);
    cfg.seed += 1;
    const auto b = run_bipartite_scan(cfg);
    EXPECT_NE(a.rows[1].tally, b.rows[1].tally);
}

TEST(BipartiteScan, GlobalRotationLeavesStatisticsUnchanged) {
    for (bool randomize : {true, false}) {
        ScanConfig cfg = small_scan(ParticleKind::photon(), SourceKind::antiparallel_singlet, 100000);
        cfg.randomize_rotation = randomize;
        const auto base = run_bipartite_scan(cfg);
        cfg.global_rotation = 1.234;
        const auto rotated = run_bipartite_scan(cfg);
        for (std::size_t i = 0; i < base.rows.size(); ++i) {
            const double se = std::hypot(base.rows[i].q.std_error, rotated.rows[i].q.std_error);
            EXPECT_NEAR(base.rows[i].q.value, rotated.rows[i].q.value, 4 * se + 1e-9);
        }
    }
}

TEST(BipartiteScan, RejectsBadConfig) {
    ScanConfig cfg;
    EXPECT_THROW(run_bipartite_scan(cfg), ConfigError);
    cfg.angles = {0.0};
    cfg.trials = 0;
    EXPECT_THROW(run_bipartite_scan(cfg), ConfigError);
}

TEST(Chsh, ReachesTsirelsonValue) {
    ChshConfig cfg;
    cfg.trials = 200000;
    cfg.seed = 3;
    const auto r = run_chsh(cfg);
    EXPECT_NEAR(r.oracle, 2 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.statistic.value, 2 * std::sqrt(2.0), 4 * r.statistic.std_error);
    EXPECT_DOUBLE_EQ(r.terms[1].angle_b, 3 * kPi / 8);
    EXPECT_DOUBLE_EQ(r.terms[2].angle_a, kPi / 4);
}

TEST(Chsh, CoincidentSettingsGiveTwo) {
    ChshConfig cfg;
    cfg.a = cfg.a_prime = cfg.b = cfg.b_prime = 0.4;
    cfg.trials = 20000;
    const auto r = run_chsh(cfg);
    EXPECT_DOUBLE_EQ(r.statistic.value, 2.0);
    EXPECT_DOUBLE_EQ(r.oracle, 2.0);
}

TEST(Chsh, LosslessDetectorsObeyBellBound) {
    // With every piece detected the outcomes are a local deterministic
    // function of theta, so the CHSH combination cannot exceed 2.
    const ChshConfig cfg;
    const std::array<std::pair<double, double>, 4> settings = {
        {{cfg.a, cfg.b}, {cfg.a, cfg.b_prime}, {cfg.a_prime, cfg.b}, {cfg.a_prime, cfg.b_prime}}};
    std::array<double, 4> q{};
    double var = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
        RngStream rng(12, {experiment_id::kChsh, s, 99});
        CoincidenceTally t;
        for (int i = 0; i < 200000; ++i) {
            auto [one, two] = emit_pair(rng, SourceKind::antiparallel_singlet);
            one.ell = two.ell = 0.0;
            t.add(respond({settings[s].first, ParticleKind::photon()}, one),
                  respond({settings[s].second, ParticleKind::photon()}, two));
        }
        const auto e = estimate_Q(t);
        ASSERT_EQ(t.coincidences(), t.trials);
        q[s] = e.value;
        var += e.std_error * e.std_error;
    }
    EXPECT_LE(chsh_combination(q[0], q[1], q[2], q[3]), 2.0 + 4 * std::sqrt(var));
}

TEST(BsmRule, Acceptance) {
    using O = Outcome;
    EXPECT_TRUE(bsm_accepts(BsmRule::opposite_channels, O::plus, O::minus));
    EXPECT_FALSE(bsm_accepts(BsmRule::opposite_channels, O::plus, O::plus));
    EXPECT_FALSE(bsm_accepts(BsmRule::opposite_channels, O::none, O::minus));
    EXPECT_TRUE(bsm_accepts(BsmRule::same_channel, O::minus, O::minus));
    EXPECT_FALSE(bsm_accepts(BsmRule::same_channel, O::none, O::none));
    EXPECT_TRUE(bsm_accepts(BsmRule::accept_all, O::none, O::none));
    EXPECT_EQ(parse_bsm_rule(to_string(BsmRule::same_channel)), BsmRule::same_channel);
    EXPECT_THROW(parse_bsm_rule("bell"), ConfigError);
}

TEST(Pbwz, ConditionedFringesAreComplementary) {
    const auto r = run_pbwz(small_pbwz(BsmRule::opposite_channels));
    ASSERT_EQ(r.rows.size(), 13u);
    EXPECT_NEAR(r.visibility, std::sqrt(0.5), 0.06);
    EXPECT_TRUE(r.complementary);
    // D1+ and D1- fringes cancel: the summed series is flat.
    const double sum_amp = std::hypot(r.plus_fit.cos_coef + r.minus_fit.cos_coef, r.plus_fit.sin_coef + r.minus_fit.sin_coef);
    EXPECT_LT(sum_amp / (r.plus_fit.offset + r.minus_fit.offset), 0.1);
}

TEST(Pbwz, UnconditionedControlIsFlat) {
    const auto r = run_pbwz(small_pbwz(BsmRule::accept_all));
    EXPECT_LT(r.plus_visibility.value, 0.1);
    EXPECT_LT(r.minus_visibility.value, 0.1);
}

TEST(Pbwz, SameChannelRuleInvertsFringes) {
    const auto opposite = run_pbwz(small_pbwz(BsmRule::opposite_channels));
    const auto same = run_pbwz(small_pbwz(BsmRule::same_channel));
    EXPECT_NEAR(same.visibility, std::sqrt(0.5), 0.06);
    EXPECT_LT(fringe_dot(opposite.plus_fit, same.plus_fit), 0.0);
}

TEST(Pbwz, BsmAxisAtFortyFiveDegreesFromStationOneGivesNoFringe) {
    PbwzConfig cfg = small_pbwz(BsmRule::opposite_channels);
    cfg.station1_angle = kPi / 4;
    cfg.bsm_axis = 0.0;
    const auto r = run_pbwz(cfg);
    EXPECT_LT(r.visibility, 0.1);
}

TEST(Pbwz, IdenticalForAnyWorkerCount) {
    PbwzConfig cfg = small_pbwz(BsmRule::opposite_channels);
    cfg.repetitions = 3;
    const auto a = run_pbwz(cfg, 1);
    const auto b = run_pbwz(cfg, 6);
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        for (std::size_t k = 0; k < a.rows[i].reps.size(); ++k) {
            EXPECT_EQ(a.rows[i].reps[k].plus, b.rows[i].reps[k].plus);
            EXPECT_EQ(a.rows[i].reps[k].minus, b.rows[i].reps[k].minus);
            EXPECT_EQ(a.rows[i].reps[k].accepted, b.rows[i].reps[k].accepted);
        }
    EXPECT_EQ(a.plus_fit.offset, b.plus_fit.offset);
}

TEST(Pbwz, NoFourfoldsIsUndefined) {
    PbwzConfig cfg;
    cfg.groups = 1;
    cfg.repetitions = 1;
    cfg.detector4_angles = {0.0, kPi / 3, 2 * kPi / 3};
    int empty_seen = 0;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        cfg.seed = seed;
        std::uint64_t total = 0;
        for (std::size_t a = 0; a < 3; ++a) {
            RngStream rng(seed, {experiment_id::kPbwz, a, 0});
            const auto c = run_pbwz_groups(cfg, cfg.detector4_angles[a], 1, rng);
            total += c.plus + c.minus;
        }
        if (total == 0) {
            ++empty_seen;
            EXPECT_THROW(run_pbwz(cfg), UndefinedEstimate);
        }
    }
    EXPECT_GT(empty_seen, 0);
}

TEST(Pbwz, RejectsBadConfig) {
    PbwzConfig cfg;
    cfg.groups = 0;
    EXPECT_THROW(run_pbwz(cfg), ConfigError);
    cfg.groups = 1;
    cfg.detector4_angles.clear();
    EXPECT_THROW(run_pbwz(cfg), ConfigError);
}

TEST(PbsRoute, Examples) {
    EXPECT_EQ(pbs_route(HiddenState::make(0.1, 0.3)), PbsChannel::transmitted);
    EXPECT_EQ(pbs_route(HiddenState::make(kPi - 0.1, 0.3)), PbsChannel::transmitted);
    EXPECT_EQ(pbs_route(HiddenState::make(kPi / 2, 0.3)), PbsChannel::reflected);
    EXPECT_EQ(pbs_route(HiddenState::make(3 * kPi / 2 + 0.2, 0.3)), PbsChannel::reflected);
    EXPECT_FALSE(pbs_route(HiddenState::make(0.1, 0.9)).has_value());
    EXPECT_TRUE(pbs_route(HiddenState::make(kPi / 4, 0.999)).has_value());
}

TEST(PbsRoute, HalfTurnInvariant) {
    RngStream rng(6, {});
    for (int i = 0; i < 10000; ++i) {
        const double t = rng.uniform_angle(), l = rng.uniform01();
        ASSERT_EQ(pbs_route(HiddenState::make(t, l)), pbs_route(HiddenState::make(wrap_two_pi(t + kPi), l)));
    }
}

TEST(PartnerView, Mirrors) {
    EXPECT_DOUBLE_EQ(partner_view(0.3), kTwoPi - 0.3);
    EXPECT_EQ(partner_view(0.0), 0.0);
    EXPECT_NEAR(partner_view(partner_view(1.1)), 1.1, 1e-15);
}

TEST(Polarizer, LobeCenteredOnAxis) {
    const auto s = HiddenState::make(0.1, 0.2);
    EXPECT_TRUE(polarizer_passes(polarizer_angle(Polarizer::H), s));
    EXPECT_FALSE(polarizer_passes(polarizer_angle(Polarizer::V), s));
    EXPECT_TRUE(polarizer_passes(polarizer_angle(Polarizer::V), HiddenState::make(kPi / 2 + 0.1, 0.2)));
    EXPECT_EQ(parse_polarizer("-45"), Polarizer::minus45);
    EXPECT_EQ(parse_polarizer("V"), Polarizer::V);
    EXPECT_THROW(parse_polarizer("R"), ConfigError);
}

TEST(GhzConfig, ValidationAndIndex) {
    using P = Polarizer;
    EXPECT_THROW(GhzConfig::make({P::H, P::H, P::H, P::H}, 0, 1), ConfigError);
    EXPECT_EQ(GhzConfig::make({P::H, P::H, P::H, P::H}, 1, 1).setting_index(), 0u);
    EXPECT_EQ(GhzConfig::make({P::V, P::V, P::V, P::V}, 1, 1).setting_index(), 85u);
    const auto w = GhzConfig::make({P::H, P::V, P::plus45, P::H}, 1, 1).wiring();
    EXPECT_EQ(w.p2_transmitted, P::plus45);
    EXPECT_EQ(w.p2_reflected, P::V);
    EXPECT_EQ(w.p3_transmitted, P::V);
    EXPECT_EQ(w.p3_reflected, P::plus45);
    EXPECT_EQ(settings_label({P::H, P::V, P::V, P::H}), "HVVH");
    EXPECT_EQ(settings_label({P::plus45, P::plus45, P::plus45, P::minus45}), "+45,+45,+45,-45");
}

TEST(Ghz, TableHasOnlyTwoHvTermsAndDiagonalFringe) {
    const auto table = run_ghz_table(20000, 9);
    ASSERT_EQ(table.hv.size(), 16u);
    for (const auto& r : table.hv) {
        const auto label = settings_label(r.settings);
        EXPECT_EQ(r.counts.groups, 20000u);
        if (label == "HVVH" || label == "VHHV")
            EXPECT_GT(r.counts.fourfold, 0u) << label;
        else
            EXPECT_EQ(r.counts.fourfold, 0u) << label;
        EXPECT_EQ(r.counts.fourfold, r.counts.fourfold_transmitted + r.counts.fourfold_reflected);
    }
    EXPECT_GT(table.all_plus.counts.fourfold, 0u);
    EXPECT_EQ(table.last_minus.counts.fourfold, 0u);
    EXPECT_DOUBLE_EQ(table.diagonal_visibility.value, 1.0);
}

TEST(Ghz, IdenticalForAnyWorkerCount) {
    const auto a = run_ghz_table(kTrialsPerCell + 100, 2, 1);
    const auto b = run_ghz_table(kTrialsPerCell + 100, 2, 7);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(a.hv[i].counts, b.hv[i].counts);
    EXPECT_EQ(a.all_plus.counts, b.all_plus.counts);
}
