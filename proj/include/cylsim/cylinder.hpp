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

// Single-particle response of the cylinder detector model and the closed-form
// quantities that follow from it.
//
// A particle carries an orientation theta and a normalized half-length ell in
// [0, 1]. A detector rotated to `angle` looks at phi = theta - angle on a
// cylinder whose surface is split into 2n lobes (n = 1 electrons, n = 2
// photons). Each lobe is bounded above by the scallop 1/2 + 1/2 |sin(n phi)|;
// pieces below the boundary are detected, alternating '+' and '-' per lobe,
// and pieces above it are lost ('0').

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cylsim/angles.hpp"
#include "cylsim/error.hpp"

namespace cylsim {

/// n = 2s: 1 for electrons, 2 for photons. The response is valid for any n >= 1.
struct ParticleKind {
    int n = 2;

    static constexpr ParticleKind electron() { return {1}; }
    static constexpr ParticleKind photon() { return {2}; }

    static ParticleKind make(int n) {
        if (n < 1) throw DomainError("particle kind n must be >= 1, got " + std::to_string(n));
        return {n};
    }

    /// (-1)^n
    constexpr double parity() const { return (n % 2 == 0) ? 1.0 : -1.0; }

    friend constexpr bool operator==(ParticleKind, ParticleKind) = default;
};

/// Hidden variables of one piece.
struct HiddenState {
    double theta = 0.0;  // orientation, radians, canonical in [0, 2*pi)
    double ell = 0.0;    // normalized half-length in [0, 1]

    static HiddenState make(double theta, double ell) {
        if (!(ell >= 0.0 && ell <= 1.0)) {
            throw DomainError("hidden state length must lie in [0, 1], got " + std::to_string(ell));
        }
        return {wrap_two_pi(theta), ell};
    }
};

struct DetectorConfig {
    double angle = 0.0;  // radians, canonical in [0, 2*pi)
    ParticleKind kind;

    static DetectorConfig make(double angle, ParticleKind kind) {
        return {wrap_two_pi(angle), ParticleKind::make(kind.n)};
    }
};

/// Detection trit. `none` is the '0' channel.
enum class Outcome : std::int8_t { minus = -1, none = 0, plus = 1 };

constexpr int value(Outcome o) { return static_cast<int>(o); }

/// Row/column index of an outcome in 3x3 tables: -1 -> 0, 0 -> 1, +1 -> 2.
constexpr std::size_t outcome_index(Outcome o) { return static_cast<std::size_t>(value(o) + 1); }

constexpr Outcome outcome_from_index(std::size_t i) { return static_cast<Outcome>(static_cast<int>(i) - 1); }

inline constexpr std::array<Outcome, 3> kAllOutcomes = {Outcome::minus, Outcome::none, Outcome::plus};

/// Height of the lobe boundary at relative angle phi.
inline double boundary_height(double phi, ParticleKind kind) {
    return 0.5 + 0.5 * std::abs(std::sin(kind.n * phi));
}

/// Detector outcome for one piece. Lobes are half-open [k*pi/n, (k+1)*pi/n);
/// lobe 0 is '+'. A piece exactly on the boundary height is detected.
inline Outcome respond(const DetectorConfig& det, const HiddenState& state) {
    const double phi = wrap_two_pi(state.theta - det.angle);
    const double x = det.kind.n * phi;
    if (state.ell > 0.5 + 0.5 * std::abs(std::sin(x))) return Outcome::none;
    const auto lobes = static_cast<std::int64_t>(2 * det.kind.n);
    auto k = static_cast<std::int64_t>(std::floor(x / kPi)) % lobes;
    if (k < 0) k += lobes;
    return (k % 2 == 0) ? Outcome::plus : Outcome::minus;
}

/// Scallop boundary above the mid line, f(x) = sin(pi x) / 2 on [0, 1].
inline double scallop_f(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("scallop_f: x must lie in [0, 1]");
    return 0.5 * std::sin(kPi * x);
}

/// Area under the scallop on [0, x]: (1 - cos(pi x)) / (2 pi).
inline double scallop_F(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("scallop_F: x must lie in [0, 1]");
    return (1.0 - std::cos(kPi * x)) / (2.0 * kPi);
}

/// Area of one full scallop, F(1) = 1/pi.
inline constexpr double kScallopArea = 1.0 / kPi;

/// Coincidence correlation of a conserved pair at relative angle delta:
/// (-1)^n cos(n delta).
inline double predicted_Q(double delta, ParticleKind kind) { return kind.parity() * std::cos(kind.n * delta); }

/// Same correlation obtained from the scallop area, (-1)^n [1 - 2 F(x)/F(1)]
/// with pi x = n delta folded onto [0, pi].
inline double predicted_Q_from_scallop(double delta, ParticleKind kind) {
    double y = wrap_two_pi(kind.n * delta);
    if (y > kPi) y = kTwoPi - y;
    const double x = std::min(1.0, y / kPi);
    return kind.parity() * (1.0 - 2.0 * scallop_F(x) / scallop_F(1.0));
}

struct EfficiencyTriple {
    double singles = 0.0;      // S
    double doubles = 0.0;      // D
    double conditional = 0.0;  // C = D / S
};

/// S = 1/2 + 1/pi, D = 2/pi, C = 4/(pi + 2).
inline EfficiencyTriple predicted_efficiencies() {
    const double s = 0.5 + kScallopArea;
    const double d = 2.0 * kScallopArea;
    return {s, d, 4.0 / (kPi + 2.0)};
}

struct ConstraintCheck {
    bool pass = true;
    std::vector<std::string> violated;

    explicit operator bool() const { return pass; }
};

/// Checks 0 <= D <= S <= 1 and 2S - 1 <= D. Comparisons allow 1e-12 of slack
/// because the cylinder model sits exactly on 2S - 1 = D.
inline ConstraintCheck check_constraints(double singles, double doubles) {
    constexpr double kSlack = 1e-12;
    ConstraintCheck out;
    auto require = [&](bool ok, const char* clause) {
        if (!ok) {
            out.pass = false;
            out.violated.emplace_back(clause);
        }
    };
    require(doubles >= -kSlack, "0 <= D");
    require(doubles <= singles + kSlack, "D <= S");
    require(singles <= 1.0 + kSlack, "S <= 1");
    require(2.0 * singles - 1.0 <= doubles + kSlack, "2S - 1 <= D");
    return out;
}

/// e[mu][nu] = <A^mu B^nu>, mu, nu in {0, 1, 2}.
struct MomentMatrix {
    std::array<std::array<double, 3>, 3> e{};

    double operator()(int mu, int nu) const { return e[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)]; }
};

/// Model moments: zero odd cells, S on the singles cells, D r on <AB>, D on <A^2 B^2>.
inline MomentMatrix predicted_moment_matrix(double delta, ParticleKind kind) {
    const auto eff = predicted_efficiencies();
    MomentMatrix m;
    m.e = {{{1.0, 0.0, eff.singles}, {0.0, eff.doubles * predicted_Q(delta, kind), 0.0}, {eff.singles, 0.0, eff.doubles}}};
    return m;
}

/// p[sigma][tau] = Pr(A = sigma, B = tau), indexed through outcome_index.
struct ProbMatrix {
    std::array<std::array<double, 3>, 3> p{};

    double operator()(Outcome a, Outcome b) const { return p[outcome_index(a)][outcome_index(b)]; }

    double sum() const {
        double s = 0.0;
        for (const auto& row : p)
            for (double v : row) s += v;
        return s;
    }
};

/// Joint outcome distribution fixed by singles S, doubles D and correlation r.
inline ProbMatrix prob_matrix(double singles, double doubles, double r) {
    if (auto check = check_constraints(singles, doubles); !check) {
        std::string msg = "prob_matrix: constraint violated:";
        for (const auto& c : check.violated) msg += " [" + c + "]";
        throw ConstraintViolation(msg);
    }
    if (!(r >= -1.0 - 1e-12 && r <= 1.0 + 1e-12)) throw ConstraintViolation("prob_matrix: |r| must be <= 1");
    const double corner_same = doubles * (1.0 + r) / 4.0;
    const double corner_diff = doubles * (1.0 - r) / 4.0;
    const double edge = (singles - doubles) / 2.0;
    // 1 + D - 2S, clamped at the 2S - 1 = D boundary where it is zero up to rounding.
    const double center = std::max(0.0, 1.0 + doubles - 2.0 * singles);
    ProbMatrix m;
    m.p = {{{corner_same, edge, corner_diff}, {edge, center, edge}, {corner_diff, edge, corner_same}}};
    return m;
}

inline ProbMatrix predicted_prob_matrix(double delta, ParticleKind kind) {
    const auto eff = predicted_efficiencies();
    return prob_matrix(eff.singles, eff.doubles, predicted_Q(delta, kind));
}

}  // namespace cylsim
