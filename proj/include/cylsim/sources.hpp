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

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>

#include "cylsim/angles.hpp"
#include "cylsim/cylinder.hpp"
#include "cylsim/error.hpp"
#include "cylsim/rng.hpp"

namespace cylsim {

/// How the two pieces of a broken rod are oriented relative to each other.
enum class SourceKind {
    antiparallel_singlet,  // partner offset pi
    orthogonal_pdc,        // partner offset pi/2
};

constexpr double partner_offset(SourceKind kind) {
    return kind == SourceKind::antiparallel_singlet ? kPi : kPi / 2.0;
}

inline std::string_view to_string(SourceKind kind) {
    return kind == SourceKind::antiparallel_singlet ? "antiparallel" : "orthogonal";
}

inline SourceKind parse_source_kind(std::string_view s) {
    if (s == "antiparallel" || s == "antiparallel_singlet") return SourceKind::antiparallel_singlet;
    if (s == "orthogonal" || s == "orthogonal_pdc") return SourceKind::orthogonal_pdc;
    throw ConfigError("unknown source kind '" + std::string(s) + "'");
}

using PiecePair = std::pair<HiddenState, HiddenState>;
using PieceQuad = std::array<HiddenState, 4>;

/// Partner of a piece with the given first-piece draws. Length is conserved:
/// ell_1 + ell_2 = 1.
inline PiecePair make_pair_from_draws(double theta, double ell, SourceKind kind) {
    return {HiddenState{theta, ell}, HiddenState{wrap_two_pi(theta + partner_offset(kind)), 1.0 - ell}};
}

/// One rod broken in two. Draws theta first, then ell.
inline PiecePair emit_pair(RngStream& rng, SourceKind kind) {
    const double theta = rng.uniform_angle();
    const double ell = rng.uniform01();
    return make_pair_from_draws(theta, ell, kind);
}

/// Two independent rods: pieces (1, 2) and (3, 4).
inline PieceQuad emit_quad(RngStream& rng, SourceKind kind) {
    const auto [p1, p2] = emit_pair(rng, kind);
    const auto [p3, p4] = emit_pair(rng, kind);
    return {p1, p2, p3, p4};
}

}  // namespace cylsim
