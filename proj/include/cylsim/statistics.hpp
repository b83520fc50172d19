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

// Tallies of joint detector outcomes and the estimators built on them:
// moment matrix, coincidence correlation, efficiencies, sinusoid fits and
// fringe visibility. Standard errors are plug-in multinomial formulas.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "cylsim/cylinder.hpp"
#include "cylsim/error.hpp"

namespace cylsim {

/// 3x3 joint outcome counts. counts[outcome_index(a)][outcome_index(b)].
struct CoincidenceTally {
    std::array<std::array<std::uint64_t, 3>, 3> counts{};
    std::uint64_t trials = 0;

    void add(Outcome a, Outcome b) {
        ++counts[outcome_index(a)][outcome_index(b)];
        ++trials;
    }

    std::uint64_t count(Outcome a, Outcome b) const { return counts[outcome_index(a)][outcome_index(b)]; }

    /// Trials with both sides nonzero.
    std::uint64_t coincidences() const {
        return count(Outcome::plus, Outcome::plus) + count(Outcome::plus, Outcome::minus) +
               count(Outcome::minus, Outcome::plus) + count(Outcome::minus, Outcome::minus);
    }

    CoincidenceTally& operator+=(const CoincidenceTally& other) {
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) counts[i][j] += other.counts[i][j];
        trials += other.trials;
        return *this;
    }

    friend CoincidenceTally operator+(CoincidenceTally lhs, const CoincidenceTally& rhs) { return lhs += rhs; }
    friend bool operator==(const CoincidenceTally&, const CoincidenceTally&) = default;
};

/// Returns `t` with one more trial recorded.
inline CoincidenceTally tally(Outcome a, Outcome b, CoincidenceTally t) {
    t.add(a, b);
    return t;
}

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

namespace detail {

inline int ipow(int base, int exp) {
    int r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;  // 0^0 = 1
}

inline void require_trials(const CoincidenceTally& t, const char* what) {
    if (t.trials == 0) throw UndefinedEstimate(std::string(what) + ": tally has no trials");
}

}  // namespace detail

/// e[mu][nu] = sum sigma^mu tau^nu counts[sigma][tau] / trials.
inline MomentMatrix empirical_moments(const CoincidenceTally& t) {
    detail::require_trials(t, "empirical_moments");
    MomentMatrix m;
    const double n = static_cast<double>(t.trials);
    for (int mu = 0; mu < 3; ++mu) {
        for (int nu = 0; nu < 3; ++nu) {
            double acc = 0.0;
            for (Outcome a : kAllOutcomes)
                for (Outcome b : kAllOutcomes)
                    acc += detail::ipow(value(a), mu) * detail::ipow(value(b), nu) * static_cast<double>(t.count(a, b));
            m.e[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] = acc / n;
        }
    }
    return m;
}

/// Standard error of each moment estimate, sqrt(Var(A^mu B^nu) / trials).
inline MomentMatrix moment_std_errors(const CoincidenceTally& t) {
    detail::require_trials(t, "moment_std_errors");
    const MomentMatrix first = empirical_moments(t);
    MomentMatrix se;
    const double n = static_cast<double>(t.trials);
    for (int mu = 0; mu < 3; ++mu) {
        for (int nu = 0; nu < 3; ++nu) {
            double second = 0.0;
            for (Outcome a : kAllOutcomes)
                for (Outcome b : kAllOutcomes) {
                    const double x = detail::ipow(value(a), mu) * detail::ipow(value(b), nu);
                    second += x * x * static_cast<double>(t.count(a, b));
                }
            second /= n;
            const double mean = first(mu, nu);
            se.e[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] =
                std::sqrt(std::max(0.0, second - mean * mean) / n);
        }
    }
    return se;
}

/// Coincidence correlation: agreeing minus disagreeing +/- cells over all four.
inline Estimate estimate_Q(const CoincidenceTally& t) {
    const std::uint64_t n = t.coincidences();
    if (n == 0) throw UndefinedEstimate("estimate_Q: no coincidences");
    const double agree = static_cast<double>(t.count(Outcome::plus, Outcome::plus) + t.count(Outcome::minus, Outcome::minus));
    const double nn = static_cast<double>(n);
    const double q = (2.0 * agree - nn) / nn;
    return {q, std::sqrt(std::max(0.0, 1.0 - q * q) / nn)};
}

struct EfficiencyEstimate {
    Estimate singles_a;
    Estimate singles_b;
    Estimate singles;  // side average
    Estimate doubles;
    Estimate conditional;  // doubles / side-averaged singles

    EfficiencyTriple triple() const { return {singles.value, doubles.value, conditional.value}; }
};

inline EfficiencyEstimate efficiency_from_tally(const CoincidenceTally& t) {
    detail::require_trials(t, "efficiency_from_tally");
    const double n = static_cast<double>(t.trials);
    auto binomial = [n](double k) {
        const double p = k / n;
        return Estimate{p, std::sqrt(p * (1.0 - p) / n)};
    };

    double det_a = 0.0, det_b = 0.0;
    for (Outcome o : kAllOutcomes) {
        det_a += static_cast<double>(t.count(Outcome::plus, o) + t.count(Outcome::minus, o));
        det_b += static_cast<double>(t.count(o, Outcome::plus) + t.count(o, Outcome::minus));
    }
    const double both = static_cast<double>(t.coincidences());

    EfficiencyEstimate out;
    out.singles_a = binomial(det_a);
    out.singles_b = binomial(det_b);
    out.doubles = binomial(both);

    // Per-trial v = (a^2 + b^2) / 2 takes values 0, 1/2, 1; d = a^2 b^2.
    const double s = (det_a + det_b) / (2.0 * n);
    const double one_side = (det_a + det_b - 2.0 * both) / n;  // fraction with v = 1/2
    const double ev2 = both / n + 0.25 * one_side;
    out.singles = {s, std::sqrt(std::max(0.0, ev2 - s * s) / n)};

    if (s > 0.0) {
        const double c = out.doubles.value / s;
        // Delta method on d - c v; d = 1 implies v = 1.
        const double p_both = both / n;
        const double p_half = one_side;
        const double p_zero = 1.0 - p_both - p_half;
        const double r_both = 1.0 - c, r_half = -0.5 * c, r_zero = 0.0;
        const double mean = p_both * r_both + p_half * r_half + p_zero * r_zero;
        const double var = p_both * r_both * r_both + p_half * r_half * r_half - mean * mean;
        out.conditional = {c, std::sqrt(std::max(0.0, var) / n) / s};
    }
    return out;
}

struct AnglePoint {
    double angle = 0.0;
    double value = 0.0;
};

/// y(angle) = offset + cos_coef cos(k angle) + sin_coef sin(k angle).
struct SineFit {
    double offset = 0.0;
    double cos_coef = 0.0;
    double sin_coef = 0.0;
    double k = 1.0;
    double rms = 0.0;  // residual root mean square

    double amplitude() const { return std::hypot(cos_coef, sin_coef); }
    double operator()(double angle) const { return offset + cos_coef * std::cos(k * angle) + sin_coef * std::sin(k * angle); }
};

/// Unweighted linear least squares on the basis {1, cos k angle, sin k angle}.
inline SineFit sine_fit(std::span<const AnglePoint> points, double k) {
    std::vector<double> distinct;
    distinct.reserve(points.size());
    for (const auto& p : points) distinct.push_back(p.angle);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw RankDeficient("sine_fit: need at least 3 distinct angles");

    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(m, 3);
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(k * p.angle);
        design(i, 2) = std::sin(k * p.angle);
        y(i) = p.value;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) throw RankDeficient("sine_fit: design matrix is rank deficient for this frequency");
    const Eigen::Vector3d c = qr.solve(y);

    SineFit fit{c(0), c(1), c(2), k, 0.0};
    const Eigen::VectorXd resid = y - design * c;
    fit.rms = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
    return fit;
}

enum class VisibilitySource { extremal, fit };

struct VisibilityResult {
    double value = 0.0;
    VisibilitySource source = VisibilitySource::extremal;
};

/// (max - min) / (max + min).
inline VisibilityResult visibility(double max_value, double min_value) {
    if (max_value < min_value) std::swap(max_value, min_value);
    const double denom = max_value + min_value;
    if (!(denom > 0.0)) throw UndefinedEstimate("visibility: max + min must be positive");
    return {(max_value - min_value) / denom, VisibilitySource::extremal};
}

/// Extremal visibility of a set of rates.
inline VisibilityResult visibility(std::span<const double> values) {
    if (values.empty()) throw UndefinedEstimate("visibility: no values");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return visibility(*hi, *lo);
}

/// Fringe visibility amplitude / offset of a fitted sinusoid.
inline VisibilityResult visibility(const SineFit& fit) {
    if (!(fit.offset > 0.0)) throw UndefinedEstimate("visibility: fitted offset must be positive");
    return {fit.amplitude() / fit.offset, VisibilitySource::fit};
}

}  // namespace cylsim
