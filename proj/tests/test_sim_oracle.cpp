// SPDX-License-Identifier: Apache-2.0
//
// tbaf: ambiguity analysis and transmit-beamspace design for MIMO radar
// Copyright (C) 2026 The tbaf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <tbaf/sim_oracle.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace tbaf;

namespace
{
    CMat random_tb(Eigen::Index m, Eigen::Index k, unsigned seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        CMat C(m, k);
        for (Eigen::Index a = 0; a < m; ++a)
            for (Eigen::Index b = 0; b < k; ++b)
                C(a, b) = {g(rng), g(rng)};
        return C;
    }

    cplx direct_cross(const WaveformSet &ws, Eigen::Index j, Eigen::Index k, int lag, double f)
    {
        cplx acc{0.0, 0.0};
        const int len = static_cast<int>(ws.length());
        for (int n = 0; n < len; ++n)
            if (n - lag >= 0 && n - lag < len)
                acc += ws.samples(j, n) * std::conj(ws.samples(k, n - lag)) * std::exp(kJ * (2.0 * kPi * f * n / ws.sample_rate));
        return acc / ws.sample_rate;
    }

    // waveform value at continuous time t, zero outside [0, Tp)
    cplx phi_at(const WaveformSet &ws, Eigen::Index k, double t)
    {
        const long n = std::lround(t * ws.sample_rate);
        return n >= 0 && n < ws.length() ? ws.samples(k, n) : cplx(0.0, 0.0);
    }
} // namespace

TEST(Synthesis, SingleElementCollapses)
{
    auto sc = set_phase_centers(ula(1, 1, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(1, 32, 4e-6, 1, 2.0);
    TargetParams t = at_angle(0.3);
    t.tau = 5.0 / ws.sample_rate;
    auto r = synthesize_rx(sc, ws, CMat::Ones(1, 1), far_field_channel(sc, t));
    ASSERT_EQ(r.cols(), 37);
    const cplx ph = std::exp(-kJ * (2.0 * kPi * t.tau * sc.fc));
    for (Eigen::Index n = 0; n < 37; ++n)
    {
        const cplx want = n < 5 ? cplx(0.0, 0.0) : std::sqrt(2.0) * ws.samples(0, n - 5) * ph;
        EXPECT_LT(std::abs(r(0, n) - want), 1e-12);
    }
}

TEST(Synthesis, ZeroReflectionGivesZeroRecords)
{
    auto sc = set_phase_centers(ula(3, 2, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(3, 32, 4e-6, 1);
    auto ch = far_field_channel(sc, at_angle(0.1));
    ch.alpha.setZero();
    EXPECT_EQ(synthesize_rx(sc, ws, CMat::Identity(3, 3), ch).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Synthesis, RecordEnergyMatchesDirectGram)
{
    auto sc = ula(4, 2, 10e9);
    auto ws = gen_gaussian(3, 40, 4e-6, 6, 2.5);
    CMat C = random_tb(4, 3, 1);
    TargetParams t = at_angle(0.7, 2e3);
    t.tau = 3.0 / ws.sample_rate;
    auto ch = far_field_channel(sc, t);
    auto r = synthesize_rx(sc, ws, C, ch);
    for (Eigen::Index j = 0; j < 2; ++j)
    {
        // (E/K) sum_{m,m'} sum_{k,k'} g_m conj(g_m') c_mk conj(c_m'k') <phi_k, phi_k'> with common lag
        CVec g(4);
        for (Eigen::Index m = 0; m < 4; ++m)
            g(m) = std::exp(-kJ * (2.0 * kPi * ch.tau(m, j) * (sc.fc + t.fd)));
        double acc = 0.0;
        for (Eigen::Index m = 0; m < 4; ++m)
            for (Eigen::Index mp = 0; mp < 4; ++mp)
                for (Eigen::Index k = 0; k < 3; ++k)
                    for (Eigen::Index kp = 0; kp < 3; ++kp)
                    {
                        cplx inner{0.0, 0.0};
                        for (Eigen::Index n = 0; n < ws.length(); ++n)
                            inner += ws.samples(k, n) * std::conj(ws.samples(kp, n));
                        acc += std::real(g(m) * std::conj(g(mp)) * C(m, k) * std::conj(C(mp, kp)) * inner);
                    }
        acc *= 2.5 / 3.0;
        EXPECT_NEAR(r.row(j).squaredNorm(), acc, 1e-9 * acc);
    }
}

TEST(Synthesis, ShortTimelineThrows)
{
    auto sc = set_phase_centers(ula(2, 2, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(2, 32, 4e-6, 1);
    TargetParams t = at_angle(0.0);
    t.tau = 10.0 / ws.sample_rate;
    SimOptions opt;
    opt.record_length = 30;
    EXPECT_THROW(synthesize_rx(sc, ws, CMat::Identity(2, 2), far_field_channel(sc, t), opt), ParameterError);
    t.tau = -2e-6;
    EXPECT_THROW(synthesize_rx(sc, ws, CMat::Identity(2, 2), far_field_channel(sc, t)), ParameterError);
}

TEST(Synthesis, NoiseIsSeededAndOffIsDeterministic)
{
    auto sc = set_phase_centers(ula(2, 2, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(2, 32, 4e-6, 1);
    auto ch = far_field_channel(sc, at_angle(0.2));
    EXPECT_TRUE(synthesize_rx(sc, ws, CMat::Identity(2, 2), ch) == synthesize_rx(sc, ws, CMat::Identity(2, 2), ch));
    ch.noise_power = 1e10;
    ch.seed = 4;
    auto a = synthesize_rx(sc, ws, CMat::Identity(2, 2), ch);
    auto b = synthesize_rx(sc, ws, CMat::Identity(2, 2), ch);
    EXPECT_TRUE(a == b);
    ch.seed = 5;
    EXPECT_FALSE(a == synthesize_rx(sc, ws, CMat::Identity(2, 2), ch));
}

TEST(MatchedBank, SingleChannelMagnitude)
{
    auto sc = set_phase_centers(ula(1, 1, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(1, 64, 6e-6, 1, 3.0);
    TargetParams t = at_angle(0.4, 5e3);
    t.tau = 7.0 / ws.sample_rate;
    const cplx c11(0.6, -0.8);
    auto out = matched_bank(synthesize_rx(sc, ws, CMat::Constant(1, 1, c11), far_field_channel(sc, t)), ws, sc, t);
    EXPECT_NEAR(std::abs(out(0, 0)), std::sqrt(3.0) * std::abs(c11), 1e-9);
}

TEST(MatchedBank, LinearInRecords)
{
    auto sc = set_phase_centers(ula(3, 2, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(3, 32, 4e-6, 1);
    TargetParams t = at_angle(0.2);
    t.tau = 40.0 / ws.sample_rate;
    auto r = synthesize_rx(sc, ws, CMat::Identity(3, 3), far_field_channel(sc, t));
    const cplx s(2.0, -1.5);
    auto a = matched_bank(r, ws, sc, t);
    auto b = matched_bank(s * r, ws, sc, t);
    EXPECT_LT((s * a - b).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST(MatchedBank, MatchesLiteralIntegral)
{
    auto sc = ula(3, 2, 10e9);
    auto ws = gen_gaussian(2, 24, 3e-6, 12);
    CMat C = random_tb(3, 2, 2);
    sc = set_phase_centers(sc, PhaseCenterMode::centroid, {.groups = {}, .centers = {}, .weights = C});
    TargetParams t = at_angle(0.5, 3e4);
    t.tau = 30.0 / ws.sample_rate;
    TargetParams ref = at_angle(0.45, -1e4);
    ref.tau = 27.0 / ws.sample_rate;
    auto ch = far_field_channel(sc, t);
    auto r = synthesize_rx(sc, ws, C, ch);
    auto out = matched_bank(r, ws, sc, ref);

    // discretized receive model and filter written per channel over absolute time
    const double fs = ws.sample_rate, dt = 1.0 / fs;
    const double K = 2.0, E = ws.energy;
    for (Eigen::Index j = 0; j < 2; ++j)
        for (Eigen::Index i = 0; i < 2; ++i)
        {
            const double taup = ref.tau + ref.u().dot(sc.q_te.row(i).transpose() + sc.q_r.row(j).transpose()) / sc.c;
            cplx acc{0.0, 0.0};
            for (Eigen::Index n = 0; n < r.cols(); ++n)
            {
                const double tt = n * dt;
                cplx rj{0.0, 0.0};
                for (Eigen::Index m = 0; m < 3; ++m)
                    for (Eigen::Index k = 0; k < 2; ++k)
                        rj += std::sqrt(E / K) * C(m, k) * phi_at(ws, k, tt - ch.tau(m, j)) *
                              std::exp(-kJ * 2.0 * kPi * ch.tau(m, j) * (sc.fc + t.fd)) * std::exp(kJ * 2.0 * kPi * t.fd * tt);
                acc += rj * std::conj(phi_at(ws, i, tt - taup)) * std::exp(-kJ * 2.0 * kPi * ref.fd * tt) *
                       std::exp(kJ * 2.0 * kPi * taup * (sc.fc + ref.fd)) * dt;
            }
            EXPECT_LT(std::abs(out(j, i) - acc), 1e-10 * std::max(1.0, std::abs(acc)));
        }
}

TEST(AfFromSum, TrivialCases)
{
    EXPECT_EQ(af_from_sum(CMat::Zero(3, 2)), 0.0);
    CMat one = CMat::Zero(2, 2);
    one(1, 0) = {3.0, 4.0};
    EXPECT_DOUBLE_EQ(af_from_sum(one), 25.0);
}

TEST(Oracle, MatchesFactoredFormDelayDoppler)
{
    auto sc = ula(8, 8, 10e9);
    auto ws = gen_polyphase(4, 64, 10e-6, 1, 8.0);
    CMat C = random_tb(8, 4, 17);
    sc = set_phase_centers(sc, PhaseCenterMode::centroid, {.groups = {}, .centers = {}, .weights = C});
    AFQuery q;
    q.theta = at_angle(deg2rad(10.0));
    q.axis1 = default_delay_axis(ws);
    q.dopplers = default_doppler_axis(ws);
    auto rep = compare_with_oracle(sc, ws, {C, "designed"}, q, 5, 1);
    ASSERT_EQ(rep.rows.size(), 5u);
    for (const auto &row : rep.rows)
        EXPECT_LT(row.rel_err, 1e-6) << row.axis1 << " " << row.doppler;
}

TEST(Oracle, MatchesFactoredFormAngleDoppler)
{
    auto sc = ula(8, 8, 10e9);
    auto ws = gen_polyphase(4, 64, 10e-6, 1, 8.0);
    CMat C = random_tb(8, 4, 18);
    sc = set_phase_centers(sc, PhaseCenterMode::centroid, {.groups = {}, .centers = {}, .weights = C});
    AFQuery q;
    q.theta = at_angle(deg2rad(-20.0));
    q.sweep = Sweep::angle_doppler;
    q.axis1 = linspace(-kPi / 2, kPi / 2, 61);
    q.dopplers = default_doppler_axis(ws);
    auto rep = compare_with_oracle(sc, ws, {C, "designed"}, q, 5, 2);
    EXPECT_LT(rep.max_rel_err, 1e-6);
}

TEST(Oracle, PhaseCenterChangeMovesBothForms)
{
    auto sc = ula(6, 4, 10e9);
    auto ws = gen_polyphase(3, 32, 4e-6, 1, 6.0);
    CMat C = random_tb(6, 3, 5);
    Positions centers(3, 3);
    centers << 0.0, 0, 0, 0.05, 0, 0, -0.031, 0, 0;
    sc = set_phase_centers(sc, PhaseCenterMode::explicit_, {.groups = {}, .centers = centers, .weights = {}});
    AFQuery q;
    q.theta = at_angle(0.3);
    q.axis1 = default_delay_axis(ws);
    q.dopplers = doppler_axis(4e5, 9);
    EXPECT_LT(compare_with_oracle(sc, ws, {C, "designed"}, q, 6, 3).max_rel_err, 1e-6);
}

TEST(Oracle, RMatrixIsMixedCrossAf)
{
    auto sc = set_phase_centers(ula(4, 3, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(4, 32, 4e-6, 1, 4.0);
    CMat C = random_tb(4, 4, 6);
    TargetParams t = at_angle(0.2, 2e4);
    auto ch = far_field_channel(sc, t);
    TargetParams ref = at_angle(0.25, -5e3);
    ref.tau = 3.0 / ws.sample_rate;
    auto R = r_matrix(sc, ws, C, ch, ref, 1);
    CMat X(4, 4);
    for (Eigen::Index k = 0; k < 4; ++k)
        for (Eigen::Index i = 0; i < 4; ++i)
            X(k, i) = direct_cross(ws, k, i, 3, t.fd - ref.fd);
    EXPECT_LT((R - std::sqrt(ws.energy / 4.0) * C * X).cwiseAbs().maxCoeff(), 1e-10 * R.cwiseAbs().maxCoeff());
}

TEST(Oracle, PerChannelDopplerResidual)
{
    auto sc = set_phase_centers(ula(4, 4, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(4, 64, 10e-6, 1, 4.0);
    TargetParams t = at_angle(0.1);
    t.tau = 64.0 / ws.sample_rate;
    auto common = far_field_channel(sc, t);
    EXPECT_EQ(doppler_residual(sc, ws, CMat::Identity(4, 4), common, perturb_doppler(common, 0.0, 1), t), 0.0);
    const double small = doppler_residual(sc, ws, CMat::Identity(4, 4), common, perturb_doppler(common, 10.0, 1), t);
    const double large = doppler_residual(sc, ws, CMat::Identity(4, 4), common, perturb_doppler(common, 2e4, 1), t);
    EXPECT_GT(small, 0.0);
    EXPECT_LT(small, 1e-2);
    EXPECT_GT(large, small);
}
