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

#include <tbaf/tb_core.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace tbaf;

namespace
{
    cplx direct_cross(const WaveformSet &ws, Eigen::Index j, Eigen::Index k, int lag, double f)
    {
        cplx acc{0.0, 0.0};
        const int len = static_cast<int>(ws.length());
        for (int n = 0; n < len; ++n)
        {
            const int m = n - lag;
            if (m < 0 || m >= len)
                continue;
            acc += ws.samples(j, n) * std::conj(ws.samples(k, m)) * std::exp(kJ * (2.0 * kPi * f * n / ws.sample_rate));
        }
        return acc / ws.sample_rate;
    }

    // literal quadruple sum over (m, k, i, receive) with explicit exponentials
    double direct_tb(const ArrayScenario &sc, const WaveformSet &ws, const CMat &C, const TargetParams &t,
                     const TargetParams &tp, int lag, double df)
    {
        const double f = sc.fc + t.fd, fp = sc.fc + tp.fd;
        const Vec3 u = t.u(), up = tp.u();
        cplx rx{0.0, 0.0};
        for (Eigen::Index j = 0; j < sc.num_rx(); ++j)
        {
            const Vec3 q = sc.q_r.row(j).transpose();
            rx += std::exp(-kJ * (2.0 * kPi * f * u.dot(q) / sc.c)) * std::exp(kJ * (2.0 * kPi * fp * up.dot(q) / sc.c));
        }
        cplx tx{0.0, 0.0};
        for (Eigen::Index m = 0; m < sc.num_tx(); ++m)
        {
            const Vec3 q = sc.q_t.row(m).transpose();
            const cplx am = std::exp(-kJ * (2.0 * kPi * f * u.dot(q) / sc.c));
            for (Eigen::Index k = 0; k < ws.count(); ++k)
                for (Eigen::Index i = 0; i < ws.count(); ++i)
                {
                    const Vec3 qe = sc.q_te.row(i).transpose();
                    tx += am * C(m, k) * direct_cross(ws, k, i, lag, df) * std::exp(kJ * (2.0 * kPi * fp * up.dot(qe) / sc.c));
                }
        }
        return ws.energy / static_cast<double>(ws.count()) * std::norm(rx) * std::norm(tx);
    }

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

    AFQuery dd_query(const WaveformSet &ws, double theta, RVec dopplers)
    {
        AFQuery q;
        q.theta = at_angle(theta);
        q.axis1 = default_delay_axis(ws);
        q.dopplers = std::move(dopplers);
        return q;
    }

    double max_abs_diff(const RMat &a, const RMat &b) { return (a - b).cwiseAbs().maxCoeff(); }
} // namespace

TEST(TbAf, ReducesToMimoAf)
{
    auto sc = ula(8, 8, 10e9);
    auto ws = gen_polyphase(8, 64, 10e-6, 1, 8.0);
    auto q = dd_query(ws, deg2rad(12.0), doppler_axis(4e5, 21));
    auto a = tb_af(set_phase_centers(sc, PhaseCenterMode::element), ws, identity_tb(8), q);
    auto b = mimo_af(sc, ws, q);
    EXPECT_LE(max_abs_diff(a.values, b.values), 1e-12 * a.values.maxCoeff());
    EXPECT_TRUE(a.axis1 == b.axis1);
}

TEST(TbAf, ReducesToPaAf)
{
    auto sc = ula(8, 8, 10e9);
    auto ws = gen_polyphase(1, 64, 10e-6, 1);
    CVec w = steering_t(sc, at_angle(deg2rad(-20.0))) / std::sqrt(8.0);
    for (Sweep s : {Sweep::delay_doppler, Sweep::angle_doppler})
    {
        auto q = dd_query(ws, deg2rad(5.0), doppler_axis(4e5, 15));
        q.sweep = s;
        if (s == Sweep::angle_doppler)
            q.axis1 = linspace(-kPi / 2, kPi / 2, 31);
        auto a = tb_af(set_phase_centers(sc, PhaseCenterMode::reference), ws, pa_tb(w), q);
        auto b = pa_af(sc, ws, w, q);
        EXPECT_LE(max_abs_diff(a.values, b.values), 1e-12 * a.values.maxCoeff()) << to_string(s);
    }
}

TEST(TbAf, MatchesLiteralSumAtRandomPoints)
{
    auto sc = ula(6, 5, 10e9);
    auto ws = gen_polyphase(3, 32, 4e-6, 1, 6.0);
    CMat C = random_tb(6, 3, 3);
    sc = set_phase_centers(sc, PhaseCenterMode::centroid, {.groups = {}, .centers = {}, .weights = C});
    auto q = dd_query(ws, deg2rad(17.0), doppler_axis(6e5, 13));
    q.theta.fd = 1500.0;
    auto g = tb_af(sc, ws, {C, "designed"}, q);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<Eigen::Index> di(0, q.axis1.size() - 1), fi(0, q.dopplers.size() - 1);
    for (int t = 0; t < 6; ++t)
    {
        const Eigen::Index a = di(rng), b = fi(rng);
        const int lag = static_cast<int>(std::lround(g.axis1(a) * ws.sample_rate));
        const double ref = direct_tb(sc, ws, C, q.theta, q.reference_at(g.axis1(a), q.dopplers(b)), lag, q.dopplers(b));
        EXPECT_NEAR(g.values(a, b), ref, 1e-9 * std::max(ref, g.values.maxCoeff()));
    }
}

TEST(TbAf, AngleDopplerMatchesLiteralSum)
{
    auto sc = ula(4, 4, 10e9);
    auto ws = gen_polyphase(2, 32, 4e-6, 1, 4.0);
    CMat C = random_tb(4, 2, 4);
    sc = set_phase_centers(sc, PhaseCenterMode::centroid, {.groups = {}, .centers = {}, .weights = C});
    AFQuery q;
    q.theta = at_angle(deg2rad(-8.0));
    q.sweep = Sweep::angle_doppler;
    q.axis1 = linspace(-1.2, 1.2, 9);
    q.dopplers = doppler_axis(2e5, 7);
    auto g = tb_af(sc, ws, {C, "designed"}, q);
    for (Eigen::Index a = 0; a < 9; ++a)
        for (Eigen::Index b = 0; b < 7; ++b)
        {
            const double ref = direct_tb(sc, ws, C, q.theta, q.reference_at(q.axis1(a), q.dopplers(b)), 0, q.dopplers(b));
            EXPECT_NEAR(g.values(a, b), ref, 1e-9 * g.values.maxCoeff());
        }
}

TEST(TbAf, MatchPointValueAndPeak)
{
    auto sc = ula(8, 8, 10e9);
    auto ws = gen_polyphase(4, 64, 10e-6, 1, 8.0);
    CMat C = random_tb(8, 4, 5);
    sc = set_phase_centers(sc, PhaseCenterMode::centroid, {.groups = {}, .centers = {}, .weights = C});
    const TargetParams t = at_angle(deg2rad(3.0));
    // rescale so that a_T^H C a_TE = K
    const cplx g0 = steering_t(sc, t).dot(C * steering_te(sc, t));
    C *= 4.0 / g0;
    auto q = dd_query(ws, t.theta, default_doppler_axis(ws));
    auto g = tb_af(sc, ws, {C, "designed"}, q);
    auto z = find_node(g.axis1, 0.0);
    auto f0 = find_node(g.axis2, 0.0);
    ASSERT_TRUE(z && f0);
    const double expect = 8.0 / 4.0 * 64.0 * 16.0;
    EXPECT_NEAR(g.values(*z, *f0), expect, 1e-9 * expect);
    Eigen::Index r, c;
    g.values.maxCoeff(&r, &c);
    EXPECT_EQ(r, *z);
    EXPECT_EQ(c, *f0);
}

TEST(TbAf, EnergyScalesLinearly)
{
    auto sc = ula(4, 3, 10e9);
    auto ws = gen_polyphase(4, 32, 4e-6, 1, 1.0);
    auto ws3 = gen_polyphase(4, 32, 4e-6, 1, 3.0);
    sc = set_phase_centers(sc, PhaseCenterMode::element);
    auto q = dd_query(ws, 0.2, doppler_axis(3e5, 9));
    auto a = tb_af(sc, ws, identity_tb(4), q);
    auto b = tb_af(sc, ws3, identity_tb(4), q);
    EXPECT_LE(max_abs_diff(3.0 * a.values, b.values), 1e-12 * b.values.maxCoeff());
    EXPECT_LE(max_abs_diff(normalize_unit_peak(a).values, normalize_unit_peak(b).values), 1e-12);
}

TEST(TbAf, ReceiveFactorBound)
{
    auto sc = ula(4, 6, 10e9);
    const TargetParams t = at_angle(0.3);
    EXPECT_NEAR(receive_factor(sc, t, t), 36.0, 1e-9);
    for (double th : linspace(-1.5, 1.5, 41))
        EXPECT_LE(receive_factor(sc, t, at_angle(th)), 36.0 + 1e-9);
}

TEST(TbAf, DimensionMismatchThrows)
{
    auto sc = set_phase_centers(ula(4, 4, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(2, 32, 4e-6, 1);
    auto q = dd_query(ws, 0.0, doppler_axis(1e5, 3));
    EXPECT_THROW(tb_af(sc, ws, identity_tb(4), q), ParameterError);
    EXPECT_THROW(mimo_af(sc, ws, q), ParameterError);
    EXPECT_THROW(pa_af(sc, ws, CVec::Ones(4), q), ParameterError);
    AFQuery empty = q;
    empty.dopplers.resize(0);
    auto ws4 = gen_polyphase(4, 32, 4e-6, 1);
    EXPECT_THROW(tb_af(sc, ws4, identity_tb(4), empty), ParameterError);
}

TEST(PaAf, MatchedAndUniformGains)
{
    auto sc = ula(8, 1, 10e9);
    auto ws = gen_polyphase(1, 32, 4e-6, 1);
    const TargetParams t = at_angle(deg2rad(25.0));
    CVec w = steering_t(sc, t) / std::sqrt(8.0);
    EXPECT_NEAR(std::norm(steering_t(sc, t).dot(w)), 8.0, 1e-12);

    AFQuery q = dd_query(ws, 0.0, doppler_axis(2e5, 5));
    auto one = pa_af(ula(1, 1, 10e9), ws, CVec::Ones(1), q);
    auto uni = pa_af(sc, ws, CVec::Ones(8), q);
    EXPECT_LE(max_abs_diff(64.0 * one.values, uni.values), 1e-12 * uni.values.maxCoeff());
}

TEST(SquareSummation, SingleChannelIsWoodwardSquared)
{
    auto sc = set_phase_centers(ula(1, 1, 10e9), PhaseCenterMode::element);
    auto ws = gen_gaussian(1, 48, 4e-6, 2);
    auto q = dd_query(ws, 0.0, doppler_axis(5e5, 11));
    auto s = square_summation_af(sc, ws, q);
    auto w = woodward(ws, 0, q.axis1, q.dopplers);
    EXPECT_LE(max_abs_diff(s.values, w.values.cwiseAbs2()), 1e-12);
    auto p = pa_af(sc, ws, CVec::Ones(1), q);
    EXPECT_LE(max_abs_diff(s.values, p.values), 1e-12);
}

TEST(SquareSummation, MatchesPerPairDoubleLoop)
{
    auto sc = ula(4, 3, 10e9);
    auto ws = gen_polyphase(4, 32, 4e-6, 1, 4.0);
    auto q = dd_query(ws, 0.1, doppler_axis(5e5, 9));
    auto s = square_summation_af(sc, ws, q);
    const std::array<std::pair<Eigen::Index, Eigen::Index>, 3> pts{{{31, 4}, {10, 0}, {50, 7}}};
    for (auto [a, b] : pts)
    {
        const int lag = static_cast<int>(std::lround(s.axis1(a) * ws.sample_rate));
        double acc = 0.0;
        for (Eigen::Index r = 0; r < sc.num_rx(); ++r)
            for (Eigen::Index i = 0; i < 4; ++i)
                for (Eigen::Index k = 0; k < 4; ++k)
                    acc += ws.energy / 4.0 * std::norm(direct_cross(ws, k, i, lag, q.dopplers(b)));
        EXPECT_NEAR(s.values(a, b), acc, 1e-9 * acc);
    }
}

TEST(Cuts, OriginIsZeroDbAndOffGridThrows)
{
    auto sc = set_phase_centers(ula(4, 4, 10e9), PhaseCenterMode::element);
    auto ws = gen_polyphase(4, 32, 4e-6, 1, 4.0);
    auto q = dd_query(ws, 0.0, doppler_axis(4e5, 17));
    auto g = tb_af(sc, ws, identity_tb(4), q);
    auto zd = zero_doppler_cut(g);
    auto z = find_node(g.axis1, 0.0);
    ASSERT_TRUE(z);
    EXPECT_DOUBLE_EQ(zd.db(*z), 0.0);
    auto zl = zero_delay_cut(g);
    EXPECT_DOUBLE_EQ(zl.db(8), 0.0);
    EXPECT_THROW(cut(g, CutAxis::fix_axis2, 1.234), RangeError);
    EXPECT_THROW(cut(g, CutAxis::fix_axis1, g.axis1(3) + 0.3 / ws.sample_rate), RangeError);
}

TEST(Cuts, SymmetricGridGivesSymmetricSeries)
{
    auto ws = gen_gaussian(1, 64, 6e-6, 4);
    auto sc = set_phase_centers(ula(1, 1, 10e9), PhaseCenterMode::element);
    auto g = square_summation_af(sc, ws, dd_query(ws, 0.0, doppler_axis(4e5, 21)));
    auto c = zero_doppler_cut(g);
    const Eigen::Index n = c.values.size();
    for (Eigen::Index i = 0; i < n; ++i)
        EXPECT_NEAR(c.values(i), c.values(n - 1 - i), 1e-12 * c.values.maxCoeff());
}

TEST(Cuts, EqualDirectReevaluationAlongLine)
{
    auto sc = ula(6, 4, 10e9);
    auto ws = gen_polyphase(3, 32, 4e-6, 1, 6.0);
    CMat C = random_tb(6, 3, 9);
    sc = set_phase_centers(sc, PhaseCenterMode::centroid, {.groups = {}, .centers = {}, .weights = C});
    auto q = dd_query(ws, 0.4, doppler_axis(4e5, 9));
    auto g = tb_af(sc, ws, {C, "designed"}, q);
    auto c = zero_delay_cut(g);
    AFQuery line = q;
    line.axis1 = RVec::Zero(1);
    auto direct = tb_af(sc, ws, {C, "designed"}, line);
    EXPECT_LE((c.values - direct.values.row(0).transpose()).cwiseAbs().maxCoeff(), 1e-12 * g.values.maxCoeff());
}
