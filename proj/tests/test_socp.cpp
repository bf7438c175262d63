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

#include <tbaf/socp.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace tbaf;
using namespace tbaf::socp;

TEST(Socp, SmallLinearProgram)
{
    // min x1 + 2 x2  s.t. x >= 0, x1 + x2 >= 1
    Problem p;
    p.c = RVec(2);
    p.c << 1.0, 2.0;
    p.G = RMat(3, 2);
    p.G << -1, 0, 0, -1, -1, -1;
    p.h = RVec(3);
    p.h << 0, 0, -1;
    p.dims.l = 3;
    auto r = solve(p);
    ASSERT_EQ(r.status, Status::optimal);
    EXPECT_NEAR(r.pcost, 1.0, 1e-7);
    EXPECT_NEAR(r.x(0), 1.0, 1e-6);
    EXPECT_NEAR(r.x(1), 0.0, 1e-6);
}

TEST(Socp, DistanceFromPointToBall)
{
    // min t s.t. |x - a| <= t, |x| <= 1 ; optimum |a| - 1
    RVec a(3);
    a << 3.0, -1.0, 2.0;
    Problem p;
    p.c = RVec::Zero(4);
    p.c(3) = 1.0; // x = (x1, x2, x3, t)
    p.G = RMat::Zero(8, 4);
    p.h = RVec::Zero(8);
    p.G(0, 3) = -1.0;
    for (int i = 0; i < 3; ++i)
    {
        p.G(1 + i, i) = -1.0;
        p.h(1 + i) = -a(i);
    }
    p.h(4) = 1.0;
    for (int i = 0; i < 3; ++i)
        p.G(5 + i, i) = -1.0;
    p.dims.q = {4, 4};
    Settings st;
    st.verbose = std::getenv("SOCP_TRACE") != nullptr;
    auto r = solve(p, st);
    ASSERT_EQ(r.status, Status::optimal);
    EXPECT_NEAR(r.pcost, a.norm() - 1.0, 1e-7);
    EXPECT_LT((r.x.head(3) - a / a.norm()).norm(), 1e-5);
}

TEST(Socp, EqualityConstrained)
{
    // min |x| s.t. sum x = 3 (x in R^3) -> x = (1,1,1), |x| = sqrt(3)
    Problem p;
    p.c = RVec::Zero(4);
    p.c(3) = 1.0;
    p.A = RMat::Zero(1, 4);
    p.A.row(0) << 1, 1, 1, 0;
    p.b = RVec::Constant(1, 3.0);
    p.G = -RMat::Identity(4, 4);
    p.G.row(0).swap(p.G.row(3));
    p.G = RMat::Zero(4, 4);
    p.G(0, 3) = -1.0;
    for (int i = 0; i < 3; ++i)
        p.G(1 + i, i) = -1.0;
    p.h = RVec::Zero(4);
    p.dims.q = {4};
    auto r = solve(p);
    ASSERT_EQ(r.status, Status::optimal);
    EXPECT_NEAR(r.pcost, std::sqrt(3.0), 1e-7);
    EXPECT_LT((r.x.head(3) - RVec::Ones(3)).norm(), 1e-6);
}

TEST(Socp, DetectsPrimalInfeasibility)
{
    // x >= 1 and x <= 0
    Problem p;
    p.c = RVec::Ones(1);
    p.G = RMat(2, 1);
    p.G << -1, 1;
    p.h = RVec(2);
    p.h << -1, 0;
    p.dims.l = 2;
    auto r = solve(p);
    EXPECT_EQ(r.status, Status::primal_infeasible);
    // certificate: G'z = 0, h'z < 0, z >= 0
    ASSERT_EQ(r.z.size(), 2);
    EXPECT_NEAR((p.G.transpose() * r.z).norm(), 0.0, 1e-6);
    EXPECT_NEAR(p.h.dot(r.z), -1.0, 1e-6);
    EXPECT_GE(r.z.minCoeff(), -1e-9);
}

TEST(Socp, DetectsDualInfeasibility)
{
    // min -x s.t. x >= 0
    Problem p;
    p.c = -RVec::Ones(1);
    p.G = -RMat::Ones(1, 1);
    p.h = RVec::Zero(1);
    p.dims.l = 1;
    auto r = solve(p);
    EXPECT_EQ(r.status, Status::dual_infeasible);
}

TEST(Socp, RandomInstancesWithPlantedOptimum)
{
    // plant a strictly complementary primal-dual pair; optimum is c'x*
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial)
    {
        const int n = 6, l = 3;
        const std::vector<int> qd = {4, 3, 5};
        ConeDims dims;
        dims.l = l;
        dims.q = qd;
        const int m = dims.rows();
        RMat G(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                G(i, j) = g(rng);
        RMat A(2, n);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < n; ++j)
                A(i, j) = g(rng);
        RVec xs(n), ys(2);
        for (int j = 0; j < n; ++j)
            xs(j) = g(rng);
        ys << g(rng), g(rng);
        RVec s = RVec::Zero(m), z = RVec::Zero(m);
        for (int i = 0; i < l; ++i)
            (i % 2 ? s(i) : z(i)) = 1.0 + std::abs(g(rng));
        int off = l;
        for (int d : qd)
        {
            // boundary points with s o z = 0: s = a (1, u), z = b (1, -u), |u| = 1
            RVec u(d - 1);
            for (int k = 0; k < d - 1; ++k)
                u(k) = g(rng);
            u.normalize();
            const double a = 1.0 + std::abs(g(rng)), b = 1.0 + std::abs(g(rng));
            s(off) = a;
            s.segment(off + 1, d - 1) = a * u;
            z(off) = b;
            z.segment(off + 1, d - 1) = -b * u;
            off += d;
        }
        Problem p;
        p.G = G;
        p.A = A;
        p.b = A * xs;
        p.h = G * xs + s;
        p.c = -A.transpose() * ys - G.transpose() * z;
        p.dims = dims;
        Settings st;
        st.verbose = std::getenv("SOCP_TRACE") != nullptr;
        auto r = solve(p, st);
        ASSERT_EQ(r.status, Status::optimal) << "trial " << trial;
        EXPECT_NEAR(r.pcost, p.c.dot(xs), 1e-6 * std::max(1.0, std::abs(p.c.dot(xs))));
        EXPECT_LT((A * r.x - p.b).norm(), 1e-7);
    }
}

TEST(Socp, NtScalingMapsBothIteratesToLambda)
{
    ConeDims dims;
    dims.l = 2;
    dims.q = {3, 4};
    detail::Cone cone(dims);
    RVec s(9), z(9);
    s << 1.0, 2.0, 3.0, 1.0, -0.5, 2.0, 0.3, 0.4, -1.0;
    z << 0.5, 0.1, 1.5, -0.2, 0.7, 1.1, -0.6, 0.2, 0.1;
    auto W = cone.nt_scaling(s, z);
    RVec a = cone.apply(W, z, false);
    RVec b = cone.apply(W, s, true);
    EXPECT_LT((a - b).norm(), 1e-12);
    // W^{-1} W = I
    RVec v(9);
    v << 0.3, -1.0, 2.0, 0.5, 0.25, -0.75, 1.5, -2.0, 0.1;
    EXPECT_LT((cone.apply(W, cone.apply(W, v, false), true) - v).norm(), 1e-12);
    // jordan division inverts the product
    EXPECT_LT((cone.jordan(a, cone.jordan_div(a, v)) - v).norm(), 1e-10);
}
