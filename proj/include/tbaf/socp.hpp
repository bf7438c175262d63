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

#ifndef TBAF_SOCP_HPP
#define TBAF_SOCP_HPP

#include "core.hpp"

#include <cstdio>
#include <limits>
#include <string>

// Dense primal-dual interior-point solver for
//
//   minimize  c'x   subject to  A x = b,  G x + s = h,  s in K
//
// where K is a product of a nonnegative orthant (first `l` rows of G) and
// second-order cones {(u0, u1) : u0 >= |u1|}. Uses the homogeneous self-dual
// embedding with Nesterov-Todd scaling and a Mehrotra predictor-corrector step.
namespace tbaf::socp
{
    struct ConeDims
    {
        int l = 0;
        std::vector<int> q;

        int rows() const
        {
            int n = l;
            for (int d : q)
                n += d;
            return n;
        }
        int degree() const { return l + static_cast<int>(q.size()); }
    };

    struct Problem
    {
        RVec c;
        RMat A; // p x n, may have zero rows
        RVec b;
        RMat G; // m x n
        RVec h;
        ConeDims dims;
    };

    enum class Status
    {
        optimal,
        near_optimal,
        primal_infeasible,
        dual_infeasible,
        max_iterations,
        numerical_error
    };

    inline std::string to_string(Status s)
    {
        switch (s)
        {
        case Status::optimal:
            return "optimal";
        case Status::near_optimal:
            return "near-optimal";
        case Status::primal_infeasible:
            return "primal-infeasible";
        case Status::dual_infeasible:
            return "dual-infeasible";
        case Status::max_iterations:
            return "max-iterations";
        case Status::numerical_error:
            return "numerical-error";
        }
        return "?";
    }

    struct Settings
    {
        double feastol = 1e-8;
        double abstol = 1e-8;
        double reltol = 1e-8;
        double near_tol = 1e-5; // accepted as near-optimal when stalled or out of iterations
        int max_iter = 100;
        double step_fraction = 0.99;
        bool verbose = false; // per-iteration trace on stderr
    };

    struct Result
    {
        Status status = Status::numerical_error;
        RVec x, y, z, s;
        double pcost = 0.0;
        double dcost = 0.0;
        double pres = 0.0;
        double dres = 0.0;
        double gap = 0.0;
        int iterations = 0;
    };

    namespace detail
    {
        struct SocScaling
        {
            double eta = 1.0;
            RVec w; // normalized NT point, w0^2 - |w1|^2 = 1
        };

        struct Scaling
        {
            RVec d; // orthant: sqrt(s/z)
            std::vector<SocScaling> soc;
        };

        class Cone
        {
        public:
            explicit Cone(const ConeDims &dims) : dims_(dims)
            {
                int off = dims.l;
                for (int d : dims.q)
                {
                    offs_.push_back(off);
                    off += d;
                }
                m_ = off;
            }

            int rows() const { return m_; }
            double degree() const { return static_cast<double>(dims_.degree()); }

            RVec identity() const
            {
                RVec e = RVec::Zero(m_);
                e.head(dims_.l).setOnes();
                for (int off : offs_)
                    e(off) = 1.0;
                return e;
            }

            RVec jordan(const RVec &u, const RVec &v) const
            {
                RVec out(m_);
                out.head(dims_.l) = u.head(dims_.l).cwiseProduct(v.head(dims_.l));
                for (std::size_t i = 0; i < offs_.size(); ++i)
                {
                    const int o = offs_[i], d = dims_.q[i];
                    out(o) = u.segment(o, d).dot(v.segment(o, d));
                    out.segment(o + 1, d - 1) = u(o) * v.segment(o + 1, d - 1) + v(o) * u.segment(o + 1, d - 1);
                }
                return out;
            }

            // x with lam o x = d
            RVec jordan_div(const RVec &lam, const RVec &d) const
            {
                RVec out(m_);
                out.head(dims_.l) = d.head(dims_.l).cwiseQuotient(lam.head(dims_.l));
                for (std::size_t i = 0; i < offs_.size(); ++i)
                {
                    const int o = offs_[i], n = dims_.q[i] - 1;
                    const double l0 = lam(o);
                    const auto l1 = lam.segment(o + 1, n);
                    const double det = l0 * l0 - l1.squaredNorm();
                    const double x0 = (l0 * d(o) - l1.dot(d.segment(o + 1, n))) / det;
                    out(o) = x0;
                    out.segment(o + 1, n) = (d.segment(o + 1, n) - x0 * l1) / l0;
                }
                return out;
            }

            // Smallest alpha making u + alpha e a boundary point (negative when u is interior)
            double max_violation(const RVec &u) const
            {
                double a = -std::numeric_limits<double>::infinity();
                for (int i = 0; i < dims_.l; ++i)
                    a = std::max(a, -u(i));
                for (std::size_t i = 0; i < offs_.size(); ++i)
                {
                    const int o = offs_[i], n = dims_.q[i] - 1;
                    a = std::max(a, u.segment(o + 1, n).norm() - u(o));
                }
                return a;
            }

            // Largest alpha with u + alpha du in the cone (u interior); +inf if unbounded
            double max_step(const RVec &u, const RVec &du) const
            {
                double amax = std::numeric_limits<double>::infinity();
                for (int i = 0; i < dims_.l; ++i)
                    if (du(i) < 0.0)
                        amax = std::min(amax, -u(i) / du(i));
                for (std::size_t i = 0; i < offs_.size(); ++i)
                {
                    const int o = offs_[i], n = dims_.q[i] - 1;
                    amax = std::min(amax, soc_step(u(o), u.segment(o + 1, n), du(o), du.segment(o + 1, n)));
                }
                return amax;
            }

            Scaling nt_scaling(const RVec &s, const RVec &z) const
            {
                Scaling w;
                w.d = (s.head(dims_.l).array() / z.head(dims_.l).array()).sqrt();
                for (std::size_t i = 0; i < offs_.size(); ++i)
                {
                    const int o = offs_[i], n = dims_.q[i] - 1;
                    const double sres = s(o) * s(o) - s.segment(o + 1, n).squaredNorm();
                    const double zres = z(o) * z(o) - z.segment(o + 1, n).squaredNorm();
                    require(sres > 0.0 && zres > 0.0, "iterate left the cone interior");
                    const double sn = std::sqrt(sres), zn = std::sqrt(zres);
                    RVec sb = s.segment(o, n + 1) / sn;
                    RVec zb = z.segment(o, n + 1) / zn;
                    const double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
                    SocScaling sc;
                    sc.eta = std::sqrt(sn / zn);
                    sc.w.resize(n + 1);
                    sc.w(0) = (sb(0) + zb(0)) / (2.0 * gamma);
                    sc.w.tail(n) = (sb.tail(n) - zb.tail(n)) / (2.0 * gamma);
                    w.soc.push_back(std::move(sc));
                }
                return w;
            }

            // W v (inverse = false) or W^{-1} v (inverse = true)
            RVec apply(const Scaling &w, const RVec &v, bool inverse) const
            {
                RVec out(m_);
                if (inverse)
                    out.head(dims_.l) = v.head(dims_.l).cwiseQuotient(w.d);
                else
                    out.head(dims_.l) = v.head(dims_.l).cwiseProduct(w.d);
                for (std::size_t i = 0; i < offs_.size(); ++i)
                {
                    const int o = offs_[i], n = dims_.q[i] - 1;
                    const auto &sc = w.soc[i];
                    const double w0 = sc.w(0);
                    const auto w1 = sc.w.tail(n);
                    const double v0 = v(o);
                    const auto v1 = v.segment(o + 1, n);
                    const double wv = w1.dot(v1);
                    if (!inverse)
                    {
                        out(o) = sc.eta * (w0 * v0 + wv);
                        out.segment(o + 1, n) = sc.eta * (v1 + (v0 + wv / (1.0 + w0)) * w1);
                    }
                    else
                    {
                        out(o) = (w0 * v0 - wv) / sc.eta;
                        out.segment(o + 1, n) = (v1 + (-v0 + wv / (1.0 + w0)) * w1) / sc.eta;
                    }
                }
                return out;
            }

            // W^{-1} applied to every column of M
            RMat apply_inv_cols(const Scaling &w, const RMat &M) const
            {
                RMat out(M.rows(), M.cols());
                for (Eigen::Index j = 0; j < M.cols(); ++j)
                    out.col(j) = apply(w, M.col(j), true);
                return out;
            }

        private:
            static double soc_step(double u0, const Eigen::Ref<const RVec> &u1, double d0, const Eigen::Ref<const RVec> &d1)
            {
                // q(a) = (u0 + a d0)^2 - |u1 + a d1|^2 = A a^2 + 2 B a + C, C > 0
                const double A = d0 * d0 - d1.squaredNorm();
                const double B = u0 * d0 - u1.dot(d1);
                const double C = u0 * u0 - u1.squaredNorm();
                const double inf = std::numeric_limits<double>::infinity();
                double best = inf;
                auto consider = [&](double r)
                {
                    if (r > 0.0 && r < best)
                        best = r;
                };
                const double scale = std::max({std::abs(A), std::abs(B), 1e-300});
                if (std::abs(A) <= 1e-14 * scale)
                {
                    if (B < 0.0)
                        consider(-C / (2.0 * B));
                }
                else
                {
                    const double disc = B * B - A * C;
                    if (disc >= 0.0)
                    {
                        const double sq = std::sqrt(disc);
                        const double qq = -(B + (B >= 0.0 ? sq : -sq));
                        if (qq != 0.0)
                        {
                            consider(qq / A);
                            consider(C / qq);
                        }
                    }
                }
                // the scalar part must also stay nonnegative
                if (d0 < 0.0)
                    best = std::min(best, -u0 / d0);
                return best;
            }

            ConeDims dims_;
            std::vector<int> offs_;
            int m_ = 0;
        };

        // Solves [0 A' G'; A 0 0; G 0 -W^2] [x; y; z] = [r1; r2; r3] via the
        // reduced system [G'W^-2G  A'; A  0] [x; y] = [r1 + G'W^-2 r3; r2].
        class KktSolver
        {
        public:
            KktSolver(const Problem &p, const Cone &cone, const Scaling &w)
                : p_(p), cone_(cone), w_(w)
            {
                const Eigen::Index n = p.c.size(), q = p.A.rows();
                WiG_ = cone.apply_inv_cols(w, p.G);
                M_ = RMat::Zero(n + q, n + q);
                M_.topLeftCorner(n, n) = WiG_.transpose() * WiG_;
                if (q > 0)
                {
                    M_.topRightCorner(n, q) = p.A.transpose();
                    M_.bottomLeftCorner(q, n) = p.A;
                }
                RMat reg = M_;
                const double scale = std::max(1.0, M_.cwiseAbs().maxCoeff());
                for (Eigen::Index i = 0; i < n; ++i)
                    reg(i, i) += 1e-13 * scale;
                for (Eigen::Index i = n; i < n + q; ++i)
                    reg(i, i) -= 1e-13 * scale;
                lu_.compute(reg);
            }

            void solve(const RVec &r1, const RVec &r2, const RVec &r3, RVec &x, RVec &y, RVec &z) const
            {
                RVec v;
                solve(r1, r2, r3, x, y, z, v);
            }

            // Also returns v = W z
            void solve(const RVec &r1, const RVec &r2, const RVec &r3, RVec &x, RVec &y, RVec &z, RVec &v) const
            {
                // Work in the scaled unknown v = W z:
                //   A'y + (W^-1 G)'v = r1,  A x = r2,  W^-1 G x - v = W^-1 r3
                const RVec Wir3 = cone_.apply(w_, r3, true);
                reduced(r1, r2, Wir3, x, y, v);
                for (int it = 0; it < 3; ++it)
                {
                    const RVec e1 = r1 - p_.A.transpose() * y - WiG_.transpose() * v;
                    const RVec e2 = r2 - p_.A * x;
                    const RVec e3 = Wir3 - (WiG_ * x - v);
                    const double err = std::max({e1.lpNorm<Eigen::Infinity>(), e2.size() ? e2.lpNorm<Eigen::Infinity>() : 0.0, e3.lpNorm<Eigen::Infinity>()});
                    if (err <= 1e-14 * std::max({1.0, r1.lpNorm<Eigen::Infinity>(), Wir3.lpNorm<Eigen::Infinity>()}))
                        break;
                    RVec dx, dy, dv;
                    reduced(e1, e2, e3, dx, dy, dv);
                    x += dx;
                    y += dy;
                    v += dv;
                }
                z = cone_.apply(w_, v, true);
            }

        private:
            void reduced(const RVec &r1, const RVec &r2, const RVec &r3s, RVec &x, RVec &y, RVec &v) const
            {
                const Eigen::Index n = p_.c.size(), q = p_.A.rows();
                RVec rhs(n + q);
                rhs.head(n) = r1 + WiG_.transpose() * r3s;
                rhs.tail(q) = r2;
                const RVec sol = lu_.solve(rhs);
                x = sol.head(n);
                y = sol.tail(q);
                v = WiG_ * x - r3s;
            }

            const Problem &p_;
            const Cone &cone_;
            const Scaling &w_;
            RMat WiG_;
            RMat M_;
            Eigen::PartialPivLU<RMat> lu_;
        };

        inline void check_problem(const Problem &p)
        {
            const Eigen::Index n = p.c.size();
            require(n >= 1, "SOCP needs at least one variable");
            require(p.G.cols() == n && p.G.rows() == p.dims.rows() && p.h.size() == p.G.rows(), "SOCP cone block dimensions are inconsistent");
            require(p.A.rows() == p.b.size() && (p.A.rows() == 0 || p.A.cols() == n), "SOCP equality block dimensions are inconsistent");
            require(p.dims.l >= 0, "negative orthant dimension");
            for (int d : p.dims.q)
                require(d >= 1, "second-order cone dimension must be >= 1");
            require(p.G.rows() >= 1, "SOCP needs at least one cone row");
        }
    } // namespace detail

    namespace detail
    {
        inline Result solve_equilibrated(Problem p, const Settings &opt)
        {
            if (p.A.rows() == 0)
                p.A.resize(0, p.c.size());
            const Eigen::Index n = p.c.size();
            const Eigen::Index q = p.A.rows();
            const detail::Cone cone(p.dims);
            const RVec e = cone.identity();
            const double degree = cone.degree();

            const double nb = std::max(1.0, p.b.size() ? p.b.norm() : 0.0);
            const double nh = std::max(1.0, p.h.norm());
            const double nc = std::max(1.0, p.c.norm());

            Result res;
            RVec x, y, z, s;
            {
                // W = I start
                detail::Scaling w0;
                w0.d = RVec::Ones(p.dims.l);
                for (int d : p.dims.q)
                {
                    detail::SocScaling sc;
                    sc.w = RVec::Zero(d);
                    sc.w(0) = 1.0;
                    w0.soc.push_back(sc);
                }
                detail::KktSolver kkt(p, cone, w0);
                RVec xp, yp, zp;
                kkt.solve(RVec::Zero(n), p.b, p.h, xp, yp, zp);
                s = -zp;
                RVec xd, yd, zd;
                kkt.solve(-p.c, RVec::Zero(q), RVec::Zero(cone.rows()), xd, yd, zd);
                x = xp;
                y = yd;
                z = zd;
                const double as = cone.max_violation(s);
                if (as >= -1e-8 * std::max(1.0, s.norm()))
                    s += (1.0 + as) * e;
                const double az = cone.max_violation(z);
                if (az >= -1e-8 * std::max(1.0, z.norm()))
                    z += (1.0 + az) * e;
            }
            double tau = 1.0, kappa = 1.0;

            for (int iter = 0; iter <= opt.max_iter; ++iter)
            {
                res.iterations = iter;
                // residuals of the embedding
                const RVec rx = p.A.transpose() * y + p.G.transpose() * z + p.c * tau;
                const RVec ry = p.A * x - p.b * tau;
                const RVec rz = s + p.G * x - p.h * tau;
                const double cx = p.c.dot(x), by = q ? p.b.dot(y) : 0.0, hz = p.h.dot(z);
                const double rt = kappa + cx + by + hz;

                const double mu = (s.dot(z) + tau * kappa) / (degree + 1.0);
                const double pcost = cx / tau;
                const double dcost = -(by + hz) / tau;
                const double pres = std::max(q ? (p.A * x / tau - p.b).norm() / nb : 0.0, (p.G * x / tau + s / tau - p.h).norm() / nh);
                const double dres = (p.A.transpose() * y / tau + p.G.transpose() * z / tau + p.c).norm() / nc;
                const double gap = s.dot(z) / (tau * tau);
                double relgap = std::numeric_limits<double>::infinity();
                if (pcost < 0.0)
                    relgap = gap / -pcost;
                else if (dcost > 0.0)
                    relgap = gap / dcost;

                res.x = x / tau;
                res.y = y / tau;
                res.z = z / tau;
                res.s = s / tau;
                res.pcost = pcost;
                res.dcost = dcost;
                res.pres = pres;
                res.dres = dres;
                res.gap = gap;
                if (opt.verbose)
                    std::fprintf(stderr, "%3d  pcost % .6e  dcost % .6e  pres %.2e  dres %.2e  gap %.2e  tau %.2e  kappa %.2e\n",
                                 iter, pcost, dcost, pres, dres, gap, tau, kappa);

                if (pres <= opt.feastol && dres <= opt.feastol && (gap <= opt.abstol || relgap <= opt.reltol))
                {
                    res.status = Status::optimal;
                    return res;
                }
                // infeasibility certificates
                if (by + hz < 0.0)
                {
                    const double pinf = (p.A.transpose() * y + p.G.transpose() * z).norm() / nc / -(by + hz);
                    if (pinf <= opt.feastol)
                    {
                        res.status = Status::primal_infeasible;
                        res.y = y / -(by + hz);
                        res.z = z / -(by + hz);
                        res.x = RVec();
                        res.s = RVec();
                        return res;
                    }
                }
                if (cx < 0.0)
                {
                    const double dinf = std::max(q ? (p.A * x).norm() / nb : 0.0, (p.G * x + s).norm() / nh) / -cx;
                    if (dinf <= opt.feastol)
                    {
                        res.status = Status::dual_infeasible;
                        res.x = x / -cx;
                        res.s = s / -cx;
                        res.y = RVec();
                        res.z = RVec();
                        return res;
                    }
                }
                if (iter == opt.max_iter)
                    break;

                detail::Scaling W;
                try
                {
                    W = cone.nt_scaling(s, z);
                }
                catch (const ParameterError &)
                {
                    break;
                }
                const RVec lam = cone.apply(W, z, false);
                std::optional<detail::KktSolver> kkt;
                kkt.emplace(p, cone, W);

                RVec x1, y1, z1, v1;
                kkt->solve(-p.c, p.b, p.h, x1, y1, z1, v1);
                const double denom = p.c.dot(x1) + (q ? p.b.dot(y1) : 0.0) + p.h.dot(z1) - kappa / tau;
                if (!std::isfinite(denom) || denom == 0.0)
                    break;

                struct Dir
                {
                    RVec x, y, z, s;
                    double tau = 0.0, kappa = 0.0;
                };
                auto direction = [&](double lin, const RVec &ds, double dk)
                {
                    Dir d;
                    RVec x2, y2, z2, v2;
                    const RVec lds = cone.jordan_div(lam, ds);
                    const RVec Wlds = cone.apply(W, lds, false);
                    kkt->solve(-lin * rx, -lin * ry, -lin * rz + Wlds, x2, y2, z2, v2);
                    const double num = -lin * rt + dk / tau - (p.c.dot(x2) + (q ? p.b.dot(y2) : 0.0) + p.h.dot(z2));
                    d.tau = num / denom;
                    d.x = x2 + d.tau * x1;
                    d.y = y2 + d.tau * y1;
                    d.z = z2 + d.tau * z1;
                    // from the linearized cone equality; keeps G x + s = h tau exact along the path
                    d.s = -lin * rz - p.G * d.x + p.h * d.tau;
                    d.kappa = (-dk - kappa * d.tau) / tau;
                    return d;
                };
                auto step_to_boundary = [&](const Dir &d)
                {
                    double a = std::min(cone.max_step(s, d.s), cone.max_step(z, d.z));
                    if (d.tau < 0.0)
                        a = std::min(a, -tau / d.tau);
                    if (d.kappa < 0.0)
                        a = std::min(a, -kappa / d.kappa);
                    return a;
                };

                // predictor
                const Dir aff = direction(1.0, cone.jordan(lam, lam), tau * kappa);
                const double a_aff = std::min(1.0, step_to_boundary(aff));
                const double sigma = std::pow(1.0 - a_aff, 3.0);

                // corrector
                const RVec ds_c = cone.jordan(lam, lam) + cone.jordan(cone.apply(W, aff.s, true), cone.apply(W, aff.z, false)) - sigma * mu * e;
                const double dk_c = tau * kappa + aff.tau * aff.kappa - sigma * mu;
                const Dir d = direction(1.0 - sigma, ds_c, dk_c);
                const double alpha = std::min(1.0, opt.step_fraction * step_to_boundary(d));
                if (!(alpha > 0.0) || !d.x.allFinite())
                    break;

                x += alpha * d.x;
                y += alpha * d.y;
                z += alpha * d.z;
                s += alpha * d.s;
                tau += alpha * d.tau;
                kappa += alpha * d.kappa;
            }

            // stalled or out of iterations
            const bool close = res.pres <= opt.near_tol && res.dres <= opt.near_tol &&
                               (res.gap <= opt.near_tol || res.gap <= opt.near_tol * std::max(std::abs(res.pcost), std::abs(res.dcost)));
            res.status = close ? Status::near_optimal : (res.iterations >= opt.max_iter ? Status::max_iterations : Status::numerical_error);
            return res;
        }
    } // namespace detail

    // Each cone block of (G, h) and each row of (A, b) is scaled by the inverse of its largest
    // magnitude; y, z and s are mapped back to the original problem.
    inline Result solve(Problem p, const Settings &opt = {})
    {
        detail::check_problem(p);
        auto block_scale = [](const RMat &M, const RVec &v, Eigen::Index r0, Eigen::Index nr)
        {
            double m = M.middleRows(r0, nr).cwiseAbs().maxCoeff();
            if (v.size())
                m = std::max(m, v.segment(r0, nr).cwiseAbs().maxCoeff());
            return m > 0.0 ? 1.0 / m : 1.0;
        };
        RVec dg(p.G.rows()), da(p.A.rows());
        Eigen::Index off = 0;
        for (int i = 0; i < p.dims.l; ++i, ++off)
            dg(off) = block_scale(p.G, p.h, off, 1);
        for (int d : p.dims.q)
        {
            dg.segment(off, d).setConstant(block_scale(p.G, p.h, off, d));
            off += d;
        }
        for (Eigen::Index i = 0; i < p.A.rows(); ++i)
            da(i) = block_scale(p.A, p.b, i, 1);
        p.G = dg.asDiagonal() * p.G;
        p.h = dg.cwiseProduct(p.h);
        if (p.A.rows())
        {
            p.A = da.asDiagonal() * p.A;
            p.b = da.cwiseProduct(p.b);
        }
        Result r = detail::solve_equilibrated(std::move(p), opt);
        if (r.z.size())
            r.z = r.z.cwiseProduct(dg);
        if (r.s.size())
            r.s = r.s.cwiseQuotient(dg);
        if (r.y.size())
            r.y = r.y.cwiseProduct(da);
        return r;
    }
} // namespace tbaf::socp

#endif
