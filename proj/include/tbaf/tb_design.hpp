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

#ifndef TBAF_TB_DESIGN_HPP
#define TBAF_TB_DESIGN_HPP

#include "socp.hpp"
#include "tb_core.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <utility>

namespace tbaf
{
    // exp(j mu_k(theta)), mu_k(theta) = -(k-1) pi sin(theta), k = 1..K
    inline CVec desired_vector(double theta, Eigen::Index k)
    {
        require(k >= 1, "desired vector needs K >= 1");
        CVec d(k);
        for (Eigen::Index i = 0; i < k; ++i)
            d(i) = cis(-static_cast<double>(i) * kPi * std::sin(theta));
        return d;
    }

    struct AfControl
    {
        RVec delays;   // P delay offsets (s)
        RVec dopplers; // Q Doppler offsets (Hz)
        RVec angles;   // controlled angles (rad)
        double delta = 0.3;
        double theta0 = 0.0;
        double fd0 = 0.0;
    };

    struct DesignSpec
    {
        Eigen::Index beams = 4;
        double sector_lo = deg2rad(-15.0);
        double sector_hi = deg2rad(15.0);
        Eigen::Index in_points = 61;
        double transition = deg2rad(10.0);
        std::vector<std::pair<double, double>> out_intervals; // empty: [-90 deg, lo - tr] and [hi + tr, 90 deg]
        Eigen::Index out_points = 80;
        double gamma = 0.38;
        std::function<CVec(double, Eigen::Index)> desired; // empty: desired_vector
        std::optional<AfControl> af;
        bool bisect_delta = false;
    };

    enum class DesignStatus
    {
        optimal,
        near_optimal,
        infeasible,
        failed
    };

    inline std::string to_string(DesignStatus s)
    {
        switch (s)
        {
        case DesignStatus::optimal:
            return "optimal";
        case DesignStatus::near_optimal:
            return "near-optimal";
        case DesignStatus::infeasible:
            return "infeasible";
        case DesignStatus::failed:
            return "failed";
        }
        return "?";
    }

    struct ConstraintSlack
    {
        std::string group; // in-sector, out-of-sector, af-sidelobe, gain
        Eigen::Index index = 0;
        double value = 0.0;
        double bound = 0.0;
        double slack = 0.0; // bound - value (gain: -|residual|)
    };

    struct DesignResult
    {
        TBMatrix tb;
        double objective = 0.0;
        DesignStatus status = DesignStatus::failed;
        std::vector<ConstraintSlack> slacks;
        double min_slack = 0.0;
        std::string certificate;            // infeasibility summary
        std::vector<std::string> binding;   // constraint groups carrying the certificate
        std::optional<double> smallest_delta; // bisection diagnostic
        socp::Status solver_status = socp::Status::numerical_error;
        int iterations = 0;
        std::string mode; // spatial | af
        ArrayScenario scenario; // phase centers used by the final solve
        int phase_center_passes = 0;
        double phase_center_shift = 0.0; // m, between the last two passes

        bool ok() const { return status == DesignStatus::optimal || status == DesignStatus::near_optimal; }
    };

    // [Re vec C; Im vec C], column-major
    inline RVec realify(const CMat &C)
    {
        const Eigen::Index n = C.size();
        RVec x(2 * n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            x(i) = C.data()[i].real();
            x(n + i) = C.data()[i].imag();
        }
        return x;
    }

    inline CMat complexify(const RVec &x, Eigen::Index m, Eigen::Index k)
    {
        require(x.size() >= 2 * m * k, "real vector too short for an M x K matrix");
        CMat C(m, k);
        const Eigen::Index n = m * k;
        for (Eigen::Index i = 0; i < n; ++i)
            C.data()[i] = cplx(x(i), x(n + i));
        return C;
    }

    inline std::vector<double> sector_grid(const DesignSpec &s)
    {
        const RVec g = linspace(s.sector_lo, s.sector_hi, s.in_points);
        return {g.data(), g.data() + g.size()};
    }

    inline std::vector<std::pair<double, double>> out_intervals(const DesignSpec &s)
    {
        if (!s.out_intervals.empty())
            return s.out_intervals;
        std::vector<std::pair<double, double>> v;
        const double lo = s.sector_lo - s.transition, hi = s.sector_hi + s.transition;
        if (lo > -kPi / 2)
            v.emplace_back(-kPi / 2, lo);
        if (hi < kPi / 2)
            v.emplace_back(hi, kPi / 2);
        return v;
    }

    // J points split across intervals in proportion to their length, endpoints included
    inline std::vector<double> out_grid(const DesignSpec &s)
    {
        const auto iv = out_intervals(s);
        std::vector<double> out;
        if (iv.empty())
            return out;
        double total = 0.0;
        for (auto [a, b] : iv)
            total += b - a;
        Eigen::Index left = s.out_points;
        for (std::size_t i = 0; i < iv.size(); ++i)
        {
            const auto [a, b] = iv[i];
            Eigen::Index n = i + 1 == iv.size() ? left : static_cast<Eigen::Index>(std::lround(static_cast<double>(s.out_points) * (b - a) / total));
            n = std::max<Eigen::Index>(std::min(n, left), 1);
            left -= n;
            const RVec g = linspace(a, b, n);
            out.insert(out.end(), g.data(), g.data() + g.size());
        }
        return out;
    }

    inline void validate_spec(const DesignSpec &s)
    {
        require(s.beams >= 1, "design needs K >= 1 beams");
        require(s.sector_lo < s.sector_hi, "sector bounds must satisfy lo < hi");
        require(s.sector_lo >= -kPi / 2 && s.sector_hi <= kPi / 2, "sector must lie within [-90, 90] degrees");
        require(s.in_points >= 1 && s.out_points >= 1, "angle grids must be nonempty");
        require(s.transition >= 0.0, "transition width must be nonnegative");
        require(s.gamma > 0.0, "gamma must be positive");
        for (auto [a, b] : out_intervals(s))
        {
            require(a < b, "out-of-sector interval bounds must increase");
            require(b < s.sector_lo || a > s.sector_hi, "out-of-sector intervals must not overlap the sector");
        }
        require(!out_intervals(s).empty(), "out-of-sector region is empty");
        if (s.af)
        {
            require(s.af->delta > 0.0, "delta must be positive");
            require(s.af->delays.size() >= 1 && s.af->dopplers.size() >= 1 && s.af->angles.size() >= 1,
                    "AF control grids must be nonempty");
        }
    }

    namespace detail
    {
        // z(C) = sum w1 .* C + sum w2 .* conj(C) as two real rows over [Re vec C; Im vec C]
        struct RealRows
        {
            RVec re, im;
        };

        inline RealRows real_rows(const CMat &w1, const CMat &w2)
        {
            const Eigen::Index n = w1.size();
            RealRows r{RVec(2 * n), RVec(2 * n)};
            for (Eigen::Index i = 0; i < n; ++i)
            {
                const cplx a = w1.data()[i], b = w2.data()[i];
                r.re(i) = a.real() + b.real();
                r.re(n + i) = b.imag() - a.imag();
                r.im(i) = a.imag() + b.imag();
                r.im(n + i) = a.real() - b.real();
            }
            return r;
        }

        // k-th entry of (C^H a) .* e
        inline RealRows beam_rows(const CVec &a, const CVec &e, Eigen::Index k, Eigen::Index K)
        {
            const Eigen::Index M = a.size();
            CMat w2 = CMat::Zero(M, K);
            w2.col(k) = a * e(k);
            return real_rows(CMat::Zero(M, K), w2);
        }

        // a^H C b
        inline RealRows bilinear_rows(const CVec &a, const CVec &b)
        {
            return real_rows(a.conjugate() * b.transpose(), CMat::Zero(a.size(), b.size()));
        }

        struct Assembly
        {
            socp::Problem p;
            std::vector<std::pair<std::string, Eigen::Index>> blocks; // group, count, in cone order
        };

        struct DesignVectors
        {
            std::vector<CVec> in_a, in_e, in_d, out_a, out_e;
            std::vector<CVec> af_left, af_right; // |left^H C right| <= delta
            CVec gain_left, gain_right;
        };

        inline DesignVectors design_vectors(const DesignSpec &s, const ArrayScenario &sc, const CrossAFStack *stack)
        {
            const Eigen::Index K = s.beams;
            DesignVectors v;
            const bool with_te = s.af.has_value();
            auto desired = s.desired ? s.desired : desired_vector;
            for (double th : sector_grid(s))
            {
                v.in_a.push_back(steering_t(sc, at_angle(th)));
                v.in_e.push_back(with_te ? steering_te(sc, at_angle(th)) : CVec::Ones(K));
                CVec d = desired(th, K);
                require(d.size() == K, "desired vector length must equal K");
                v.in_d.push_back(std::move(d));
            }
            for (double th : out_grid(s))
            {
                v.out_a.push_back(steering_t(sc, at_angle(th)));
                v.out_e.push_back(with_te ? steering_te(sc, at_angle(th)) : CVec::Ones(K));
            }
            if (with_te)
            {
                const AfControl &c = *s.af;
                require(stack != nullptr, "AF-constrained design needs a cross-AF stack");
                require(stack->k == K, "cross-AF stack size does not match K");
                const TargetParams t0 = at_angle(c.theta0, c.fd0);
                v.gain_left = steering_t(sc, t0);
                v.gain_right = steering_te(sc, t0);
                for (Eigen::Index p = 0; p < c.delays.size(); ++p)
                    for (Eigen::Index q = 0; q < c.dopplers.size(); ++q)
                    {
                        const CMat X = eval_at(*stack, c.delays(p), c.dopplers(q));
                        for (Eigen::Index i = 0; i < c.angles.size(); ++i)
                        {
                            v.af_left.push_back(v.gain_left);
                            v.af_right.push_back(X * steering_te(sc, at_angle(c.angles(i), c.fd0 - c.dopplers(q))));
                        }
                    }
            }
            return v;
        }

        inline Assembly assemble(const DesignSpec &s, const DesignVectors &v, Eigen::Index M, std::optional<double> delta)
        {
            const Eigen::Index K = s.beams;
            const Eigen::Index nc = 2 * M * K, n = nc + 1;
            const auto nin = static_cast<Eigen::Index>(v.in_a.size()), nout = static_cast<Eigen::Index>(v.out_a.size()),
                       naf = static_cast<Eigen::Index>(v.af_left.size());
            Assembly out;
            socp::Problem &p = out.p;
            const Eigen::Index rows = nin * (2 * K + 1) + nout * (2 * K + 1) + naf * 3;
            p.c = RVec::Zero(n);
            p.c(nc) = 1.0;
            p.G = RMat::Zero(rows, n);
            p.h = RVec::Zero(rows);
            Eigen::Index r = 0;
            // [t; d - f(x)]
            for (Eigen::Index i = 0; i < nin; ++i)
            {
                p.G(r, nc) = -1.0;
                for (Eigen::Index k = 0; k < K; ++k)
                {
                    const RealRows rr = beam_rows(v.in_a[static_cast<std::size_t>(i)], v.in_e[static_cast<std::size_t>(i)], k, K);
                    const cplx d = v.in_d[static_cast<std::size_t>(i)](k);
                    p.G.block(r + 1 + 2 * k, 0, 1, nc) = rr.re.transpose();
                    p.G.block(r + 2 + 2 * k, 0, 1, nc) = rr.im.transpose();
                    p.h(r + 1 + 2 * k) = d.real();
                    p.h(r + 2 + 2 * k) = d.imag();
                }
                p.dims.q.push_back(static_cast<int>(2 * K + 1));
                r += 2 * K + 1;
            }
            out.blocks.emplace_back("in-sector", nin);
            // [gamma; f(x)]
            for (Eigen::Index j = 0; j < nout; ++j)
            {
                p.h(r) = s.gamma;
                for (Eigen::Index k = 0; k < K; ++k)
                {
                    const RealRows rr = beam_rows(v.out_a[static_cast<std::size_t>(j)], v.out_e[static_cast<std::size_t>(j)], k, K);
                    p.G.block(r + 1 + 2 * k, 0, 1, nc) = -rr.re.transpose();
                    p.G.block(r + 2 + 2 * k, 0, 1, nc) = -rr.im.transpose();
                }
                p.dims.q.push_back(static_cast<int>(2 * K + 1));
                r += 2 * K + 1;
            }
            out.blocks.emplace_back("out-of-sector", nout);
            if (naf > 0)
            {
                for (Eigen::Index a = 0; a < naf; ++a)
                {
                    const RealRows rr = bilinear_rows(v.af_left[static_cast<std::size_t>(a)], v.af_right[static_cast<std::size_t>(a)]);
                    p.h(r) = *delta;
                    p.G.block(r + 1, 0, 1, nc) = -rr.re.transpose();
                    p.G.block(r + 2, 0, 1, nc) = -rr.im.transpose();
                    p.dims.q.push_back(3);
                    r += 3;
                }
                out.blocks.emplace_back("af-sidelobe", naf);
            }
            if (v.gain_left.size() > 0)
            {
                const RealRows g = bilinear_rows(v.gain_left, v.gain_right);
                p.A = RMat::Zero(2, n);
                p.A.block(0, 0, 1, nc) = g.re.transpose();
                p.A.block(1, 0, 1, nc) = g.im.transpose();
                p.b = RVec(2);
                p.b << static_cast<double>(K), 0.0;
            }
            return out;
        }

        inline std::vector<ConstraintSlack> evaluate(const DesignSpec &s, const DesignVectors &v, const CMat &C, double t,
                                                     std::optional<double> delta)
        {
            std::vector<ConstraintSlack> out;
            for (std::size_t i = 0; i < v.in_a.size(); ++i)
            {
                const CVec f = (C.adjoint() * v.in_a[i]).cwiseProduct(v.in_e[i]);
                const double val = (f - v.in_d[i]).norm();
                out.push_back({"in-sector", static_cast<Eigen::Index>(i), val, t, t - val});
            }
            for (std::size_t j = 0; j < v.out_a.size(); ++j)
            {
                const double val = (C.adjoint() * v.out_a[j]).cwiseProduct(v.out_e[j]).norm();
                out.push_back({"out-of-sector", static_cast<Eigen::Index>(j), val, s.gamma, s.gamma - val});
            }
            for (std::size_t a = 0; a < v.af_left.size(); ++a)
            {
                const double val = std::abs(v.af_left[a].dot(C * v.af_right[a]));
                out.push_back({"af-sidelobe", static_cast<Eigen::Index>(a), val, *delta, *delta - val});
            }
            if (v.gain_left.size() > 0)
            {
                const cplx g = v.gain_left.dot(C * v.gain_right);
                const double res = std::abs(g - static_cast<double>(s.beams));
                out.push_back({"gain", 0, std::abs(g), static_cast<double>(s.beams), -res});
            }
            return out;
        }

        // share of the normalized certificate carried by each constraint group
        inline std::pair<std::string, std::vector<std::string>> certificate_summary(const Assembly &as, const socp::Result &r)
        {
            std::map<std::string, double> w;
            double total = 0.0;
            Eigen::Index off = 0, cone = 0;
            for (const auto &[name, count] : as.blocks)
            {
                double acc = 0.0;
                for (Eigen::Index b = 0; b < count; ++b)
                {
                    const int d = as.p.dims.q[static_cast<std::size_t>(cone++)];
                    acc += r.z.segment(off, d).norm();
                    off += d;
                }
                w[name] = acc;
                total += acc;
            }
            if (r.y.size() > 0)
            {
                w["gain"] = r.y.norm();
                total += r.y.norm();
            }
            std::ostringstream os;
            os << "primal infeasible; certificate weight:";
            std::vector<std::string> binding;
            for (const auto &[name, val] : w)
            {
                const double share = total > 0.0 ? val / total : 0.0;
                os << ' ' << name << '=' << share;
                if (share > 1e-3)
                    binding.push_back(name);
            }
            return {os.str(), binding};
        }

        inline DesignResult run(const DesignSpec &s, const ArrayScenario &sc, const CrossAFStack *stack, const socp::Settings &opt)
        {
            validate_spec(s);
            validate_scenario(sc);
            const Eigen::Index M = sc.num_tx(), K = s.beams;
            if (s.af)
                require(sc.num_beams() == K, "phase-center count " + std::to_string(sc.num_beams()) + " does not match K = " + std::to_string(K));
            const DesignVectors v = design_vectors(s, sc, stack);
            std::optional<double> delta;
            if (s.af)
                delta = s.af->delta;
            const Assembly as = assemble(s, v, M, delta);
            const socp::Result r = socp::solve(as.p, opt);

            DesignResult out;
            out.mode = s.af ? "af" : "spatial";
            out.scenario = sc;
            out.solver_status = r.status;
            out.iterations = r.iterations;
            switch (r.status)
            {
            case socp::Status::optimal:
                out.status = DesignStatus::optimal;
                break;
            case socp::Status::near_optimal:
                out.status = DesignStatus::near_optimal;
                break;
            case socp::Status::primal_infeasible:
                out.status = DesignStatus::infeasible;
                break;
            default:
                out.status = DesignStatus::failed;
                break;
            }
            if (out.ok())
            {
                out.tb = {complexify(r.x, M, K), "designed"};
                out.objective = r.x(2 * M * K);
                out.slacks = evaluate(s, v, out.tb.C, out.objective, delta);
                out.min_slack = std::numeric_limits<double>::infinity();
                for (const auto &c : out.slacks)
                    out.min_slack = std::min(out.min_slack, c.slack);
            }
            else if (out.status == DesignStatus::infeasible)
                std::tie(out.certificate, out.binding) = certificate_summary(as, r);
            else
                out.certificate = "solver stopped: " + socp::to_string(r.status);
            return out;
        }
    } // namespace detail

    // min t s.t. |C^H a(theta_i) - d(theta_i)| <= t, |C^H a(theta_j)| <= gamma
    inline DesignResult design_spatial(const DesignSpec &spec, const ArrayScenario &sc, const socp::Settings &opt = {})
    {
        require(!spec.af, "spatial design takes no AF constraints");
        return detail::run(spec, sc, nullptr, opt);
    }

    // Smallest delta (within `tol`) for which the AF-constrained program is feasible, by bisection on [0, hi].
    inline std::optional<double> smallest_feasible_delta(DesignSpec spec, const ArrayScenario &sc, const CrossAFStack &stack,
                                                         double hi, double tol = 1e-3, const socp::Settings &opt = {})
    {
        require(spec.af.has_value(), "delta bisection needs an AF constraint block");
        spec.bisect_delta = false;
        auto feasible = [&](double d)
        {
            spec.af->delta = d;
            return detail::run(spec, sc, &stack, opt).ok();
        };
        if (!feasible(hi))
            return std::nullopt;
        double lo = 0.0;
        while (hi - lo > tol)
        {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? hi : lo) = mid;
        }
        return hi;
    }

    // Adds |a_T^H(theta0, fd0) C Xbar(dtau_p, df_q) a_TE(theta_i, fd0 - df_q)| <= delta and the
    // gain equality a_T^H C a_TE = K at (theta0, fd0); in-sector terms use (C^H a_T) .* a_TE.
    inline DesignResult design_af_constrained(const DesignSpec &spec, const ArrayScenario &sc, const CrossAFStack &stack,
                                              const socp::Settings &opt = {})
    {
        require(spec.af.has_value(), "AF-constrained design needs an AF constraint block");
        DesignResult r = detail::run(spec, sc, &stack, opt);
        if (r.status == DesignStatus::infeasible && spec.bisect_delta)
            r.smallest_delta = smallest_feasible_delta(spec, sc, stack, std::max(1.0, 8.0 * spec.af->delta), 1e-3, opt);
        return r;
    }

    // Alternates AF-constrained solves with centroid phase-center updates, starting from the
    // centroids of the spatial design. The result's scenario holds the centers used by its solve.
    inline DesignResult design_af_with_centroids(const DesignSpec &spec, const ArrayScenario &sc, const CrossAFStack &stack,
                                                 int max_passes = 5, double tol_m = 1e-9, const socp::Settings &opt = {})
    {
        DesignSpec sp = spec;
        sp.af.reset();
        const DesignResult init = design_spatial(sp, sc, opt);
        if (!init.ok())
            return init;
        ArrayScenario cur = set_phase_centers(sc, PhaseCenterMode::centroid, {.groups = {}, .centers = {}, .weights = init.tb.C});
        DesignResult r;
        for (int pass = 1; pass <= max_passes; ++pass)
        {
            r = design_af_constrained(spec, cur, stack, opt);
            r.phase_center_passes = pass;
            if (!r.ok())
                return r;
            const Positions next = beam_centroids(cur, r.tb.C);
            r.phase_center_shift = (next - cur.q_te).cwiseAbs().maxCoeff();
            if (r.phase_center_shift <= tol_m || pass == max_passes)
                break;
            cur.q_te = next;
        }
        return r;
    }
} // namespace tbaf

#endif
