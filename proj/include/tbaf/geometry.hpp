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

#ifndef TBAF_GEOMETRY_HPP
#define TBAF_GEOMETRY_HPP

#include "core.hpp"

#include <optional>
#include <string>

namespace tbaf
{
    using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3>;

    struct ArrayScenario
    {
        Positions q_t;  // M x 3, transmit elements (m)
        Positions q_r;  // N x 3, receive elements (m)
        Positions q_te; // K x 3, equivalent transmit phase centers (m); empty until set
        double fc = 10e9;
        double c = kSpeedOfLight;

        Eigen::Index num_tx() const { return q_t.rows(); }
        Eigen::Index num_rx() const { return q_r.rows(); }
        Eigen::Index num_beams() const { return q_te.rows(); }
        double wavelength() const { return c / fc; }
    };

    // Angle is measured from broadside in the x-y plane: u = (sin theta, cos theta, 0).
    // An explicit unit direction overrides the angle when present.
    struct TargetParams
    {
        double theta = 0.0; // rad
        double fd = 0.0;    // Hz
        double tau = 0.0;   // s
        std::optional<Vec3> direction;

        Vec3 u() const
        {
            if (direction)
                return *direction;
            return {std::sin(theta), std::cos(theta), 0.0};
        }
    };

    inline Positions line_positions(Eigen::Index n, double spacing)
    {
        Positions p = Positions::Zero(n, 3);
        for (Eigen::Index i = 0; i < n; ++i)
            p(i, 0) = (static_cast<double>(i) - static_cast<double>(n - 1) / 2.0) * spacing;
        return p;
    }

    // Colinear arrays on the x-axis centred at the origin. spacing <= 0 selects lambda/2.
    inline ArrayScenario ula(Eigen::Index m, Eigen::Index n, double fc, double spacing = 0.0, double c = kSpeedOfLight)
    {
        require(m >= 1 && n >= 1, "array sizes must be >= 1");
        require(fc > 0.0 && std::isfinite(fc), "carrier frequency must be positive");
        require(c > 0.0, "propagation speed must be positive");
        ArrayScenario sc;
        sc.fc = fc;
        sc.c = c;
        const double d = spacing > 0.0 ? spacing : sc.wavelength() / 2.0;
        sc.q_t = line_positions(m, d);
        sc.q_r = line_positions(n, d);
        return sc;
    }

    enum class PhaseCenterMode
    {
        element,   // q_TE = q_T, K = M
        reference, // q_TE = q_T,1, K = 1
        subarray,  // centre of each index group
        explicit_, // caller-supplied K x 3
        centroid   // |c_mk|^2-weighted centroid of each beam
    };

    inline std::string to_string(PhaseCenterMode m)
    {
        switch (m)
        {
        case PhaseCenterMode::element:
            return "element";
        case PhaseCenterMode::reference:
            return "reference";
        case PhaseCenterMode::subarray:
            return "subarray";
        case PhaseCenterMode::explicit_:
            return "explicit";
        case PhaseCenterMode::centroid:
            return "centroid";
        }
        return "?";
    }

    inline PhaseCenterMode phase_center_mode_from_string(const std::string &s)
    {
        if (s == "element" || s == "element-positions")
            return PhaseCenterMode::element;
        if (s == "reference" || s == "reference-element")
            return PhaseCenterMode::reference;
        if (s == "subarray" || s == "subarray-centers")
            return PhaseCenterMode::subarray;
        if (s == "explicit")
            return PhaseCenterMode::explicit_;
        if (s == "centroid")
            return PhaseCenterMode::centroid;
        throw ParameterError("unknown phase-center mode '" + s + "'");
    }

    struct PhaseCenterPayload
    {
        std::vector<std::vector<Eigen::Index>> groups; // subarray
        Positions centers;                             // explicit
        CMat weights;                                  // centroid: M x K
    };

    // Sum_m |c_mk|^2 q_T,m / Sum_m |c_mk|^2 per column; all-zero columns map to the origin
    inline Positions beam_centroids(const ArrayScenario &sc, const CMat &C)
    {
        require(C.rows() == sc.num_tx(), "TB matrix rows must equal the transmit element count");
        Positions out = Positions::Zero(C.cols(), 3);
        for (Eigen::Index k = 0; k < C.cols(); ++k)
        {
            const RVec w = C.col(k).cwiseAbs2();
            const double s = w.sum();
            if (s > 0.0)
                out.row(k) = (w.transpose() * sc.q_t) / s;
        }
        return out;
    }

    inline ArrayScenario set_phase_centers(ArrayScenario sc, PhaseCenterMode mode, const PhaseCenterPayload &payload = {})
    {
        switch (mode)
        {
        case PhaseCenterMode::element:
            sc.q_te = sc.q_t;
            break;
        case PhaseCenterMode::reference:
            sc.q_te = sc.q_t.topRows(1);
            break;
        case PhaseCenterMode::subarray:
        {
            require(!payload.groups.empty(), "subarray mode needs at least one index group");
            Positions p(static_cast<Eigen::Index>(payload.groups.size()), 3);
            for (std::size_t k = 0; k < payload.groups.size(); ++k)
            {
                const auto &g = payload.groups[k];
                require(!g.empty(), "empty subarray group");
                Eigen::RowVector3d acc = Eigen::RowVector3d::Zero();
                for (auto idx : g)
                {
                    require(idx >= 0 && idx < sc.num_tx(), "subarray index out of range");
                    acc += sc.q_t.row(idx);
                }
                p.row(static_cast<Eigen::Index>(k)) = acc / static_cast<double>(g.size());
            }
            sc.q_te = p;
            break;
        }
        case PhaseCenterMode::explicit_:
            require(payload.centers.rows() >= 1, "explicit mode needs K >= 1 centers");
            require(payload.centers.allFinite(), "phase centers must be finite");
            sc.q_te = payload.centers;
            break;
        case PhaseCenterMode::centroid:
            sc.q_te = beam_centroids(sc, payload.weights);
            break;
        }
        return sc;
    }

    // Entry i = exp(j 2 pi (fc + fd) u.q_i / c)
    inline CVec steering(const Positions &q, const TargetParams &t, double fc, double c)
    {
        const Vec3 u = t.u();
        const double k = 2.0 * kPi * (fc + t.fd) / c;
        CVec a(q.rows());
        for (Eigen::Index i = 0; i < q.rows(); ++i)
            a(i) = cis(k * q.row(i).dot(u));
        return a;
    }

    inline CVec steering_t(const ArrayScenario &sc, const TargetParams &t) { return steering(sc.q_t, t, sc.fc, sc.c); }
    inline CVec steering_r(const ArrayScenario &sc, const TargetParams &t) { return steering(sc.q_r, t, sc.fc, sc.c); }

    inline CVec steering_te(const ArrayScenario &sc, const TargetParams &t)
    {
        require(sc.num_beams() >= 1, "equivalent transmit phase centers are not set");
        return steering(sc.q_te, t, sc.fc, sc.c);
    }

    inline void validate_scenario(const ArrayScenario &sc)
    {
        require(sc.num_tx() >= 1 && sc.num_rx() >= 1, "array sizes must be >= 1");
        require(sc.q_t.allFinite() && sc.q_r.allFinite() && sc.q_te.allFinite(), "positions must be finite");
        require(sc.fc > 0.0 && sc.c > 0.0, "carrier and propagation speed must be positive");
    }

    inline TargetParams at_angle(double theta, double fd = 0.0, double tau = 0.0)
    {
        TargetParams t;
        t.theta = theta;
        t.fd = fd;
        t.tau = tau;
        return t;
    }
} // namespace tbaf

#endif
