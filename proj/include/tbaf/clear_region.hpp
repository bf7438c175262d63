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

#ifndef TBAF_CLEAR_REGION_HPP
#define TBAF_CLEAR_REGION_HPP

#include "tb_core.hpp"

#include <deque>

namespace tbaf
{
    // Upsilon_k = a_T^H(Theta) c_k
    inline CVec coherent_gains(const ArrayScenario &sc, const CMat &C, const TargetParams &t)
    {
        require(C.rows() == sc.num_tx(), "TB matrix rows must equal the transmit element count");
        return C.transpose() * steering_t(sc, t).conjugate();
    }

    enum class Shape
    {
        rectangle,
        ellipse
    };

    inline std::string to_string(Shape s) { return s == Shape::rectangle ? "rectangle" : "ellipse"; }

    inline Shape shape_from_string(const std::string &s)
    {
        if (s == "rectangle")
            return Shape::rectangle;
        if (s == "ellipse")
            return Shape::ellipse;
        throw ParameterError("unknown region shape '" + s + "'");
    }

    // Origin-centred region: |x| <= a, |y| <= b (rectangle) or (x/a)^2 + (y/b)^2 <= 1 (ellipse)
    struct Region
    {
        Shape shape = Shape::rectangle;
        double half1 = 0.0; // axis1 half-extent
        double half2 = 0.0; // axis2 half-extent

        bool contains(double x, double y) const
        {
            if (shape == Shape::rectangle)
                return std::abs(x) <= half1 * (1.0 + 1e-12) && std::abs(y) <= half2 * (1.0 + 1e-12);
            const double u = half1 > 0.0 ? x / half1 : (x == 0.0 ? 0.0 : 2.0);
            const double v = half2 > 0.0 ? y / half2 : (y == 0.0 ? 0.0 : 2.0);
            return u * u + v * v <= 1.0 + 1e-12;
        }
    };

    namespace detail
    {
        inline double spacing(const RVec &a)
        {
            return a.size() > 1 ? (a(a.size() - 1) - a(0)) / static_cast<double>(a.size() - 1) : 1.0;
        }

        template <class Scalar>
        void check_uniform(const Grid<Scalar> &g)
        {
            check_grid(g);
            for (const RVec *ax : {&g.axis1, &g.axis2})
            {
                const double h = spacing(*ax);
                for (Eigen::Index i = 1; i < ax->size(); ++i)
                    require(std::abs((*ax)(i) - (*ax)(i - 1) - h) <= 1e-6 * h, "grid axes must be uniformly spaced");
            }
        }

        template <class Scalar>
        void check_region(const Grid<Scalar> &g, const Region &r)
        {
            require(r.half1 >= 0.0 && r.half2 >= 0.0, "region half-extents must be nonnegative");
            const double e1 = 0.5 * spacing(g.axis1) * 1e-6, e2 = 0.5 * spacing(g.axis2) * 1e-6;
            if (r.half1 > std::min(-g.axis1(0), g.axis1(g.axis1.size() - 1)) + e1 ||
                r.half2 > std::min(-g.axis2(0), g.axis2(g.axis2.size() - 1)) + e2)
                throw RangeError("integration region exceeds the grid extent");
        }
    } // namespace detail

    // Region spanning the whole grid (largest origin-centred rectangle inside it)
    template <class Scalar>
    Region full_region(const Grid<Scalar> &g)
    {
        return {Shape::rectangle, std::min(-g.axis1(0), g.axis1(g.axis1.size() - 1)), std::min(-g.axis2(0), g.axis2(g.axis2.size() - 1))};
    }

    // Riemann sum of the grid values over the nodes inside A, times the cell area
    inline double af_volume(const AFGrid &g, const Region &a)
    {
        detail::check_uniform(g);
        detail::check_region(g, a);
        const double cell = detail::spacing(g.axis1) * detail::spacing(g.axis2);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            for (Eigen::Index j = 0; j < g.cols(); ++j)
                if (a.contains(g.axis1(i), g.axis2(j)))
                    acc += g.values(i, j);
        return acc * cell;
    }

    inline double af_volume(const AFGrid &g) { return af_volume(g, full_region(g)); }

    // (E/K) rho (sum |Upsilon_k|^2) V_0
    inline double volume_vk(double energy, Eigen::Index k, double rho, const CVec &gains, double v0)
    {
        return energy / static_cast<double>(k) * rho * gains.squaredNorm() * v0;
    }

    // 4 V_K / (N^2 K V_K / rho - 4 eta), valid while eta < N^2 K V_K / (4 rho)
    inline std::optional<double> bound_worst(double vk, double rho, Eigen::Index n, Eigen::Index k, double eta)
    {
        require(vk > 0.0 && rho > 0.0 && n >= 1 && k >= 1 && eta >= 0.0, "clear-region bound arguments out of range");
        const double nn = static_cast<double>(n) * static_cast<double>(n);
        const double den = nn * static_cast<double>(k) * vk / rho - 4.0 * eta;
        if (!(den > 0.0))
            return std::nullopt;
        return 4.0 * vk / den;
    }

    // 4 V_K / (N^2 V_K / rho - 4 eta), valid while eta < N^2 V_K / (4 rho)
    inline std::optional<double> bound_best(double vk, double rho, Eigen::Index n, double eta)
    {
        return bound_worst(vk, rho, n, 1, eta);
    }

    // Mask of the 4-connected component of {value > eta} that contains the origin node
    inline Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mainlobe_mask(const AFGrid &g, double eta)
    {
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> m = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(g.rows(), g.cols(), false);
        auto z1 = find_node(g.axis1, 0.0), z2 = find_node(g.axis2, 0.0);
        require(z1 && z2, "grid must contain the origin node");
        if (!(g.values(*z1, *z2) > eta))
            return m;
        std::deque<std::pair<Eigen::Index, Eigen::Index>> q{{*z1, *z2}};
        m(*z1, *z2) = true;
        while (!q.empty())
        {
            auto [i, j] = q.front();
            q.pop_front();
            const std::pair<Eigen::Index, Eigen::Index> nb[4] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (auto [a, b] : nb)
                if (a >= 0 && b >= 0 && a < g.rows() && b < g.cols() && !m(a, b) && g.values(a, b) > eta &&
                    g.values(a, b) <= g.values(i, j))
                {
                    m(a, b) = true;
                    q.emplace_back(a, b);
                }
        }
        return m;
    }

    struct ClearArea
    {
        double area = 0.0; // s * Hz (axis units)
        Eigen::Index half1 = 0, half2 = 0; // half-extents in nodes (rectangle) or semi-axes minus 1/2 (ellipse)
        Eigen::Index cells = 0;
        bool full_grid = false;
    };

    namespace detail
    {
        // nodes inside the ellipse with semi-axes (a + 1/2, b + 1/2) in node units
        inline Eigen::Index ellipse_cells(Eigen::Index a, Eigen::Index b)
        {
            Eigen::Index n = 0;
            const double A = static_cast<double>(a) + 0.5, B = static_cast<double>(b) + 0.5;
            for (Eigen::Index i = -a; i <= a; ++i)
            {
                const double r = static_cast<double>(i) / A;
                const auto span = static_cast<Eigen::Index>(std::floor(B * std::sqrt(std::max(0.0, 1.0 - r * r)) + 1e-12));
                n += 2 * std::min(span, b) + 1;
            }
            return n;
        }
    } // namespace detail

    // Largest origin-centred rectangle or ellipse in which every node outside the mainlobe has value <= eta.
    // Area is the node count times the cell area; ties go to the candidate with the smaller axis1 extent.
    inline ClearArea empirical_clear_area(const AFGrid &g, double eta, Shape shape)
    {
        detail::check_uniform(g);
        require(eta > 0.0, "eta must be positive");
        const double cell = detail::spacing(g.axis1) * detail::spacing(g.axis2);
        ClearArea out;
        if (eta >= 1.0)
        {
            out.full_grid = true;
            out.cells = g.rows() * g.cols();
            out.area = static_cast<double>(out.cells) * cell;
            return out;
        }
        const auto ml = mainlobe_mask(g, eta);
        const Eigen::Index z1 = *find_node(g.axis1, 0.0), z2 = *find_node(g.axis2, 0.0);
        const Eigen::Index max1 = std::min(z1, g.rows() - 1 - z1), max2 = std::min(z2, g.cols() - 1 - z2);

        std::vector<std::pair<Eigen::Index, Eigen::Index>> bad; // |offsets| of disqualifying nodes
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            for (Eigen::Index j = 0; j < g.cols(); ++j)
                if (g.values(i, j) > eta && !ml(i, j))
                    bad.emplace_back(std::abs(i - z1), std::abs(j - z2));

        // for each axis1 half-extent, the largest admissible axis2 half-extent (-1: none)
        std::vector<Eigen::Index> best2(static_cast<std::size_t>(max1 + 1), max2);
        parallel_for(static_cast<std::size_t>(max1 + 1), [&](std::size_t ia)
                     {
                         const auto a = static_cast<Eigen::Index>(ia);
                         Eigen::Index b = max2;
                         for (auto [di, dj] : bad)
                         {
                             if (shape == Shape::rectangle)
                             {
                                 if (di <= a)
                                     b = std::min(b, dj - 1);
                             }
                             else
                             {
                                 const double A = static_cast<double>(a) + 0.5;
                                 const double r = static_cast<double>(di) / A;
                                 if (r >= 1.0)
                                     continue;
                                 // node inside iff dj <= (b + 1/2) sqrt(1 - r^2)
                                 const double s = std::sqrt(1.0 - r * r);
                                 const auto lim = static_cast<Eigen::Index>(std::ceil(static_cast<double>(dj) / s - 0.5 - 1e-12)) - 1;
                                 b = std::min(b, lim);
                             }
                         }
                         best2[ia] = b; });

        for (Eigen::Index a = 0; a <= max1; ++a)
        {
            const Eigen::Index b = best2[static_cast<std::size_t>(a)];
            if (b < 0)
                continue;
            const Eigen::Index cells = shape == Shape::rectangle ? (2 * a + 1) * (2 * b + 1) : detail::ellipse_cells(a, b);
            if (cells > out.cells)
            {
                out.cells = cells;
                out.half1 = a;
                out.half2 = b;
            }
        }
        out.area = static_cast<double>(out.cells) * cell;
        return out;
    }

    // sum_{j != k} of |Xbar_jk|^2 over the stack nodes inside A, divided by the diagonal sum
    inline double cross_auto_ratio(const CrossAFStack &st, const Region &a)
    {
        double cross = 0.0, autos = 0.0;
        for (std::size_t f = 0; f < st.per_doppler.size(); ++f)
            for (Eigen::Index d = 0; d < st.delays.size(); ++d)
            {
                if (!a.contains(st.delays(d), st.dopplers(static_cast<Eigen::Index>(f))))
                    continue;
                for (Eigen::Index j = 0; j < st.k; ++j)
                    for (Eigen::Index k = 0; k < st.k; ++k)
                        (j == k ? autos : cross) += std::norm(st.at(j, k, d, static_cast<Eigen::Index>(f)));
            }
        return autos > 0.0 ? cross / autos : 0.0;
    }

    struct ClearRegionReport
    {
        Region region;
        RVec v_per_waveform; // auto-AF volume of each waveform over A
        double v0 = 0.0;     // mean of v_per_waveform
        double vk = 0.0;     // (E/K) rho sum|Upsilon|^2 V_0
        double v_tb = 0.0;   // measured volume of the TB AF grid over A
        CVec gains;
        double rho = 0.0;
        double eta = 0.0; // relative level (unit-peak AF)
        double eta_abs = 0.0;
        std::optional<double> bound_worst, bound_best;
        bool worst_valid = false, best_valid = false;
        std::optional<ClearArea> empirical;
        Shape empirical_shape = Shape::rectangle;
        double cross_auto_ratio = 0.0;
        bool approximate = false;
        double peak = 0.0;
    };

    // Clear-region analysis of the TB AF `g` (not normalized) at the match angle.
    // eta is relative to the grid peak; the bounds use the absolute level eta * peak.
    inline ClearRegionReport clear_region_report(const ArrayScenario &sc, const WaveformSet &ws, const TBMatrix &tb,
                                                 const AFGrid &g, const TargetParams &theta, double eta, Shape shape,
                                                 std::optional<Region> region = std::nullopt)
    {
        detail::check_uniform(g);
        require(g.axis1_name == "delay_s", "clear-region analysis needs a delay-Doppler grid");
        require(eta > 0.0, "eta must be positive");
        ClearRegionReport r;
        r.region = region.value_or(full_region(g));
        detail::check_region(g, r.region);
        r.eta = eta;
        r.peak = g.values.maxCoeff();
        r.eta_abs = eta * r.peak;
        r.gains = coherent_gains(sc, tb.C, theta);
        r.rho = receive_factor(sc, theta, theta);

        const CrossAFStack st = cross_af_matrix(ws, g.axis1, g.axis2);
        r.v_per_waveform.resize(ws.count());
        const double cell = detail::spacing(g.axis1) * detail::spacing(g.axis2);
        for (Eigen::Index k = 0; k < ws.count(); ++k)
        {
            double acc = 0.0;
            for (std::size_t f = 0; f < st.per_doppler.size(); ++f)
                for (Eigen::Index d = 0; d < st.delays.size(); ++d)
                    if (r.region.contains(st.delays(d), st.dopplers(static_cast<Eigen::Index>(f))))
                        acc += std::norm(st.at(k, k, d, static_cast<Eigen::Index>(f)));
            r.v_per_waveform(k) = acc * cell;
        }
        r.v0 = r.v_per_waveform.mean();
        r.vk = volume_vk(ws.energy, ws.count(), r.rho, r.gains, r.v0);
        r.v_tb = af_volume(g, r.region);
        r.bound_worst = tbaf::bound_worst(r.vk, r.rho, sc.num_rx(), ws.count(), r.eta_abs);
        r.bound_best = tbaf::bound_best(r.vk, r.rho, sc.num_rx(), r.eta_abs);
        r.worst_valid = r.bound_worst.has_value();
        r.best_valid = r.bound_best.has_value();
        r.cross_auto_ratio = tbaf::cross_auto_ratio(st, r.region);
        r.approximate = r.cross_auto_ratio > 0.05;
        r.empirical_shape = shape;
        r.empirical = empirical_clear_area(normalize_unit_peak(g), eta, shape);
        return r;
    }
    // Highest cut level (dB) in [lo, hi] outside the mainlobe, where the mainlobe runs from the
    // cut maximum outwards while the values do not increase. Empty when no sample qualifies.
    inline std::optional<double> peak_sidelobe_db(const Cut &c, double lo, double hi)
    {
        require(c.values.size() >= 1, "empty cut");
        Eigen::Index pk = 0;
        c.values.maxCoeff(&pk);
        Eigen::Index left = pk, right = pk;
        while (left > 0 && c.values(left - 1) <= c.values(left))
            --left;
        while (right + 1 < c.values.size() && c.values(right + 1) <= c.values(right))
            ++right;
        std::optional<double> out;
        for (Eigen::Index i = 0; i < c.values.size(); ++i)
            if ((i < left || i > right) && c.axis(i) >= lo && c.axis(i) <= hi)
                out = std::max(out.value_or(-std::numeric_limits<double>::infinity()), c.db(i));
        return out;
    }
} // namespace tbaf

#endif
