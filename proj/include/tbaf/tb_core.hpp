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

#ifndef TBAF_TB_CORE_HPP
#define TBAF_TB_CORE_HPP

#include "ambiguity.hpp"
#include "geometry.hpp"
#include "waveforms.hpp"

#include <string>

namespace tbaf
{
    struct TBMatrix
    {
        CMat C;                             // M x K
        std::string provenance = "identity"; // identity, pa-weight, designed, file

        Eigen::Index rows() const { return C.rows(); }
        Eigen::Index cols() const { return C.cols(); }
    };

    inline TBMatrix identity_tb(Eigen::Index m) { return {CMat::Identity(m, m), "identity"}; }

    inline TBMatrix pa_tb(const CVec &w) { return {CMat(w), "pa-weight"}; }

    enum class Sweep
    {
        delay_doppler, // axis1 = delay offset (s), Theta' at the reference angle
        angle_doppler  // axis1 = theta' (rad), zero delay offset
    };

    inline std::string to_string(Sweep s) { return s == Sweep::delay_doppler ? "delay-doppler" : "angle-doppler"; }

    // Sweep point (a, df) maps to Theta' with Doppler f_d - df and, for
    // delay-Doppler sweeps, delay offset a; the angle of Theta' is `a` for
    // angle-Doppler sweeps and `theta_prime` (default: the reference angle) otherwise.
    struct AFQuery
    {
        TargetParams theta;
        Sweep sweep = Sweep::delay_doppler;
        RVec axis1;
        RVec dopplers;
        std::optional<double> theta_prime;

        TargetParams reference_at(double a, double df) const
        {
            TargetParams t = theta;
            t.fd = theta.fd - df;
            t.direction.reset();
            if (sweep == Sweep::angle_doppler)
                t.theta = a;
            else
            {
                t.theta = theta_prime.value_or(theta.theta);
                t.direction = theta_prime ? std::nullopt : theta.direction;
                t.tau = theta.tau + a;
            }
            return t;
        }
    };

    inline void check_query(const AFQuery &q)
    {
        require(q.axis1.size() >= 1 && q.dopplers.size() >= 1, "sweep axes must be nonempty");
        require(strictly_increasing(q.axis1) && strictly_increasing(q.dopplers), "sweep axes must be strictly increasing");
    }

    // |a_R^H(Theta) a_R(Theta')|^2
    inline double receive_factor(const ArrayScenario &sc, const TargetParams &t, const TargetParams &tp)
    {
        return std::norm(steering_r(sc, t).dot(steering_r(sc, tp)));
    }

    namespace detail
    {
        inline AFGrid blank_grid(const AFQuery &q, const std::string &kind)
        {
            AFGrid g;
            g.axis1 = q.axis1;
            g.axis2 = q.dopplers;
            g.axis1_name = q.sweep == Sweep::delay_doppler ? "delay_s" : "angle_rad";
            g.axis2_name = "doppler_hz";
            g.kind = kind;
            g.values = RMat::Zero(q.axis1.size(), q.dopplers.size());
            return g;
        }

        // X_jk = sum_n phi_j[n] conj(phi_k[n]) exp(j 2 pi f n / fs) / fs
        inline CMat zero_delay_matrix(const WaveformSet &ws, double f)
        {
            CMat mod = ws.samples;
            if (f != 0.0)
                for (Eigen::Index n = 0; n < ws.length(); ++n)
                    mod.col(n) *= cis(2.0 * kPi * f * static_cast<double>(n) / ws.sample_rate);
            return mod * ws.samples.adjoint() / ws.sample_rate;
        }

        inline void check_tb(const ArrayScenario &sc, const WaveformSet &ws, const CMat &C)
        {
            validate_scenario(sc);
            require(C.rows() == sc.num_tx(), "TB matrix has " + std::to_string(C.rows()) + " rows, array has " + std::to_string(sc.num_tx()) + " transmit elements");
            require(C.cols() == ws.count(), "TB matrix has " + std::to_string(C.cols()) + " columns, waveform set has " + std::to_string(ws.count()));
            require(sc.num_beams() == ws.count(), "phase-center count " + std::to_string(sc.num_beams()) + " does not match K = " + std::to_string(ws.count()));
            require(C.allFinite(), "TB matrix has non-finite entries");
        }
    } // namespace detail

    // (E/K) |a_R^H(Theta) a_R(Theta')|^2 |a_T^H(Theta) C Xbar(dtau, df) a_TE(Theta')|^2 on every sweep point.
    // Delay-Doppler sweeps correlate the composite transmit signal sum_j (C^T conj a_T)_j phi_j
    // against sum_k conj(a_TE,k) phi_k, one FFT correlation per Doppler bin.
    inline AFGrid tb_af(const ArrayScenario &sc, const WaveformSet &ws, const TBMatrix &tb, const AFQuery &q)
    {
        detail::check_tb(sc, ws, tb.C);
        check_query(q);
        const double K = static_cast<double>(ws.count());
        const double scale = ws.energy / K;
        const CVec alpha = tb.C.transpose() * steering_t(sc, q.theta).conjugate();
        const CVec ar = steering_r(sc, q.theta);
        AFGrid g = detail::blank_grid(q, "tb-af");

        if (q.sweep == Sweep::delay_doppler)
        {
            const auto lags = detail::snap_lags(q.axis1, ws.sample_rate);
            for (Eigen::Index i = 0; i < q.axis1.size(); ++i)
                g.axis1(i) = lags[static_cast<std::size_t>(i)] / ws.sample_rate;
            const CVec u = (alpha.transpose() * ws.samples).transpose();
            const int nfft = detail::fft_size(ws.length());
            parallel_for(static_cast<std::size_t>(q.dopplers.size()), [&](std::size_t fi)
                         {
                             Eigen::FFT<double> fft;
                             const double df = q.dopplers(static_cast<Eigen::Index>(fi));
                             const TargetParams tp = q.reference_at(0.0, df);
                             const CVec beta = steering_te(sc, tp);
                             const CVec v = (beta.adjoint() * ws.samples).transpose();
                             const double rho = std::norm(ar.dot(steering_r(sc, tp)));
                             const auto A = detail::modulated_fft(fft, u, df, ws.sample_rate, nfft);
                             const auto B = detail::modulated_fft(fft, v, 0.0, ws.sample_rate, nfft);
                             const auto r = detail::correlate_spectra(fft, A, B);
                             for (Eigen::Index di = 0; di < q.axis1.size(); ++di)
                             {
                                 const cplx x = detail::lag_value(r, lags[static_cast<std::size_t>(di)], static_cast<int>(ws.length())) / ws.sample_rate;
                                 g.values(di, static_cast<Eigen::Index>(fi)) = scale * rho * std::norm(x);
                             } });
        }
        else
        {
            parallel_for(static_cast<std::size_t>(q.dopplers.size()), [&](std::size_t fi)
                         {
                             const double df = q.dopplers(static_cast<Eigen::Index>(fi));
                             const CMat X = detail::zero_delay_matrix(ws, df);
                             const CVec ax = X.transpose() * alpha; // (alpha^T X)^T
                             for (Eigen::Index ai = 0; ai < q.axis1.size(); ++ai)
                             {
                                 const TargetParams tp = q.reference_at(q.axis1(ai), df);
                                 const cplx x = ax.cwiseProduct(steering_te(sc, tp)).sum();
                                 g.values(ai, static_cast<Eigen::Index>(fi)) = scale * std::norm(ar.dot(steering_r(sc, tp))) * std::norm(x);
                             } });
        }
        return g;
    }

    // Traditional MIMO form: K = M, C = I, phase centers at the elements, magnitude E/M.
    // Evaluated by contracting the full K x K cross-AF stack.
    inline AFGrid mimo_af(const ArrayScenario &sc_in, const WaveformSet &ws, const AFQuery &q)
    {
        require(ws.count() == sc_in.num_tx(), "MIMO AF needs K = M (got K = " + std::to_string(ws.count()) + ", M = " + std::to_string(sc_in.num_tx()) + ")");
        check_query(q);
        const ArrayScenario sc = set_phase_centers(sc_in, PhaseCenterMode::element);
        validate_scenario(sc);
        const double scale = ws.energy / static_cast<double>(ws.count());
        const CVec at = steering_t(sc, q.theta);
        const CVec ar = steering_r(sc, q.theta);
        AFGrid g = detail::blank_grid(q, "mimo-af");

        RVec taus = q.sweep == Sweep::delay_doppler ? q.axis1 : RVec::Zero(1);
        const CrossAFStack st = cross_af_matrix(ws, taus, q.dopplers);
        if (q.sweep == Sweep::delay_doppler)
            g.axis1 = st.delays;
        for (Eigen::Index fi = 0; fi < q.dopplers.size(); ++fi)
            for (Eigen::Index ai = 0; ai < q.axis1.size(); ++ai)
            {
                const TargetParams tp = q.reference_at(q.axis1(ai), q.dopplers(fi));
                const CVec atp = steering_t(sc, tp);
                const Eigen::Index di = q.sweep == Sweep::delay_doppler ? ai : 0;
                cplx acc{0.0, 0.0};
                for (Eigen::Index j = 0; j < ws.count(); ++j)
                    for (Eigen::Index k = 0; k < ws.count(); ++k)
                        acc += std::conj(at(j)) * st.at(j, k, di, fi) * atp(k);
                g.values(ai, fi) = scale * std::norm(ar.dot(steering_r(sc, tp))) * std::norm(acc);
            }
        return g;
    }

    // Phased-array form: one waveform, weights w, reference-element phase center.
    // E |a_R^H a_R'|^2 |a_T^H(Theta) w|^2 |Xbar(dtau, df)|^2
    inline AFGrid pa_af(const ArrayScenario &sc_in, const WaveformSet &ws, const CVec &w, const AFQuery &q)
    {
        require(ws.count() == 1, "PA AF needs a single waveform (got K = " + std::to_string(ws.count()) + ")");
        require(w.size() == sc_in.num_tx(), "PA weight length must equal the transmit element count");
        check_query(q);
        const ArrayScenario sc = set_phase_centers(sc_in, PhaseCenterMode::reference);
        validate_scenario(sc);
        const double gain = std::norm(steering_t(sc, q.theta).dot(w));
        const CVec ar = steering_r(sc, q.theta);
        AFGrid g = detail::blank_grid(q, "pa-af");

        RVec taus = q.sweep == Sweep::delay_doppler ? q.axis1 : RVec::Zero(1);
        const ComplexGrid wd = woodward(ws, 0, taus, q.dopplers);
        if (q.sweep == Sweep::delay_doppler)
            g.axis1 = wd.axis1;
        for (Eigen::Index fi = 0; fi < q.dopplers.size(); ++fi)
            for (Eigen::Index ai = 0; ai < q.axis1.size(); ++ai)
            {
                const TargetParams tp = q.reference_at(q.axis1(ai), q.dopplers(fi));
                const Eigen::Index di = q.sweep == Sweep::delay_doppler ? ai : 0;
                g.values(ai, fi) = ws.energy * std::norm(ar.dot(steering_r(sc, tp))) * gain * std::norm(wd.values(di, fi));
            }
        return g;
    }

    // Sum of squared matched-filter outputs over every (waveform, filter) pair and
    // every receive element, with no steering phases: (E/K) N sum_jk |Xbar_jk|^2
    inline AFGrid square_summation_af(const ArrayScenario &sc, const WaveformSet &ws, const AFQuery &q)
    {
        check_query(q);
        validate_scenario(sc);
        const double scale = ws.energy / static_cast<double>(ws.count()) * static_cast<double>(sc.num_rx());
        AFGrid g = detail::blank_grid(q, "sqsum-af");
        RVec taus = q.sweep == Sweep::delay_doppler ? q.axis1 : RVec::Zero(1);
        const CrossAFStack st = cross_af_matrix(ws, taus, q.dopplers);
        if (q.sweep == Sweep::delay_doppler)
            g.axis1 = st.delays;
        for (Eigen::Index fi = 0; fi < q.dopplers.size(); ++fi)
            for (Eigen::Index ai = 0; ai < q.axis1.size(); ++ai)
            {
                const Eigen::Index di = q.sweep == Sweep::delay_doppler ? ai : 0;
                g.values(ai, fi) = scale * st.per_doppler[static_cast<std::size_t>(fi)].row(di).squaredNorm();
            }
        return g;
    }

    enum class CutAxis
    {
        fix_axis1, // series over axis2 at axis1 == value (zero-delay cut when value = 0)
        fix_axis2  // series over axis1 at axis2 == value (zero-Doppler cut when value = 0)
    };

    struct Cut
    {
        RVec axis;
        std::string axis_name;
        RVec values; // linear, as stored in the grid
        RVec db;     // relative to the grid peak, floored
        double at = 0.0;
    };

    inline Cut cut(const AFGrid &g, CutAxis which, double at, double floor_db = -120.0)
    {
        check_grid(g);
        const RVec &fixed = which == CutAxis::fix_axis1 ? g.axis1 : g.axis2;
        auto idx = find_node(fixed, at);
        if (!idx)
            throw RangeError("cut value " + std::to_string(at) + " is not a node of the " +
                             (which == CutAxis::fix_axis1 ? g.axis1_name : g.axis2_name) + " axis");
        Cut c;
        c.at = at;
        if (which == CutAxis::fix_axis1)
        {
            c.axis = g.axis2;
            c.axis_name = g.axis2_name;
            c.values = g.values.row(*idx).transpose();
        }
        else
        {
            c.axis = g.axis1;
            c.axis_name = g.axis1_name;
            c.values = g.values.col(*idx);
        }
        const double peak = g.values.maxCoeff();
        c.db.resize(c.values.size());
        for (Eigen::Index i = 0; i < c.values.size(); ++i)
            c.db(i) = to_db(c.values(i), peak, floor_db);
        return c;
    }

    inline Cut zero_delay_cut(const AFGrid &g) { return cut(g, CutAxis::fix_axis1, 0.0); }
    inline Cut zero_doppler_cut(const AFGrid &g) { return cut(g, CutAxis::fix_axis2, 0.0); }
} // namespace tbaf

#endif
