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

#ifndef TBAF_SIM_ORACLE_HPP
#define TBAF_SIM_ORACLE_HPP

#include "tb_core.hpp"

#include <cstdint>
#include <random>

namespace tbaf
{
    // Per transmit-receive channel (m, j) propagation parameters.
    struct ChannelModel
    {
        RMat tau;   // M x N two-way delays (s)
        RMat fd;    // M x N Doppler shifts (Hz)
        CMat alpha; // M x N reflection coefficients
        double noise_power = 0.0;
        std::uint64_t seed = 0;
    };

    // tau_mj = tau_ref + u . (q_T,m + q_R,j) / c, common Doppler, alpha = 1
    inline ChannelModel far_field_channel(const ArrayScenario &sc, const TargetParams &t)
    {
        const Eigen::Index M = sc.num_tx(), N = sc.num_rx();
        const Vec3 u = t.u();
        ChannelModel ch;
        ch.tau.resize(M, N);
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index j = 0; j < N; ++j)
                ch.tau(m, j) = t.tau + u.dot(sc.q_t.row(m).transpose() + sc.q_r.row(j).transpose()) / sc.c;
        ch.fd = RMat::Constant(M, N, t.fd);
        ch.alpha = CMat::Ones(M, N);
        return ch;
    }

    // Adds seeded uniform deviations in [-spread, spread] Hz to every channel Doppler.
    inline ChannelModel perturb_doppler(ChannelModel ch, double spread_hz, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> d(-spread_hz, spread_hz);
        for (Eigen::Index m = 0; m < ch.fd.rows(); ++m)
            for (Eigen::Index j = 0; j < ch.fd.cols(); ++j)
                ch.fd(m, j) += d(rng);
        return ch;
    }

    struct SimOptions
    {
        bool coherent_phase = true; // false drops the carrier phase terms (R-matrix spot checks)
        Eigen::Index record_length = 0; // 0: shortest record holding every echo
    };

    namespace detail
    {
        inline long snap(double tau, double fs) { return std::lround(tau * fs); }

        inline void check_channel(const ArrayScenario &sc, const ChannelModel &ch)
        {
            const Eigen::Index M = sc.num_tx(), N = sc.num_rx();
            require(ch.tau.rows() == M && ch.tau.cols() == N, "channel delay matrix must be M x N");
            require(ch.fd.rows() == M && ch.fd.cols() == N, "channel Doppler matrix must be M x N");
            require(ch.alpha.rows() == M && ch.alpha.cols() == N, "channel reflection matrix must be M x N");
            require(ch.noise_power >= 0.0, "noise power must be nonnegative");
        }
    } // namespace detail

    // N x T baseband records sampled at fs, n = 0 .. T-1 at t = n / fs.
    // r_j[n] = sqrt(E/K) sum_m sum_k alpha_mj c_mk phi_k[n - d_mj] exp(-j2pi tau_mj (fc + f_mj)) exp(j2pi f_mj n / fs)
    inline CMat synthesize_rx(const ArrayScenario &sc, const WaveformSet &ws, const CMat &C, const ChannelModel &ch,
                              const SimOptions &opt = {})
    {
        validate_scenario(sc);
        detail::check_channel(sc, ch);
        require(C.rows() == sc.num_tx() && C.cols() == ws.count(), "TB matrix must be M x K");
        const Eigen::Index M = sc.num_tx(), N = sc.num_rx(), L = ws.length();
        const double fs = ws.sample_rate;

        Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> d(M, N);
        long last = 0;
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index j = 0; j < N; ++j)
            {
                d(m, j) = detail::snap(ch.tau(m, j), fs);
                if (d(m, j) < 0)
                    throw ParameterError("channel delay precedes the record start");
                last = std::max(last, d(m, j) + static_cast<long>(L));
            }
        const Eigen::Index T = opt.record_length > 0 ? opt.record_length : static_cast<Eigen::Index>(last);
        if (T < last)
            throw ParameterError("record of " + std::to_string(T) + " samples is too short; echoes end at sample " + std::to_string(last));

        const CMat mixed = C * ws.samples; // M x L: element-space waveforms
        const double amp = std::sqrt(ws.energy / static_cast<double>(ws.count()));
        CMat r = CMat::Zero(N, T);
        parallel_for(static_cast<std::size_t>(N), [&](std::size_t js)
                     {
                         const auto j = static_cast<Eigen::Index>(js);
                         for (Eigen::Index m = 0; m < M; ++m)
                         {
                             if (ch.alpha(m, j) == cplx(0.0, 0.0))
                                 continue;
                             cplx g = amp * ch.alpha(m, j);
                             if (opt.coherent_phase)
                                 g *= cis(-2.0 * kPi * ch.tau(m, j) * (sc.fc + ch.fd(m, j)));
                             for (Eigen::Index l = 0; l < L; ++l)
                             {
                                 const Eigen::Index n = d(m, j) + l;
                                 r(j, n) += g * mixed(m, l) * cis(2.0 * kPi * ch.fd(m, j) * static_cast<double>(n) / fs);
                             }
                         } });
        if (ch.noise_power > 0.0)
        {
            std::mt19937_64 rng(ch.seed);
            std::normal_distribution<double> g(0.0, std::sqrt(ch.noise_power / 2.0));
            for (Eigen::Index j = 0; j < N; ++j)
                for (Eigen::Index n = 0; n < T; ++n)
                    r(j, n) += cplx(g(rng), g(rng));
        }
        return r;
    }

    // N x K outputs for reference parameters Theta'.
    // out(j,i) = sum_n r_j[n] conj(phi_i[n - d'_ij]) exp(-j2pi f' n / fs) exp(j2pi tau'_ij (fc + f')) / fs
    // with tau'_ij = tau' + u' . (q_TE,i + q_R,j) / c.
    inline CMat matched_bank(const CMat &records, const WaveformSet &ws, const ArrayScenario &sc, const TargetParams &ref,
                             const SimOptions &opt = {})
    {
        validate_scenario(sc);
        require(records.rows() == sc.num_rx(), "record count must equal the receive element count");
        require(sc.num_beams() == ws.count(), "phase-center count must equal K");
        const Eigen::Index N = sc.num_rx(), K = ws.count(), L = ws.length(), T = records.cols();
        const double fs = ws.sample_rate;
        const Vec3 u = ref.u();
        CMat out(N, K);
        parallel_for(static_cast<std::size_t>(N), [&](std::size_t js)
                     {
                         const auto j = static_cast<Eigen::Index>(js);
                         for (Eigen::Index i = 0; i < K; ++i)
                         {
                             const double tau = ref.tau + u.dot(sc.q_te.row(i).transpose() + sc.q_r.row(j).transpose()) / sc.c;
                             const long d = detail::snap(tau, fs);
                             cplx acc{0.0, 0.0};
                             for (Eigen::Index l = 0; l < L; ++l)
                             {
                                 const long n = d + static_cast<long>(l);
                                 if (n < 0 || n >= static_cast<long>(T))
                                     continue;
                                 acc += records(j, n) * std::conj(ws.samples(i, l)) * cis(-2.0 * kPi * ref.fd * static_cast<double>(n) / fs);
                             }
                             if (opt.coherent_phase)
                                 acc *= cis(2.0 * kPi * tau * (sc.fc + ref.fd));
                             out(j, i) = acc / fs;
                         } });
        return out;
    }

    // |sum_j sum_i out(j,i)|^2
    inline double af_from_sum(const CMat &outputs) { return std::norm(outputs.sum()); }

    inline double oracle_af(const ArrayScenario &sc, const WaveformSet &ws, const CMat &C, const ChannelModel &ch,
                            const TargetParams &ref, const SimOptions &opt = {})
    {
        return af_from_sum(matched_bank(synthesize_rx(sc, ws, C, ch, opt), ws, sc, ref, opt));
    }

    // M x K matrix R for receive element j: each transmit row simulated alone with carrier phases dropped.
    inline CMat r_matrix(const ArrayScenario &sc, const WaveformSet &ws, const CMat &C, const ChannelModel &ch,
                         const TargetParams &ref, Eigen::Index j)
    {
        require(j >= 0 && j < sc.num_rx(), "receive index out of range");
        SimOptions opt;
        opt.coherent_phase = false;
        ChannelModel one = ch;
        one.noise_power = 0.0;
        CMat R(sc.num_tx(), ws.count());
        for (Eigen::Index m = 0; m < sc.num_tx(); ++m)
        {
            one.alpha = CMat::Zero(sc.num_tx(), sc.num_rx());
            one.alpha(m, j) = ch.alpha(m, j);
            R.row(m) = matched_bank(synthesize_rx(sc, ws, C, one, opt), ws, sc, ref, opt).row(j);
        }
        return R;
    }

    struct OracleRow
    {
        double axis1 = 0.0;
        double doppler = 0.0;
        double factored = 0.0;
        double oracle = 0.0;
        double rel_err = 0.0;
    };

    struct OracleReport
    {
        std::vector<OracleRow> rows;
        double max_rel_err = 0.0;
        double floor = 0.0; // relative errors use max(|oracle|, floor) as denominator
    };

    // Compares tb_af against the coherent-sum simulation at `points` random nodes of the query grid.
    // The target delay is moved onto the sample grid, past the largest negative delay offset.
    inline OracleReport compare_with_oracle(const ArrayScenario &sc, const WaveformSet &ws, const TBMatrix &tb, AFQuery q,
                                            std::size_t points, std::uint64_t seed, double floor_rel = 1e-12)
    {
        const double fs = ws.sample_rate;
        double lead = static_cast<double>(ws.length());
        if (q.sweep == Sweep::delay_doppler)
            lead += std::ceil(std::max(0.0, -q.axis1.minCoeff()) * fs);
        q.theta.tau = lead / fs;
        const AFGrid g = tb_af(sc, ws, tb, q);
        const ChannelModel ch = far_field_channel(sc, q.theta);

        OracleReport rep;
        rep.floor = floor_rel * g.values.maxCoeff();
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<Eigen::Index> ai(0, g.rows() - 1), fi(0, g.cols() - 1);
        for (std::size_t p = 0; p < points; ++p)
        {
            OracleRow row;
            const Eigen::Index a = ai(rng), b = fi(rng);
            row.axis1 = g.axis1(a);
            row.doppler = g.axis2(b);
            row.factored = g.values(a, b);
            row.oracle = oracle_af(sc, ws, tb.C, ch, q.reference_at(row.axis1, row.doppler));
            row.rel_err = std::abs(row.factored - row.oracle) / std::max(std::abs(row.oracle), rep.floor);
            rep.max_rel_err = std::max(rep.max_rel_err, row.rel_err);
            rep.rows.push_back(row);
        }
        return rep;
    }

    // Relative AF change at Theta' when the channel Dopplers deviate from the common value.
    inline double doppler_residual(const ArrayScenario &sc, const WaveformSet &ws, const CMat &C, const ChannelModel &common,
                                   const ChannelModel &per_channel, const TargetParams &ref)
    {
        const double a = oracle_af(sc, ws, C, common, ref);
        const double b = oracle_af(sc, ws, C, per_channel, ref);
        return std::abs(a - b) / std::max(a, std::numeric_limits<double>::min());
    }
} // namespace tbaf

#endif
