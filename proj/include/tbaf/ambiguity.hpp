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

#ifndef TBAF_AMBIGUITY_HPP
#define TBAF_AMBIGUITY_HPP

#include "core.hpp"
#include "waveforms.hpp"

#include <unsupported/Eigen/FFT>

#include <string>

namespace tbaf
{
    // Sampled surface over two sorted axes; values(i, j) sits at (axis1(i), axis2(j)).
    template <typename Scalar>
    struct Grid
    {
        using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

        RVec axis1;
        RVec axis2;
        Values values;
        std::string axis1_name = "delay_s";
        std::string axis2_name = "doppler_hz";
        std::string kind;                   // woodward-entry, tb-af, mimo-af, pa-af, sqsum-af
        std::string normalization = "raw";  // raw or unit-peak
        double peak_before_normalization = 1.0;

        Eigen::Index rows() const { return axis1.size(); }
        Eigen::Index cols() const { return axis2.size(); }
    };

    using AFGrid = Grid<double>;
    using ComplexGrid = Grid<cplx>;

    inline bool strictly_increasing(const RVec &a)
    {
        for (Eigen::Index i = 1; i < a.size(); ++i)
            if (!(a(i) > a(i - 1)))
                return false;
        return true;
    }

    template <typename Scalar>
    void check_grid(const Grid<Scalar> &g)
    {
        require(g.axis1.size() >= 1 && g.axis2.size() >= 1, "grid axes must be nonempty");
        require(g.values.rows() == g.axis1.size() && g.values.cols() == g.axis2.size(), "grid values do not match axes");
        require(strictly_increasing(g.axis1) && strictly_increasing(g.axis2), "grid axes must be strictly increasing");
    }

    // Index of `v` on `axis`, accepting values within 1e-6 of the local spacing
    inline std::optional<Eigen::Index> find_node(const RVec &axis, double v)
    {
        if (axis.size() == 0)
            return std::nullopt;
        const double span = axis.size() > 1 ? (axis(axis.size() - 1) - axis(0)) / static_cast<double>(axis.size() - 1) : 1.0;
        const double tol = 1e-6 * std::max(span, 1e-300);
        auto it = std::lower_bound(axis.data(), axis.data() + axis.size(), v - tol);
        if (it != axis.data() + axis.size() && std::abs(*it - v) <= tol)
            return static_cast<Eigen::Index>(it - axis.data());
        return std::nullopt;
    }

    inline AFGrid normalize_unit_peak(AFGrid g)
    {
        const double peak = g.values.maxCoeff();
        require(peak > 0.0, "cannot normalize a surface with non-positive peak");
        g.values /= peak;
        g.peak_before_normalization = peak;
        g.normalization = "unit-peak";
        return g;
    }

    // 10 log10(v / peak), clamped below at `floor_db`
    inline double to_db(double v, double peak, double floor_db = -120.0)
    {
        if (!(v > 0.0) || !(peak > 0.0))
            return floor_db;
        return std::max(floor_db, 10.0 * std::log10(v / peak));
    }

    inline RMat to_db(const RMat &values, double floor_db = -120.0)
    {
        const double peak = values.maxCoeff();
        RMat out(values.rows(), values.cols());
        for (Eigen::Index i = 0; i < values.rows(); ++i)
            for (Eigen::Index j = 0; j < values.cols(); ++j)
                out(i, j) = to_db(values(i, j), peak, floor_db);
        return out;
    }

    // Delay axis on integer lags -max_lag..max_lag (seconds)
    inline RVec delay_axis(double fs, int max_lag)
    {
        require(fs > 0.0, "sample rate must be positive");
        require(max_lag >= 0, "max lag must be >= 0");
        RVec a(2 * max_lag + 1);
        for (int i = 0; i < a.size(); ++i)
            a(i) = static_cast<double>(i - max_lag) / fs;
        return a;
    }

    // Default delay span: +-(L-1) lags
    inline RVec default_delay_axis(const WaveformSet &ws) { return delay_axis(ws.sample_rate, static_cast<int>(ws.length()) - 1); }

    // Symmetric Doppler axis; odd counts include zero
    inline RVec doppler_axis(double span, Eigen::Index n)
    {
        require(span > 0.0 || n == 1, "Doppler span must be positive");
        require(n >= 1, "Doppler axis needs at least one point");
        return linspace(-span, span, n);
    }

    // +-2/Tp with 257 points
    inline RVec default_doppler_axis(const WaveformSet &ws) { return doppler_axis(2.0 / ws.pulse_width, 257); }

    // n uniform points over one Doppler period [-fs/2, fs/2); n >= L makes the
    // discrete volume sum exact
    inline RVec full_period_doppler_axis(double fs, Eigen::Index n)
    {
        require(n >= 1, "Doppler axis needs at least one point");
        RVec a(n);
        for (Eigen::Index i = 0; i < n; ++i)
            a(i) = -fs / 2.0 + fs * static_cast<double>(i) / static_cast<double>(n);
        return a;
    }

    namespace detail
    {
        inline std::vector<int> snap_lags(const RVec &taus, double fs)
        {
            std::vector<int> lags(taus.size());
            for (Eigen::Index i = 0; i < taus.size(); ++i)
                lags[i] = static_cast<int>(std::lround(taus(i) * fs));
            for (std::size_t i = 1; i < lags.size(); ++i)
                require(lags[i] > lags[i - 1], "delay axis collapses after snapping to the sample grid");
            return lags;
        }

        inline int fft_size(Eigen::Index len)
        {
            int n = 1;
            while (n < 2 * len - 1)
                n <<= 1;
            return n;
        }

        // Zero-padded forward transform of x[n] * exp(j 2 pi f n / fs)
        inline std::vector<cplx> modulated_fft(Eigen::FFT<double> &fft, const CVec &x, double f, double fs, int nfft)
        {
            std::vector<cplx> in(nfft, cplx{0.0, 0.0});
            for (Eigen::Index n = 0; n < x.size(); ++n)
                in[n] = f == 0.0 ? x(n) : x(n) * cis(2.0 * kPi * f * static_cast<double>(n) / fs);
            std::vector<cplx> out;
            fft.fwd(out, in);
            return out;
        }

        // r[l] = sum_n a[n] conj(b[n - l]) from spectra A, B; result indexed by lag
        inline std::vector<cplx> correlate_spectra(Eigen::FFT<double> &fft, const std::vector<cplx> &A, const std::vector<cplx> &B)
        {
            std::vector<cplx> prod(A.size());
            for (std::size_t i = 0; i < A.size(); ++i)
                prod[i] = A[i] * std::conj(B[i]);
            std::vector<cplx> r;
            fft.inv(r, prod);
            return r;
        }

        inline cplx lag_value(const std::vector<cplx> &r, int lag, int len)
        {
            if (lag <= -len || lag >= len)
                return {0.0, 0.0};
            const int n = static_cast<int>(r.size());
            return r[static_cast<std::size_t>((lag % n + n) % n)];
        }
    } // namespace detail

    // K x K cross-ambiguity entries on a shared delay x Doppler grid.
    // entry(j, k)(l, f) = sum_n phi_j[n] conj(phi_k[n - l]) exp(j 2 pi f n / fs) / fs
    struct CrossAFStack
    {
        RVec delays;                    // s, on the sample grid
        RVec dopplers;                  // Hz
        std::vector<int> lags;          // integer lags matching `delays`
        Eigen::Index k = 0;
        std::vector<CMat> per_doppler;  // one (delays x K*K) block per Doppler bin, column j*K + k

        cplx at(Eigen::Index j, Eigen::Index kk, Eigen::Index di, Eigen::Index fi) const
        {
            return per_doppler[static_cast<std::size_t>(fi)](di, j * k + kk);
        }

        CMat matrix_at_node(Eigen::Index di, Eigen::Index fi) const
        {
            CMat m(k, k);
            for (Eigen::Index j = 0; j < k; ++j)
                for (Eigen::Index kk = 0; kk < k; ++kk)
                    m(j, kk) = at(j, kk, di, fi);
            return m;
        }

        ComplexGrid entry(Eigen::Index j, Eigen::Index kk) const
        {
            require(j >= 0 && j < k && kk >= 0 && kk < k, "cross-AF entry index out of range");
            ComplexGrid g;
            g.axis1 = delays;
            g.axis2 = dopplers;
            g.kind = "woodward-entry";
            g.values.resize(delays.size(), dopplers.size());
            for (Eigen::Index fi = 0; fi < dopplers.size(); ++fi)
                g.values.col(fi) = per_doppler[static_cast<std::size_t>(fi)].col(j * k + kk);
            return g;
        }
    };

    inline CrossAFStack cross_af_matrix(const WaveformSet &ws, const RVec &taus, const RVec &fds)
    {
        require(ws.count() >= 1 && ws.length() >= 2, "waveform set is empty");
        require(taus.size() >= 1 && fds.size() >= 1, "AF axes must be nonempty");
        require(strictly_increasing(taus) && strictly_increasing(fds), "AF axes must be strictly increasing");
        const Eigen::Index K = ws.count();
        const Eigen::Index L = ws.length();
        const double fs = ws.sample_rate;

        CrossAFStack st;
        st.k = K;
        st.lags = detail::snap_lags(taus, fs);
        st.delays.resize(taus.size());
        for (Eigen::Index i = 0; i < taus.size(); ++i)
            st.delays(i) = st.lags[static_cast<std::size_t>(i)] / fs;
        st.dopplers = fds;
        st.per_doppler.assign(static_cast<std::size_t>(fds.size()), CMat());

        const int nfft = detail::fft_size(L);
        std::vector<std::vector<cplx>> base(static_cast<std::size_t>(K));
        {
            Eigen::FFT<double> fft;
            for (Eigen::Index kk = 0; kk < K; ++kk)
                base[static_cast<std::size_t>(kk)] = detail::modulated_fft(fft, ws.samples.row(kk).transpose(), 0.0, fs, nfft);
        }

        parallel_for(static_cast<std::size_t>(fds.size()), [&](std::size_t fi)
                     {
                         Eigen::FFT<double> fft;
                         CMat block(taus.size(), K * K);
                         for (Eigen::Index j = 0; j < K; ++j)
                         {
                             auto A = detail::modulated_fft(fft, ws.samples.row(j).transpose(), fds(static_cast<Eigen::Index>(fi)), fs, nfft);
                             for (Eigen::Index kk = 0; kk < K; ++kk)
                             {
                                 auto r = detail::correlate_spectra(fft, A, base[static_cast<std::size_t>(kk)]);
                                 for (Eigen::Index di = 0; di < taus.size(); ++di)
                                     block(di, j * K + kk) = detail::lag_value(r, st.lags[static_cast<std::size_t>(di)], static_cast<int>(L)) / fs;
                             }
                         }
                         st.per_doppler[fi] = std::move(block); });
        return st;
    }

    // Single-waveform Woodward AF of row `row`
    inline ComplexGrid woodward(const WaveformSet &ws, Eigen::Index row, const RVec &taus, const RVec &fds)
    {
        require(row >= 0 && row < ws.count(), "waveform row out of range");
        WaveformSet one = ws;
        one.samples = ws.samples.row(row);
        return cross_af_matrix(one, taus, fds).entry(0, 0);
    }

    namespace detail
    {
        // Bracketing nodes and weight for v on axis; throws RangeError outside
        inline std::pair<Eigen::Index, double> bracket(const RVec &axis, double v, const char *name)
        {
            if (auto node = find_node(axis, v))
                return {*node, 0.0};
            if (axis.size() < 2 || v < axis(0) || v > axis(axis.size() - 1))
                throw RangeError(std::string(name) + " value " + std::to_string(v) + " outside the sampled axis");
            auto it = std::upper_bound(axis.data(), axis.data() + axis.size(), v);
            const Eigen::Index hi = static_cast<Eigen::Index>(it - axis.data());
            const Eigen::Index lo = hi - 1;
            return {lo, (v - axis(lo)) / (axis(hi) - axis(lo))};
        }
    } // namespace detail

    // K x K cross-AF matrix at (dtau, dfd), bilinear between grid nodes, exact on nodes
    inline CMat eval_at(const CrossAFStack &st, double dtau, double dfd)
    {
        auto [di, wd] = detail::bracket(st.delays, dtau, "delay");
        auto [fi, wf] = detail::bracket(st.dopplers, dfd, "Doppler");
        CMat m = (1.0 - wd) * (1.0 - wf) * st.matrix_at_node(di, fi);
        if (wd > 0.0)
            m += wd * (1.0 - wf) * st.matrix_at_node(di + 1, fi);
        if (wf > 0.0)
            m += (1.0 - wd) * wf * st.matrix_at_node(di, fi + 1);
        if (wd > 0.0 && wf > 0.0)
            m += wd * wf * st.matrix_at_node(di + 1, fi + 1);
        return m;
    }

    // Riemann sum of |values|^2 over the whole grid (uniform spacing assumed)
    inline double grid_volume_abs2(const ComplexGrid &g)
    {
        const double dt = g.axis1.size() > 1 ? (g.axis1(g.axis1.size() - 1) - g.axis1(0)) / static_cast<double>(g.axis1.size() - 1) : 1.0;
        const double df = g.axis2.size() > 1 ? (g.axis2(g.axis2.size() - 1) - g.axis2(0)) / static_cast<double>(g.axis2.size() - 1) : 1.0;
        return g.values.cwiseAbs2().sum() * dt * df;
    }
} // namespace tbaf

#endif
