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

#ifndef TBAF_WAVEFORMS_HPP
#define TBAF_WAVEFORMS_HPP

#include "core.hpp"

#include <numeric>
#include <random>
#include <string>

namespace tbaf
{
    // K sampled baseband pulses, one per row. Each row has unit energy under the
    // Riemann measure dt = 1/fs. The transmit energy is bookkeeping only; it is
    // applied as sqrt(E/K) when ambiguity surfaces are assembled.
    struct WaveformSet
    {
        CMat samples;                  // K x L
        double sample_rate = 0.0;      // Hz
        double pulse_width = 0.0;      // s
        double bandwidth = 0.0;        // Hz
        double energy = 1.0;           // total transmit energy E
        std::string kind;              // "polyphase", "gaussian", "rect" or "custom"
        std::vector<int> roots;        // ZC roots (polyphase only)
        std::uint64_t seed = 0;        // gaussian only

        Eigen::Index count() const { return samples.rows(); }
        Eigen::Index length() const { return samples.cols(); }
        double dt() const { return 1.0 / sample_rate; }

        // First k waveforms, same timing metadata
        WaveformSet head(Eigen::Index k) const
        {
            require(k >= 1 && k <= count(), "waveform subset size out of range");
            WaveformSet out = *this;
            out.samples = samples.topRows(k);
            if (!roots.empty())
                out.roots.assign(roots.begin(), roots.begin() + k);
            return out;
        }
    };

    struct WaveformDiagnostics
    {
        RVec energies;               // per-row Riemann energy
        CMat gram;                   // zero-delay, zero-Doppler inner products
        double max_offdiag = 0.0;    // max |gram(j,k)|, j != k
        double max_energy_error = 0.0;
        bool sample_count_ok = false; // L == round(Tp * fs)
        bool unit_energy_ok = false;  // all energies within 1e-9 of 1
    };

    namespace detail
    {
        inline void normalize_rows(CMat &s, double fs)
        {
            for (Eigen::Index k = 0; k < s.rows(); ++k)
            {
                double e = s.row(k).squaredNorm() / fs;
                require(e > 0.0, "waveform row has zero energy");
                s.row(k) /= std::sqrt(e);
            }
        }

        inline int sample_count(double tp, double fs) { return static_cast<int>(std::lround(tp * fs)); }

        // exp(-j*pi*u*n*(n+1)/L)
        inline CVec zadoff_chu(int root, int len)
        {
            CVec z(len);
            for (int n = 0; n < len; ++n)
            {
                // reduce the phase index modulo 2L before scaling
                const long long idx = (static_cast<long long>(root) * n % (2LL * len)) * (n + 1) % (2LL * len);
                z(n) = cis(-kPi * static_cast<double>(idx) / len);
            }
            return z;
        }

        // Picks K roots coprime to L: root 1 first, then the smallest root that
        // minimizes the largest zero-lag correlation magnitude against the chosen set.
        inline std::vector<int> pick_roots(int count, int len, double &worst)
        {
            std::vector<int> cand;
            for (int u = 1; u < std::max(len, 2); ++u)
                if (std::gcd(u, len) == 1)
                    cand.push_back(u);
            require(static_cast<int>(cand.size()) >= count,
                    "code length " + std::to_string(len) + " has fewer than " + std::to_string(count) + " coprime roots");
            std::vector<CVec> seq;
            seq.reserve(cand.size());
            for (int u : cand)
                seq.push_back(zadoff_chu(u, len));

            std::vector<int> chosen{0};
            std::vector<double> score(cand.size(), 0.0); // running max correlation vs chosen
            worst = 0.0;
            while (static_cast<int>(chosen.size()) < count)
            {
                const CVec &last = seq[chosen.back()];
                for (std::size_t c = 0; c < cand.size(); ++c)
                    score[c] = std::max(score[c], std::abs(last.dot(seq[c])) / len);
                int best = -1;
                for (std::size_t c = 0; c < cand.size(); ++c)
                {
                    if (std::find(chosen.begin(), chosen.end(), static_cast<int>(c)) != chosen.end())
                        continue;
                    if (best < 0 || score[c] < score[best] - 1e-12)
                        best = static_cast<int>(c);
                }
                worst = std::max(worst, score[best]);
                chosen.push_back(best);
            }
            std::vector<int> roots;
            for (int c : chosen)
                roots.push_back(cand[c]);
            return roots;
        }
    } // namespace detail

    // Zadoff-Chu polyphase set. Chips at rate L/Tp, zero-order-hold oversampled
    // by an integer factor >= 1. Throws if the K chosen roots exceed a zero-lag
    // cross-correlation magnitude of 0.1.
    inline WaveformSet gen_polyphase(int count, int code_length, double pulse_width, int oversample, double energy = 1.0)
    {
        require(count >= 1, "waveform count must be >= 1");
        require(code_length >= count, "code length must be >= waveform count");
        require(code_length >= 2 || oversample >= 2, "pulse needs at least two samples");
        require(oversample >= 1, "oversample factor must be >= 1");
        require(pulse_width > 0.0, "pulse width must be positive");
        require(energy > 0.0, "energy must be positive");

        double worst = 0.0;
        auto roots = detail::pick_roots(count, code_length, worst);
        require(worst <= 0.1, "no near-orthogonal root set: zero-lag correlation " + std::to_string(worst) + " > 0.1");

        WaveformSet ws;
        ws.kind = "polyphase";
        ws.roots = roots;
        ws.pulse_width = pulse_width;
        ws.sample_rate = oversample * code_length / pulse_width;
        ws.bandwidth = code_length / pulse_width;
        ws.energy = energy;
        ws.samples.resize(count, static_cast<Eigen::Index>(code_length) * oversample);
        for (int k = 0; k < count; ++k)
        {
            CVec chips = detail::zadoff_chu(roots[k], code_length);
            for (int c = 0; c < code_length; ++c)
                for (int o = 0; o < oversample; ++o)
                    ws.samples(k, static_cast<Eigen::Index>(c) * oversample + o) = chips(c);
        }
        detail::normalize_rows(ws.samples, ws.sample_rate);
        return ws;
    }

    // Oversampling derived from a time-bandwidth target: B = BTp/Tp, fs = 2B,
    // factor = round(fs / chip rate) clamped to >= 1.
    inline WaveformSet gen_polyphase_btp(int count, int code_length, double pulse_width, double time_bandwidth, double energy = 1.0)
    {
        require(time_bandwidth > 0.0, "time-bandwidth product must be positive");
        require(pulse_width > 0.0, "pulse width must be positive");
        const double chip_rate = code_length / pulse_width;
        const double fs_target = 2.0 * time_bandwidth / pulse_width;
        const int os = std::max(1, static_cast<int>(std::lround(fs_target / chip_rate)));
        WaveformSet ws = gen_polyphase(count, code_length, pulse_width, os, energy);
        ws.bandwidth = time_bandwidth / pulse_width;
        return ws;
    }

    // Complex Gaussian rows, unit energy, fs = L/Tp. Bit-identical for a fixed seed
    // within one build (std::mt19937_64 + std::normal_distribution).
    inline WaveformSet gen_gaussian(int count, int length, double pulse_width, std::uint64_t seed, double energy = 1.0)
    {
        require(count >= 1, "waveform count must be >= 1");
        require(length >= 2, "length must be >= 2 samples");
        require(pulse_width > 0.0, "pulse width must be positive");
        require(energy > 0.0, "energy must be positive");
        WaveformSet ws;
        ws.kind = "gaussian";
        ws.seed = seed;
        ws.pulse_width = pulse_width;
        ws.sample_rate = length / pulse_width;
        ws.bandwidth = ws.sample_rate / 2.0;
        ws.energy = energy;
        ws.samples.resize(count, length);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int k = 0; k < count; ++k)
            for (int n = 0; n < length; ++n)
            {
                const double re = g(rng);
                const double im = g(rng);
                ws.samples(k, n) = {re, im};
            }
        detail::normalize_rows(ws.samples, ws.sample_rate);
        return ws;
    }

    // Single rectangular pulse of `length` samples over Tp
    inline WaveformSet gen_rect(int length, double pulse_width, double energy = 1.0)
    {
        require(length >= 2, "length must be >= 2 samples");
        WaveformSet ws;
        ws.kind = "rect";
        ws.pulse_width = pulse_width;
        ws.sample_rate = length / pulse_width;
        ws.bandwidth = ws.sample_rate / 2.0;
        ws.energy = energy;
        ws.samples = CMat::Ones(1, length);
        detail::normalize_rows(ws.samples, ws.sample_rate);
        return ws;
    }

    // Wraps caller-provided samples; rows are renormalized to unit energy
    inline WaveformSet make_waveform_set(CMat samples, double sample_rate, double energy = 1.0)
    {
        require(samples.rows() >= 1 && samples.cols() >= 2, "samples must be K x L with K >= 1, L >= 2");
        require(sample_rate > 0.0, "sample rate must be positive");
        WaveformSet ws;
        ws.kind = "custom";
        ws.sample_rate = sample_rate;
        ws.pulse_width = samples.cols() / sample_rate;
        ws.bandwidth = sample_rate / 2.0;
        ws.energy = energy;
        ws.samples = std::move(samples);
        detail::normalize_rows(ws.samples, ws.sample_rate);
        return ws;
    }

    inline WaveformDiagnostics validate(const WaveformSet &ws)
    {
        WaveformDiagnostics d;
        const Eigen::Index k = ws.count();
        d.energies.resize(k);
        for (Eigen::Index i = 0; i < k; ++i)
            d.energies(i) = ws.samples.row(i).squaredNorm() * ws.dt();
        // gram(j,k) = sum_t phi_j[t] conj(phi_k[t]) dt
        d.gram = ws.samples * ws.samples.adjoint() * ws.dt();
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                if (i != j)
                    d.max_offdiag = std::max(d.max_offdiag, std::abs(d.gram(i, j)));
        d.max_energy_error = k > 0 ? (d.energies.array() - 1.0).abs().maxCoeff() : 0.0;
        d.unit_energy_ok = d.max_energy_error < 1e-9;
        d.sample_count_ok = ws.length() >= 2 && detail::sample_count(ws.pulse_width, ws.sample_rate) == ws.length();
        return d;
    }
} // namespace tbaf

#endif
