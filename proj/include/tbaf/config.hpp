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

#ifndef TBAF_CONFIG_HPP
#define TBAF_CONFIG_HPP

#include "io.hpp"

#include <array>
#include <set>

namespace tbaf
{
    struct WaveformConfig
    {
        std::string family = "polyphase"; // polyphase | gaussian | rect | file
        int count = 8;
        int code_length = 64;
        double pulse_width_s = 10e-6;
        std::optional<double> time_bandwidth; // polyphase: derive oversampling from fs = 2B
        int oversample = 1;
        double energy = 0.0; // resolved to the transmit element count when absent
        std::uint64_t seed = 1;
        std::string path; // family == file

        bool operator==(const WaveformConfig &) const = default;
    };

    struct ArrayConfig
    {
        int tx = 8;
        int rx = 8;
        double fc_hz = 10e9;
        double spacing_m = 0.0; // resolved to half a wavelength when absent
        std::string phase_centers = "auto"; // resolved from the TB mode
        std::vector<std::array<double, 3>> centers;      // explicit
        std::vector<std::vector<int>> groups;            // subarray

        bool operator==(const ArrayConfig &) const = default;
    };

    struct AfControlConfig
    {
        std::vector<double> delays_s{0.0};
        std::vector<std::array<double, 2>> doppler_bands_hz;
        int doppler_points = 13; // per band, endpoints included
        std::vector<double> angles_deg{0.0};
        double delta = 0.3;
        double theta0_deg = 0.0;
        double fd0_hz = 0.0;

        bool operator==(const AfControlConfig &) const = default;
    };

    struct DesignConfig
    {
        std::array<double, 2> sector_deg{-15.0, 15.0};
        int in_points = 61;
        double transition_deg = 10.0;
        int out_points = 80;
        double gamma = 0.38;
        std::optional<AfControlConfig> af;
        std::string on_infeasible = "fail"; // fail | bisect
        int max_passes = 5;

        bool operator==(const DesignConfig &) const = default;
    };

    struct TbConfig
    {
        std::string mode = "identity"; // identity | pa | file | design
        int beams = 0;                 // resolved from the mode when absent
        double pa_angle_deg = 0.0;
        std::string path;
        DesignConfig design;

        bool operator==(const TbConfig &) const = default;
    };

    struct SweepConfig
    {
        std::string type = "delay-doppler"; // delay-doppler | angle-doppler
        double theta_deg = 0.0;
        double tau_s = 0.0;
        double fd_hz = 0.0;
        std::optional<double> theta_prime_deg;
        int max_lag = -1; // resolved to L - 1
        std::array<double, 2> angle_deg{-90.0, 90.0};
        int angle_points = 181;
        double doppler_max_hz = 0.0; // axis covers +-doppler_max_hz; resolved to 2 / Tp
        int doppler_points = 257;

        bool operator==(const SweepConfig &) const = default;
    };

    struct OutputConfig
    {
        std::string dir = "out";
        std::string prefix = "tbaf";
        double db_floor = -120.0;
        std::string normalization = "unit-peak"; // unit-peak | raw
        std::vector<std::string> surfaces{"tb"};  // tb | mimo | pa | sqsum
        bool binary = false;
        bool timing = false;

        bool operator==(const OutputConfig &) const = default;
    };

    struct ScenarioConfig
    {
        std::string name = "scenario";
        WaveformConfig waveform;
        ArrayConfig array;
        TbConfig tb;
        SweepConfig sweep;
        OutputConfig output;

        bool operator==(const ScenarioConfig &) const = default;
    };

    namespace detail
    {
        class Reader
        {
        public:
            std::vector<std::string> issues;

            void keys(const json &obj, const std::string &path, std::initializer_list<const char *> allowed)
            {
                std::set<std::string> ok(allowed.begin(), allowed.end());
                for (auto it = obj.begin(); it != obj.end(); ++it)
                    if (!ok.count(it.key()))
                        issues.push_back(join(path, it.key()) + ": unknown key");
            }

            bool object(const json &obj, const std::string &path)
            {
                if (obj.is_object())
                    return true;
                issues.push_back(path + ": must be an object");
                return false;
            }

            template <typename T>
            void get(const json &obj, const std::string &path, const char *key, T &out)
            {
                auto it = obj.find(key);
                if (it == obj.end())
                    return;
                read(*it, join(path, key), out);
            }

            static std::string join(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }

        private:
            void read(const json &v, const std::string &p, std::string &out)
            {
                v.is_string() ? void(out = v.get<std::string>()) : issues.push_back(p + ": must be a string");
            }
            void read(const json &v, const std::string &p, bool &out)
            {
                v.is_boolean() ? void(out = v.get<bool>()) : issues.push_back(p + ": must be a boolean");
            }
            void read(const json &v, const std::string &p, double &out)
            {
                v.is_number() ? void(out = v.get<double>()) : issues.push_back(p + ": must be a number");
            }
            void read(const json &v, const std::string &p, int &out)
            {
                v.is_number_integer() ? void(out = v.get<int>()) : issues.push_back(p + ": must be an integer");
            }
            void read(const json &v, const std::string &p, std::uint64_t &out)
            {
                v.is_number_unsigned() ? void(out = v.get<std::uint64_t>()) : issues.push_back(p + ": must be a non-negative integer");
            }
            template <typename T>
            void read(const json &v, const std::string &p, std::optional<T> &out)
            {
                if (v.is_null())
                {
                    out.reset();
                    return;
                }
                T tmp{};
                const auto before = issues.size();
                read(v, p, tmp);
                if (issues.size() == before)
                    out = tmp;
            }
            template <typename T, std::size_t N>
            void read(const json &v, const std::string &p, std::array<T, N> &out)
            {
                if (!v.is_array() || v.size() != N)
                {
                    issues.push_back(p + ": must be an array of " + std::to_string(N));
                    return;
                }
                for (std::size_t i = 0; i < N; ++i)
                    read(v[i], p + "[" + std::to_string(i) + "]", out[i]);
            }
            template <typename T>
            void read(const json &v, const std::string &p, std::vector<T> &out)
            {
                if (!v.is_array())
                {
                    issues.push_back(p + ": must be an array");
                    return;
                }
                out.assign(v.size(), T{});
                for (std::size_t i = 0; i < v.size(); ++i)
                    read(v[i], p + "[" + std::to_string(i) + "]", out[i]);
            }
        };

        inline void check(std::vector<std::string> &issues, bool ok, const std::string &path, const std::string &msg)
        {
            if (!ok)
                issues.push_back(path + ": " + msg);
        }

        inline bool one_of(const std::string &v, std::initializer_list<const char *> allowed)
        {
            for (const char *a : allowed)
                if (v == a)
                    return true;
            return false;
        }

        inline void read_af_control(Reader &r, const json &j, AfControlConfig &a)
        {
            const std::string p = "tb.design.af";
            if (!r.object(j, p))
                return;
            r.keys(j, p, {"delays_s", "doppler_bands_hz", "doppler_points", "angles_deg", "delta", "theta0_deg", "fd0_hz"});
            r.get(j, p, "delays_s", a.delays_s);
            r.get(j, p, "doppler_bands_hz", a.doppler_bands_hz);
            r.get(j, p, "doppler_points", a.doppler_points);
            r.get(j, p, "angles_deg", a.angles_deg);
            r.get(j, p, "delta", a.delta);
            r.get(j, p, "theta0_deg", a.theta0_deg);
            r.get(j, p, "fd0_hz", a.fd0_hz);
        }

        inline void read_blocks(Reader &r, const json &root, ScenarioConfig &c, bool &has_sweep)
        {
            if (!r.object(root, "(root)"))
                return;
            r.keys(root, "", {"name", "waveform", "array", "tb", "sweep", "output"});
            r.get(root, "", "name", c.name);

            if (auto it = root.find("waveform"); it != root.end() && r.object(*it, "waveform"))
            {
                const json &j = *it;
                auto &w = c.waveform;
                r.keys(j, "waveform", {"family", "count", "code_length", "pulse_width_s", "time_bandwidth", "oversample", "energy", "seed", "path"});
                r.get(j, "waveform", "family", w.family);
                r.get(j, "waveform", "count", w.count);
                r.get(j, "waveform", "code_length", w.code_length);
                r.get(j, "waveform", "pulse_width_s", w.pulse_width_s);
                r.get(j, "waveform", "time_bandwidth", w.time_bandwidth);
                r.get(j, "waveform", "oversample", w.oversample);
                r.get(j, "waveform", "energy", w.energy);
                r.get(j, "waveform", "seed", w.seed);
                r.get(j, "waveform", "path", w.path);
            }
            if (auto it = root.find("array"); it != root.end() && r.object(*it, "array"))
            {
                const json &j = *it;
                auto &a = c.array;
                r.keys(j, "array", {"tx", "rx", "fc_hz", "spacing_m", "phase_centers", "centers", "groups"});
                r.get(j, "array", "tx", a.tx);
                r.get(j, "array", "rx", a.rx);
                r.get(j, "array", "fc_hz", a.fc_hz);
                r.get(j, "array", "spacing_m", a.spacing_m);
                r.get(j, "array", "phase_centers", a.phase_centers);
                r.get(j, "array", "centers", a.centers);
                r.get(j, "array", "groups", a.groups);
            }
            if (auto it = root.find("tb"); it != root.end() && r.object(*it, "tb"))
            {
                const json &j = *it;
                auto &t = c.tb;
                r.keys(j, "tb", {"mode", "beams", "pa_angle_deg", "path", "design"});
                r.get(j, "tb", "mode", t.mode);
                r.get(j, "tb", "beams", t.beams);
                r.get(j, "tb", "pa_angle_deg", t.pa_angle_deg);
                r.get(j, "tb", "path", t.path);
                if (auto d = j.find("design"); d != j.end() && r.object(*d, "tb.design"))
                {
                    auto &ds = t.design;
                    const std::string p = "tb.design";
                    r.keys(*d, p, {"sector_deg", "in_points", "transition_deg", "out_points", "gamma", "af", "on_infeasible", "max_passes"});
                    r.get(*d, p, "sector_deg", ds.sector_deg);
                    r.get(*d, p, "in_points", ds.in_points);
                    r.get(*d, p, "transition_deg", ds.transition_deg);
                    r.get(*d, p, "out_points", ds.out_points);
                    r.get(*d, p, "gamma", ds.gamma);
                    r.get(*d, p, "on_infeasible", ds.on_infeasible);
                    r.get(*d, p, "max_passes", ds.max_passes);
                    if (auto a = d->find("af"); a != d->end() && !a->is_null())
                    {
                        ds.af.emplace();
                        read_af_control(r, *a, *ds.af);
                    }
                }
            }
            if (auto it = root.find("sweep"); it != root.end() && r.object(*it, "sweep"))
            {
                const json &j = *it;
                auto &s = c.sweep;
                has_sweep = !j.empty();
                r.keys(j, "sweep", {"type", "theta_deg", "tau_s", "fd_hz", "theta_prime_deg", "max_lag", "angle_deg", "angle_points",
                                    "doppler_max_hz", "doppler_points"});
                r.get(j, "sweep", "type", s.type);
                r.get(j, "sweep", "theta_deg", s.theta_deg);
                r.get(j, "sweep", "tau_s", s.tau_s);
                r.get(j, "sweep", "fd_hz", s.fd_hz);
                r.get(j, "sweep", "theta_prime_deg", s.theta_prime_deg);
                r.get(j, "sweep", "max_lag", s.max_lag);
                r.get(j, "sweep", "angle_deg", s.angle_deg);
                r.get(j, "sweep", "angle_points", s.angle_points);
                r.get(j, "sweep", "doppler_max_hz", s.doppler_max_hz);
                r.get(j, "sweep", "doppler_points", s.doppler_points);
            }
            if (auto it = root.find("output"); it != root.end() && r.object(*it, "output"))
            {
                const json &j = *it;
                auto &o = c.output;
                r.keys(j, "output", {"dir", "prefix", "db_floor", "normalization", "surfaces", "binary", "timing"});
                r.get(j, "output", "dir", o.dir);
                r.get(j, "output", "prefix", o.prefix);
                r.get(j, "output", "db_floor", o.db_floor);
                r.get(j, "output", "normalization", o.normalization);
                r.get(j, "output", "surfaces", o.surfaces);
                r.get(j, "output", "binary", o.binary);
                r.get(j, "output", "timing", o.timing);
            }
        }

        // Fills defaults that depend on other blocks
        inline void resolve(ScenarioConfig &c)
        {
            if (c.waveform.energy == 0.0)
                c.waveform.energy = c.array.tx;
            if (c.array.spacing_m == 0.0 && c.array.fc_hz > 0.0)
                c.array.spacing_m = 0.5 * kSpeedOfLight / c.array.fc_hz;
            if (c.tb.beams == 0)
            {
                if (c.tb.mode == "identity")
                    c.tb.beams = c.array.tx;
                else if (c.tb.mode == "pa")
                    c.tb.beams = 1;
                else
                    c.tb.beams = 4;
            }
            if (c.array.phase_centers == "auto")
            {
                if (c.tb.mode == "identity")
                    c.array.phase_centers = "element";
                else if (c.tb.mode == "pa")
                    c.array.phase_centers = "reference";
                else
                    c.array.phase_centers = "centroid";
            }
            if (c.sweep.doppler_max_hz == 0.0 && c.waveform.pulse_width_s > 0.0)
                c.sweep.doppler_max_hz = 2.0 / c.waveform.pulse_width_s;
        }

        // Samples per pulse implied by the waveform block (0 when only known after loading a file)
        inline long pulse_samples(const WaveformConfig &w)
        {
            if (w.family == "file")
                return 0;
            if (w.family == "polyphase" && w.time_bandwidth && w.pulse_width_s > 0.0 && w.code_length > 0)
            {
                const double chip_rate = w.code_length / w.pulse_width_s;
                const long os = std::max(1L, std::lround(2.0 * *w.time_bandwidth / w.pulse_width_s / chip_rate));
                return os * w.code_length;
            }
            return static_cast<long>(w.code_length) * (w.family == "polyphase" ? w.oversample : 1);
        }

        inline void validate(const ScenarioConfig &c, bool has_sweep, std::vector<std::string> &is)
        {
            const auto &w = c.waveform;
            check(is, one_of(w.family, {"polyphase", "gaussian", "rect", "file"}), "waveform.family", "must be polyphase, gaussian, rect or file");
            check(is, w.count >= 1, "waveform.count", "must be >= 1");
            check(is, w.family == "file" || w.code_length >= 2, "waveform.code_length", "must be >= 2");
            check(is, w.pulse_width_s > 0.0, "waveform.pulse_width_s", "must be > 0");
            check(is, !w.time_bandwidth || *w.time_bandwidth > 0.0, "waveform.time_bandwidth", "must be > 0");
            check(is, w.oversample >= 1, "waveform.oversample", "must be >= 1");
            check(is, w.energy > 0.0, "waveform.energy", "must be > 0");
            check(is, w.family != "file" || !w.path.empty(), "waveform.path", "required when family is file");
            check(is, w.family != "rect" || w.count == 1, "waveform.count", "rect family produces a single waveform");
            check(is, w.family != "polyphase" || w.code_length >= w.count, "waveform.code_length", "must be >= waveform.count for polyphase codes");

            const auto &a = c.array;
            check(is, a.tx >= 1, "array.tx", "must be >= 1");
            check(is, a.rx >= 1, "array.rx", "must be >= 1");
            check(is, a.fc_hz > 0.0, "array.fc_hz", "must be > 0");
            check(is, a.spacing_m > 0.0, "array.spacing_m", "must be > 0");
            check(is, one_of(a.phase_centers, {"element", "reference", "centroid", "explicit", "subarray"}), "array.phase_centers",
                  "must be auto, element, reference, centroid, explicit or subarray");

            const auto &t = c.tb;
            check(is, one_of(t.mode, {"identity", "pa", "file", "design"}), "tb.mode", "must be identity, pa, file or design");
            check(is, t.beams >= 1, "tb.beams", "must be >= 1");
            check(is, t.mode != "identity" || t.beams == a.tx, "tb.beams", "identity TB needs beams == array.tx");
            check(is, t.mode != "pa" || t.beams == 1, "tb.beams", "pa TB has a single beam");
            check(is, t.beams <= a.tx || t.mode == "file", "tb.beams", "must be <= array.tx");
            check(is, w.family == "file" || t.beams <= w.count, "tb.beams", "exceeds waveform.count");
            check(is, t.mode != "file" || !t.path.empty(), "tb.path", "required when mode is file");
            if (a.phase_centers == "element")
                check(is, t.beams == a.tx, "array.phase_centers", "element phase centers need tb.beams == array.tx");
            if (a.phase_centers == "reference")
                check(is, t.beams == 1, "array.phase_centers", "reference phase center needs tb.beams == 1");
            if (a.phase_centers == "explicit")
                check(is, static_cast<int>(a.centers.size()) == t.beams, "array.centers", "needs one [x, y, z] per beam");
            if (a.phase_centers == "subarray")
            {
                check(is, static_cast<int>(a.groups.size()) == t.beams, "array.groups", "needs one index group per beam");
                for (std::size_t g = 0; g < a.groups.size(); ++g)
                    for (int idx : a.groups[g])
                        check(is, idx >= 0 && idx < a.tx, "array.groups[" + std::to_string(g) + "]", "element index out of range");
            }

            if (t.mode == "design")
            {
                const auto &d = t.design;
                const std::string p = "tb.design";
                check(is, d.sector_deg[0] < d.sector_deg[1] && d.sector_deg[0] >= -90.0 && d.sector_deg[1] <= 90.0, p + ".sector_deg",
                      "must be an increasing pair inside [-90, 90]");
                check(is, d.in_points >= 2, p + ".in_points", "must be >= 2");
                check(is, d.transition_deg >= 0.0, p + ".transition_deg", "must be >= 0");
                check(is, d.out_points >= 2, p + ".out_points", "must be >= 2");
                check(is, d.gamma > 0.0, p + ".gamma", "must be > 0");
                check(is, one_of(d.on_infeasible, {"fail", "bisect"}), p + ".on_infeasible", "must be fail or bisect");
                check(is, d.max_passes >= 1, p + ".max_passes", "must be >= 1");
                if (d.af)
                {
                    const std::string q = p + ".af";
                    check(is, !d.af->delays_s.empty(), q + ".delays_s", "must not be empty");
                    check(is, !d.af->doppler_bands_hz.empty(), q + ".doppler_bands_hz", "must not be empty");
                    for (std::size_t b = 0; b < d.af->doppler_bands_hz.size(); ++b)
                        check(is, d.af->doppler_bands_hz[b][0] <= d.af->doppler_bands_hz[b][1], q + ".doppler_bands_hz[" + std::to_string(b) + "]",
                              "must be an increasing pair");
                    check(is, d.af->doppler_points >= 1, q + ".doppler_points", "must be >= 1");
                    check(is, !d.af->angles_deg.empty(), q + ".angles_deg", "must not be empty");
                    check(is, d.af->delta > 0.0, q + ".delta", "must be > 0");
                    check(is, a.phase_centers == "centroid" || a.phase_centers == "explicit" || a.phase_centers == "subarray",
                          "array.phase_centers", "AF-constrained design needs centroid, explicit or subarray phase centers");
                }
            }

            const auto &s = c.sweep;
            check(is, has_sweep, "sweep", "block is required and must not be empty");
            check(is, one_of(s.type, {"delay-doppler", "angle-doppler"}), "sweep.type", "must be delay-doppler or angle-doppler");
            check(is, s.doppler_points >= 1, "sweep.doppler_points", "sweep is empty: must be >= 1");
            check(is, s.doppler_max_hz >= 0.0, "sweep.doppler_max_hz", "must be >= 0");
            check(is, s.doppler_points == 1 || s.doppler_max_hz > 0.0, "sweep.doppler_max_hz", "must be > 0 for more than one point");
            if (s.type == "angle-doppler")
            {
                check(is, s.angle_points >= 1, "sweep.angle_points", "sweep is empty: must be >= 1");
                check(is, s.angle_deg[0] <= s.angle_deg[1] && s.angle_deg[0] >= -90.0 && s.angle_deg[1] <= 90.0, "sweep.angle_deg",
                      "must be a non-decreasing pair inside [-90, 90]");
                check(is, s.angle_points == 1 || s.angle_deg[0] < s.angle_deg[1], "sweep.angle_deg", "needs lo < hi for more than one point");
            }
            else
            {
                const long l = pulse_samples(w);
                check(is, s.max_lag >= -1, "sweep.max_lag", "must be >= 0 (or -1 for L - 1)");
                check(is, l == 0 || s.max_lag < l, "sweep.max_lag", "must be < pulse length " + std::to_string(l));
            }

            const auto &o = c.output;
            check(is, !o.prefix.empty(), "output.prefix", "must not be empty");
            check(is, one_of(o.normalization, {"unit-peak", "raw"}), "output.normalization", "must be unit-peak or raw");
            check(is, o.db_floor < 0.0, "output.db_floor", "must be < 0");
            check(is, !o.surfaces.empty(), "output.surfaces", "must list at least one surface");
            std::set<std::string> seen;
            for (std::size_t i = 0; i < o.surfaces.size(); ++i)
            {
                const std::string p = "output.surfaces[" + std::to_string(i) + "]";
                check(is, one_of(o.surfaces[i], {"tb", "mimo", "pa", "sqsum"}), p, "must be tb, mimo, pa or sqsum");
                check(is, seen.insert(o.surfaces[i]).second, p, "duplicate surface");
                if (o.surfaces[i] == "mimo")
                    check(is, w.family == "file" || w.count >= a.tx, p, "mimo surface needs waveform.count >= array.tx");
            }
        }
    } // namespace detail

    // Parses and validates; every violation is reported in one ConfigError.
    inline ScenarioConfig parse_config(const std::string &text, const std::string &origin = "<config>")
    {
        json root;
        try
        {
            root = json::parse(text, nullptr, true, true);
        }
        catch (const json::parse_error &e)
        {
            // nlohmann reports "parse error at line L, column C: ..."
            std::string msg = e.what();
            if (auto p = msg.find("parse error"); p != std::string::npos)
                msg = msg.substr(p);
            throw ConfigError({origin + ": " + msg});
        }
        ScenarioConfig c;
        detail::Reader r;
        bool has_sweep = false;
        detail::read_blocks(r, root, c, has_sweep);
        if (root.is_object() && !root.contains("sweep"))
            r.issues.push_back("sweep: block is required");
        if (r.issues.empty())
        {
            detail::resolve(c);
            detail::validate(c, has_sweep, r.issues);
        }
        if (!r.issues.empty())
        {
            for (auto &s : r.issues)
                s = origin + ": " + s;
            throw ConfigError(r.issues);
        }
        return c;
    }

    inline ScenarioConfig load_config(const std::filesystem::path &path)
    {
        std::string text;
        try
        {
            text = slurp(path);
        }
        catch (const Error &e)
        {
            throw ConfigError({e.what()});
        }
        return parse_config(text, path.string());
    }

    // Fully expanded form; parse_config(to_json(c).dump()) == c
    inline json to_json(const ScenarioConfig &c)
    {
        auto opt = [](const auto &o) -> json { return o ? json(*o) : json(nullptr); };
        json design = {{"sector_deg", c.tb.design.sector_deg},
                       {"in_points", c.tb.design.in_points},
                       {"transition_deg", c.tb.design.transition_deg},
                       {"out_points", c.tb.design.out_points},
                       {"gamma", c.tb.design.gamma},
                       {"on_infeasible", c.tb.design.on_infeasible},
                       {"max_passes", c.tb.design.max_passes},
                       {"af", nullptr}};
        if (const auto &a = c.tb.design.af)
            design["af"] = {{"delays_s", a->delays_s},
                            {"doppler_bands_hz", a->doppler_bands_hz},
                            {"doppler_points", a->doppler_points},
                            {"angles_deg", a->angles_deg},
                            {"delta", a->delta},
                            {"theta0_deg", a->theta0_deg},
                            {"fd0_hz", a->fd0_hz}};
        return {{"name", c.name},
                {"waveform",
                 {{"family", c.waveform.family},
                  {"count", c.waveform.count},
                  {"code_length", c.waveform.code_length},
                  {"pulse_width_s", c.waveform.pulse_width_s},
                  {"time_bandwidth", opt(c.waveform.time_bandwidth)},
                  {"oversample", c.waveform.oversample},
                  {"energy", c.waveform.energy},
                  {"seed", c.waveform.seed},
                  {"path", c.waveform.path}}},
                {"array",
                 {{"tx", c.array.tx},
                  {"rx", c.array.rx},
                  {"fc_hz", c.array.fc_hz},
                  {"spacing_m", c.array.spacing_m},
                  {"phase_centers", c.array.phase_centers},
                  {"centers", c.array.centers},
                  {"groups", c.array.groups}}},
                {"tb",
                 {{"mode", c.tb.mode},
                  {"beams", c.tb.beams},
                  {"pa_angle_deg", c.tb.pa_angle_deg},
                  {"path", c.tb.path},
                  {"design", design}}},
                {"sweep",
                 {{"type", c.sweep.type},
                  {"theta_deg", c.sweep.theta_deg},
                  {"tau_s", c.sweep.tau_s},
                  {"fd_hz", c.sweep.fd_hz},
                  {"theta_prime_deg", opt(c.sweep.theta_prime_deg)},
                  {"max_lag", c.sweep.max_lag},
                  {"angle_deg", c.sweep.angle_deg},
                  {"angle_points", c.sweep.angle_points},
                  {"doppler_max_hz", c.sweep.doppler_max_hz},
                  {"doppler_points", c.sweep.doppler_points}}},
                {"output",
                 {{"dir", c.output.dir},
                  {"prefix", c.output.prefix},
                  {"db_floor", c.output.db_floor},
                  {"normalization", c.output.normalization},
                  {"surfaces", c.output.surfaces},
                  {"binary", c.output.binary},
                  {"timing", c.output.timing}}}};
    }

    // Hash of the expanded configuration, independent of key order, formatting and output directory
    inline std::string config_hash(const ScenarioConfig &c)
    {
        json j = to_json(c);
        j["output"].erase("dir");
        return hex64(fnv1a64(j.dump()));
    }

    inline std::vector<std::string> preset_names() { return {"paper-fig1", "paper-fig2", "paper-fig3", "paper-fig4"}; }

    // M = N = 8 half-wavelength ULAs, E = M, single-pulse ZC codes of 512 samples,
    // Tp = 60 us, BTp = 256, fs = 2B; sector [-15, 15] deg with 10 deg transitions.
    inline ScenarioConfig preset(const std::string &name)
    {
        ScenarioConfig c;
        c.name = name;
        c.waveform.family = "polyphase";
        c.waveform.count = 8;
        c.waveform.code_length = 512;
        c.waveform.pulse_width_s = 60e-6;
        c.waveform.time_bandwidth = 256.0;
        c.array.tx = 8;
        c.array.rx = 8;
        c.tb.mode = "design";
        c.tb.beams = 4;
        c.output.prefix = name;

        AfControlConfig doppler_control;
        doppler_control.doppler_bands_hz = {{-30e3, -18e3}, {18e3, 30e3}};
        doppler_control.delta = 0.3;

        if (name == "paper-fig1")
        {
            c.tb.design.gamma = 0.1;
            c.tb.design.af = doppler_control;
            c.tb.design.on_infeasible = "bisect";
            c.sweep.type = "delay-doppler";
            c.output.surfaces = {"sqsum", "mimo", "tb"};
        }
        else if (name == "paper-fig2")
        {
            c.tb.design.gamma = 0.38;
            c.sweep.type = "delay-doppler";
        }
        else if (name == "paper-fig3")
        {
            c.tb.design.gamma = 0.2;
            c.sweep.type = "angle-doppler";
            c.sweep.doppler_max_hz = 50e3;
            c.sweep.doppler_points = 201;
        }
        else if (name == "paper-fig4")
        {
            c.tb.design.gamma = 0.1;
            c.tb.design.af = doppler_control;
            c.sweep.type = "angle-doppler";
            c.sweep.doppler_max_hz = 50e3;
            c.sweep.doppler_points = 201;
        }
        else
            throw ConfigError({"unknown preset '" + name + "' (expected paper-fig1..paper-fig4)"});
        detail::resolve(c);
        std::vector<std::string> issues;
        detail::validate(c, true, issues);
        if (!issues.empty())
            throw ConfigError(issues);
        return c;
    }
} // namespace tbaf

#endif
