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

#ifndef TBAF_PIPELINE_HPP
#define TBAF_PIPELINE_HPP

#include "config.hpp"
#include "tb_design.hpp"

#include <chrono>
#include <map>

namespace tbaf
{
    // Failure inside one pipeline stage
    class StageError : public Error
    {
    public:
        StageError(std::string stage, const std::string &what)
            : Error(stage + ": " + what), stage_(std::move(stage)) {}
        const std::string &stage() const noexcept { return stage_; }

    private:
        std::string stage_;
    };

    // The TB design program has no solution for the configured constraints
    class InfeasibleError : public Error
    {
    public:
        InfeasibleError(const std::string &what, DesignResult r)
            : Error(what), result(std::move(r)) {}
        DesignResult result;
    };

    inline WaveformSet build_waveforms(const ScenarioConfig &c)
    {
        const auto &w = c.waveform;
        WaveformSet ws;
        if (w.family == "polyphase")
            ws = w.time_bandwidth ? gen_polyphase_btp(w.count, w.code_length, w.pulse_width_s, *w.time_bandwidth, w.energy)
                                  : gen_polyphase(w.count, w.code_length, w.pulse_width_s, w.oversample, w.energy);
        else if (w.family == "gaussian")
            ws = gen_gaussian(w.count, w.code_length, w.pulse_width_s, w.seed, w.energy);
        else if (w.family == "rect")
            ws = gen_rect(w.code_length, w.pulse_width_s, w.energy);
        else
        {
            ws = waveforms_from_json(read_json(w.path));
            ws.energy = w.energy;
        }

        std::vector<std::string> issues;
        if (ws.count() < c.tb.beams)
            issues.push_back("waveform: set holds " + std::to_string(ws.count()) + " waveforms, tb.beams needs " + std::to_string(c.tb.beams));
        for (const auto &s : c.output.surfaces)
            if (s == "mimo" && ws.count() < c.array.tx)
                issues.push_back("output.surfaces: mimo needs " + std::to_string(c.array.tx) + " waveforms, set holds " + std::to_string(ws.count()));
        if (c.sweep.type == "delay-doppler" && c.sweep.max_lag >= ws.length())
            issues.push_back("sweep.max_lag: must be < pulse length " + std::to_string(ws.length()));
        if (!issues.empty())
            throw ConfigError(issues);
        return ws;
    }

    inline ArrayScenario build_array(const ScenarioConfig &c)
    {
        return ula(c.array.tx, c.array.rx, c.array.fc_hz, c.array.spacing_m);
    }

    inline ArrayScenario apply_phase_centers(const ScenarioConfig &c, const ArrayScenario &sc, const CMat &C)
    {
        const PhaseCenterMode mode = phase_center_mode_from_string(c.array.phase_centers);
        PhaseCenterPayload p;
        if (mode == PhaseCenterMode::explicit_)
        {
            p.centers.resize(static_cast<Eigen::Index>(c.array.centers.size()), 3);
            for (std::size_t k = 0; k < c.array.centers.size(); ++k)
                for (int d = 0; d < 3; ++d)
                    p.centers(static_cast<Eigen::Index>(k), d) = c.array.centers[k][static_cast<std::size_t>(d)];
        }
        for (const auto &g : c.array.groups)
            p.groups.emplace_back(g.begin(), g.end());
        p.weights = C;
        return set_phase_centers(sc, mode, p);
    }

    inline CVec pa_weights(const ScenarioConfig &c, const ArrayScenario &sc)
    {
        return steering_t(sc, at_angle(deg2rad(c.tb.pa_angle_deg))) / std::sqrt(static_cast<double>(sc.num_tx()));
    }

    // Control Doppler offsets: doppler_points per band, endpoints included, sorted and de-duplicated
    inline RVec control_dopplers(const AfControlConfig &a)
    {
        std::vector<double> v;
        for (const auto &b : a.doppler_bands_hz)
        {
            const RVec pts = linspace(b[0], b[1], a.doppler_points);
            v.insert(v.end(), pts.data(), pts.data() + pts.size());
        }
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return Eigen::Map<RVec>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    inline DesignSpec design_spec(const ScenarioConfig &c, const WaveformSet &ws)
    {
        const auto &d = c.tb.design;
        DesignSpec s;
        s.beams = c.tb.beams;
        s.sector_lo = deg2rad(d.sector_deg[0]);
        s.sector_hi = deg2rad(d.sector_deg[1]);
        s.in_points = d.in_points;
        s.transition = deg2rad(d.transition_deg);
        s.out_points = d.out_points;
        s.gamma = d.gamma;
        if (d.af)
        {
            AfControl a;
            // control delays sit on the sample grid of the waveform set
            a.delays.resize(static_cast<Eigen::Index>(d.af->delays_s.size()));
            for (std::size_t i = 0; i < d.af->delays_s.size(); ++i)
                a.delays(static_cast<Eigen::Index>(i)) = std::round(d.af->delays_s[i] * ws.sample_rate) / ws.sample_rate;
            a.dopplers = control_dopplers(*d.af);
            a.angles.resize(static_cast<Eigen::Index>(d.af->angles_deg.size()));
            for (std::size_t i = 0; i < d.af->angles_deg.size(); ++i)
                a.angles(static_cast<Eigen::Index>(i)) = deg2rad(d.af->angles_deg[i]);
            a.delta = d.af->delta;
            a.theta0 = deg2rad(d.af->theta0_deg);
            a.fd0 = d.af->fd0_hz;
            s.af = a;
        }
        s.bisect_delta = d.on_infeasible == "bisect";
        return s;
    }

    inline json design_report(const DesignResult &r)
    {
        json slack = json::array();
        for (const auto &s : r.slacks)
            slack.push_back({{"group", s.group}, {"index", s.index}, {"value", s.value}, {"bound", s.bound}, {"slack", s.slack}});
        json j = {{"mode", r.mode},
                  {"status", to_string(r.status)},
                  {"solver_status", socp::to_string(r.solver_status)},
                  {"iterations", r.iterations},
                  {"objective", r.objective},
                  {"min_slack", r.min_slack},
                  {"phase_center_passes", r.phase_center_passes},
                  {"phase_center_shift_m", r.phase_center_shift},
                  {"slacks", slack}};
        if (!r.certificate.empty())
            j["certificate"] = r.certificate;
        if (!r.binding.empty())
            j["binding"] = r.binding;
        if (r.smallest_delta)
            j["smallest_feasible_delta"] = *r.smallest_delta;
        return j;
    }

    struct TbOutcome
    {
        TBMatrix tb;
        ArrayScenario scenario; // phase centers matching tb
        std::optional<DesignResult> design;
        json report = json::object();
    };

    inline TbOutcome build_tb(const ScenarioConfig &c, const WaveformSet &ws, const ArrayScenario &sc)
    {
        TbOutcome out;
        const auto &t = c.tb;
        if (t.mode == "identity")
            out.tb = identity_tb(sc.num_tx());
        else if (t.mode == "pa")
            out.tb = pa_tb(pa_weights(c, sc));
        else if (t.mode == "file")
        {
            out.tb = tb_from_json(read_json(t.path));
            if (out.tb.C.rows() != c.array.tx || out.tb.C.cols() != t.beams)
                throw ConfigError({"tb.path: matrix is " + std::to_string(out.tb.C.rows()) + " x " + std::to_string(out.tb.C.cols()) +
                                   ", config expects " + std::to_string(c.array.tx) + " x " + std::to_string(t.beams)});
        }
        else
        {
            DesignSpec spec = design_spec(c, ws);
            DesignResult r;
            if (!spec.af)
                r = design_spatial(spec, sc);
            else
            {
                const WaveformSet head = ws.head(t.beams);
                const CrossAFStack stack = cross_af_matrix(head, spec.af->delays, spec.af->dopplers);
                const bool centroid = c.array.phase_centers == "centroid";
                auto solve = [&](const DesignSpec &s)
                {
                    return centroid ? design_af_with_centroids(s, sc, stack, c.tb.design.max_passes)
                                    : design_af_constrained(s, apply_phase_centers(c, sc, CMat::Zero(sc.num_tx(), t.beams)), stack);
                };
                r = solve(spec);
                out.report["requested_delta"] = spec.af->delta;
                if (!r.ok() && r.status == DesignStatus::infeasible && r.smallest_delta)
                {
                    // fall back to just above the smallest feasible bound
                    const double smallest = *r.smallest_delta;
                    spec.af->delta = 1.02 * smallest;
                    spec.bisect_delta = false;
                    r = solve(spec);
                    r.smallest_delta = smallest;
                    out.report["fallback"] = "bisect";
                }
                out.report["used_delta"] = spec.af->delta;
            }
            out.report["design"] = design_report(r);
            if (!r.ok())
            {
                std::string msg = "TB design " + to_string(r.status);
                if (!r.binding.empty())
                {
                    msg += " (binding:";
                    for (const auto &b : r.binding)
                        msg += " " + b;
                    msg += ")";
                }
                if (r.smallest_delta)
                    msg += "; smallest feasible delta " + fmt_double(*r.smallest_delta);
                if (r.status == DesignStatus::infeasible)
                    throw InfeasibleError(msg, r);
                throw Error(msg);
            }
            out.tb = r.tb;
            if (spec.af && c.array.phase_centers == "centroid")
                out.scenario = r.scenario;
            out.design = std::move(r);
        }
        if (out.scenario.q_te.rows() == 0)
            out.scenario = apply_phase_centers(c, sc, out.tb.C);
        return out;
    }

    inline AFQuery build_query(const ScenarioConfig &c, const WaveformSet &ws)
    {
        const auto &s = c.sweep;
        AFQuery q;
        q.theta = at_angle(deg2rad(s.theta_deg), s.fd_hz, s.tau_s);
        if (s.theta_prime_deg)
            q.theta_prime = deg2rad(*s.theta_prime_deg);
        q.dopplers = doppler_axis(s.doppler_max_hz, s.doppler_points);
        if (s.type == "angle-doppler")
        {
            q.sweep = Sweep::angle_doppler;
            q.axis1 = linspace(deg2rad(s.angle_deg[0]), deg2rad(s.angle_deg[1]), s.angle_points);
        }
        else
        {
            q.sweep = Sweep::delay_doppler;
            q.axis1 = delay_axis(ws.sample_rate, s.max_lag < 0 ? static_cast<int>(ws.length()) - 1 : s.max_lag);
        }
        return q;
    }

    inline AFGrid compute_surface(const std::string &name, const ScenarioConfig &c, const WaveformSet &ws, const ArrayScenario &sc,
                                  const TbOutcome &tb, const AFQuery &q)
    {
        if (name == "tb")
            return tb_af(tb.scenario, ws.head(c.tb.beams), tb.tb, q);
        if (name == "mimo")
            return mimo_af(sc, ws.head(sc.num_tx()), q);
        if (name == "pa")
            return pa_af(sc, ws.head(1), pa_weights(c, sc), q);
        return square_summation_af(set_phase_centers(sc, PhaseCenterMode::element), ws, q);
    }

    // Node of `axis` closest to v
    inline double nearest_node(const RVec &axis, double v)
    {
        Eigen::Index best = 0;
        (axis.array() - v).abs().minCoeff(&best);
        return axis(best);
    }

    struct PipelineResult
    {
        std::string config_hash;
        WaveformSet waveforms;
        ArrayScenario array;
        TbOutcome tb;
        AFQuery query;
        std::map<std::string, AFGrid> surfaces;
        std::map<std::string, std::pair<Cut, Cut>> cuts; // (Doppler cut, axis1 cut)
        std::vector<std::filesystem::path> files;
        json metadata;
    };

    struct PipelineOptions
    {
        bool write = true;
    };

    namespace detail
    {
        template <typename Fn>
        auto stage(const std::string &name, std::vector<std::pair<std::string, double>> &timing, Fn &&fn)
        {
            const auto t0 = std::chrono::steady_clock::now();
            auto done = [&]
            {
                timing.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            };
            try
            {
                if constexpr (std::is_void_v<decltype(fn())>)
                {
                    fn();
                    done();
                }
                else
                {
                    auto r = fn();
                    done();
                    return r;
                }
            }
            catch (const ConfigError &)
            {
                throw;
            }
            catch (const InfeasibleError &)
            {
                throw;
            }
            catch (const StageError &)
            {
                throw;
            }
            catch (const std::exception &e)
            {
                throw StageError(name, e.what());
            }
        }

        inline json waveform_summary(const WaveformSet &ws)
        {
            return {{"kind", ws.kind},
                    {"count", ws.count()},
                    {"length", ws.length()},
                    {"sample_rate_hz", ws.sample_rate},
                    {"pulse_width_s", ws.pulse_width},
                    {"bandwidth_hz", ws.bandwidth},
                    {"energy", ws.energy},
                    {"roots", ws.roots},
                    {"seed", ws.seed}};
        }

        inline json positions_json(const Positions &p)
        {
            json a = json::array();
            for (Eigen::Index i = 0; i < p.rows(); ++i)
                a.push_back({p(i, 0), p(i, 1), p(i, 2)});
            return a;
        }
    } // namespace detail

    // Runs every configured stage and writes <dir>/<prefix>_<surface>_{grid,doppler_cut,<axis1>_cut}.csv,
    // <prefix>_tb.json and <prefix>_metadata.json; <prefix>_timing.json only when output.timing is set.
    inline PipelineResult run_pipeline(const ScenarioConfig &c, const PipelineOptions &opt = {})
    {
        PipelineResult res;
        std::vector<std::pair<std::string, double>> timing;
        res.config_hash = config_hash(c);
        const std::filesystem::path dir = c.output.dir;
        const std::string pre = c.output.prefix;
        auto out_path = [&](const std::string &suffix) { return dir / (pre + "_" + suffix); };

        res.waveforms = detail::stage("waveforms", timing, [&] { return build_waveforms(c); });
        res.array = detail::stage("array", timing, [&] { return build_array(c); });
        res.tb = detail::stage("tb", timing, [&] { return build_tb(c, res.waveforms, res.array); });
        res.query = detail::stage("sweep", timing, [&] { return build_query(c, res.waveforms); });

        const std::string axis1_cut = res.query.sweep == Sweep::delay_doppler ? "delay_cut" : "angle_cut";
        json surfaces = json::object();
        for (const auto &name : c.output.surfaces)
        {
            detail::stage("surface:" + name, timing, [&]
                          {
                AFGrid g = compute_surface(name, c, res.waveforms, res.array, res.tb, res.query);
                const double raw_peak = g.values.maxCoeff();
                if (c.output.normalization == "unit-peak")
                    g = normalize_unit_peak(std::move(g));
                else
                    g.peak_before_normalization = raw_peak;
                const double at1 = res.query.sweep == Sweep::delay_doppler ? 0.0 : nearest_node(g.axis1, res.query.theta.theta);
                Cut dc = cut(g, CutAxis::fix_axis1, at1, c.output.db_floor);
                Cut ac = cut(g, CutAxis::fix_axis2, 0.0, c.output.db_floor);
                json files = json::array();
                if (opt.write)
                {
                    const std::string label = "surface=" + name + " kind=" + g.kind + " normalization=" + g.normalization;
                    auto add = [&](const std::filesystem::path &p) { res.files.push_back(p); files.push_back(p.filename().string()); };
                    write_grid_csv(out_path(name + "_grid.csv"), g, res.config_hash, label);
                    add(out_path(name + "_grid.csv"));
                    write_cut_csv(out_path(name + "_doppler_cut.csv"), dc, res.config_hash, label);
                    add(out_path(name + "_doppler_cut.csv"));
                    write_cut_csv(out_path(name + "_" + axis1_cut + ".csv"), ac, res.config_hash, label);
                    add(out_path(name + "_" + axis1_cut + ".csv"));
                    if (c.output.binary)
                    {
                        write_grid_binary(out_path(name + "_grid.bin"), g, res.config_hash);
                        add(out_path(name + "_grid.bin"));
                    }
                }
                surfaces[name] = {{"kind", g.kind},
                                  {"normalization", g.normalization},
                                  {"peak_before_normalization", g.peak_before_normalization},
                                  {"rows", g.rows()},
                                  {"cols", g.cols()},
                                  {"axis1", g.axis1_name},
                                  {"axis2", g.axis2_name},
                                  {"cut_axis1_at", at1},
                                  {"files", files}};
                res.cuts[name] = {std::move(dc), std::move(ac)};
                res.surfaces[name] = std::move(g); });
        }

        json tbj = tb_to_json(res.tb.tb);
        tbj["config_hash"] = res.config_hash;
        tbj["phase_centers_m"] = detail::positions_json(res.tb.scenario.q_te);
        tbj["report"] = res.tb.report;

        res.metadata = {{"tool", "tbaf"},
                        {"version", kVersion},
                        {"config_hash", res.config_hash},
                        {"config", to_json(c)},
                        {"waveforms", detail::waveform_summary(res.waveforms)},
                        {"tb", {{"provenance", res.tb.tb.provenance}, {"beams", res.tb.tb.C.cols()}, {"report", res.tb.report}}},
                        {"sweep", {{"type", to_string(res.query.sweep)}, {"axis1_points", res.query.axis1.size()}, {"doppler_points", res.query.dopplers.size()}}},
                        {"surfaces", surfaces}};
        if (opt.write)
        {
            write_json(out_path("tb.json"), tbj);
            res.files.push_back(out_path("tb.json"));
            json files = json::array();
            for (const auto &f : res.files)
                files.push_back(f.filename().string());
            res.metadata["files"] = files;
            write_json(out_path("metadata.json"), res.metadata);
            res.files.push_back(out_path("metadata.json"));
            if (c.output.timing)
            {
                json t = {{"config_hash", res.config_hash}, {"stages", json::array()}};
                for (const auto &[n, s] : timing)
                    t["stages"].push_back({{"stage", n}, {"seconds", s}});
                write_json(out_path("timing.json"), t);
                res.files.push_back(out_path("timing.json"));
            }
        }
        return res;
    }
} // namespace tbaf

#endif
