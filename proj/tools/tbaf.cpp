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

#include <tbaf/tbaf.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace tbaf;
namespace fs = std::filesystem;

namespace
{
    enum Exit
    {
        ok = 0,
        failure = 1,
        config_error = 2,
        infeasible = 3,
        oracle_mismatch = 4
    };

    struct Common
    {
        std::string config;
        std::string preset;
        std::string out_dir;
        std::string prefix;
        std::optional<std::uint64_t> seed;
    };

    void add_common(CLI::App *cmd, Common &c, bool allow_preset = true)
    {
        auto *cfg = cmd->add_option("-c,--config", c.config, "scenario config (JSON)")->check(CLI::ExistingFile);
        if (allow_preset)
        {
            auto *pre = cmd->add_option("--preset", c.preset, "named preset instead of a config file");
            cfg->excludes(pre);
        }
        cmd->add_option("-o,--out-dir", c.out_dir, "override output.dir");
        cmd->add_option("--prefix", c.prefix, "override output.prefix");
        cmd->add_option("--seed", c.seed, "override waveform.seed (gaussian codes)");
    }

    ScenarioConfig resolve(const Common &c)
    {
        if (c.config.empty() && c.preset.empty())
            throw ConfigError({"either --config or --preset is required"});
        ScenarioConfig cfg = c.config.empty() ? preset(c.preset) : load_config(c.config);
        if (!c.out_dir.empty())
            cfg.output.dir = c.out_dir;
        if (!c.prefix.empty())
            cfg.output.prefix = c.prefix;
        if (c.seed)
            cfg.waveform.seed = *c.seed;
        return cfg;
    }

    fs::path out_file(const ScenarioConfig &c, const std::string &suffix)
    {
        return fs::path(c.output.dir) / (c.output.prefix + "_" + suffix);
    }

    void print_design(const TbOutcome &tb)
    {
        if (!tb.design)
            return;
        const auto &d = *tb.design;
        std::cout << "design: " << to_string(d.status) << " (" << d.mode << "), objective " << d.objective << ", min slack "
                  << d.min_slack << ", " << d.iterations << " iterations";
        if (d.phase_center_passes > 0)
            std::cout << ", phase-center passes " << d.phase_center_passes;
        std::cout << "\n";
        if (tb.report.contains("fallback"))
            std::cout << "design: requested delta " << tb.report["requested_delta"].get<double>() << " infeasible; used "
                      << tb.report["used_delta"].get<double>() << " (smallest feasible " << d.smallest_delta.value_or(0.0) << ")\n";
    }

    int cmd_gen_waveforms(const Common &c, const std::string &output)
    {
        const ScenarioConfig cfg = resolve(c);
        const WaveformSet ws = build_waveforms(cfg);
        const auto diag = validate(ws);
        const fs::path p = output.empty() ? out_file(cfg, "waveforms.json") : fs::path(output);
        write_json(p, waveforms_to_json(ws));
        std::cout << "waveforms: " << ws.count() << " x " << ws.length() << " " << ws.kind << ", fs " << ws.sample_rate
                  << " Hz, max |gram offdiag| " << diag.max_offdiag << ", max energy error " << diag.max_energy_error << "\n"
                  << "wrote " << p.string() << "\n";
        return ok;
    }

    int cmd_design_tb(const Common &c, const std::string &output)
    {
        const ScenarioConfig cfg = resolve(c);
        if (cfg.tb.mode != "design")
            throw ConfigError({"tb.mode: design-tb needs mode \"design\""});
        const WaveformSet ws = build_waveforms(cfg);
        const ArrayScenario sc = build_array(cfg);
        const TbOutcome tb = build_tb(cfg, ws, sc);
        print_design(tb);
        json j = tb_to_json(tb.tb);
        j["config_hash"] = config_hash(cfg);
        j["report"] = tb.report;
        const fs::path p = output.empty() ? out_file(cfg, "tb.json") : fs::path(output);
        write_json(p, j);
        std::cout << "wrote " << p.string() << "\n";
        return ok;
    }

    int cmd_cross_af(const Common &c)
    {
        const ScenarioConfig cfg = resolve(c);
        const WaveformSet ws = build_waveforms(cfg);
        const WaveformSet head = ws.head(cfg.tb.beams);
        ScenarioConfig dd = cfg;
        dd.sweep.type = "delay-doppler";
        const AFQuery q = build_query(dd, ws);
        const CrossAFStack st = cross_af_matrix(head, q.axis1, q.dopplers);
        const std::string h = config_hash(cfg);
        for (Eigen::Index j = 0; j < st.k; ++j)
            for (Eigen::Index k = 0; k < st.k; ++k)
            {
                const std::string name = "xaf_" + std::to_string(j + 1) + "_" + std::to_string(k + 1);
                write_complex_grid_csv(out_file(cfg, name), st.entry(j, k), h, "cross-af entry " + std::to_string(j + 1) + "," + std::to_string(k + 1));
            }
        std::cout << "wrote " << st.k * st.k << " cross-AF entries (" << st.delays.size() << " x " << st.dopplers.size()
                  << ") under " << cfg.output.dir << "\n";
        return ok;
    }

    int cmd_af_surface(const Common &c)
    {
        const ScenarioConfig cfg = resolve(c);
        const PipelineResult r = run_pipeline(cfg);
        print_design(r.tb);
        for (const auto &[name, g] : r.surfaces)
            std::cout << name << ": " << g.rows() << " x " << g.cols() << " " << g.kind << ", peak " << g.peak_before_normalization << "\n";
        std::cout << "wrote " << r.files.size() << " files under " << cfg.output.dir << " (config hash " << r.config_hash << ")\n";
        return ok;
    }

    int cmd_clear_region(const Common &c, double eta_db, const std::string &shape, const std::vector<double> &region)
    {
        const ScenarioConfig cfg = resolve(c);
        if (cfg.sweep.type != "delay-doppler")
            throw ConfigError({"sweep.type: clear-region analysis needs a delay-doppler sweep"});
        const WaveformSet ws = build_waveforms(cfg);
        const ArrayScenario sc = build_array(cfg);
        const TbOutcome tb = build_tb(cfg, ws, sc);
        const AFQuery q = build_query(cfg, ws);
        const AFGrid g = compute_surface("tb", cfg, ws, sc, tb, q);
        std::optional<Region> reg;
        const Shape sh = shape_from_string(shape);
        if (!region.empty())
            reg = Region{sh, region[0], region[1]};
        const WaveformSet head = ws.head(cfg.tb.beams);
        const auto rep = clear_region_report(tb.scenario, head, tb.tb, g, q.theta, std::pow(10.0, eta_db / 10.0), sh, reg);

        auto opt = [](const std::optional<double> &v) { return v ? json(*v) : json(nullptr); };
        json j = {{"config_hash", config_hash(cfg)},
                  {"eta_db", eta_db},
                  {"eta", rep.eta},
                  {"eta_abs", rep.eta_abs},
                  {"region", {{"shape", to_string(rep.region.shape)}, {"half_delay_s", rep.region.half1}, {"half_doppler_hz", rep.region.half2}}},
                  {"v0", rep.v0},
                  {"vk", rep.vk},
                  {"v_tb", rep.v_tb},
                  {"rho", rep.rho},
                  {"bound_worst", opt(rep.bound_worst)},
                  {"bound_best", opt(rep.bound_best)},
                  {"cross_auto_ratio", rep.cross_auto_ratio},
                  {"approximate", rep.approximate},
                  {"peak", rep.peak}};
        if (rep.empirical)
            j["empirical"] = {{"shape", to_string(rep.empirical_shape)},
                              {"area", rep.empirical->area},
                              {"half1_nodes", rep.empirical->half1},
                              {"half2_nodes", rep.empirical->half2},
                              {"cells", rep.empirical->cells},
                              {"full_grid", rep.empirical->full_grid}};
        const fs::path p = out_file(cfg, "clear_region.json");
        write_json(p, j);
        std::cout << "clear region at " << eta_db << " dB: bound worst " << (rep.bound_worst ? fmt_double(*rep.bound_worst) : "n/a")
                  << ", best " << (rep.bound_best ? fmt_double(*rep.bound_best) : "n/a") << ", empirical "
                  << (rep.empirical ? fmt_double(rep.empirical->area) : "n/a") << (rep.approximate ? " (approximate)" : "") << "\n"
                  << "wrote " << p.string() << "\n";
        return ok;
    }

    int cmd_verify_oracle(const Common &c, std::size_t points, double tol)
    {
        const ScenarioConfig cfg = resolve(c);
        const WaveformSet ws = build_waveforms(cfg);
        const ArrayScenario sc = build_array(cfg);
        const TbOutcome tb = build_tb(cfg, ws, sc);
        const AFQuery q = build_query(cfg, ws);
        const std::uint64_t seed = c.seed.value_or(cfg.waveform.seed);
        const auto rep = compare_with_oracle(tb.scenario, ws.head(cfg.tb.beams), tb.tb, q, points, seed);
        const fs::path p = out_file(cfg, "oracle.csv");
        {
            auto os = open_out(p);
            os << "# tbaf " << kVersion << " config_hash=" << config_hash(cfg) << " seed=" << seed << "\n";
            os << "axis1,doppler_hz,factored,oracle,rel_err\n";
            for (const auto &r : rep.rows)
                os << fmt_double(r.axis1) << ',' << fmt_double(r.doppler) << ',' << fmt_double(r.factored) << ','
                   << fmt_double(r.oracle) << ',' << fmt_double(r.rel_err) << '\n';
        }
        const bool pass = rep.max_rel_err <= tol;
        std::cout << "oracle: " << rep.rows.size() << " points, max relative error " << rep.max_rel_err << " (tolerance " << tol
                  << ") " << (pass ? "PASS" : "MISMATCH") << "\nwrote " << p.string() << "\n";
        return pass ? ok : oracle_mismatch;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"tbaf: ambiguity analysis and transmit-beamspace design for MIMO radar"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.footer("Threads: TBAF_THREADS (default: hardware concurrency).\n"
               "Exit codes: 0 success, 2 config error, 3 infeasible design, 4 oracle mismatch.");

    Common common;
    std::string output;
    int rc = ok;

    auto *gen = app.add_subcommand("gen-waveforms", "generate the configured waveform set and write it as JSON");
    add_common(gen, common);
    gen->add_option("--output", output, "waveform file (default <dir>/<prefix>_waveforms.json)");
    gen->callback([&] { rc = cmd_gen_waveforms(common, output); });

    auto *design = app.add_subcommand("design-tb", "solve the TB design program and write the matrix with its report");
    add_common(design, common);
    design->add_option("--output", output, "TB file (default <dir>/<prefix>_tb.json)");
    design->callback([&] { rc = cmd_design_tb(common, output); });

    auto *xaf = app.add_subcommand("cross-af", "write every cross-ambiguity entry as paired _re/_im CSV grids");
    add_common(xaf, common);
    xaf->callback([&] { rc = cmd_cross_af(common); });

    auto *surf = app.add_subcommand("af-surface", "run the pipeline: surfaces, cuts, TB and metadata");
    add_common(surf, common);
    surf->callback([&] { rc = cmd_af_surface(common); });

    double eta_db = -30.0;
    std::string shape = "rectangle";
    std::vector<double> region;
    auto *clear = app.add_subcommand("clear-region", "clear-region bounds and empirical area of the TB AF");
    add_common(clear, common);
    clear->add_option("--eta-db", eta_db, "sidelobe level relative to the peak (dB)");
    clear->add_option("--shape", shape, "rectangle or ellipse")->check(CLI::IsMember({"rectangle", "ellipse"}));
    clear->add_option("--region", region, "volume region half-extents: delay_s doppler_hz (default: whole grid)")->expected(2);
    clear->callback([&] { rc = cmd_clear_region(common, eta_db, shape, region); });

    std::size_t points = 25;
    double tol = 1e-6;
    auto *oracle = app.add_subcommand("verify-oracle", "compare the factored AF with the coherent-sum simulation");
    add_common(oracle, common);
    oracle->add_option("--points", points, "random sweep nodes to compare")->check(CLI::PositiveNumber);
    oracle->add_option("--tol", tol, "relative tolerance");
    oracle->callback([&] { rc = cmd_verify_oracle(common, points, tol); });

    std::string preset_name;
    bool print_only = false, timing = false;
    auto *pre = app.add_subcommand("preset", "run a named figure preset (paper-fig1 .. paper-fig4)");
    pre->add_option("name", preset_name, "preset name")->required()->check(CLI::IsMember(preset_names()));
    pre->add_option("-o,--out-dir", common.out_dir, "override output.dir");
    pre->add_flag("--print-config", print_only, "print the expanded preset config and exit");
    pre->add_flag("--timing", timing, "also write <prefix>_timing.json");
    pre->callback([&]
                  {
                      ScenarioConfig cfg = preset(preset_name);
                      if (!common.out_dir.empty())
                          cfg.output.dir = common.out_dir;
                      cfg.output.timing = timing;
                      if (print_only)
                      {
                          std::cout << to_json(cfg).dump(2) << "\n";
                          return;
                      }
                      const PipelineResult r = run_pipeline(cfg);
                      print_design(r.tb);
                      std::cout << "wrote " << r.files.size() << " files under " << cfg.output.dir << " (config hash " << r.config_hash << ")\n"; });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }
    catch (const ConfigError &e)
    {
        for (const auto &i : e.issues())
            std::cerr << "config error: " << i << "\n";
        return config_error;
    }
    catch (const InfeasibleError &e)
    {
        std::cerr << "infeasible: " << e.what() << "\n";
        if (!e.result.certificate.empty())
            std::cerr << "certificate: " << e.result.certificate << "\n";
        return infeasible;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
    return rc;
}
