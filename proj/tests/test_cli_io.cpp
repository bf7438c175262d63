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

#include <gtest/gtest.h>

using namespace tbaf;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch(const std::string &name)
    {
        fs::path p = fs::temp_directory_path() / ("tbaf_test_" + name);
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }

    std::vector<std::string> issues_of(const std::string &text)
    {
        try
        {
            parse_config(text);
        }
        catch (const ConfigError &e)
        {
            return e.issues();
        }
        return {};
    }

    bool mentions(const std::vector<std::string> &v, const std::string &s)
    {
        return std::any_of(v.begin(), v.end(), [&](const std::string &x) { return x.find(s) != std::string::npos; });
    }

    // small delay-Doppler scenario that runs in well under a second
    ScenarioConfig small_config(const fs::path &dir)
    {
        auto c = parse_config(R"({
            "waveform": {"family": "polyphase", "count": 4, "code_length": 32, "pulse_width_s": 4e-6},
            "array": {"tx": 4, "rx": 4},
            "tb": {"mode": "identity"},
            "sweep": {"type": "delay-doppler", "doppler_points": 33},
            "output": {"prefix": "small", "surfaces": ["tb", "mimo", "sqsum"], "binary": true}
        })");
        c.output.dir = dir.string();
        return c;
    }
}

TEST(Hash, Fnv1aReferenceValues)
{
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
    EXPECT_EQ(hex64(0xabcull), "0000000000000abc");
}

TEST(Format, DoublesRoundTrip)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 5e-324, 123456789.125})
        EXPECT_EQ(std::strtod(fmt_double(v).c_str(), nullptr), v);
    EXPECT_EQ(fmt_double(0.5), "0.5");
}

TEST(GridCsv, RoundTripAndHash)
{
    auto dir = scratch("csv");
    AFGrid g;
    g.axis1 = linspace(-1e-6, 1e-6, 3);
    g.axis2 = linspace(-5e3, 5e3, 4);
    g.values = RMat::Random(3, 4).cwiseAbs();
    write_grid_csv(dir / "g.csv", g, "0123456789abcdef", "test");
    auto back = read_grid_csv(dir / "g.csv");
    EXPECT_EQ(back.config_hash, "0123456789abcdef");
    EXPECT_EQ(back.grid.axis1, g.axis1);
    EXPECT_EQ(back.grid.axis2, g.axis2);
    EXPECT_EQ(back.grid.values, g.values);
    EXPECT_EQ(back.grid.axis1_name, "delay_s");

    write_grid_binary(dir / "g.bin", g, "0123456789abcdef");
    auto bin = read_grid_binary(dir / "g.bin");
    EXPECT_EQ(bin.grid.values, g.values);
    EXPECT_EQ(bin.grid.axis2, g.axis2);
    EXPECT_EQ(bin.config_hash, "0123456789abcdef");
}

TEST(GridCsv, ComplexGridsArePairedFiles)
{
    auto dir = scratch("cplx");
    ComplexGrid g;
    g.axis1 = linspace(0, 1, 2);
    g.axis2 = linspace(0, 1, 3);
    g.values = CMat::Random(2, 3);
    write_complex_grid_csv(dir / "x", g, "ffffffffffffffff", "entry");
    auto re = read_grid_csv(dir / "x_re.csv"), im = read_grid_csv(dir / "x_im.csv");
    EXPECT_EQ(re.grid.values, RMat(g.values.real()));
    EXPECT_EQ(im.grid.values, RMat(g.values.imag()));
}

TEST(WaveformJson, RoundTrip)
{
    auto ws = gen_polyphase(3, 16, 2e-6, 2, 5.0);
    auto back = waveforms_from_json(json::parse(waveforms_to_json(ws).dump()));
    EXPECT_EQ(back.samples, ws.samples);
    EXPECT_EQ(back.sample_rate, ws.sample_rate);
    EXPECT_EQ(back.roots, ws.roots);
    EXPECT_EQ(back.energy, 5.0);
    EXPECT_THROW(waveforms_from_json(json{{"format", "tbaf-waveforms"}, {"count", 2}}), Error);
}

TEST(TbJson, RoundTrip)
{
    TBMatrix tb{CMat::Random(8, 4), "designed"};
    auto back = tb_from_json(json::parse(tb_to_json(tb).dump()));
    EXPECT_EQ(back.C, tb.C);
    EXPECT_EQ(back.provenance, "designed");
}

TEST(Config, MinimalConfigExpandsDeterministically)
{
    auto a = parse_config(R"({"sweep": {"type": "delay-doppler"}})");
    auto b = parse_config(R"({"sweep": {"type": "delay-doppler"}})");
    EXPECT_EQ(a, b);
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(a.waveform.energy, 8.0); // E = M
    EXPECT_EQ(a.tb.beams, 8);
    EXPECT_EQ(a.array.phase_centers, "element");
    EXPECT_NEAR(a.array.spacing_m, 0.5 * kSpeedOfLight / 10e9, 1e-15);
    EXPECT_NEAR(a.sweep.doppler_max_hz, 2.0 / 10e-6, 1e-9);
}

TEST(Config, SerializeLoadRoundTrip)
{
    for (const auto &name : preset_names())
    {
        auto c = preset(name);
        auto back = parse_config(to_json(c).dump());
        EXPECT_EQ(back, c) << name;
        EXPECT_EQ(config_hash(back), config_hash(c));
    }
    auto c = parse_config(R"({"array": {"tx": 4, "rx": 2, "phase_centers": "explicit", "centers": [[0,0,0],[0.1,0,0]]},
                              "waveform": {"count": 2, "code_length": 16},
                              "tb": {"mode": "file", "beams": 2, "path": "x.json"},
                              "sweep": {"type": "angle-doppler", "theta_prime_deg": 3.5}})");
    EXPECT_EQ(parse_config(to_json(c).dump()), c);
}

TEST(Config, HashIgnoresFormattingAndKeyOrder)
{
    auto a = parse_config(R"({"sweep": {"type": "delay-doppler", "doppler_points": 65}, "array": {"rx": 4}})");
    auto b = parse_config("{\n  \"array\": {\"rx\": 4},\n  // comment\n  \"sweep\": {\"doppler_points\": 65, \"type\": \"delay-doppler\"}\n}");
    EXPECT_EQ(config_hash(a), config_hash(b));
    auto d = parse_config(R"({"sweep": {"type": "delay-doppler", "doppler_points": 63}, "array": {"rx": 4}})");
    EXPECT_NE(config_hash(a), config_hash(d));
    auto moved = a;
    moved.output.dir = "elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(moved));
    moved.output.prefix = "other";
    EXPECT_NE(config_hash(a), config_hash(moved));
}

TEST(Config, PaperFig2Preset)
{
    auto c = preset("paper-fig2");
    EXPECT_EQ(c.array.tx, 8);
    EXPECT_EQ(c.array.rx, 8);
    EXPECT_EQ(c.tb.beams, 4);
    EXPECT_EQ(c.waveform.energy, 8.0);
    EXPECT_EQ(c.tb.design.gamma, 0.38);
    EXPECT_EQ(c.tb.design.sector_deg[0], -15.0);
    EXPECT_EQ(c.tb.design.sector_deg[1], 15.0);
    EXPECT_FALSE(c.tb.design.af.has_value());
    EXPECT_THROW(preset("paper-fig9"), ConfigError);
}

TEST(Config, ParseErrorCarriesLineAndColumn)
{
    auto v = issues_of("{\n  \"sweep\": {\n    \"type\": ,\n  }\n}");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_TRUE(mentions(v, "line 3")) << v[0];
    EXPECT_TRUE(mentions(v, "column")) << v[0];
}

TEST(Config, AllViolationsReportedWithKeyPaths)
{
    auto v = issues_of(R"({"waveform": {"count": 0, "colour": "red"},
                           "array": {"tx": 4, "rx": "eight"},
                           "tb": {"mode": "design", "design": {"gamma": -1}},
                           "sweep": {"type": "delay-doppler"},
                           "output": {"surfaces": ["tb", "banana"]}})");
    EXPECT_TRUE(mentions(v, "waveform.colour: unknown key"));
    EXPECT_TRUE(mentions(v, "array.rx: must be an integer"));
    // type errors stop before semantic checks; fix them and the semantic errors are all listed
    auto w = issues_of(R"({"waveform": {"count": 0},
                           "array": {"tx": 4},
                           "tb": {"mode": "design", "design": {"gamma": -1}},
                           "sweep": {"type": "delay-doppler"},
                           "output": {"surfaces": ["tb", "banana"]}})");
    EXPECT_TRUE(mentions(w, "waveform.count"));
    EXPECT_TRUE(mentions(w, "tb.design.gamma"));
    EXPECT_TRUE(mentions(w, "output.surfaces[1]"));
    EXPECT_GE(w.size(), 3u);
}

TEST(Config, CrossBlockConsistency)
{
    EXPECT_TRUE(mentions(issues_of(R"({"array": {"tx": 4}, "tb": {"mode": "identity", "beams": 3}, "sweep": {"type": "delay-doppler"}})"), "tb.beams"));
    EXPECT_TRUE(mentions(issues_of(R"({"waveform": {"count": 2}, "array": {"tx": 4}, "tb": {"mode": "design", "beams": 3}, "sweep": {"type": "delay-doppler"}})"),
                         "exceeds waveform.count"));
    EXPECT_TRUE(mentions(issues_of(R"({"waveform": {"code_length": 16}, "sweep": {"type": "delay-doppler", "max_lag": 16}})"), "sweep.max_lag"));
}

TEST(Config, EmptySweepNamesTheSweepBlock)
{
    EXPECT_TRUE(mentions(issues_of(R"({"array": {"tx": 2}})"), "sweep"));
    EXPECT_TRUE(mentions(issues_of(R"({"sweep": {}})"), "sweep"));
    EXPECT_TRUE(mentions(issues_of(R"({"sweep": {"type": "delay-doppler", "doppler_points": 0}})"), "sweep.doppler_points"));
    EXPECT_TRUE(mentions(issues_of(R"({"sweep": {"type": "angle-doppler", "angle_points": 0}})"), "sweep.angle_points"));
}

TEST(Config, MissingFileIsConfigError)
{
    EXPECT_THROW(load_config("/nonexistent/tbaf.json"), ConfigError);
}

TEST(Pipeline, WritesHashedOutputsAndMetadata)
{
    auto dir = scratch("pipe");
    auto c = small_config(dir);
    auto r = run_pipeline(c);
    const std::string h = config_hash(c);
    for (const std::string s : {"tb", "mimo", "sqsum"})
    {
        auto g = read_grid_csv(dir / ("small_" + s + "_grid.csv"));
        EXPECT_EQ(g.config_hash, h);
        EXPECT_EQ(g.grid.values.maxCoeff(), 1.0);
        EXPECT_TRUE(fs::exists(dir / ("small_" + s + "_doppler_cut.csv")));
        EXPECT_TRUE(fs::exists(dir / ("small_" + s + "_delay_cut.csv")));
        EXPECT_EQ(read_grid_binary(dir / ("small_" + s + "_grid.bin")).grid.values, g.grid.values);
    }
    auto meta = read_json(dir / "small_metadata.json");
    EXPECT_EQ(meta["config_hash"], h);
    EXPECT_EQ(meta["version"], kVersion);
    EXPECT_EQ(parse_config(meta["config"].dump()), c);
    EXPECT_FALSE(meta.contains("timing"));
    EXPECT_FALSE(fs::exists(dir / "small_timing.json"));
    // identity TB with element phase centers is the MIMO AF
    EXPECT_LT((r.surfaces["tb"].values - r.surfaces["mimo"].values).cwiseAbs().maxCoeff(), 1e-12);
    // unit-peak surfaces read 0 dB at the match point
    auto [dc, ac] = r.cuts["tb"];
    EXPECT_EQ(dc.db(dc.db.size() / 2), 0.0);
    EXPECT_EQ(ac.db(ac.db.size() / 2), 0.0);
}

TEST(Pipeline, RerunIsBitIdentical)
{
    auto d1 = scratch("det1"), d2 = scratch("det2");
    auto c1 = small_config(d1), c2 = small_config(d2);
    c2.output.dir = c1.output.dir;
    run_pipeline(c1);
    std::map<std::string, std::string> first;
    for (auto &e : fs::directory_iterator(d1))
        first[e.path().filename().string()] = slurp(e.path());
    run_pipeline(c2);
    for (auto &e : fs::directory_iterator(d1))
        EXPECT_EQ(slurp(e.path()), first[e.path().filename().string()]) << e.path();
}

TEST(Pipeline, TimingSidecarIsOptional)
{
    auto dir = scratch("timing");
    auto c = small_config(dir);
    c.output.timing = true;
    c.output.surfaces = {"tb"};
    run_pipeline(c);
    auto t = read_json(dir / "small_timing.json");
    EXPECT_EQ(t["config_hash"], config_hash(c));
    EXPECT_GE(t["stages"].size(), 5u);
}

TEST(Pipeline, StageErrorsNameTheStage)
{
    auto dir = scratch("stage");
    auto c = small_config(dir);
    c.waveform.family = "file";
    c.waveform.path = (dir / "missing.json").string();
    try
    {
        run_pipeline(c);
        FAIL() << "expected a stage error";
    }
    catch (const StageError &e)
    {
        EXPECT_EQ(e.stage(), "waveforms");
    }
}

TEST(Pipeline, FileModesRoundTrip)
{
    auto dir = scratch("files");
    auto ws = gen_gaussian(2, 32, 4e-6, 11);
    write_json(dir / "w.json", waveforms_to_json(ws));
    CMat C = CMat::Random(4, 2);
    write_json(dir / "c.json", tb_to_json({C, "designed"}));
    auto c = parse_config(R"({"waveform": {"family": "file", "path": "w.json"},
                              "array": {"tx": 4, "rx": 3},
                              "tb": {"mode": "file", "beams": 2, "path": "c.json"},
                              "sweep": {"type": "angle-doppler", "angle_points": 37, "doppler_points": 9}})");
    c.waveform.path = (dir / "w.json").string();
    c.tb.path = (dir / "c.json").string();
    c.output.dir = dir.string();
    auto r = run_pipeline(c);
    EXPECT_EQ(r.tb.tb.C, C);
    EXPECT_EQ(r.waveforms.samples, ws.samples);
    EXPECT_EQ(r.waveforms.energy, 4.0);
    EXPECT_EQ(r.surfaces["tb"].axis1_name, "angle_rad");
    EXPECT_TRUE(fs::exists(dir / "tbaf_tb_angle_cut.csv"));

    c.tb.beams = 3;
    EXPECT_THROW(run_pipeline(c), ConfigError);
}

TEST(Pipeline, SpatialDesignUsesCentroids)
{
    auto dir = scratch("design");
    auto c = parse_config(R"({"waveform": {"count": 4, "code_length": 32, "pulse_width_s": 4e-6},
                              "array": {"tx": 8, "rx": 4},
                              "tb": {"mode": "design", "beams": 4},
                              "sweep": {"type": "angle-doppler", "angle_points": 61, "doppler_points": 5},
                              "output": {"normalization": "raw"}})");
    c.output.dir = dir.string();
    auto r = run_pipeline(c, {.write = false});
    ASSERT_TRUE(r.tb.design.has_value());
    EXPECT_TRUE(r.tb.design->ok());
    EXPECT_LT((r.tb.scenario.q_te - beam_centroids(r.array, r.tb.tb.C)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(r.files.empty());
    EXPECT_EQ(r.metadata["tb"]["report"]["design"]["status"], to_string(r.tb.design->status));
}

TEST(Pipeline, InfeasibleDesignRaisesWithDiagnostics)
{
    auto dir = scratch("infeasible");
    auto c = parse_config(R"({"waveform": {"count": 2, "code_length": 32, "pulse_width_s": 4e-6},
                              "array": {"tx": 4, "rx": 2},
                              "tb": {"mode": "design", "beams": 2,
                                     "design": {"gamma": 0.5,
                                                "af": {"doppler_bands_hz": [[-300e3, -200e3], [200e3, 300e3]],
                                                       "doppler_points": 3, "delta": 1e-3}}},
                              "sweep": {"type": "angle-doppler", "angle_points": 31, "doppler_points": 5}})");
    c.output.dir = dir.string();
    try
    {
        run_pipeline(c);
        FAIL() << "expected infeasibility";
    }
    catch (const InfeasibleError &e)
    {
        EXPECT_EQ(e.result.status, DesignStatus::infeasible);
        EXPECT_FALSE(e.result.binding.empty());
    }
    c.tb.design.on_infeasible = "bisect";
    auto r = run_pipeline(c, {.write = false});
    ASSERT_TRUE(r.tb.design && r.tb.design->smallest_delta);
    EXPECT_EQ(r.tb.report["fallback"], "bisect");
    EXPECT_NEAR(r.tb.report["used_delta"].get<double>(), 1.02 * *r.tb.design->smallest_delta, 1e-12);
}
