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

#ifndef TBAF_IO_HPP
#define TBAF_IO_HPP

#include "ambiguity.hpp"
#include "tb_core.hpp"
#include "waveforms.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

namespace tbaf
{
    inline constexpr const char *kVersion = "0.1.0";

    using json = nlohmann::json;

    // FNV-1a, 64 bit
    inline std::uint64_t fnv1a64(std::string_view s)
    {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : s)
        {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

    inline std::string hex64(std::uint64_t v)
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
        return buf;
    }

    // Shortest text that reads back to the same double
    inline std::string fmt_double(double v)
    {
        char buf[32];
        for (int prec = 15; prec <= 17; ++prec)
        {
            std::snprintf(buf, sizeof buf, "%.*g", prec, v);
            if (std::strtod(buf, nullptr) == v)
                break;
        }
        return buf;
    }

    inline void ensure_parent(const std::filesystem::path &p)
    {
        if (p.has_parent_path())
            std::filesystem::create_directories(p.parent_path());
    }

    inline std::ofstream open_out(const std::filesystem::path &p, bool binary = false)
    {
        ensure_parent(p);
        std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
        if (!os)
            throw Error("cannot open " + p.string() + " for writing");
        return os;
    }

    inline std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream is(p, std::ios::binary);
        if (!is)
            throw Error("cannot read " + p.string());
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    // CSV grid: '#' comment lines, then a header row "axis1\axis2,<axis2...>" and one row per axis1 node.
    inline void write_grid_csv(const std::filesystem::path &path, const RVec &axis1, const RVec &axis2, const RMat &values,
                               const std::string &axis1_name, const std::string &axis2_name, const std::string &config_hash,
                               const std::string &label)
    {
        require(values.rows() == axis1.size() && values.cols() == axis2.size(), "grid values do not match axes");
        auto os = open_out(path);
        os << "# tbaf " << kVersion << " config_hash=" << config_hash << " " << label << "\n";
        os << axis1_name << "\\" << axis2_name;
        for (Eigen::Index j = 0; j < axis2.size(); ++j)
            os << ',' << fmt_double(axis2(j));
        os << '\n';
        for (Eigen::Index i = 0; i < axis1.size(); ++i)
        {
            os << fmt_double(axis1(i));
            for (Eigen::Index j = 0; j < axis2.size(); ++j)
                os << ',' << fmt_double(values(i, j));
            os << '\n';
        }
    }

    inline void write_grid_csv(const std::filesystem::path &path, const AFGrid &g, const std::string &config_hash,
                               const std::string &label)
    {
        write_grid_csv(path, g.axis1, g.axis2, g.values, g.axis1_name, g.axis2_name, config_hash, label);
    }

    // <stem>_re.csv and <stem>_im.csv next to `stem`
    inline void write_complex_grid_csv(const std::filesystem::path &stem, const ComplexGrid &g, const std::string &config_hash,
                                       const std::string &label)
    {
        const std::string s = stem.string();
        write_grid_csv(s + "_re.csv", g.axis1, g.axis2, g.values.real(), g.axis1_name, g.axis2_name, config_hash, label + " real");
        write_grid_csv(s + "_im.csv", g.axis1, g.axis2, g.values.imag(), g.axis1_name, g.axis2_name, config_hash, label + " imag");
    }

    struct CsvGrid
    {
        AFGrid grid;
        std::string config_hash;
    };

    inline std::vector<std::string> split_csv(const std::string &line)
    {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            out.push_back(cell);
        return out;
    }

    inline double parse_double(const std::string &s, const std::string &where)
    {
        char *end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw Error("malformed number '" + s + "' in " + where);
        return v;
    }

    inline CsvGrid read_grid_csv(const std::filesystem::path &path)
    {
        std::ifstream is(path);
        if (!is)
            throw Error("cannot read " + path.string());
        CsvGrid out;
        std::string line;
        std::vector<std::vector<double>> rows;
        std::vector<double> axis1;
        bool header = false;
        while (std::getline(is, line))
        {
            if (line.empty())
                continue;
            if (line[0] == '#')
            {
                if (auto p = line.find("config_hash="); p != std::string::npos)
                    out.config_hash = line.substr(p + 12, 16);
                continue;
            }
            auto cells = split_csv(line);
            if (!header)
            {
                const auto bs = cells.at(0).find('\\');
                if (bs != std::string::npos)
                {
                    out.grid.axis1_name = cells[0].substr(0, bs);
                    out.grid.axis2_name = cells[0].substr(bs + 1);
                }
                out.grid.axis2.resize(static_cast<Eigen::Index>(cells.size()) - 1);
                for (std::size_t j = 1; j < cells.size(); ++j)
                    out.grid.axis2(static_cast<Eigen::Index>(j) - 1) = parse_double(cells[j], path.string());
                header = true;
                continue;
            }
            if (cells.size() != static_cast<std::size_t>(out.grid.axis2.size()) + 1)
                throw Error("ragged row in " + path.string());
            axis1.push_back(parse_double(cells[0], path.string()));
            std::vector<double> r;
            for (std::size_t j = 1; j < cells.size(); ++j)
                r.push_back(parse_double(cells[j], path.string()));
            rows.push_back(std::move(r));
        }
        if (!header)
            throw Error("no grid header in " + path.string());
        out.grid.axis1 = Eigen::Map<RVec>(axis1.data(), static_cast<Eigen::Index>(axis1.size()));
        out.grid.values.resize(static_cast<Eigen::Index>(rows.size()), out.grid.axis2.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < rows[i].size(); ++j)
                out.grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        return out;
    }

    // Cut series: "<axis>,value,db"
    inline void write_cut_csv(const std::filesystem::path &path, const Cut &c, const std::string &config_hash, const std::string &label)
    {
        auto os = open_out(path);
        os << "# tbaf " << kVersion << " config_hash=" << config_hash << " " << label << " at=" << fmt_double(c.at) << "\n";
        os << c.axis_name << ",value,db\n";
        for (Eigen::Index i = 0; i < c.axis.size(); ++i)
            os << fmt_double(c.axis(i)) << ',' << fmt_double(c.values(i)) << ',' << fmt_double(c.db(i)) << '\n';
    }

    // Binary grid, little-endian: "TBAFGRD1", hash[16], u64 rows, u64 cols, axis1, axis2, values row-major (f64)
    inline void write_grid_binary(const std::filesystem::path &path, const AFGrid &g, const std::string &config_hash)
    {
        auto os = open_out(path, true);
        std::string h = config_hash;
        h.resize(16, ' ');
        os.write("TBAFGRD1", 8);
        os.write(h.data(), 16);
        const std::uint64_t r = static_cast<std::uint64_t>(g.rows()), c = static_cast<std::uint64_t>(g.cols());
        os.write(reinterpret_cast<const char *>(&r), 8);
        os.write(reinterpret_cast<const char *>(&c), 8);
        os.write(reinterpret_cast<const char *>(g.axis1.data()), static_cast<std::streamsize>(8 * r));
        os.write(reinterpret_cast<const char *>(g.axis2.data()), static_cast<std::streamsize>(8 * c));
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = g.values;
        os.write(reinterpret_cast<const char *>(rm.data()), static_cast<std::streamsize>(8 * r * c));
    }

    inline CsvGrid read_grid_binary(const std::filesystem::path &path)
    {
        const std::string buf = slurp(path);
        if (buf.size() < 40 || buf.compare(0, 8, "TBAFGRD1") != 0)
            throw Error("not a tbaf binary grid: " + path.string());
        CsvGrid out;
        out.config_hash = buf.substr(8, 16);
        std::uint64_t r = 0, c = 0;
        std::memcpy(&r, buf.data() + 24, 8);
        std::memcpy(&c, buf.data() + 32, 8);
        if (buf.size() != 40 + 8 * (r + c + r * c))
            throw Error("truncated binary grid: " + path.string());
        const auto *p = reinterpret_cast<const double *>(buf.data() + 40);
        std::vector<double> tmp(p, p + r + c + r * c); // realign
        out.grid.axis1 = Eigen::Map<const RVec>(tmp.data(), static_cast<Eigen::Index>(r));
        out.grid.axis2 = Eigen::Map<const RVec>(tmp.data() + r, static_cast<Eigen::Index>(c));
        out.grid.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            tmp.data() + r + c, static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        return out;
    }

    // Complex rows as interleaved [re, im, re, im, ...]
    inline json complex_rows(const CMat &m)
    {
        json rows = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i)
        {
            json r = json::array();
            for (Eigen::Index j = 0; j < m.cols(); ++j)
            {
                r.push_back(m(i, j).real());
                r.push_back(m(i, j).imag());
            }
            rows.push_back(std::move(r));
        }
        return rows;
    }

    inline CMat complex_rows_from(const json &rows, Eigen::Index n_rows, Eigen::Index n_cols, const std::string &what)
    {
        if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n_rows)
            throw Error(what + ": expected " + std::to_string(n_rows) + " rows");
        CMat m(n_rows, n_cols);
        for (Eigen::Index i = 0; i < n_rows; ++i)
        {
            const json &r = rows[static_cast<std::size_t>(i)];
            if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != 2 * n_cols)
                throw Error(what + ": row " + std::to_string(i) + " must hold " + std::to_string(2 * n_cols) + " numbers");
            for (Eigen::Index j = 0; j < n_cols; ++j)
                m(i, j) = {r[static_cast<std::size_t>(2 * j)].get<double>(), r[static_cast<std::size_t>(2 * j + 1)].get<double>()};
        }
        return m;
    }

    inline json waveforms_to_json(const WaveformSet &ws)
    {
        return {{"format", "tbaf-waveforms"},
                {"version", 1},
                {"kind", ws.kind},
                {"count", ws.count()},
                {"length", ws.length()},
                {"sample_rate_hz", ws.sample_rate},
                {"pulse_width_s", ws.pulse_width},
                {"bandwidth_hz", ws.bandwidth},
                {"energy", ws.energy},
                {"roots", ws.roots},
                {"seed", ws.seed},
                {"samples", complex_rows(ws.samples)}};
    }

    inline WaveformSet waveforms_from_json(const json &j)
    {
        try
        {
            if (j.value("format", "") != "tbaf-waveforms")
                throw Error("not a tbaf waveform file");
            const auto k = j.at("count").get<Eigen::Index>(), l = j.at("length").get<Eigen::Index>();
            CMat samples = complex_rows_from(j.at("samples"), k, l, "samples");
            WaveformSet ws = make_waveform_set(samples, j.at("sample_rate_hz").get<double>(), j.at("energy").get<double>());
            // rows already at unit energy are kept bit-exact
            if ((samples.rowwise().squaredNorm() / ws.sample_rate - RVec::Ones(k)).cwiseAbs().maxCoeff() <= 1e-12)
                ws.samples = std::move(samples);
            ws.kind = j.value("kind", "custom");
            ws.pulse_width = j.at("pulse_width_s").get<double>();
            ws.bandwidth = j.value("bandwidth_hz", ws.bandwidth);
            ws.roots = j.value("roots", std::vector<int>{});
            ws.seed = j.value("seed", std::uint64_t{0});
            return ws;
        }
        catch (const json::exception &e)
        {
            throw Error(std::string("waveform file: ") + e.what());
        }
    }

    inline json tb_to_json(const TBMatrix &tb)
    {
        return {{"format", "tbaf-tb"},
                {"version", 1},
                {"provenance", tb.provenance},
                {"tx", tb.C.rows()},
                {"beams", tb.C.cols()},
                {"C", complex_rows(tb.C)}};
    }

    inline TBMatrix tb_from_json(const json &j)
    {
        try
        {
            if (j.value("format", "") != "tbaf-tb")
                throw Error("not a tbaf TB matrix file");
            const auto m = j.at("tx").get<Eigen::Index>(), k = j.at("beams").get<Eigen::Index>();
            return {complex_rows_from(j.at("C"), m, k, "C"), j.value("provenance", "file")};
        }
        catch (const json::exception &e)
        {
            throw Error(std::string("TB file: ") + e.what());
        }
    }

    inline void write_json(const std::filesystem::path &p, const json &j)
    {
        auto os = open_out(p);
        os << j.dump(2) << '\n';
    }

    inline json read_json(const std::filesystem::path &p)
    {
        try
        {
            return json::parse(slurp(p));
        }
        catch (const json::parse_error &e)
        {
            throw Error(p.string() + ": " + e.what());
        }
    }
} // namespace tbaf

#endif
