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

#ifndef TBAF_CORE_HPP
#define TBAF_CORE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tbaf
{
    using cplx = std::complex<double>;
    using CVec = Eigen::VectorXcd;
    using CMat = Eigen::MatrixXcd;
    using RVec = Eigen::VectorXd;
    using RMat = Eigen::MatrixXd;
    using Vec3 = Eigen::Vector3d;

    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kSpeedOfLight = 299792458.0; // m/s
    inline constexpr cplx kJ{0.0, 1.0};

    // Base for every error the library throws
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Invalid sizes, inconsistent dimensions, violated preconditions
    class ParameterError : public Error
    {
    public:
        using Error::Error;
    };

    // Query or cut outside the sampled axes
    class RangeError : public Error
    {
    public:
        using Error::Error;
    };

    // Configuration parse / validation failure; carries every violation found
    class ConfigError : public Error
    {
    public:
        explicit ConfigError(std::vector<std::string> issues)
            : Error(join(issues)), issues_(std::move(issues)) {}

        const std::vector<std::string> &issues() const noexcept { return issues_; }

    private:
        static std::string join(const std::vector<std::string> &v)
        {
            std::string out;
            for (const auto &s : v)
            {
                if (!out.empty())
                    out += "; ";
                out += s;
            }
            return out;
        }
        std::vector<std::string> issues_;
    };

    inline void require(bool cond, const std::string &msg)
    {
        if (!cond)
            throw ParameterError(msg);
    }

    // exp(j*phase)
    inline cplx cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

    inline double deg2rad(double d) { return d * kPi / 180.0; }
    inline double rad2deg(double r) { return r * 180.0 / kPi; }

    // n evenly spaced samples on [lo, hi] (n == 1 gives lo)
    inline RVec linspace(double lo, double hi, Eigen::Index n)
    {
        RVec out(n);
        if (n == 1)
        {
            out(0) = lo;
            return out;
        }
        for (Eigen::Index i = 0; i < n; ++i)
            out(i) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        return out;
    }

    // Worker count: TBAF_THREADS if set and positive, otherwise hardware concurrency
    inline unsigned worker_count()
    {
        if (const char *env = std::getenv("TBAF_THREADS"))
        {
            char *end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end != env && v > 0)
                return static_cast<unsigned>(v);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1u : hw;
    }

    // Runs fn(i) for i in [0, n). Each index is processed by exactly one worker
    // and writes only its own output slot, so results do not depend on the worker count.
    template <typename Fn>
    void parallel_for(std::size_t n, Fn &&fn)
    {
        const std::size_t workers = std::min<std::size_t>(worker_count(), n);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back([&, w]
                                  {
                                      try
                                      {
                                          for (std::size_t i = w; i < n; i += workers)
                                              fn(i);
                                      }
                                      catch (...)
                                      {
                                          errors[w] = std::current_exception();
                                      } });
        }
        for (auto &e : errors)
            if (e)
                std::rethrow_exception(e);
    }
} // namespace tbaf

#endif
