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

#ifndef TBAF_TBAF_HPP
#define TBAF_TBAF_HPP

#include "core.hpp"
#include "waveforms.hpp"
#include "geometry.hpp"
#include "ambiguity.hpp"
#include "tb_core.hpp"
#include "socp.hpp"
#include "tb_design.hpp"
#include "clear_region.hpp"
#include "sim_oracle.hpp"
#include "io.hpp"
#include "config.hpp"
#include "pipeline.hpp"

#endif
