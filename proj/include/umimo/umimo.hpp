// SPDX-License-Identifier: Apache-2.0
//
// umimo - system-level simulator of massive-MIMO cellular downlink sharing
// unlicensed spectrum with WLAN devices through spatial radiation nulls
// Copyright (C) 2026 the umimo authors
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

#ifndef UMIMO_UMIMO_HPP
#define UMIMO_UMIMO_HPP

#include "umimo/coexistence.hpp"
#include "umimo/config.hpp"
#include "umimo/engine.hpp"
#include "umimo/geometry.hpp"
#include "umimo/metrics.hpp"
#include "umimo/propagation.hpp"
#include "umimo/report.hpp"
#include "umimo/rng.hpp"
#include "umimo/scheduling.hpp"
#include "umimo/spatial.hpp"
#include "umimo/units.hpp"

namespace umimo {
inline constexpr const char* kVersion = "0.1.0";
}

#endif // UMIMO_UMIMO_HPP
