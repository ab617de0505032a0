// Copyright 2026 The walkbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "walkbench/diagnostics.hpp"
#include "walkbench/group.hpp"
#include "walkbench/measure.hpp"
#include "walkbench/powers.hpp"

namespace walkbench {

/// Powers-cache artifact:
///   {"format": "walkbench-powers", "version": 1, "descriptor", "engine",
///    "M", "requested", "truncation", "step": {"log_scale", "entries"},
///    "levels": [...]}
/// Generic levels hold {"log_scale", "entries": [[element, mantissa], ...]};
/// lattice levels add "radius", "full_radius" and store the retained box
/// as [[point, mantissa], ...] over reached cells; radial levels hold
/// {"log_scale", "q", "values", "reach"} indexed by tree distance.
/// Cartesian caches store "p_left" and the two component artifacts.
/// Mantissas are written with round-trip precision.
Json export_powers(const PowersCache& cache);
std::shared_ptr<const PowersCache> import_powers(const Json& j, const GroupOptions& opts = {});

void save_powers(const PowersCache& cache, const std::string& path);
std::shared_ptr<const PowersCache> load_powers(const std::string& path,
                                               const GroupOptions& opts = {});

Json export_measure(const Group& g, const ScaledMeasure& mu);
ScaledMeasure import_measure(const Group& g, const Json& j);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Cache key of (descriptor, measure, M, engine) as 16 hex digits.
std::string content_hash(const Group& g, const ScaledMeasure& mu, int M, EngineChoice engine);

/// Writes text to path through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace walkbench
