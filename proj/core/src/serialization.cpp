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

#include "walkbench/serialization.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "walkbench/errors.hpp"
#include "walkbench/radial.hpp"

namespace walkbench {
namespace {

constexpr const char* kFormat = "walkbench-powers";
constexpr int kVersion = 1;

Json export_scaled(const Group& g, const ScaledMeasure& mu) {
  Json entries = Json::array();
  for (const auto& [x, v] : mu.support) entries.push_back({g.format(x), v});
  return {{"log_scale", mu.log_scale}, {"entries", entries}};
}

ScaledMeasure import_scaled(const Group& g, const Json& j) {
  ScaledMeasure mu;
  mu.log_scale = j.at("log_scale").get<double>();
  for (const auto& e : j.at("entries")) {
    const double v = e.at(1).get<double>();
    if (!(v > 0.0)) throw ParseError("nonpositive mantissa in a stored measure");
    mu.support.emplace(g.parse(e.at(0).get<std::string>()), v);
  }
  return mu;
}

std::vector<std::int64_t> box_coords(std::size_t i, int d, int radius) {
  const std::size_t S = static_cast<std::size_t>(2 * radius + 1);
  std::vector<std::int64_t> c(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    c[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(i % S) - radius;
    i /= S;
  }
  return c;
}

std::size_t box_index(const std::vector<std::int64_t>& c, int radius) {
  const std::int64_t S = 2 * radius + 1;
  std::int64_t idx = 0, stride = 1;
  for (auto v : c) {
    if (v < -radius || v > radius) throw ParseError("lattice cell outside its stored box");
    idx += (v + radius) * stride;
    stride *= S;
  }
  return static_cast<std::size_t>(idx);
}

}  // namespace

Json export_measure(const Group& g, const ScaledMeasure& mu) { return export_scaled(g, mu); }

ScaledMeasure import_measure(const Group& g, const Json& j) { return import_scaled(g, j); }

Json export_powers(const PowersCache& cache) {
  const auto& G = cache.group();
  Json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["descriptor"] = G.descriptor().to_string();
  j["engine"] = engine_name(cache.kind());
  j["M"] = cache.depth();
  j["requested"] = cache.requested_depth();
  j["truncation"] = cache.truncation_reason();
  j["step"] = export_scaled(G, cache.step());
  Json levels = Json::array();
  switch (cache.kind()) {
    case EngineKind::kGeneric: {
      const auto& c = dynamic_cast<const GenericPowers&>(cache);
      for (int m = 0; m <= c.depth(); ++m) levels.push_back(export_scaled(G, c.level(m)));
      break;
    }
    case EngineKind::kLattice: {
      const auto& c = dynamic_cast<const LatticePowers&>(cache);
      for (int m = 0; m <= c.depth(); ++m) {
        const auto& lv = c.level(m);
        Json entries = Json::array();
        for (std::size_t i = 0; i < lv.mantissa.size(); ++i) {
          if (!lv.reach[i]) continue;
          const auto pt = box_coords(i, c.rank(), lv.radius);
          entries.push_back({G.format(G.lattice_point(pt)), lv.mantissa[i]});
        }
        levels.push_back({{"radius", lv.radius},
                          {"full_radius", lv.full_radius},
                          {"log_scale", lv.log_scale},
                          {"entries", entries}});
      }
      break;
    }
    case EngineKind::kRadial: {
      const auto& c = dynamic_cast<const RadialPowers&>(cache);
      for (int m = 0; m <= c.depth(); ++m) {
        const auto& lv = c.level(m);
        levels.push_back({{"log_scale", lv.log_scale},
                          {"q", lv.q},
                          {"values", lv.values},
                          {"reach", c.reach(m)}});
      }
      break;
    }
    case EngineKind::kCartesian: {
      const auto& c = dynamic_cast<const CartesianPowers&>(cache);
      j["p_left"] = c.p_left();
      j["left"] = export_powers(c.left());
      j["right"] = export_powers(c.right());
      break;
    }
  }
  j["levels"] = levels;
  return j;
}

namespace {

std::shared_ptr<const PowersCache> import_powers_unchecked(const Json& j,
                                                           const GroupOptions& opts) {
  if (!j.is_object()) throw ParseError("not a powers artifact");
  if (j.value("format", std::string()) != kFormat) throw ParseError("not a powers artifact");
  if (j.value("version", 0) != kVersion) throw ParseError("unsupported powers artifact version");
  auto G = std::make_shared<const Group>(
      GroupDescriptor::parse(j.at("descriptor").get<std::string>()), opts);
  const std::string engine = j.at("engine").get<std::string>();
  const int M = j.at("M").get<int>();
  const int requested = j.at("requested").get<int>();
  const std::string reason = j.at("truncation").get<std::string>();
  const ScaledMeasure step = import_scaled(*G, j.at("step"));
  const auto& levels = j.at("levels");
  if (engine != "cartesian" && static_cast<int>(levels.size()) != M + 1) {
    throw ParseError("powers artifact has " + std::to_string(levels.size()) +
                     " levels for depth " + std::to_string(M));
  }

  if (engine == "generic") {
    std::vector<ScaledMeasure> lv;
    for (const auto& l : levels) lv.push_back(import_scaled(*G, l));
    return std::make_shared<GenericPowers>(G, step, std::move(lv), requested, reason);
  }
  if (engine == "lattice") {
    std::vector<LatticePowers::Level> lv;
    const int d = G->descriptor().rank();
    for (const auto& l : levels) {
      LatticePowers::Level out;
      out.radius = l.at("radius").get<int>();
      out.full_radius = l.at("full_radius").get<int>();
      out.log_scale = l.at("log_scale").get<double>();
      std::size_t n = 1;
      for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(2 * out.radius + 1);
      out.mantissa.assign(n, 0.0);
      out.reach.assign(n, 0);
      for (const auto& e : l.at("entries")) {
        const auto x = G->parse(e.at(0).get<std::string>());
        const auto& code = x.code();
        const auto i = box_index(std::vector<std::int64_t>(code.begin(), code.end()), out.radius);
        out.mantissa[i] = e.at(1).get<double>();
        out.reach[i] = 1;
      }
      lv.push_back(std::move(out));
    }
    return std::make_shared<LatticePowers>(G, step, std::move(lv), requested, reason);
  }
  if (engine == "radial") {
    std::vector<RadialMeasure> lv;
    std::vector<std::vector<std::uint8_t>> reach;
    for (const auto& l : levels) {
      RadialMeasure r;
      r.log_scale = l.at("log_scale").get<double>();
      r.q = l.at("q").get<int>();
      r.values = l.at("values").get<std::vector<double>>();
      lv.push_back(std::move(r));
      reach.push_back(l.at("reach").get<std::vector<std::uint8_t>>());
    }
    return std::make_shared<RadialPowers>(G, step, std::move(lv), std::move(reach), requested,
                                          reason);
  }
  if (engine == "cartesian") {
    auto left = import_powers(j.at("left"), opts);
    auto right = import_powers(j.at("right"), opts);
    return std::make_shared<CartesianPowers>(G, std::move(left), std::move(right),
                                             j.at("p_left").get<double>());
  }
  throw ParseError("unknown engine '" + engine + "'");
}

}  // namespace

std::shared_ptr<const PowersCache> import_powers(const Json& j, const GroupOptions& opts) {
  try {
    return import_powers_unchecked(j, opts);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed powers artifact: ") + e.what());
  }
}

void save_powers(const PowersCache& cache, const std::string& path) {
  write_file_atomic(path, export_powers(cache).dump());
}

std::shared_ptr<const PowersCache> load_powers(const std::string& path, const GroupOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return import_powers(j, opts);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string content_hash(const Group& g, const ScaledMeasure& mu, int M, EngineChoice engine) {
  std::ostringstream key;
  key << g.descriptor().to_string() << '\n' << M << '\n' << static_cast<int>(engine) << '\n';
  key << format_double(mu.log_scale) << '\n';
  for (const auto& [x, v] : mu.support) key << g.format(x) << ' ' << format_double(v) << '\n';
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key.str())));
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw InvalidArgument("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace walkbench
