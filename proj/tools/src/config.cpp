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

#include "walkbench/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "walkbench/diagnostics.hpp"
#include "walkbench/errors.hpp"

namespace walkbench::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"group", {"descriptor"}},
      {"measure", {"file"}},
      {"run",
       {"depth", "engine", "accelerator", "tolerance", "seed", "output", "cache_dir",
        "time_budget"}},
      {"kernel", {"radius", "closed_form_compare"}},
      {"radical", {"radius", "probe", "tolerance"}},
      {"metric", {"prefix_radius", "pairs"}},
      {"boundary", {"xs", "sequence", "ray", "from", "to"}},
      {"fock", {"depth", "x_radius", "z_radius", "margin", "n", "x", "y", "elements"}},
      {"covariance", {"g", "zeta_angle", "n", "x", "y", "x_radius", "z_radius"}},
      {"jobs", {"list"}},
  };
  return k;
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& t) : t_(t) {}

  std::optional<std::string> raw(const std::string& key) const {
    auto v = t_.get_optional<std::string>(pt::ptree::path_type(key, '/'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void str(const std::string& key, std::string& out) const {
    if (auto v = raw(key)) out = *v;
  }

  void integer(const std::string& key, int& out) const {
    if (auto v = raw(key)) out = static_cast<int>(number<long long>(key, *v));
  }

  void u64(const std::string& key, std::uint64_t& out) const {
    if (auto v = raw(key)) out = number<std::uint64_t>(key, *v);
  }

  void real(const std::string& key, double& out) const {
    if (auto v = raw(key)) out = to_double(key, *v);
  }

  void boolean(const std::string& key, bool& out) const {
    if (auto v = raw(key)) {
      if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
        out = true;
      } else if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
        out = false;
      } else {
        throw InvalidArgument(key + ": expected a boolean, got '" + *v + "'");
      }
    }
  }

  void list(const std::string& key, std::vector<std::string>& out) const {
    if (auto v = raw(key)) out = split_list(*v);
  }

  static double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
      d = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v.size() || v.empty()) throw InvalidArgument(key + ": not a number: '" + v + "'");
    return d;
  }

 private:
  template <typename T>
  static T number(const std::string& key, const std::string& v) {
    T out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      throw InvalidArgument(key + ": not an integer: '" + v + "'");
    }
    return out;
  }

  const pt::ptree& t_;
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += "; ";
    out += items[i];
  }
  return out;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  // base_dir is deliberately excluded.
  auto tie = [](const RunConfig& c) {
    return std::tie(c.descriptor, c.measure_file, c.depth, c.engine, c.accelerator, c.tolerance,
                    c.seed, c.output, c.cache_dir, c.time_budget, c.kernel_radius,
                    c.closed_form_compare, c.radical_radius, c.radical_probe,
                    c.radical_tolerance, c.metric_prefix_radius, c.metric_pairs, c.boundary_xs,
                    c.boundary_sequence, c.boundary_ray, c.boundary_from, c.boundary_to,
                    c.fock_depth, c.fock_x_radius, c.fock_z_radius, c.fock_margin, c.fock_n,
                    c.fock_x, c.fock_y, c.fock_elements, c.covariance_g,
                    c.covariance_zeta_angle, c.covariance_n, c.covariance_x, c.covariance_y,
                    c.covariance_x_radius, c.covariance_z_radius, c.jobs);
  };
  return tie(*this) == tie(o);
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

void validate(const RunConfig& c) {
  auto positive = [](const char* name, int v) {
    if (v <= 0) throw InvalidArgument(std::string(name) + " must be positive");
  };
  auto unit = [](const char* name, double v) {
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument(std::string(name) + " must lie in (0,1)");
  };
  if (c.descriptor.empty()) throw InvalidArgument("[group] descriptor is required");
  if (c.measure_file.empty()) throw InvalidArgument("[measure] file is required");
  positive("run.depth", c.depth);
  positive("kernel.radius", c.kernel_radius);
  positive("radical.radius", c.radical_radius);
  positive("radical.probe", c.radical_probe);
  positive("metric.prefix_radius", c.metric_prefix_radius);
  positive("fock.depth", c.fock_depth);
  positive("fock.x_radius", c.fock_x_radius);
  positive("fock.z_radius", c.fock_z_radius);
  positive("fock.n", c.fock_n);
  positive("covariance.n", c.covariance_n);
  unit("run.tolerance", c.tolerance);
  if (c.radical_tolerance) unit("radical.tolerance", *c.radical_tolerance);
  if (c.fock_margin < c.fock_n) throw InvalidArgument("fock.margin must be at least fock.n");
  if (c.fock_margin >= c.fock_depth) throw InvalidArgument("fock.margin must be below fock.depth");
  if (c.covariance_x_radius < 0 || c.covariance_z_radius < 0) {
    throw InvalidArgument("covariance radii must be nonnegative");
  }
  if (c.time_budget < 0.0) throw InvalidArgument("run.time_budget must be nonnegative");
  if (c.boundary_from < 0 || c.boundary_to < c.boundary_from) {
    throw InvalidArgument("boundary.from/to must satisfy 0 <= from <= to");
  }
  for (const char* e : {"auto", "generic", "lattice", "radial"}) {
    if (c.engine == e) return;
  }
  throw InvalidArgument("run.engine must be auto, generic, lattice or radial");
}

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  pt::ptree t;
  try {
    pt::read_ini(in, t);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : t) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw InvalidArgument("config: unknown section [" + section + "]");
    for (const auto& [key, v] : body) {
      if (!it->second.count(key)) {
        throw InvalidArgument("config: unknown key '" + key + "' in [" + section + "]");
      }
    }
  }
  Reader r(t);
  RunConfig c;
  c.base_dir = base_dir;
  r.str("group/descriptor", c.descriptor);
  r.str("measure/file", c.measure_file);
  r.integer("run/depth", c.depth);
  r.str("run/engine", c.engine);
  r.str("run/accelerator", c.accelerator);
  r.real("run/tolerance", c.tolerance);
  r.u64("run/seed", c.seed);
  r.str("run/output", c.output);
  r.str("run/cache_dir", c.cache_dir);
  r.real("run/time_budget", c.time_budget);
  r.integer("kernel/radius", c.kernel_radius);
  r.boolean("kernel/closed_form_compare", c.closed_form_compare);
  r.integer("radical/radius", c.radical_radius);
  r.integer("radical/probe", c.radical_probe);
  if (auto v = r.raw("radical/tolerance"); v && *v != "auto") {
    c.radical_tolerance = Reader::to_double("radical.tolerance", *v);
  }
  r.integer("metric/prefix_radius", c.metric_prefix_radius);
  if (auto v = r.raw("metric/pairs")) {
    for (const auto& p : split_list(*v)) {
      const auto colon = p.find(':');
      if (colon == std::string::npos) throw InvalidArgument("metric.pairs: expected y:z");
      c.metric_pairs.emplace_back(trim(p.substr(0, colon)), trim(p.substr(colon + 1)));
    }
  }
  r.list("boundary/xs", c.boundary_xs);
  r.list("boundary/sequence", c.boundary_sequence);
  r.str("boundary/ray", c.boundary_ray);
  r.integer("boundary/from", c.boundary_from);
  r.integer("boundary/to", c.boundary_to);
  r.integer("fock/depth", c.fock_depth);
  r.integer("fock/x_radius", c.fock_x_radius);
  r.integer("fock/z_radius", c.fock_z_radius);
  r.integer("fock/margin", c.fock_margin);
  r.integer("fock/n", c.fock_n);
  r.str("fock/x", c.fock_x);
  r.str("fock/y", c.fock_y);
  r.list("fock/elements", c.fock_elements);
  r.str("covariance/g", c.covariance_g);
  r.real("covariance/zeta_angle", c.covariance_zeta_angle);
  r.integer("covariance/n", c.covariance_n);
  r.str("covariance/x", c.covariance_x);
  r.str("covariance/y", c.covariance_y);
  r.integer("covariance/x_radius", c.covariance_x_radius);
  r.integer("covariance/z_radius", c.covariance_z_radius);
  r.list("jobs/list", c.jobs);
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path);
  auto dir = std::filesystem::path(path).parent_path();
  return parse_config(in, dir.empty() ? "." : dir.string());
}

std::string format_config(const RunConfig& c) {
  pt::ptree t;
  auto put = [&](const std::string& key, const std::string& v) {
    t.put(pt::ptree::path_type(key, '/'), v);
  };
  auto num = [](double v) { return format_double(v); };
  put("group/descriptor", c.descriptor);
  put("measure/file", c.measure_file);
  put("run/depth", std::to_string(c.depth));
  put("run/engine", c.engine);
  put("run/accelerator", c.accelerator);
  put("run/tolerance", num(c.tolerance));
  put("run/seed", std::to_string(c.seed));
  put("run/output", c.output);
  put("run/cache_dir", c.cache_dir);
  put("run/time_budget", num(c.time_budget));
  put("kernel/radius", std::to_string(c.kernel_radius));
  put("kernel/closed_form_compare", c.closed_form_compare ? "true" : "false");
  put("radical/radius", std::to_string(c.radical_radius));
  put("radical/probe", std::to_string(c.radical_probe));
  put("radical/tolerance", c.radical_tolerance ? num(*c.radical_tolerance) : "auto");
  put("metric/prefix_radius", std::to_string(c.metric_prefix_radius));
  std::vector<std::string> pairs;
  for (const auto& [y, z] : c.metric_pairs) pairs.push_back(y + ":" + z);
  put("metric/pairs", join(pairs));
  put("boundary/xs", join(c.boundary_xs));
  put("boundary/sequence", join(c.boundary_sequence));
  put("boundary/ray", c.boundary_ray);
  put("boundary/from", std::to_string(c.boundary_from));
  put("boundary/to", std::to_string(c.boundary_to));
  put("fock/depth", std::to_string(c.fock_depth));
  put("fock/x_radius", std::to_string(c.fock_x_radius));
  put("fock/z_radius", std::to_string(c.fock_z_radius));
  put("fock/margin", std::to_string(c.fock_margin));
  put("fock/n", std::to_string(c.fock_n));
  put("fock/x", c.fock_x);
  put("fock/y", c.fock_y);
  put("fock/elements", join(c.fock_elements));
  put("covariance/g", c.covariance_g);
  put("covariance/zeta_angle", num(c.covariance_zeta_angle));
  put("covariance/n", std::to_string(c.covariance_n));
  put("covariance/x", c.covariance_x);
  put("covariance/y", c.covariance_y);
  put("covariance/x_radius", std::to_string(c.covariance_x_radius));
  put("covariance/z_radius", std::to_string(c.covariance_z_radius));
  put("jobs/list", join(c.jobs));
  std::ostringstream out;
  pt::write_ini(out, t);
  return out.str();
}

std::string resolve(const RunConfig& c, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(c.base_dir) / p).lexically_normal().string();
}

}  // namespace walkbench::cli
