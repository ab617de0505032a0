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
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace walkbench::cli {

/// One run, read from an INI file. Lists use ';' as separator because
/// lattice elements contain commas.
///
///   [group]     descriptor
///   [measure]   file (relative to the config file)
///   [run]       depth, engine, accelerator, tolerance, seed, output,
///               cache_dir, time_budget
///   [kernel]    radius, closed_form_compare
///   [radical]   radius, probe, tolerance (number or "auto")
///   [metric]    prefix_radius, pairs ("y:z; y:z")
///   [boundary]  xs, sequence, ray, from, to
///   [fock]      depth, x_radius, z_radius, margin, n, x, y, elements
///   [covariance] g, zeta_angle, n, x, y, x_radius, z_radius (0: as [fock])
///   [jobs]      list
struct RunConfig {
  std::string descriptor;
  std::string measure_file;

  int depth = 256;
  std::string engine = "auto";
  std::string accelerator = "richardson";
  double tolerance = 0.01;
  std::uint64_t seed = 1;
  std::string output = "out";
  std::string cache_dir;
  double time_budget = 0.0;  // seconds; 0 disables the check

  int kernel_radius = 2;
  bool closed_form_compare = false;

  int radical_radius = 2;
  int radical_probe = 2;
  std::optional<double> radical_tolerance;  // empty: propagated uncertainty

  int metric_prefix_radius = 2;
  std::vector<std::pair<std::string, std::string>> metric_pairs;

  std::vector<std::string> boundary_xs;
  std::vector<std::string> boundary_sequence;
  std::string boundary_ray;
  int boundary_from = 6;
  int boundary_to = 12;

  int fock_depth = 16;
  int fock_x_radius = 1;
  int fock_z_radius = 2;
  int fock_margin = 4;
  int fock_n = 1;
  std::string fock_x = "e";
  std::string fock_y;
  std::vector<std::string> fock_elements;

  std::string covariance_g;
  double covariance_zeta_angle = 0.7;
  int covariance_n = 1;
  std::string covariance_x = "e";
  std::string covariance_y;
  int covariance_x_radius = 0;
  int covariance_z_radius = 0;

  std::vector<std::string> jobs;

  /// Directory relative paths resolve against; not serialised.
  std::string base_dir = ".";

  bool operator==(const RunConfig& o) const;
};

/// Throws InvalidArgument unless depths and radii are positive and
/// tolerances lie in (0, 1).
void validate(const RunConfig& c);

RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& c);

/// measure_file resolved against base_dir.
std::string resolve(const RunConfig& c, const std::string& path);

std::vector<std::string> split_list(const std::string& text, char sep = ';');

}  // namespace walkbench::cli
