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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "walkbench/cli/config.hpp"
#include "walkbench/diagnostics.hpp"
#include "walkbench/group.hpp"
#include "walkbench/kernel.hpp"
#include "walkbench/measure.hpp"
#include "walkbench/powers.hpp"
#include "walkbench/spectral.hpp"

namespace walkbench::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitAcceptance = 1,
  kExitPrecondition = 2,
  kExitBudget = 3,
};

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// Lazily computed state shared by the commands of one run.
class Session {
 public:
  explicit Session(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }
  std::shared_ptr<const Group> group();
  const ScaledMeasure& measure();
  /// Built on demand; reused across sessions in this process and, when
  /// cache_dir is set, across processes via the content hash.
  std::shared_ptr<const PowersCache> cache();
  const SpectralEstimate& spectrum();
  /// Local-limit fit; empty when the cache has too few return levels.
  const std::optional<LocalLimitFit>& fit();
  std::shared_ptr<const KernelSource> ratio_kernel();
  AccelerationOptions acceleration() const;

  /// {M, rhoHat, acceleration, engine, descriptor}.
  Json provenance();
  std::filesystem::path out_dir() const;
  /// Writes out_dir()/name atomically and records the file.
  void write(const std::string& name, const std::string& text);
  const std::vector<std::string>& written() const { return written_; }

  /// Parses an element of the configured group.
  GroupElement element(const std::string& text);
  std::vector<GroupElement> elements(const std::vector<std::string>& texts);

 private:
  RunConfig cfg_;
  std::shared_ptr<const Group> group_;
  std::optional<ScaledMeasure> measure_;
  std::shared_ptr<const PowersCache> cache_;
  std::optional<SpectralEstimate> spectrum_;
  std::optional<std::optional<LocalLimitFit>> fit_;
  std::shared_ptr<const KernelSource> kernel_;
  std::vector<std::string> written_;
};

using CommandFn = std::vector<DiagnosticsReport> (*)(Session&);

std::vector<DiagnosticsReport> cmd_spectrum(Session& s);
std::vector<DiagnosticsReport> cmd_kernel(Session& s);
std::vector<DiagnosticsReport> cmd_radical(Session& s);
std::vector<DiagnosticsReport> cmd_metric(Session& s);
std::vector<DiagnosticsReport> cmd_boundary(Session& s);
std::vector<DiagnosticsReport> cmd_fock(Session& s);
std::vector<DiagnosticsReport> cmd_covariance(Session& s);
/// Runs the configured job list (default: every other command) and writes
/// summary.json. Jobs that throw are recorded as failed.
std::vector<DiagnosticsReport> cmd_report(Session& s);

/// Command by name, or nullptr.
CommandFn find_command(const std::string& name);
const std::vector<std::string>& command_names();

/// Runs one command: writes reports/<name>.json and returns the exit code.
int run_command(const std::string& name, Session& s);

/// Full command line entry point.
int run_cli(int argc, char** argv);

}  // namespace walkbench::cli
