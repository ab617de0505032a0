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

#include <iostream>

#include "CLI11.hpp"
#include "walkbench/cli/commands.hpp"

namespace walkbench::cli {

int run_cli(int argc, char** argv) {
  CLI::App app{"walkbench: ratio limits, boundaries and Fock operators of random walks"};
  app.footer(
      "Exit codes:\n"
      "  0  success\n"
      "  1  acceptance failure (a diagnostic is out of tolerance)\n"
      "  2  precondition failure (bad input, periodic walk, coverage gap)\n"
      "  3  budget exhaustion (support, memory or time budget)");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out;
  int max_depth = 0;
  double tolerance = 0.0;
  bool closed_form = false;
  long long seed = -1;
  app.add_option("--config", config_path, "Run configuration (INI)")->required();
  app.add_option("--out", out, "Output directory (overrides [run] output)");
  app.add_option("--max-depth", max_depth, "Cache depth M (overrides [run] depth)")
      ->check(CLI::PositiveNumber);
  app.add_option("--tolerance", tolerance, "Tolerance (overrides [run] tolerance)")
      ->check(CLI::Range(0.0, 1.0));
  app.add_flag("--closed-form-compare", closed_form,
               "kernel: compare against the isotropic free-group closed form");
  app.add_option("--seed", seed, "Seed for power iterations")->check(CLI::NonNegativeNumber);

  const char* help[] = {
      "Spectral radius estimate and ratio tail",
      "Ratio-limit kernel table on a ball",
      "Radical detection",
      "Ratio metric and its pseudometric axioms",
      "Traces H(x, y_k) along a sequence",
      "Fock window defect reports",
      "Translation and gauge covariance",
      "Run the job list and aggregate all reports",
  };
  std::string chosen;
  for (std::size_t i = 0; i < command_names().size(); ++i) {
    const auto& name = command_names()[i];
    app.add_subcommand(name, help[i])->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitPrecondition;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!out.empty()) cfg.output = out;
    if (max_depth > 0) cfg.depth = max_depth;
    if (tolerance > 0.0) cfg.tolerance = tolerance;
    if (closed_form) cfg.closed_form_compare = true;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    Session session(std::move(cfg));
    return run_command(chosen, session);
  } catch (const std::exception& e) {
    std::cerr << "walkbench " << chosen << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace walkbench::cli
