/*
 * Copyright 2026 The dsmimo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end for the Monte Carlo harness.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dsmimo/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

dsmimo::harness::ExperimentConfig resolve(const std::string& config_path,
                                          const std::string& preset) {
  if (!config_path.empty() && !preset.empty())
    throw dsmimo::ConfigError("--config and --preset are mutually exclusive");
  if (!preset.empty()) return dsmimo::harness::find_preset(preset).config;
  if (config_path.empty()) throw dsmimo::ConfigError("one of --config or --preset is required");
  return dsmimo::harness::load_config(config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered transceiver simulator for double-sided massive MIMO downlink"};
  app.require_subcommand(1);

  std::string config_path, preset, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int threads = 1;

  auto* run = app.add_subcommand("run", "run a sweep and write CSV results");
  run->add_option("--config", config_path, "experiment config file");
  run->add_option("--preset", preset, "named preset (see list-presets)");
  run->add_option("--seed", seed, "master seed (overrides the config)");
  run->add_option("--out", out_path, "CSV output path (default: stdout)");
  run->add_option("--trials", trials, "trials per grid point (overrides the config)")
      ->check(CLI::PositiveNumber);
  run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-presets", "print the built-in presets");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "parse and check a config file");
  validate->add_option("--config", validate_path, "experiment config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& p : dsmimo::harness::presets())
        std::cout << p.name << "\t" << p.description << "\n";
      return 0;
    }
    if (*validate) {
      const auto cfg = dsmimo::harness::load_config(validate_path);
      std::cout << "ok: " << dsmimo::harness::expand_grid(cfg).size() << " grid points\n";
      return 0;
    }

    auto cfg = resolve(config_path, preset);
    if (seed) cfg.seed = *seed;
    if (trials) cfg.n_trials = *trials;
    cfg.validate();

    const auto rows = dsmimo::harness::run_sweep(cfg, threads);
    const auto csv = dsmimo::harness::emit_csv(rows);
    if (out_path.empty()) {
      std::cout << csv;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw dsmimo::ConfigError("cannot write '" + out_path + "'");
      f << csv;
    }
    const bool all_failed = std::all_of(rows.begin(), rows.end(), [](const auto& r) {
      return r.status.rfind("error:", 0) == 0;
    });
    if (!all_failed) return 0;
    const bool all_config = std::all_of(rows.begin(), rows.end(),
                                        [](const auto& r) { return r.status == "error:config"; });
    std::cerr << "every grid point failed\n";
    return all_config ? kExitConfig : kExitNumerical;
  } catch (const dsmimo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dsmimo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
