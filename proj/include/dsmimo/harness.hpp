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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsmimo/channel.hpp"
#include "dsmimo/inner.hpp"
#include "dsmimo/outer.hpp"

namespace dsmimo::harness {

/// Sweep definition. Every std::vector field is a sweep axis; the grid is
/// their Cartesian product, nested in declaration order (snr_db innermost).
struct ExperimentConfig {
  std::vector<channel::Scenario> scenarios{channel::Scenario::poor};
  std::vector<int> layers{2};
  /// nullopt stands for "no outer layer"; only valid for single-layer points.
  std::vector<std::optional<outer::Method>> outer{outer::Method::cme};
  std::vector<inner::Method> inner{inner::Method::met_mmse};
  std::vector<int> n_users{1};
  std::vector<int> n_s{1};
  std::vector<double> snr_db{20.0};

  int n_t = 64;
  int n_r = 64;
  /// nullopt ties the outer width to the point's n_s.
  std::optional<int> m_t = 4;
  std::optional<int> m_r = 4;

  int n_trials = 1000;
  int n_slots = 100;
  double sigma_n2 = 1e-3;
  double sigma_c_deg = 5.0;
  double gain_variance = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// One grid point. layers == 1 implies outer == nullopt and m = n.
struct GridPoint {
  channel::Scenario scenario = channel::Scenario::poor;
  int layers = 2;
  std::optional<outer::Method> outer;
  inner::Method inner = inner::Method::met_mmse;
  int n_users = 1;
  int n_s = 1;
  double snr_db = 20.0;
  int m_t = 4;
  int m_r = 4;
};

struct RateRecord {
  std::string outer;
  std::string inner;
  int layers = 2;
  std::string scenario;
  double snr_db = 0.0;
  int n_users = 0;
  int n_streams = 0;
  int m_t = 0;
  int m_r = 0;
  int n_trials = 0;
  double mean_rate = 0.0;
  double stderr_rate = 0.0;
  std::string status = "ok";  // ok | infeasible | error:<code>
};

struct TrialOutcome {
  double rate = 0.0;
  bool feasible = true;
  std::string reason;  // error code when !feasible
};

/// Grid points in deterministic order.
std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg);

/// Seed of the channel draws of a grid point. Depends only on the master seed,
/// the scenario and the user count, so every method, SNR and stream count
/// evaluated at the same (scenario, U) sees the same channels.
std::uint64_t channel_seed(std::uint64_t master, channel::Scenario scenario,
                           int n_users);

/// Channel draws of one trial: macroscopic state and the evaluation
/// realization of every user. Independent of the methods under test.
struct TrialChannels {
  std::uint64_t trial_seed = 0;
  std::vector<channel::MacroState> users;
  std::vector<CMatrix> channels;
};

TrialChannels draw_trial_channels(const ExperimentConfig& cfg, const GridPoint& point,
                                  std::uint64_t point_seed, int trial);

/// One Monte Carlo trial: macroscopic drop, outer filters from CSI, fresh
/// phase realization, inner filters, normalization and sum rate.
TrialOutcome run_trial(const ExperimentConfig& cfg, const GridPoint& point,
                       std::uint64_t point_seed, int trial);

/// Averages cfg.n_trials trials of a two-layer (or single-layer, when
/// point.layers == 1) grid point.
RateRecord run_point(const ExperimentConfig& cfg, const GridPoint& point,
                     std::uint64_t point_seed, int threads = 1);

/// Same as run_point for a single-layer point: the inner scheme works on the
/// full N_r x N_t channels.
RateRecord run_single_layer(const ExperimentConfig& cfg, const GridPoint& point,
                            std::uint64_t point_seed, int threads = 1);

/// Runs every grid point. Errors are recorded per row and never abort.
std::vector<RateRecord> run_sweep(const ExperimentConfig& cfg, int threads = 1);

/// Header plus one row per record; numbers with 6 significant digits.
std::string emit_csv(const std::vector<RateRecord>& records);

inline constexpr std::string_view kCsvHeader =
    "outer,inner,layers,scenario,snr_db,n_users,n_streams,m_t,m_r,n_trials,"
    "mean_rate,stderr,status";

// Config files: see README for the schema.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

struct Preset {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

const std::vector<Preset>& presets();
const Preset& find_preset(std::string_view name);

}  // namespace dsmimo::harness
