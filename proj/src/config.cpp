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

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "dsmimo/harness.hpp"

namespace dsmimo::harness {

void ExperimentConfig::validate() const {
  if (scenarios.empty() || layers.empty() || outer.empty() || inner.empty() ||
      n_users.empty() || n_s.empty() || snr_db.empty())
    throw ConfigError("sweep lists must be nonempty");
  if (n_t < 1 || n_r < 1) throw ConfigError("antenna counts must be positive");
  if ((m_t && *m_t < 1) || (m_r && *m_r < 1))
    throw ConfigError("outer widths must be positive");
  if (n_trials < 1) throw ConfigError("n_trials must be positive");
  if (n_slots < 1) throw ConfigError("n_slots must be positive");
  if (!(sigma_n2 > 0.0)) throw ConfigError("sigma_n2 must be positive");
  if (sigma_c_deg < 0.0) throw ConfigError("sigma_c_deg must be >= 0");
  if (!(gain_variance > 0.0)) throw ConfigError("gain_variance must be positive");
  for (int l : layers)
    if (l != 1 && l != 2) throw ConfigError("layers must be 1 or 2");
  for (int u : n_users)
    if (u < 1) throw ConfigError("n_users must be positive");
  for (int s : n_s)
    if (s < 1) throw ConfigError("n_s must be positive");
  const bool two_layer = std::find(layers.begin(), layers.end(), 2) != layers.end();
  if (two_layer && std::find(outer.begin(), outer.end(), std::nullopt) != outer.end())
    throw ConfigError("two-layer runs need an outer method (layers = 1 implies outer = none)");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  if (value.empty()) throw ConfigError("missing value for '" + key + "'");
  if (value.front() != '[') return {value};
  if (value.back() != ']') throw ConfigError("unterminated list for '" + key + "'");
  std::vector<std::string> items;
  std::stringstream ss(value.substr(1, value.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list item for '" + key + "'");
    items.push_back(item);
  }
  if (items.empty()) throw ConfigError("empty list for '" + key + "'");
  return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& token) {
  T v{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("bad number '" + token + "' for '" + key + "'");
  return v;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& key, const std::string& value) {
  std::vector<T> out;
  for (const auto& t : split_list(key, value)) out.push_back(parse_number<T>(key, t));
  return out;
}

std::string scalar(const std::string& key, const std::string& value) {
  auto items = split_list(key, value);
  if (items.size() != 1 || value.front() == '[')
    throw ConfigError("'" + key + "' takes a single value");
  return items.front();
}

std::optional<int> parse_width(const std::string& key, const std::string& value) {
  const auto token = scalar(key, value);
  if (token == "n_s") return std::nullopt;
  return parse_number<int>(key, token);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");

    if (key == "scenario") {
      cfg.scenarios.clear();
      for (const auto& t : split_list(key, value)) cfg.scenarios.push_back(channel::parse_scenario(t));
    } else if (key == "layers") {
      cfg.layers = parse_numbers<int>(key, value);
    } else if (key == "outer") {
      cfg.outer.clear();
      for (const auto& t : split_list(key, value))
        cfg.outer.push_back(t == "none" ? std::nullopt
                                        : std::optional(outer::parse_method(t)));
    } else if (key == "inner") {
      cfg.inner.clear();
      for (const auto& t : split_list(key, value)) cfg.inner.push_back(inner::parse_method(t));
    } else if (key == "n_users") {
      cfg.n_users = parse_numbers<int>(key, value);
    } else if (key == "n_s") {
      cfg.n_s = parse_numbers<int>(key, value);
    } else if (key == "snr_db") {
      cfg.snr_db = parse_numbers<double>(key, value);
    } else if (key == "n_t") {
      cfg.n_t = parse_number<int>(key, scalar(key, value));
    } else if (key == "n_r") {
      cfg.n_r = parse_number<int>(key, scalar(key, value));
    } else if (key == "m_t") {
      cfg.m_t = parse_width(key, value);
    } else if (key == "m_r") {
      cfg.m_r = parse_width(key, value);
    } else if (key == "n_trials") {
      cfg.n_trials = parse_number<int>(key, scalar(key, value));
    } else if (key == "n_slots") {
      cfg.n_slots = parse_number<int>(key, scalar(key, value));
    } else if (key == "sigma_n2") {
      cfg.sigma_n2 = parse_number<double>(key, scalar(key, value));
    } else if (key == "sigma_c_deg") {
      cfg.sigma_c_deg = parse_number<double>(key, scalar(key, value));
    } else if (key == "gain_variance") {
      cfg.gain_variance = parse_number<double>(key, scalar(key, value));
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, scalar(key, value));
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  // single-layer only: the outer axis is meaningless
  if (cfg.layers == std::vector<int>{1} && !seen.count("outer")) cfg.outer = {std::nullopt};
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

namespace {

using channel::Scenario;
using IM = inner::Method;
using OM = outer::Method;

const std::vector<IM> kAllInner{IM::met_mer, IM::met_bd, IM::met_mmse, IM::bd_mer};

ExperimentConfig outer_sweep(Scenario s) {
  ExperimentConfig c;
  c.scenarios = {s};
  c.outer = {OM::cme, OM::pps, OM::sps};
  c.inner = {IM::none};
  c.n_users = {1};
  const int n_paths = channel::n_paths(s);
  c.n_s.clear();
  for (int k = 1; k <= 8; ++k) c.n_s.push_back(n_paths * k / 8);
  c.m_t = std::nullopt;
  c.m_r = std::nullopt;
  c.snr_db = {20.0};
  return c;
}

ExperimentConfig snr_sweep(int n_users) {
  ExperimentConfig c;
  c.scenarios = {Scenario::poor};
  c.inner = kAllInner;
  c.n_users = {n_users};
  c.n_s = {1};
  c.m_t = c.m_r = 4;
  c.snr_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
  return c;
}

ExperimentConfig user_sweep(Scenario s, int m) {
  ExperimentConfig c;
  c.scenarios = {s};
  c.inner = kAllInner;
  c.n_users = {2, 4, 8, 12, 16, 20, 24, 28, 32, 40, 48, 56, 64};
  c.n_s = {1};
  c.m_t = c.m_r = m;
  c.snr_db = {20.0};
  return c;
}

ExperimentConfig bench(IM method) {
  ExperimentConfig c;
  c.scenarios = {Scenario::poor};
  c.layers = {1, 2};
  c.inner = {method};
  c.n_users = {2};
  c.n_s = {1, 2};
  c.m_t = c.m_r = 4;
  c.snr_db = {20.0};
  return c;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all{
      {"outer_poor", "outer layer only, U=1, M=N_s, N_s/L in 1/8..1, poor scattering",
       outer_sweep(Scenario::poor)},
      {"outer_fair", "outer layer only, U=1, M=N_s, N_s/L in 1/8..1, fair scattering",
       outer_sweep(Scenario::fair)},
      {"outer_rich", "outer layer only, U=1, M=N_s, N_s/L in 1/8..1, rich scattering",
       outer_sweep(Scenario::rich)},
      {"snr_poor_4users", "CME + all inner schemes vs SNR, poor, U=4, M=4, N_s=1",
       snr_sweep(4)},
      {"snr_poor_32users", "CME + all inner schemes vs SNR, poor, U=32, M=4, N_s=1",
       snr_sweep(32)},
      {"inner_poor", "CME + all inner schemes vs U, poor, M=4, 20 dB",
       user_sweep(Scenario::poor, 4)},
      {"inner_fair", "CME + all inner schemes vs U, fair, M=16, 20 dB",
       user_sweep(Scenario::fair, 16)},
      {"inner_rich", "CME + all inner schemes vs U, rich, M=32, 20 dB",
       user_sweep(Scenario::rich, 32)},
      {"bench_metmer", "MET-MER, 1-layer vs CME 2-layer, poor, U=2, M=4, N_s in {1,2}",
       bench(IM::met_mer)},
      {"bench_metbd", "MET-BD, 1-layer vs CME 2-layer, poor, U=2, M=4, N_s in {1,2}",
       bench(IM::met_bd)},
      {"bench_metmmse", "MET-MMSE, 1-layer vs CME 2-layer, poor, U=2, M=4, N_s in {1,2}",
       bench(IM::met_mmse)},
      {"bench_bdmer", "BD-MER, 1-layer vs CME 2-layer, poor, U=2, M=4, N_s in {1,2}",
       bench(IM::bd_mer)},
  };
  return all;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace dsmimo::harness
