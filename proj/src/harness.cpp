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

#include "dsmimo/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include "dsmimo/metrics.hpp"
#include "dsmimo/rng.hpp"

namespace dsmimo::harness {

namespace {

enum Stream : std::uint64_t { kMacro = 0, kCovariance = 1, kEvaluation = 2 };

std::string outer_tag(const std::optional<outer::Method>& m) {
  return m ? std::string(outer::to_string(*m)) : std::string("none");
}

// Calls fn(i) for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
}

RateRecord blank_record(const GridPoint& p) {
  RateRecord r;
  r.outer = outer_tag(p.outer);
  r.inner = std::string(inner::to_string(p.inner));
  r.layers = p.layers;
  r.scenario = std::string(channel::to_string(p.scenario));
  r.snr_db = p.snr_db;
  r.n_users = p.n_users;
  r.n_streams = p.n_s;
  r.m_t = p.m_t;
  r.m_r = p.m_r;
  return r;
}

// Structural checks that do not need a channel draw. Returns false when the
// inner scheme is infeasible for the point's dimensions.
bool statically_feasible(const ExperimentConfig& cfg, const GridPoint& p) {
  if (p.n_users < 1 || p.n_s < 1) throw ConfigError("U and N_s must be positive");
  if (p.m_t < 1 || p.m_r < 1 || p.m_t > cfg.n_t || p.m_r > cfg.n_r)
    throw ConfigError("outer widths must lie in [1, N]");
  if (p.layers == 2 && !p.outer)
    throw ConfigError("two-layer points need an outer method");
  if (p.layers == 1 && p.outer)
    throw ConfigError("single-layer points cannot use an outer method");
  const int n_paths = channel::n_paths(p.scenario);
  if (p.outer && *p.outer != outer::Method::cme &&
      (p.m_t > n_paths || p.m_r > n_paths))
    throw ConfigError("path selection cannot pick more than L paths");
  if (p.inner == inner::Method::none) {
    if (p.m_t != p.n_s || p.m_r != p.n_s)
      throw ConfigError("outer-only transmission needs M_t = M_r = N_s");
    return true;
  }
  if (p.n_s > std::min(p.m_t, p.m_r))
    throw ConfigError("N_s cannot exceed min(M_t, M_r)");
  const long load = static_cast<long>(p.n_users) * p.n_s;
  if (p.inner == inner::Method::met_bd && load > p.m_r) return false;
  if (p.inner == inner::Method::bd_mer && load > p.m_t) return false;
  return true;
}

outer::OuterFilters outer_filters(const ExperimentConfig& cfg, const GridPoint& p,
                                  const channel::LinkGeometry& link,
                                  const channel::MacroState& macro,
                                  std::uint64_t trial_seed, int user) {
  switch (*p.outer) {
    case outer::Method::cme: {
      auto rng = make_rng(trial_seed, {kCovariance, static_cast<std::uint64_t>(user)});
      return outer::cme(channel::estimate_covariances(link, macro, cfg.n_slots, rng),
                        p.m_t, p.m_r);
    }
    case outer::Method::pps:
      return outer::pps(channel::extract_partial_csi(link, macro), p.m_t, p.m_r);
    case outer::Method::sps:
      return outer::sps(channel::extract_partial_csi(link, macro), p.m_t, p.m_r);
  }
  throw ConfigError("unknown outer method");
}

RateRecord aggregate(const GridPoint& p, const std::vector<TrialOutcome>& trials) {
  RateRecord rec = blank_record(p);
  double sum = 0.0;
  int n = 0;
  std::string first_error;
  for (const auto& t : trials) {
    if (t.feasible) {
      sum += t.rate;
      ++n;
    } else if (first_error.empty()) {
      first_error = t.reason;
    }
  }
  rec.n_trials = n;
  if (n == 0) {
    rec.status = "error:" + (first_error.empty() ? std::string("no_trials") : first_error);
    return rec;
  }
  rec.mean_rate = sum / n;
  double ss = 0.0;
  for (const auto& t : trials)
    if (t.feasible) ss += (t.rate - rec.mean_rate) * (t.rate - rec.mean_rate);
  rec.stderr_rate = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return rec;
}

}  // namespace

std::uint64_t channel_seed(std::uint64_t master, channel::Scenario scenario,
                           int n_users) {
  return derive_seed(master, {static_cast<std::uint64_t>(scenario),
                              static_cast<std::uint64_t>(n_users)});
}

TrialChannels draw_trial_channels(const ExperimentConfig& cfg, const GridPoint& p,
                                  std::uint64_t point_seed, int trial) {
  TrialChannels out;
  out.trial_seed = derive_seed(point_seed, {static_cast<std::uint64_t>(trial)});
  const channel::LinkGeometry link{{cfg.n_t, 0.5}, {cfg.n_r, 0.5}};
  auto macro_rng = make_rng(out.trial_seed, {kMacro});
  out.users = channel::draw_macroscopic(p.scenario, p.n_users, macro_rng,
                                        {cfg.sigma_c_deg, cfg.gain_variance});
  auto eval_rng = make_rng(out.trial_seed, {kEvaluation});
  out.channels.reserve(out.users.size());
  for (const auto& macro : out.users) {
    const auto phases = channel::draw_phases(macro.n_paths(), eval_rng);
    out.channels.push_back(channel::realize_channel(link, macro, phases));
  }
  return out;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, const GridPoint& p,
                       std::uint64_t point_seed, int trial) {
  const channel::LinkGeometry link{{cfg.n_t, 0.5}, {cfg.n_r, 0.5}};
  const auto n_users = static_cast<std::size_t>(p.n_users);
  try {
    const auto draw = draw_trial_channels(cfg, p, point_seed, trial);
    const auto& users = draw.users;
    const auto& channels = draw.channels;
    const std::uint64_t trial_seed = draw.trial_seed;

    const double p_t = metrics::snr_to_power(p.snr_db, cfg.sigma_n2);
    metrics::LinkFilters link_filters;
    link_filters.f.reserve(n_users);
    link_filters.w.reserve(n_users);

    if (p.layers == 1) {
      const auto effset = inner::full_channels(channels);
      const std::vector<CMatrix> identity(n_users, CMatrix::Identity(cfg.n_t, cfg.n_t));
      const auto filters = inner::design(p.inner, effset, identity, p_t, cfg.sigma_n2, p.n_s);
      for (const auto& f : filters) {
        link_filters.f.push_back(f.gamma * f.f_i);
        link_filters.w.push_back(f.w_i);
      }
    } else {
      std::vector<outer::OuterFilters> outers;
      outers.reserve(n_users);
      for (std::size_t u = 0; u < n_users; ++u)
        outers.push_back(outer_filters(cfg, p, link, users[u], trial_seed, static_cast<int>(u)));
      const auto effset = inner::effective_channels(channels, outers);
      std::vector<CMatrix> f_o;
      f_o.reserve(n_users);
      for (const auto& o : outers) f_o.push_back(o.f_o);
      const auto filters = inner::design(p.inner, effset, f_o, p_t, cfg.sigma_n2, p.n_s);
      for (std::size_t u = 0; u < n_users; ++u) {
        link_filters.f.push_back(filters[u].gamma * (outers[u].f_o * filters[u].f_i));
        link_filters.w.push_back(outers[u].w_o * filters[u].w_i);
      }
    }
    return {metrics::sum_rate(channels, link_filters, cfg.sigma_n2, p.n_s), true, {}};
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    return {0.0, false, e.code()};
  }
}

RateRecord run_point(const ExperimentConfig& cfg, const GridPoint& point,
                     std::uint64_t point_seed, int threads) {
  if (!statically_feasible(cfg, point)) {
    RateRecord rec = blank_record(point);
    rec.status = "infeasible";
    return rec;
  }
  std::vector<TrialOutcome> trials(static_cast<std::size_t>(cfg.n_trials));
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  parallel_for(cfg.n_trials, threads, [&](int t) {
    if (failed) return;
    try {
      trials[static_cast<std::size_t>(t)] = run_trial(cfg, point, point_seed, t);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return aggregate(point, trials);
}

RateRecord run_single_layer(const ExperimentConfig& cfg, const GridPoint& point,
                            std::uint64_t point_seed, int threads) {
  if (point.layers != 1) throw ConfigError("single-layer run needs layers = 1");
  return run_point(cfg, point, point_seed, threads);
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
  std::vector<GridPoint> grid;
  for (auto scenario : cfg.scenarios)
    for (int layers : cfg.layers) {
      std::vector<std::optional<outer::Method>> outers = cfg.outer;
      if (layers == 1) outers = {std::nullopt};
      for (const auto& o : outers)
        for (auto in : cfg.inner)
          for (int u : cfg.n_users)
            for (int ns : cfg.n_s)
              for (double snr : cfg.snr_db) {
                GridPoint p;
                p.scenario = scenario;
                p.layers = layers;
                p.outer = o;
                p.inner = in;
                p.n_users = u;
                p.n_s = ns;
                p.snr_db = snr;
                p.m_t = layers == 1 ? cfg.n_t : cfg.m_t.value_or(ns);
                p.m_r = layers == 1 ? cfg.n_r : cfg.m_r.value_or(ns);
                grid.push_back(p);
              }
    }
  return grid;
}

std::vector<RateRecord> run_sweep(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  std::vector<RateRecord> rows;
  for (const auto& p : expand_grid(cfg)) {
    try {
      rows.push_back(run_point(cfg, p, channel_seed(cfg.seed, p.scenario, p.n_users), threads));
    } catch (const Error& e) {
      RateRecord rec = blank_record(p);
      rec.status = "error:" + e.code();
      rows.push_back(std::move(rec));
    }
  }
  return rows;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string emit_csv(const std::vector<RateRecord>& records) {
  if (records.empty()) throw ContractViolation("no records to emit");
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    const bool ok = r.status == "ok";
    out += r.outer + ',' + r.inner + ',' + std::to_string(r.layers) + ',' + r.scenario +
           ',' + fmt6(r.snr_db) + ',' + std::to_string(r.n_users) + ',' +
           std::to_string(r.n_streams) + ',' + std::to_string(r.m_t) + ',' +
           std::to_string(r.m_r) + ',' + std::to_string(r.n_trials) + ',' +
           (ok ? fmt6(r.mean_rate) : std::string()) + ',' +
           (ok ? fmt6(r.stderr_rate) : std::string()) + ',' + r.status + '\n';
  }
  return out;
}

}  // namespace dsmimo::harness
