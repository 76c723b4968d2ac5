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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dsmimo/harness.hpp"

using namespace dsmimo;
using namespace dsmimo::harness;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_t = c.n_r = 16;
  c.n_slots = 10;
  c.n_trials = 8;
  c.m_t = c.m_r = 4;
  return c;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (sep != '\n' && !s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(R"(
# comment
scenario = [poor, rich]
inner = [met_mer, bd_mer]
n_users = [2, 4]   # trailing comment
n_s = 1
snr_db = [-10, 0.5]
m_t = n_s
m_r = 8
n_trials = 5
seed = 42
)");
  CHECK(c.scenarios.size() == 2);
  CHECK(c.scenarios[1] == channel::Scenario::rich);
  CHECK(c.inner == std::vector{inner::Method::met_mer, inner::Method::bd_mer});
  CHECK(c.n_users == std::vector{2, 4});
  CHECK(c.snr_db == std::vector{-10.0, 0.5});
  CHECK_FALSE(c.m_t.has_value());
  CHECK(c.m_r == 8);
  CHECK(c.n_trials == 5);
  CHECK(c.seed == 42u);

  const auto single = parse_config("layers = 1\ninner = met_mmse\n");
  CHECK(single.outer.size() == 1);
  CHECK_FALSE(single.outer[0].has_value());

  CHECK_THROWS_AS(parse_config("bogus = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_trials = 1\nn_trials = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = medium"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_trials = ten"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_trials = [1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_users = [1, 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_users = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("layers = 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("outer = none"), ConfigError);
  CHECK_THROWS_AS(parse_config("sigma_n2 = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("just text"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/dsmimo.conf"), ConfigError);
}

TEST_CASE("grid expansion") {
  auto c = small_config();
  c.scenarios = {channel::Scenario::poor, channel::Scenario::fair};
  c.snr_db = {0, 10, 20};
  const auto grid = expand_grid(c);
  REQUIRE(grid.size() == 6);
  CHECK(grid[0].scenario == channel::Scenario::poor);
  CHECK(grid[2].snr_db == 20.0);
  CHECK(grid[3].scenario == channel::Scenario::fair);

  c.layers = {1, 2};
  c.outer = {outer::Method::cme, outer::Method::sps};
  c.m_t = std::nullopt;
  c.n_s = {2};
  const auto g2 = expand_grid(c);
  // per scenario: 1 single-layer outer + 2 two-layer outers, times 3 SNRs
  CHECK(g2.size() == 2 * 3 * 3);
  CHECK(g2[0].layers == 1);
  CHECK_FALSE(g2[0].outer.has_value());
  CHECK(g2[0].m_t == 16);
  CHECK(g2[3].layers == 2);
  CHECK(g2[3].m_t == 2);
  CHECK(g2[3].m_r == 4);
}

TEST_CASE("sweeps are deterministic") {
  auto c = small_config();
  c.inner = {inner::Method::met_mmse, inner::Method::met_mer};
  c.n_users = {2};
  c.snr_db = {0, 20};
  const auto a = emit_csv(run_sweep(c));
  const auto b = emit_csv(run_sweep(c));
  CHECK(a == b);
  c.seed = 2;
  CHECK(emit_csv(run_sweep(c)) != a);
}

TEST_CASE("thread count does not change results") {
  auto c = small_config();
  c.outer = {outer::Method::cme, outer::Method::sps};
  c.inner = {inner::Method::met_mmse, inner::Method::bd_mer};
  c.n_users = {3};
  c.n_trials = 11;
  CHECK(emit_csv(run_sweep(c, 1)) == emit_csv(run_sweep(c, 3)));
}

TEST_CASE("block diagonalization feasibility is flagged per row") {
  auto c = small_config();
  c.n_t = c.n_r = 64;
  c.n_trials = 1;
  c.inner = {inner::Method::met_bd};
  c.n_users = {32};
  const auto rows = run_sweep(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "infeasible");

  c.scenarios = {channel::Scenario::fair};
  c.outer = {outer::Method::pps};
  c.inner = {inner::Method::bd_mer};
  c.m_t = c.m_r = 16;
  c.n_users = {8, 16, 20};
  const auto fair = run_sweep(c);
  REQUIRE(fair.size() == 3);
  CHECK(fair[0].status == "ok");
  CHECK(fair[1].status == "ok");
  CHECK(fair[2].status == "infeasible");
}

TEST_CASE("configuration errors are reported per row") {
  auto c = small_config();
  c.outer = {outer::Method::pps};
  c.m_t = c.m_r = 9;  // more than the 8 paths of the poor scenario
  const auto rows = run_sweep(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "error:config");
  CHECK(emit_csv(rows).find(",,error:config") != std::string::npos);

  auto none = small_config();
  none.inner = {inner::Method::none};
  none.n_s = {2};
  CHECK(run_sweep(none)[0].status == "error:config");
  none.m_t = none.m_r = std::nullopt;
  CHECK(run_sweep(none)[0].status == "ok");
}

TEST_CASE("CSV layout") {
  RateRecord ok;
  ok.outer = "cme";
  ok.inner = "met_mmse";
  ok.scenario = "poor";
  ok.snr_db = -5;
  ok.n_users = 4;
  ok.n_streams = 1;
  ok.m_t = ok.m_r = 4;
  ok.n_trials = 100;
  ok.mean_rate = 12.3456789;
  ok.stderr_rate = 0.01234567;
  const auto one = emit_csv({ok});
  const auto lines = split(one, '\n');
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == kCsvHeader);
  CHECK(lines[1] == "cme,met_mmse,2,poor,-5,4,1,4,4,100,12.3457,0.0123457,ok");

  RateRecord bad = ok;
  bad.status = "infeasible";
  bad.n_trials = 0;
  const auto two = split(emit_csv({ok, bad}), '\n');
  REQUIRE(two.size() == 3);
  const auto fields = split(two[2], ',');
  REQUIRE(fields.size() == 13);
  CHECK(fields[10].empty());
  CHECK(fields[11].empty());
  CHECK(fields[12] == "infeasible");

  // round trip of the numeric fields
  const auto f1 = split(lines[1], ',');
  CHECK(std::stod(f1[10]) == doctest::Approx(ok.mean_rate).epsilon(1e-5));
  CHECK(std::stoi(f1[9]) == ok.n_trials);
  CHECK(split(lines[0], ',').size() == f1.size());

  CHECK_THROWS_AS(emit_csv({}), ContractViolation);
}

TEST_CASE("paired channel draws across methods and layers") {
  auto c = small_config();
  GridPoint a;
  a.n_users = 3;
  a.outer = outer::Method::cme;
  a.inner = inner::Method::met_mmse;
  GridPoint b = a;
  b.layers = 1;
  b.outer = std::nullopt;
  b.inner = inner::Method::bd_mer;
  b.snr_db = -10;
  b.n_s = 2;
  const auto seed = channel_seed(c.seed, a.scenario, a.n_users);
  CHECK(seed == channel_seed(c.seed, b.scenario, b.n_users));
  CHECK(seed != channel_seed(c.seed, channel::Scenario::fair, a.n_users));
  CHECK(seed != channel_seed(c.seed, a.scenario, 4));
  for (int t = 0; t < 5; ++t) {
    const auto da = draw_trial_channels(c, a, seed, t);
    const auto db = draw_trial_channels(c, b, seed, t);
    REQUIRE(da.channels.size() == 3);
    for (std::size_t u = 0; u < 3; ++u) CHECK((da.channels[u] - db.channels[u]).norm() == 0.0);
  }
  const auto d0 = draw_trial_channels(c, a, seed, 0);
  const auto d1 = draw_trial_channels(c, a, seed, 1);
  CHECK((d0.channels[0] - d1.channels[0]).norm() > 0.0);
}

TEST_CASE("standard error shrinks as one over sqrt(n)") {
  auto c = small_config();
  c.n_t = c.n_r = 8;
  c.outer = {outer::Method::pps};
  c.inner = {inner::Method::met_mer};
  c.n_users = {2};
  GridPoint p = expand_grid(c).front();
  const auto seed = channel_seed(c.seed, p.scenario, p.n_users);
  std::vector<double> se;
  for (int n : {100, 400, 1600}) {
    c.n_trials = n;
    const auto rec = run_point(c, p, seed);
    REQUIRE(rec.status == "ok");
    CHECK(rec.n_trials == n);
    se.push_back(rec.stderr_rate);
  }
  CHECK(se[0] / se[1] == doctest::Approx(2.0).epsilon(0.3));
  CHECK(se[1] / se[2] == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("single-layer points") {
  auto c = small_config();
  c.layers = {1};
  c.outer = {std::nullopt};
  c.inner = {inner::Method::met_mer};
  c.n_users = {2};
  auto p = expand_grid(c).front();
  const auto seed = channel_seed(c.seed, p.scenario, p.n_users);
  const auto rec = run_single_layer(c, p, seed);
  CHECK(rec.status == "ok");
  CHECK(rec.outer == "none");
  CHECK(rec.mean_rate > 0.0);
  p.layers = 2;
  CHECK_THROWS_AS(run_single_layer(c, p, seed), ConfigError);
}

TEST_CASE("presets") {
  CHECK(presets().size() >= 12);
  const auto& p = find_preset("snr_poor_32users");
  CHECK(p.config.n_users == std::vector{32});
  CHECK(p.config.snr_db.size() == 9);
  CHECK(expand_grid(find_preset("outer_fair").config).size() == 3 * 8);
  for (const auto& preset : presets()) CHECK_NOTHROW(preset.config.validate());
  CHECK_THROWS_AS(find_preset("nope"), ConfigError);
}
