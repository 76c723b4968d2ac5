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

#include <algorithm>
#include <numeric>
#include <set>

#include "dsmimo/outer.hpp"
#include "oracles.hpp"

using namespace dsmimo;
using namespace dsmimo::outer;

namespace {

channel::CovariancePair with_ul(CMatrix c_ul) {
  channel::CovariancePair p;
  p.c_dl = c_ul;
  p.c_ul = std::move(c_ul);
  p.n_slots = 1;
  return p;
}

RVector random_powers(int n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  RVector p(n);
  for (int i = 0; i < n; ++i) p[i] = e(rng);
  return p;
}

}  // namespace

TEST_CASE("cme on a fully degenerate spectrum is semi-unitary") {
  const auto f = cme(with_ul(CMatrix::Identity(6, 6)), 3, 2);
  CHECK((f.f_o.adjoint() * f.f_o - CMatrix::Identity(3, 3)).norm() < 1e-10);
  CHECK((f.w_o.adjoint() * f.w_o - CMatrix::Identity(2, 2)).norm() < 1e-10);
  CHECK(f.method == Method::cme);
}

TEST_CASE("cme on a diagonal spectrum picks the dominant axis") {
  CMatrix c = CMatrix::Zero(4, 4);
  c.diagonal() << 4, 1, 0, 0;
  const auto f = cme(with_ul(c), 1, 1);
  CHECK(std::abs(f.f_o(0, 0)) == doctest::Approx(1.0));
  CHECK(f.f_o.bottomRows(3).norm() < 1e-12);
}

TEST_CASE("cme rejects non-Hermitian input and bad widths") {
  CMatrix c = CMatrix::Identity(3, 3);
  c(0, 1) = 1.0;
  CHECK_THROWS_AS(cme(with_ul(c), 1, 1), ContractViolation);
  CHECK_THROWS_AS(cme(with_ul(CMatrix::Identity(3, 3)), 4, 1), ConfigError);
}

TEST_CASE("cme captures more energy than random semi-unitary filters") {
  const channel::LinkGeometry link{{32, 0.5}, {32, 0.5}};
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const auto macro = channel::draw_macroscopic(channel::Scenario::poor, 1, rng)[0];
    const auto cov = channel::estimate_covariances(link, macro, 100, rng);
    const auto f = cme(cov, 8, 8);
    CHECK((f.f_o.adjoint() * f.f_o - CMatrix::Identity(8, 8)).norm() < 1e-10);
    const double best = (f.f_o.adjoint() * cov.c_ul * f.f_o).trace().real();
    for (int k = 0; k < 100; ++k) {
      const CMatrix q = oracle::random_semi_unitary(32, 8, rng);
      CHECK(best >= (q.adjoint() * cov.c_ul * q).trace().real());
    }
    // column energies are non-increasing
    for (int k = 1; k < 8; ++k) {
      const double prev = (f.f_o.col(k - 1).adjoint() * cov.c_ul * f.f_o.col(k - 1))(0, 0).real();
      const double cur = (f.f_o.col(k).adjoint() * cov.c_ul * f.f_o.col(k))(0, 0).real();
      CHECK(cur <= prev + 1e-10 * cov.c_ul.norm());
    }
  }
}

TEST_CASE("pps sorts by power") {
  CMatrix a = CMatrix::Random(5, 3);
  RVector p(3);
  p << 3, 1, 2;
  const auto sel = pps(a, p, 2);
  CHECK(sel.indices == std::vector<int>{0, 2});
  CHECK(sel.columns.col(0) == a.col(0));
  CHECK(sel.columns.col(1) == a.col(2));
  CHECK(pps(a, p, 3).indices == std::vector<int>{0, 2, 1});
  CHECK_THROWS_AS(pps(a, p, 4), ConfigError);
}

TEST_CASE("pps ties keep the lower index") {
  Rng rng(1);
  std::uniform_int_distribution<int> level(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    RVector p(9);
    for (int i = 0; i < 9; ++i) p[i] = level(rng);
    std::vector<int> expected(9);
    std::iota(expected.begin(), expected.end(), 0);
    // brute force: insertion sort, strictly-greater moves left
    for (int i = 1; i < 9; ++i)
      for (int j = i; j > 0 && p[expected[j]] > p[expected[j - 1]]; --j)
        std::swap(expected[j], expected[j - 1]);
    for (int m = 1; m <= 9; ++m) {
      const auto sel = pps(CMatrix::Identity(9, 9), p, m);
      CHECK(sel.indices == std::vector<int>(expected.begin(), expected.begin() + m));
    }
  }
}

TEST_CASE("sps on orthogonal columns agrees with pps") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = oracle::random_semi_unitary(10, 6, rng);
    const RVector p = random_powers(6, rng);
    for (int m = 1; m <= 6; ++m) {
      const auto s = sps(a, p, m);
      const auto q = pps(a, p, m);
      CHECK(std::set<int>(s.indices.begin(), s.indices.end()) ==
            std::set<int>(q.indices.begin(), q.indices.end()));
    }
  }
}

TEST_CASE("sps skips a duplicated steering vector") {
  const channel::ArrayGeometry g{8, 0.5};
  CMatrix a(8, 3);
  a.col(0) = channel::ula_response(g, 0.6);
  a.col(1) = channel::ula_response(g, 1.7);
  a.col(2) = a.col(0);
  RVector p(3);
  p << 2, 1, 2;
  const auto sel = sps(a, p, 2);
  CHECK(sel.indices == std::vector<int>{0, 1});

  // after the first pick the duplicate projects to zero; the other path does not
  const CMatrix proj = oracle::left_null_projector(a.col(0));
  CHECK((proj * (2.0 * a.col(2))).norm() < 1e-12);
  CHECK((proj * a.col(1)).norm() > 1e-3);

  CHECK_THROWS_AS(sps(a, p, 3), RankDeficiencyError);
  CHECK_THROWS_AS(sps(a, p, 4), ConfigError);
}

TEST_CASE("sps with one pick is the strongest path") {
  Rng rng(3);
  const channel::ArrayGeometry g{16, 0.5};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> angles(7);
    std::uniform_real_distribution<double> ang(0.1, 3.0);
    for (auto& x : angles) x = ang(rng);
    const CMatrix a = channel::manifold(g, angles);
    const RVector p = random_powers(7, rng);
    CHECK(sps(a, p, 1).indices == pps(a, p, 1).indices);
  }
}

TEST_CASE("sps properties on clustered manifolds") {
  const channel::LinkGeometry link{{64, 0.5}, {64, 0.5}};
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto macro = channel::draw_macroscopic(channel::Scenario::fair, 1, rng)[0];
    const auto csi = channel::extract_partial_csi(link, macro);
    for (int m : {4, 8, 16}) {
      const auto sel = sps(csi.a_t, csi.powers, m);
      // residuals mutually orthogonal
      const CMatrix g = sel.residuals;
      const RVector nrm = g.colwise().norm();
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          CHECK(std::abs(g.col(i).dot(g.col(j))) <= 1e-8 * nrm[i] * nrm[j]);
      // selected columns linearly independent and bitwise copies
      const auto s = oracle::jacobi_svd(sel.columns).sigma;
      CHECK(s[m - 1] > 1e-8 * s[0]);
      for (int i = 0; i < m; ++i) CHECK(sel.columns.col(i) == csi.a_t.col(sel.indices[i]));
      // power scaling leaves the choice unchanged
      CHECK(sps(csi.a_t, 7.5 * csi.powers, m).indices == sel.indices);
      CHECK(pps(csi.a_t, 0.2 * csi.powers, m).indices == pps(csi.a_t, csi.powers, m).indices);
    }
  }
}

TEST_CASE("path-selection outer filters have unit-norm columns") {
  const channel::LinkGeometry link{{32, 0.5}, {16, 0.5}};
  Rng rng(6);
  const auto macro = channel::draw_macroscopic(channel::Scenario::fair, 1, rng)[0];
  const auto csi = channel::extract_partial_csi(link, macro);
  for (const auto& f : {pps(csi, 5, 3), sps(csi, 5, 3)}) {
    CHECK(f.f_o.rows() == 32);
    CHECK(f.f_o.cols() == 5);
    CHECK(f.w_o.rows() == 16);
    CHECK(f.w_o.cols() == 3);
    CHECK(f.f_o.squaredNorm() == doctest::Approx(5.0));
    CHECK(f.w_o.squaredNorm() == doctest::Approx(3.0));
  }
  CHECK(parse_method("sps") == Method::sps);
  CHECK_THROWS_AS(parse_method("zf"), ConfigError);
}
