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

#include "dsmimo/outer.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace dsmimo::outer {

Method parse_method(std::string_view tag) {
  if (tag == "cme") return Method::cme;
  if (tag == "pps") return Method::pps;
  if (tag == "sps") return Method::sps;
  throw ConfigError("unknown outer method '" + std::string(tag) + "'");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::cme: return "cme";
    case Method::pps: return "pps";
    case Method::sps: return "sps";
  }
  return "?";
}

CMatrix dominant_eigenvectors(const CMatrix& cov, int m) {
  if (cov.rows() != cov.cols()) throw ContractViolation("covariance must be square");
  if (m < 1 || m > cov.rows())
    throw ConfigError("eigenfilter width must lie in [1, N]");
  const double scale = cov.norm();
  if ((cov - cov.adjoint()).norm() > 1e-10 * scale)
    throw ContractViolation("covariance is not Hermitian");

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov);
  if (eig.info() != Eigen::Success)
    throw ContractViolation("eigendecomposition failed");
  // ascending eigenvalues; take the last m columns in reverse
  const auto& q = eig.eigenvectors();
  CMatrix out(cov.rows(), m);
  for (int k = 0; k < m; ++k) out.col(k) = q.col(cov.cols() - 1 - k);
  return out;
}

OuterFilters cme(const channel::CovariancePair& cov, int m_t, int m_r) {
  return {dominant_eigenvectors(cov.c_ul, m_t),
          dominant_eigenvectors(cov.c_dl, m_r), Method::cme};
}

namespace {

void check_selection_args(const CMatrix& manifold, const RVector& powers, int m) {
  if (manifold.cols() != powers.size())
    throw ContractViolation("one power per manifold column is required");
  if (m < 1) throw ConfigError("selection width must be positive");
  if (m > manifold.cols())
    throw ConfigError("cannot select more paths than available");
}

}  // namespace

PathSelection pps(const CMatrix& manifold, const RVector& powers, int m) {
  check_selection_args(manifold, powers, m);
  std::vector<int> order(static_cast<std::size_t>(powers.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return powers[a] > powers[b]; });
  order.resize(static_cast<std::size_t>(m));

  PathSelection sel;
  sel.indices = std::move(order);
  sel.columns.resize(manifold.rows(), m);
  for (int i = 0; i < m; ++i) sel.columns.col(i) = manifold.col(sel.indices[i]);
  return sel;
}

PathSelection sps(const CMatrix& manifold, const RVector& powers, int m) {
  check_selection_args(manifold, powers, m);
  const auto n_paths = manifold.cols();
  const auto n = manifold.rows();

  std::vector<bool> remaining(static_cast<std::size_t>(n_paths), true);
  PathSelection sel;
  sel.columns.resize(n, m);
  sel.residuals.resize(n, m);
  RVector selected_energy(m);

  CVector g(n);
  CVector best_g(n);
  for (int i = 0; i < m; ++i) {
    int best = -1;
    double best_energy = -1.0;
    for (Eigen::Index l = 0; l < n_paths; ++l) {
      if (!remaining[static_cast<std::size_t>(l)]) continue;
      const CVector weighted = powers[l] * manifold.col(l);
      g = weighted;
      for (int j = 0; j < i; ++j) {
        const auto gj = sel.residuals.col(j);
        g -= gj * (gj.dot(weighted) / selected_energy[j]);
      }
      const double energy = g.squaredNorm();
      if (energy > best_energy) {
        best_energy = energy;
        best = static_cast<int>(l);
        best_g = g;
      }
    }
    if (best < 0 || best_energy < kSpsResidualFloor)
      throw RankDeficiencyError("no linearly independent path left after " +
                                std::to_string(i) + " selections");
    remaining[static_cast<std::size_t>(best)] = false;
    sel.indices.push_back(best);
    sel.columns.col(i) = manifold.col(best);
    sel.residuals.col(i) = best_g;
    selected_energy[i] = best_energy;
  }
  return sel;
}

OuterFilters pps(const channel::PartialCsi& csi, int m_t, int m_r) {
  return {pps(csi.a_t, csi.powers, m_t).columns,
          pps(csi.a_r, csi.powers, m_r).columns, Method::pps};
}

OuterFilters sps(const channel::PartialCsi& csi, int m_t, int m_r) {
  return {sps(csi.a_t, csi.powers, m_t).columns,
          sps(csi.a_r, csi.powers, m_r).columns, Method::sps};
}

}  // namespace dsmimo::outer
