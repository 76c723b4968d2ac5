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

#include <string_view>
#include <vector>

#include "dsmimo/channel.hpp"
#include "dsmimo/types.hpp"

namespace dsmimo::outer {

enum class Method { cme, pps, sps };

Method parse_method(std::string_view tag);
std::string_view to_string(Method m);

/// Per-user outer precoder (N_t x M_t) and combiner (N_r x M_r).
struct OuterFilters {
  CMatrix f_o;
  CMatrix w_o;
  Method method = Method::cme;
};

/// Columns picked from a manifold matrix, in selection order.
struct PathSelection {
  CMatrix columns;           // N x m, bitwise copies of manifold columns
  std::vector<int> indices;  // manifold column of each selected path
  CMatrix residuals;         // SPS only: the orthogonalized g vectors, N x m
};

/// Dominant eigenvectors of a Hermitian PSD matrix, eigenvalue-descending.
CMatrix dominant_eigenvectors(const CMatrix& cov, int m);

/// Covariance matrix eigenfilter: F_o from c_ul, W_o from c_dl.
OuterFilters cme(const channel::CovariancePair& cov, int m_t, int m_r);

/// Power-dominant path selection. Ties keep the lower manifold index first.
PathSelection pps(const CMatrix& manifold, const RVector& powers, int m);

/// Semi-orthogonal path selection.
///
/// Every round re-projects each unselected weighted steering vector
/// g_l = p_l a_l onto the orthogonal complement of the already selected g's
/// (classical Gram-Schmidt against the stored g's) and picks the largest
/// ||g_l||^2, lowest index on ties. Throws RankDeficiencyError when all
/// remaining residual energies fall below kSpsResidualFloor before m picks.
PathSelection sps(const CMatrix& manifold, const RVector& powers, int m);

inline constexpr double kSpsResidualFloor = 1e-12;

OuterFilters pps(const channel::PartialCsi& csi, int m_t, int m_r);
OuterFilters sps(const channel::PartialCsi& csi, int m_t, int m_r);

}  // namespace dsmimo::outer
