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

#include <span>
#include <string_view>
#include <vector>

#include "dsmimo/outer.hpp"
#include "dsmimo/types.hpp"

namespace dsmimo::inner {

enum class Method { met_mer, met_bd, met_mmse, bd_mer, none };

Method parse_method(std::string_view tag);
std::string_view to_string(Method m);

/// All user-pair effective channels W_{o,u}^H H_u F_{o,j}.
struct EffectiveChannelSet {
  /// h_eff[u][j]: combiner owner u, precoder owner j (M_r x M_t).
  std::vector<std::vector<CMatrix>> h_eff;
  /// W_{o,u}^H W_{o,u} (M_r x M_r); scales the effective noise covariance.
  std::vector<CMatrix> w_o_gram;

  int n_users() const { return static_cast<int>(h_eff.size()); }
  const CMatrix& operator()(int u, int j) const {
    return h_eff[static_cast<std::size_t>(u)][static_cast<std::size_t>(j)];
  }
  Eigen::Index m_r() const { return h_eff.at(0).at(0).rows(); }
  Eigen::Index m_t() const { return h_eff.at(0).at(0).cols(); }
};

struct InnerFilters {
  CMatrix f_i;         // M_t x N_s
  CMatrix w_i;         // M_r x N_s
  double gamma = 0.0;  // 0 until normalized
};

/// Leading n_s singular triplets, singular values descending.
struct TruncatedSvd {
  CMatrix u_s;
  CMatrix v_s;
  RVector sigma_s;
};

TruncatedSvd truncated_svd(const CMatrix& h, int n_s);

/// Orthogonal projector onto the complement of span(columns of a), i.e. onto
/// the null space of a^H. Left singular vectors past the numerical rank
/// (sigma > kRankTolerance * sigma_max) span the range of the projector.
CMatrix left_null_projector(const CMatrix& a);

/// Orthogonal projector onto the null space of a, built from the right
/// singular vectors past the numerical rank.
CMatrix right_null_projector(const CMatrix& a);

inline constexpr double kRankTolerance = 1e-10;

EffectiveChannelSet effective_channels(std::span<const CMatrix> channels,
                                       std::span<const outer::OuterFilters> outers);

/// Single-layer view: every effective channel is the full H_u and the
/// effective noise is white.
EffectiveChannelSet full_channels(std::span<const CMatrix> channels);

/// Precoder along the top right singular vectors, combiner along the top
/// left singular vectors. gamma is left at 0.
InnerFilters met_mer(const CMatrix& h_eff_u, int n_s);

/// MET precoders; combiners are the MER combiners projected onto the null
/// space of the interference each user sees from the others' MET precoders.
/// Requires U * n_s <= M_r.
std::vector<InnerFilters> met_bd(const EffectiveChannelSet& effset,
                                 std::span<const double> gammas, int n_s);

/// MET precoders with interference-aware MMSE combining:
///   R_yy = s2 W_o^H W_o + sum_j (g_j^2 / N_s) H_uj F_j F_j^H H_uj^H
///   W_i  = (g_u / N_s) R_yy^-1 H_uu F_u
/// Throws SolverError if R_yy is too ill-conditioned (cond > 1e12).
std::vector<InnerFilters> met_mmse(const EffectiveChannelSet& effset,
                                   std::span<const double> gammas,
                                   double sigma_n2, int n_s);

/// MER combiners; precoders are the MET precoders projected onto the null
/// space of the stacked (W_{i,j}^H H_eff[j][u]) rows of all other users.
/// Requires U * n_s <= M_t. gamma is left at 0.
std::vector<InnerFilters> bd_mer(const EffectiveChannelSet& effset, int n_s);

/// gamma = sqrt(P_t / U) / ||F_o F_i||_F
double normalize_gamma(const CMatrix& f_o, const CMatrix& f_i, double p_t,
                       int n_users);

/// Runs one inner scheme end to end and fills in every gamma. f_o[u] is the
/// outer precoder of user u (identity for a single-layer design).
/// Method::none passes the outer filters through (F_i, W_i identity) and
/// requires M_t = M_r = n_s.
std::vector<InnerFilters> design(Method method, const EffectiveChannelSet& effset,
                                 std::span<const CMatrix> f_o, double p_t,
                                 double sigma_n2, int n_s);

}  // namespace dsmimo::inner
