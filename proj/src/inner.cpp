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

#include "dsmimo/inner.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace dsmimo::inner {

Method parse_method(std::string_view tag) {
  if (tag == "met_mer") return Method::met_mer;
  if (tag == "met_bd") return Method::met_bd;
  if (tag == "met_mmse") return Method::met_mmse;
  if (tag == "bd_mer") return Method::bd_mer;
  if (tag == "none") return Method::none;
  throw ConfigError("unknown inner method '" + std::string(tag) + "'");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::met_mer: return "met_mer";
    case Method::met_bd: return "met_bd";
    case Method::met_mmse: return "met_mmse";
    case Method::bd_mer: return "bd_mer";
    case Method::none: return "none";
  }
  return "?";
}

TruncatedSvd truncated_svd(const CMatrix& h, int n_s) {
  if (n_s < 1 || n_s > std::min(h.rows(), h.cols()))
    throw ConfigError("stream count must lie in [1, min(M_r, M_t)]");
  Eigen::BDCSVD<CMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().leftCols(n_s), svd.matrixV().leftCols(n_s),
          svd.singularValues().head(n_s)};
}

namespace {

Eigen::Index numerical_rank(const RVector& sigma) {
  if (sigma.size() == 0 || sigma[0] <= 0.0) return 0;
  const double floor = kRankTolerance * sigma[0];
  Eigen::Index r = 0;
  while (r < sigma.size() && sigma[r] > floor) ++r;
  return r;
}

CMatrix trailing_projector(const CMatrix& basis, Eigen::Index rank) {
  const auto tail = basis.rightCols(basis.cols() - rank);
  return tail * tail.adjoint();
}

void check_streams(const EffectiveChannelSet& effset, int n_s) {
  if (effset.n_users() < 1) throw ContractViolation("no users");
  if (n_s < 1 || n_s > std::min(effset.m_r(), effset.m_t()))
    throw ConfigError("stream count must lie in [1, min(M_r, M_t)]");
}

std::vector<TruncatedSvd> serving_svds(const EffectiveChannelSet& effset, int n_s) {
  std::vector<TruncatedSvd> out;
  out.reserve(static_cast<std::size_t>(effset.n_users()));
  for (int u = 0; u < effset.n_users(); ++u) out.push_back(truncated_svd(effset(u, u), n_s));
  return out;
}

}  // namespace

CMatrix left_null_projector(const CMatrix& a) {
  if (a.cols() == 0) return CMatrix::Identity(a.rows(), a.rows());
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeFullU);
  return trailing_projector(svd.matrixU(), numerical_rank(svd.singularValues()));
}

CMatrix right_null_projector(const CMatrix& a) {
  if (a.rows() == 0) return CMatrix::Identity(a.cols(), a.cols());
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  return trailing_projector(svd.matrixV(), numerical_rank(svd.singularValues()));
}

EffectiveChannelSet effective_channels(std::span<const CMatrix> channels,
                                       std::span<const outer::OuterFilters> outers) {
  if (channels.size() != outers.size() || channels.empty())
    throw ContractViolation("one outer filter pair per user channel is required");
  const auto n_users = channels.size();
  EffectiveChannelSet set;
  set.h_eff.resize(n_users);
  set.w_o_gram.reserve(n_users);
  const auto m_t = outers[0].f_o.cols();
  const auto m_r = outers[0].w_o.cols();
  for (std::size_t u = 0; u < n_users; ++u) {
    const auto& h = channels[u];
    const auto& w_o = outers[u].w_o;
    if (w_o.rows() != h.rows() || w_o.cols() != m_r)
      throw ContractViolation("outer combiner does not match channel");
    const CMatrix wh = w_o.adjoint() * h;
    set.h_eff[u].reserve(n_users);
    for (std::size_t j = 0; j < n_users; ++j) {
      const auto& f_o = outers[j].f_o;
      if (f_o.rows() != h.cols() || f_o.cols() != m_t)
        throw ContractViolation("outer precoder does not match channel");
      set.h_eff[u].push_back(wh * f_o);
    }
    set.w_o_gram.push_back(w_o.adjoint() * w_o);
  }
  return set;
}

EffectiveChannelSet full_channels(std::span<const CMatrix> channels) {
  if (channels.empty()) throw ContractViolation("no users");
  EffectiveChannelSet set;
  set.h_eff.resize(channels.size());
  for (std::size_t u = 0; u < channels.size(); ++u) {
    if (channels[u].rows() != channels[0].rows() || channels[u].cols() != channels[0].cols())
      throw ContractViolation("channel dimensions differ across users");
    set.h_eff[u].assign(channels.size(), channels[u]);
    set.w_o_gram.push_back(CMatrix::Identity(channels[u].rows(), channels[u].rows()));
  }
  return set;
}

InnerFilters met_mer(const CMatrix& h_eff_u, int n_s) {
  auto svd = truncated_svd(h_eff_u, n_s);
  return {std::move(svd.v_s), std::move(svd.u_s), 0.0};
}

std::vector<InnerFilters> met_bd(const EffectiveChannelSet& effset,
                                 std::span<const double> gammas, int n_s) {
  check_streams(effset, n_s);
  const int n_users = effset.n_users();
  if (static_cast<int>(gammas.size()) != n_users)
    throw ContractViolation("one gamma per user is required");
  if (static_cast<Eigen::Index>(n_users) * n_s > effset.m_r())
    throw InfeasibleError("BD combining needs U * N_s <= M_r");

  const auto svds = serving_svds(effset, n_s);
  std::vector<InnerFilters> out(static_cast<std::size_t>(n_users));
  for (int u = 0; u < n_users; ++u) {
    CMatrix interference(effset.m_r(), static_cast<Eigen::Index>(n_users - 1) * n_s);
    Eigen::Index col = 0;
    for (int j = 0; j < n_users; ++j) {
      if (j == u) continue;
      interference.middleCols(col, n_s) = effset(u, j) * svds[j].v_s;
      col += n_s;
    }
    auto& f = out[static_cast<std::size_t>(u)];
    f.f_i = svds[u].v_s;
    f.w_i = left_null_projector(interference) * svds[u].u_s;
    f.gamma = gammas[static_cast<std::size_t>(u)];
  }
  return out;
}

std::vector<InnerFilters> met_mmse(const EffectiveChannelSet& effset,
                                   std::span<const double> gammas,
                                   double sigma_n2, int n_s) {
  check_streams(effset, n_s);
  const int n_users = effset.n_users();
  if (static_cast<int>(gammas.size()) != n_users)
    throw ContractViolation("one gamma per user is required");
  if (effset.w_o_gram.size() != static_cast<std::size_t>(n_users))
    throw ContractViolation("missing outer combiner Gram matrices");

  const auto svds = serving_svds(effset, n_s);
  std::vector<InnerFilters> out(static_cast<std::size_t>(n_users));
  for (int u = 0; u < n_users; ++u) {
    CMatrix r_yy = sigma_n2 * effset.w_o_gram[static_cast<std::size_t>(u)];
    for (int j = 0; j < n_users; ++j) {
      const CMatrix x = effset(u, j) * svds[j].v_s;
      const double g = gammas[static_cast<std::size_t>(j)];
      r_yy.noalias() += (g * g / n_s) * x * x.adjoint();
    }
    Eigen::LLT<CMatrix> llt(r_yy);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-12)
      throw SolverError("MMSE covariance is numerically singular");
    const double g_u = gammas[static_cast<std::size_t>(u)];
    auto& f = out[static_cast<std::size_t>(u)];
    f.f_i = svds[u].v_s;
    f.w_i = (g_u / n_s) * llt.solve(effset(u, u) * svds[u].v_s);
    f.gamma = g_u;
  }
  return out;
}

std::vector<InnerFilters> bd_mer(const EffectiveChannelSet& effset, int n_s) {
  check_streams(effset, n_s);
  const int n_users = effset.n_users();
  if (static_cast<Eigen::Index>(n_users) * n_s > effset.m_t())
    throw InfeasibleError("BD precoding needs U * N_s <= M_t");

  const auto svds = serving_svds(effset, n_s);
  std::vector<InnerFilters> out(static_cast<std::size_t>(n_users));
  for (int u = 0; u < n_users; ++u) {
    CMatrix interference(static_cast<Eigen::Index>(n_users - 1) * n_s, effset.m_t());
    Eigen::Index row = 0;
    for (int j = 0; j < n_users; ++j) {
      if (j == u) continue;
      interference.middleRows(row, n_s) = svds[j].u_s.adjoint() * effset(j, u);
      row += n_s;
    }
    auto& f = out[static_cast<std::size_t>(u)];
    f.f_i = right_null_projector(interference) * svds[u].v_s;
    f.w_i = svds[u].u_s;
  }
  return out;
}

double normalize_gamma(const CMatrix& f_o, const CMatrix& f_i, double p_t,
                       int n_users) {
  if (f_o.cols() != f_i.rows()) throw ContractViolation("F_o F_i size mismatch");
  if (n_users < 1 || !(p_t > 0.0)) throw ConfigError("need P_t > 0 and U >= 1");
  const double norm = (f_o * f_i).norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw DegeneratePrecoderError("precoder has zero norm");
  return std::sqrt(p_t / n_users) / norm;
}

std::vector<InnerFilters> design(Method method, const EffectiveChannelSet& effset,
                                 std::span<const CMatrix> f_o, double p_t,
                                 double sigma_n2, int n_s) {
  const int n_users = effset.n_users();
  if (static_cast<int>(f_o.size()) != n_users)
    throw ContractViolation("one outer precoder per user is required");

  auto gammas_for = [&](const std::vector<InnerFilters>& filters) {
    std::vector<double> g(static_cast<std::size_t>(n_users));
    for (std::size_t u = 0; u < g.size(); ++u)
      g[u] = normalize_gamma(f_o[u], filters[u].f_i, p_t, n_users);
    return g;
  };
  auto met_factors = [&]() {
    check_streams(effset, n_s);
    std::vector<InnerFilters> met;
    met.reserve(static_cast<std::size_t>(n_users));
    for (int u = 0; u < n_users; ++u) met.push_back(met_mer(effset(u, u), n_s));
    return met;
  };

  std::vector<InnerFilters> out;
  switch (method) {
    case Method::met_mer:
      out = met_factors();
      break;
    case Method::met_bd:
      if (static_cast<Eigen::Index>(n_users) * n_s > effset.m_r())
        throw InfeasibleError("BD combining needs U * N_s <= M_r");
      return met_bd(effset, gammas_for(met_factors()), n_s);
    case Method::met_mmse:
      return met_mmse(effset, gammas_for(met_factors()), sigma_n2, n_s);
    case Method::bd_mer:
      out = bd_mer(effset, n_s);
      break;
    case Method::none:
      if (effset.m_t() != n_s || effset.m_r() != n_s)
        throw ConfigError("outer-only transmission needs M_t = M_r = N_s");
      out.assign(static_cast<std::size_t>(n_users),
                 {CMatrix::Identity(n_s, n_s), CMatrix::Identity(n_s, n_s), 0.0});
      break;
  }
  const auto g = gammas_for(out);
  for (std::size_t u = 0; u < out.size(); ++u) out[u].gamma = g[u];
  return out;
}

}  // namespace dsmimo::inner
