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

#include "dsmimo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dsmimo::metrics {

double log_det_hpd(const CMatrix& a) {
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw EvaluationError("covariance is not positive definite");
  const auto& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const double d = l(k, k).real();
    if (!(d > 0.0) || !std::isfinite(d))
      throw EvaluationError("covariance is not positive definite");
    acc += std::log(d);
  }
  return 2.0 * acc;
}

std::vector<double> user_rates(std::span<const CMatrix> channels,
                               const LinkFilters& filters, double sigma_n2, int n_s) {
  const auto n_users = channels.size();
  if (filters.f.size() != n_users || filters.w.size() != n_users || n_users == 0)
    throw ContractViolation("one precoder and combiner per user is required");
  if (n_s < 1) throw ContractViolation("stream count must be positive");

  std::vector<double> rates(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    const auto& w = filters.w[u];
    const auto& h = channels[u];
    if (w.rows() != h.rows() || filters.f[u].rows() != h.cols())
      throw ContractViolation("filter dimensions do not match channel");
    const CMatrix wh = w.adjoint() * h;

    CMatrix c = sigma_n2 * (w.adjoint() * w);
    CMatrix r = CMatrix::Zero(w.cols(), w.cols());
    for (std::size_t j = 0; j < n_users; ++j) {
      const CMatrix x = wh * filters.f[j];
      if (j == u)
        r.noalias() += x * x.adjoint() / static_cast<double>(n_s);
      else
        c.noalias() += x * x.adjoint() / static_cast<double>(n_s);
    }
    const double nats = log_det_hpd(c + r) - log_det_hpd(c);
    rates[u] = std::max(0.0, nats / std::numbers::ln2);
  }
  return rates;
}

double sum_rate(std::span<const CMatrix> channels, const LinkFilters& filters,
                double sigma_n2, int n_s) {
  double total = 0.0;
  for (double r : user_rates(channels, filters, sigma_n2, n_s)) total += r;
  return total;
}

double snr_to_power(double snr_db, double sigma_n2) {
  return sigma_n2 * std::pow(10.0, snr_db / 10.0);
}

}  // namespace dsmimo::metrics
