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
#include <vector>

#include "dsmimo/types.hpp"

namespace dsmimo::metrics {

/// Full per-user precoders (N_t x N_s, already power-normalized) and
/// combiners (N_r x N_s).
struct LinkFilters {
  std::vector<CMatrix> f;
  std::vector<CMatrix> w;
};

/// log det of a Hermitian positive definite matrix (natural log), via
/// Cholesky. Throws EvaluationError when the factorization fails.
double log_det_hpd(const CMatrix& a);

/// Per-user achievable rates in bit/s/Hz:
///   R_u = log2 det(C_u + R_u) - log2 det(C_u)
///   C_u = s2 W^H W + (1/N_s) sum_{j != u} W^H H F_j F_j^H H^H W
///   R_u = (1/N_s) W^H H F_u F_u^H H^H W
std::vector<double> user_rates(std::span<const CMatrix> channels,
                               const LinkFilters& filters, double sigma_n2, int n_s);

double sum_rate(std::span<const CMatrix> channels, const LinkFilters& filters,
                double sigma_n2, int n_s);

/// P_t = sigma_n^2 * 10^(snr_db / 10)
double snr_to_power(double snr_db, double sigma_n2);

}  // namespace dsmimo::metrics
