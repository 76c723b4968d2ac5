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

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dsmimo {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Base of every error raised by the library. `code()` is the short tag used
/// in the `status` column of result tables (e.g. "rank_deficient").
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Invalid configuration value (bad scenario tag, m > L, n_slots < 1, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

/// Caller broke a dimensional or structural precondition.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what)
      : Error("contract", what) {}
};

/// Path selection ran out of linearly independent candidates.
class RankDeficiencyError : public Error {
 public:
  explicit RankDeficiencyError(const std::string& what)
      : Error("rank_deficient", what) {}
};

/// Block diagonalization requested with U*N_s above the available dimension.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what)
      : Error("infeasible", what) {}
};

/// Ill-conditioned linear system (MMSE covariance).
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error("solver", what) {}
};

/// Precoder with zero Frobenius norm cannot be power-normalized.
class DegeneratePrecoderError : public Error {
 public:
  explicit DegeneratePrecoderError(const std::string& what)
      : Error("degenerate_precoder", what) {}
};

/// Rate evaluation hit a singular interference-plus-noise covariance.
class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& what)
      : Error("evaluation", what) {}
};

inline void require(bool cond, const char* what) {
  if (!cond) throw ContractViolation(what);
}

}  // namespace dsmimo
