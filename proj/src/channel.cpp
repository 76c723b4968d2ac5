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

#include "dsmimo/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dsmimo::channel {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double deg) { return deg * kPi / 180.0; }

// Mirror an angle into [0, pi]. cos is even and 2pi-periodic, so the ULA
// response of the folded angle equals that of the original one.
double fold_azimuth(double phi) {
  phi = std::remainder(phi, 2.0 * kPi);  // (-pi, pi]
  return std::abs(phi);
}

}  // namespace

void ArrayGeometry::validate() const {
  if (n_elements < 1) throw ContractViolation("array needs at least one element");
  if (!(spacing_wavelengths > 0.0))
    throw ContractViolation("array spacing must be positive");
}

void MacroState::validate() const {
  if (n_clusters * rays_per_cluster != n_paths())
    throw ContractViolation("path count must equal clusters x rays per cluster");
  for (const auto& r : rays) {
    if (!(r.magnitude >= 0.0)) throw ContractViolation("negative path magnitude");
    if (!std::isfinite(r.departure) || !std::isfinite(r.arrival))
      throw ContractViolation("non-finite path angle");
  }
}

Scenario parse_scenario(std::string_view tag) {
  if (tag == "poor") return Scenario::poor;
  if (tag == "fair") return Scenario::fair;
  if (tag == "rich") return Scenario::rich;
  throw ConfigError("unknown scattering scenario '" + std::string(tag) + "'");
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::poor: return "poor";
    case Scenario::fair: return "fair";
    case Scenario::rich: return "rich";
  }
  return "?";
}

int n_clusters(Scenario s) {
  switch (s) {
    case Scenario::poor: return 2;
    case Scenario::fair: return 8;
    case Scenario::rich: return 16;
  }
  throw ConfigError("unknown scattering scenario");
}

CVector ula_response(const ArrayGeometry& geometry, double azimuth) {
  geometry.validate();
  const int n = geometry.n_elements;
  const double step = -2.0 * kPi * geometry.spacing_wavelengths * std::cos(azimuth);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVector a(n);
  for (int k = 0; k < n; ++k) a[k] = std::polar(scale, step * k);
  return a;
}

CMatrix manifold(const ArrayGeometry& geometry, std::span<const double> angles) {
  CMatrix a(geometry.n_elements, static_cast<Eigen::Index>(angles.size()));
  for (std::size_t l = 0; l < angles.size(); ++l)
    a.col(static_cast<Eigen::Index>(l)) = ula_response(geometry, angles[l]);
  return a;
}

std::vector<MacroState> draw_macroscopic(Scenario scenario, int n_users,
                                         Rng& rng, const DrawParams& params) {
  if (n_users < 1) throw ConfigError("n_users must be positive");
  if (params.cluster_std_deg < 0.0) throw ConfigError("cluster spread must be >= 0");
  if (!(params.gain_variance > 0.0)) throw ConfigError("gain variance must be > 0");

  const int clusters = n_clusters(scenario);
  const double sigma = deg2rad(params.cluster_std_deg);
  const double gain_std = std::sqrt(params.gain_variance / 2.0);
  std::uniform_real_distribution<double> cluster_mean(0.0, kPi);
  std::normal_distribution<double> spread(0.0, 1.0);
  std::normal_distribution<double> gain(0.0, gain_std);

  std::vector<MacroState> users(static_cast<std::size_t>(n_users));
  for (auto& user : users) {
    user.n_clusters = clusters;
    user.rays_per_cluster = 4;
    user.cluster_std_deg = params.cluster_std_deg;
    user.rays.reserve(static_cast<std::size_t>(clusters * 4));
    for (int c = 0; c < clusters; ++c) {
      const double mean_t = cluster_mean(rng);
      const double mean_r = cluster_mean(rng);
      for (int r = 0; r < 4; ++r) {
        Ray ray;
        ray.departure = fold_azimuth(mean_t + sigma * spread(rng));
        ray.arrival = fold_azimuth(mean_r + sigma * spread(rng));
        const double re = gain(rng);
        const double im = gain(rng);
        ray.magnitude = std::hypot(re, im);
        user.rays.push_back(ray);
      }
    }
  }
  return users;
}

std::vector<double> draw_phases(int n_paths, Rng& rng) {
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  std::vector<double> out(static_cast<std::size_t>(n_paths));
  for (auto& p : out) p = phase(rng);
  return out;
}

namespace {

struct PathDomain {
  CMatrix a_t;
  CMatrix a_r;
  double scale;  // sqrt(N_t N_r / L)
};

PathDomain path_domain(const LinkGeometry& link, const MacroState& macro) {
  const auto n = static_cast<std::size_t>(macro.n_paths());
  std::vector<double> dep(n), arr(n);
  for (std::size_t l = 0; l < n; ++l) {
    dep[l] = macro.rays[l].departure;
    arr[l] = macro.rays[l].arrival;
  }
  return {manifold(link.tx, dep), manifold(link.rx, arr),
          std::sqrt(static_cast<double>(link.tx.n_elements) * link.rx.n_elements /
                    static_cast<double>(n))};
}

}  // namespace

CMatrix realize_channel(const LinkGeometry& link, const MacroState& macro,
                        std::span<const double> phases) {
  const int n_paths = macro.n_paths();
  if (static_cast<int>(phases.size()) != n_paths)
    throw ContractViolation("one phase per path is required");
  if (n_paths == 0) throw ContractViolation("channel needs at least one path");
  const auto pd = path_domain(link, macro);

  // A_r diag(gains) A_t^T
  CMatrix weighted = pd.a_r;
  for (int l = 0; l < n_paths; ++l)
    weighted.col(l) *= std::polar(pd.scale * macro.rays[l].magnitude, phases[l]);
  return weighted * pd.a_t.transpose();
}

CovariancePair estimate_covariances(const LinkGeometry& link,
                                    const MacroState& macro, int n_slots,
                                    Rng& rng) {
  if (n_slots < 1) throw ConfigError("n_slots must be at least 1");
  const int n_paths = macro.n_paths();
  if (n_paths == 0) throw ContractViolation("channel needs at least one path");
  const auto pd = path_domain(link, macro);

  // Z = mean over slots of z z^H, z_l = |alpha_l| e^{j theta_l}
  CMatrix z_gram = CMatrix::Zero(n_paths, n_paths);
  CVector z(n_paths);
  for (int s = 0; s < n_slots; ++s) {
    const auto phases = draw_phases(n_paths, rng);
    for (int l = 0; l < n_paths; ++l)
      z[l] = std::polar(macro.rays[l].magnitude, phases[l]);
    z_gram.noalias() += z * z.adjoint();
  }
  z_gram *= pd.scale * pd.scale / n_slots;

  // H H^H = A_r (Z o conj(A_t^H A_t)) A_r^H
  // H^H H = conj(A_t) (conj(Z) o A_r^H A_r) A_t^T
  const CMatrix gram_t = (pd.a_t.adjoint() * pd.a_t).conjugate();
  const CMatrix gram_r = pd.a_r.adjoint() * pd.a_r;
  const CMatrix core_dl = z_gram.cwiseProduct(gram_t);
  const CMatrix core_ul = z_gram.conjugate().cwiseProduct(gram_r);

  CovariancePair out;
  out.n_slots = n_slots;
  out.c_dl = pd.a_r * core_dl * pd.a_r.adjoint();
  out.c_ul = pd.a_t.conjugate() * core_ul * pd.a_t.transpose();
  out.c_dl = (0.5 * (out.c_dl + out.c_dl.adjoint())).eval();
  out.c_ul = (0.5 * (out.c_ul + out.c_ul.adjoint())).eval();
  return out;
}

PartialCsi extract_partial_csi(const LinkGeometry& link, const MacroState& macro) {
  macro.validate();
  auto pd = path_domain(link, macro);
  PartialCsi csi{std::move(pd.a_t), std::move(pd.a_r), RVector(macro.n_paths())};
  for (int l = 0; l < macro.n_paths(); ++l)
    csi.powers[l] = macro.rays[l].magnitude * macro.rays[l].magnitude;
  return csi;
}

}  // namespace dsmimo::channel
