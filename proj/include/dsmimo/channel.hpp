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

#include "dsmimo/rng.hpp"
#include "dsmimo/types.hpp"

namespace dsmimo::channel {

/// Uniform linear array with omni-directional elements.
struct ArrayGeometry {
  int n_elements = 1;
  double spacing_wavelengths = 0.5;

  void validate() const;
};

/// Transmit (base station) and receive (terminal) arrays of one link.
struct LinkGeometry {
  ArrayGeometry tx;
  ArrayGeometry rx;
};

/// Macroscopic parameters of one propagation path. Angles are azimuths in
/// radians inside (0, pi). The path phase is microscopic and is supplied
/// separately to realize_channel().
struct Ray {
  double departure = 0.0;
  double arrival = 0.0;
  double magnitude = 0.0;
};

/// Slow-timescale channel state of one user.
struct MacroState {
  std::vector<Ray> rays;
  int n_clusters = 0;
  int rays_per_cluster = 4;
  double cluster_std_deg = 5.0;

  int n_paths() const { return static_cast<int>(rays.size()); }
  void validate() const;
};

enum class Scenario { poor, fair, rich };

Scenario parse_scenario(std::string_view tag);
std::string_view to_string(Scenario s);

/// Cluster count of each scattering scenario; every cluster holds 4 rays.
int n_clusters(Scenario s);
inline int n_paths(Scenario s) { return 4 * n_clusters(s); }

struct DrawParams {
  double cluster_std_deg = 5.0;
  double gain_variance = 1.0;  // sigma_alpha^2
};

/// a(phi)[k] = exp(-j 2 pi d k cos(phi)) / sqrt(N), d in wavelengths.
CVector ula_response(const ArrayGeometry& geometry, double azimuth);

/// Manifold matrix: one steering vector per angle, column-wise.
CMatrix manifold(const ArrayGeometry& geometry, std::span<const double> angles);

/// Draws cluster means U(0, 180 deg), then per-ray Gaussian spread around the
/// mean, independently for departure and arrival. Angles leaving (0, 180 deg)
/// are mirrored back into it, which leaves the ULA response unchanged.
/// Magnitudes are |CN(0, gain_variance)|.
std::vector<MacroState> draw_macroscopic(Scenario scenario, int n_users,
                                         Rng& rng, const DrawParams& params = {});

/// L i.i.d. phases from U(-pi, pi).
std::vector<double> draw_phases(int n_paths, Rng& rng);

/// H = sqrt(N_t N_r / L) sum_l |alpha_l| e^{j theta_l} a_r(arrival_l) a_t(departure_l)^T
CMatrix realize_channel(const LinkGeometry& link, const MacroState& macro,
                        std::span<const double> phases);

/// Sample downlink/uplink covariances of the channel averaged over n_slots.
struct CovariancePair {
  CMatrix c_dl;  // N_r x N_r, mean of H H^H
  CMatrix c_ul;  // N_t x N_t, mean of H^H H
  int n_slots = 0;
};

/// Each slot redraws all path phases with magnitudes and angles held fixed.
/// The slot average is accumulated in the L-dimensional path domain, which is
/// algebraically identical to averaging the N x N Gram matrices.
CovariancePair estimate_covariances(const LinkGeometry& link,
                                    const MacroState& macro, int n_slots,
                                    Rng& rng);

/// Exact macroscopic parameters as seen by path-selection outer filters.
struct PartialCsi {
  CMatrix a_t;     // N_t x L
  CMatrix a_r;     // N_r x L
  RVector powers;  // |alpha_l|^2
};

PartialCsi extract_partial_csi(const LinkGeometry& link, const MacroState& macro);

}  // namespace dsmimo::channel
