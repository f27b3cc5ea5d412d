// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "csiplan/common.hpp"

namespace csiplan {

inline constexpr double kSpeedOfLightMps = 3.0e8;
inline constexpr double kMinLinkDistanceM = 10.0;

/// System-wide constants of the multi-cell TDD uplink.
struct SystemConstants {
  int antennas = 100;          // M, per base station
  int cells = 7;               // C
  int users_per_cell = 8;      // K
  int coherence_samples = 200; // T_s, samples per coherence slot
  double slot_seconds = 1e-3;  // D_c
  double carrier_hz = 2e9;     // f_c
  double pilot_power = 1e12;   // P_p (linear, noise-normalized)
  double uplink_power = 1e12;  // P_u (linear, noise-normalized)
  double pathloss_exponent = 3.5;
  double bandwidth_hz = 2e8;   // reporting only

  void validate() const;
};

/// Movement state of one user. `heading_rad` is the direction of travel;
/// the per-station angle between the movement and the incident wave is
/// derived from geometry when link statistics are built.
struct UserMobility {
  double speed_mps = 0.0;
  double heading_rad = 0.0;
  std::array<double, 2> position_m{0.0, 0.0};
};

/// Large-scale gains and temporal autocorrelations for every link,
/// indexed [station j][transmitter k][cell c]. Transmitters are either
/// per-cell users or copilot-group members; `present` marks which (k, c)
/// slots actually hold a user (copilot groups may be partial).
struct LinkStatistics {
  int stations = 0;
  int transmitters = 0;
  int cells = 0;
  std::vector<double> beta;
  std::vector<double> rho;
  std::vector<std::uint8_t> present;

  static LinkStatistics make(int stations, int transmitters, int cells);

  std::size_t link_index(int station, int tx, int cell) const {
    return (static_cast<std::size_t>(station) * transmitters + tx) * cells + cell;
  }
  double beta_at(int station, int tx, int cell) const { return beta[link_index(station, tx, cell)]; }
  double& beta_at(int station, int tx, int cell) { return beta[link_index(station, tx, cell)]; }
  double rho_at(int station, int tx, int cell) const { return rho[link_index(station, tx, cell)]; }
  double& rho_at(int station, int tx, int cell) { return rho[link_index(station, tx, cell)]; }
  bool present_at(int tx, int cell) const {
    return present[static_cast<std::size_t>(tx) * cells + cell] != 0;
  }
  void set_present(int tx, int cell, bool value) {
    present[static_cast<std::size_t>(tx) * cells + cell] = value ? 1 : 0;
  }

  void validate() const;
};

/// Received uplink pilot block, antennas x pilot sequences, column-major.
/// With orthonormal canonical pilots, column k is Y_p q_k.
struct PilotSignal {
  int antennas = 0;
  int pilots = 0;
  cvec samples;

  std::span<const cplx> column(int pilot) const {
    return {samples.data() + static_cast<std::size_t>(pilot) * antennas,
            static_cast<std::size_t>(antennas)};
  }
  std::span<cplx> column(int pilot) {
    return {samples.data() + static_cast<std::size_t>(pilot) * antennas,
            static_cast<std::size_t>(antennas)};
  }
};

/// Maximum Doppler shift v * f_c * cos(angle) / c. May be negative; it is
/// only ever consumed through the even Bessel kernel.
double doppler_shift(double speed_mps, double carrier_hz, double angle_rad);

/// Zeroth-order Bessel function of the first kind, |error| <= 1e-10 on
/// |x| <= 50.
double bessel_j0(double x);

/// Jakes temporal autocorrelation over one slot: J0(2 pi f D_c).
double autocorrelation(double doppler_hz, double slot_seconds);

/// Distance-power-law gain distance^(-exponent). Callers that build
/// scenarios clamp the distance to kMinLinkDistanceM first.
double pathloss_beta(double distance_m, double exponent);

/// One step of the order-1 Gauss-Markov fading process:
/// g <- rho * g + sqrt(beta) * eps, eps per-entry variance (1 - rho^2).
void evolve_channel_in(std::span<cplx> channel, double rho, double beta, Rng& rng);
cvec evolve_channel(cvec channel, double rho, double beta, Rng& rng);

/// MMSE scaling applied to the pilot projection: the estimate is
/// coefficient * Y_p q_k / sqrt(P_p) with
/// coefficient = beta_target / (1/P_p + sum of same-pilot betas).
double mmse_coefficient(double beta_target, const std::vector<double>& betas_same_pilot,
                        double pilot_power);

/// MMSE channel estimate for the user carrying `pilot_index`.
/// `betas_same_pilot` lists the large-scale gains toward this station of
/// every user sharing the pilot (all cells, own cell included).
cvec mmse_estimate(const PilotSignal& pilot_rx, int pilot_index, double beta_target,
                   const std::vector<double>& betas_same_pilot, double pilot_power);

}  // namespace csiplan
