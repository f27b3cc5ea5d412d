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

#include "csiplan/channel.hpp"

#include <cmath>
#include <numbers>

namespace csiplan {

void SystemConstants::validate() const {
  if (antennas < 2) throw std::invalid_argument("antennas must be >= 2");
  if (cells < 1) throw std::invalid_argument("cells must be >= 1");
  if (users_per_cell < 1) throw std::invalid_argument("users_per_cell must be >= 1");
  if (coherence_samples < 2) throw std::invalid_argument("coherence_samples must be >= 2");
  if (slot_seconds <= 0) throw std::invalid_argument("slot_seconds must be positive");
  if (carrier_hz <= 0) throw std::invalid_argument("carrier_hz must be positive");
  if (pilot_power <= 0) throw std::invalid_argument("pilot_power must be positive");
  if (uplink_power <= 0) throw std::invalid_argument("uplink_power must be positive");
  if (pathloss_exponent <= 0) throw std::invalid_argument("pathloss_exponent must be positive");
  if (bandwidth_hz <= 0) throw std::invalid_argument("bandwidth_hz must be positive");
}

LinkStatistics LinkStatistics::make(int stations, int transmitters, int cells) {
  LinkStatistics links;
  links.stations = stations;
  links.transmitters = transmitters;
  links.cells = cells;
  const std::size_t n =
      static_cast<std::size_t>(stations) * transmitters * cells;
  links.beta.assign(n, 0.0);
  links.rho.assign(n, 0.0);
  links.present.assign(static_cast<std::size_t>(transmitters) * cells, 0);
  return links;
}

void LinkStatistics::validate() const {
  for (int k = 0; k < transmitters; ++k) {
    for (int c = 0; c < cells; ++c) {
      if (!present_at(k, c)) continue;
      for (int j = 0; j < stations; ++j) {
        if (!(beta_at(j, k, c) > 0.0))
          throw std::invalid_argument("large-scale gain must be positive on present links");
        if (std::fabs(rho_at(j, k, c)) > 1.0)
          throw std::invalid_argument("autocorrelation magnitude must be <= 1");
      }
    }
  }
}

double doppler_shift(double speed_mps, double carrier_hz, double angle_rad) {
  if (speed_mps < 0) throw std::invalid_argument("speed must be non-negative");
  if (carrier_hz <= 0) throw std::invalid_argument("carrier frequency must be positive");
  return speed_mps * carrier_hz * std::cos(angle_rad) / kSpeedOfLightMps;
}

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::fabs(x)); }

double autocorrelation(double doppler_hz, double slot_seconds) {
  if (slot_seconds <= 0) throw std::invalid_argument("slot duration must be positive");
  return bessel_j0(2.0 * std::numbers::pi * doppler_hz * slot_seconds);
}

double pathloss_beta(double distance_m, double exponent) {
  if (distance_m <= 0) throw std::invalid_argument("distance must be positive");
  return std::pow(distance_m, -exponent);
}

void evolve_channel_in(std::span<cplx> channel, double rho, double beta, Rng& rng) {
  if (std::fabs(rho) > 1.0) throw std::invalid_argument("|rho| must be <= 1");
  if (beta <= 0) throw std::invalid_argument("beta must be positive");
  const double innovation_var = beta * (1.0 - rho * rho);
  for (cplx& g : channel) g = rho * g + rng.cnormal(innovation_var);
}

cvec evolve_channel(cvec channel, double rho, double beta, Rng& rng) {
  evolve_channel_in(channel, rho, beta, rng);
  return channel;
}

double mmse_coefficient(double beta_target, const std::vector<double>& betas_same_pilot,
                        double pilot_power) {
  if (pilot_power <= 0) throw std::invalid_argument("pilot power must be positive");
  double denom = 1.0 / pilot_power;
  for (double b : betas_same_pilot) denom += b;
  return beta_target / denom;
}

cvec mmse_estimate(const PilotSignal& pilot_rx, int pilot_index, double beta_target,
                   const std::vector<double>& betas_same_pilot, double pilot_power) {
  if (pilot_rx.pilots <= 0 || pilot_rx.antennas <= 0)
    throw std::invalid_argument("pilot block must be non-empty");
  if (pilot_rx.samples.size() !=
      static_cast<std::size_t>(pilot_rx.antennas) * pilot_rx.pilots)
    throw std::invalid_argument("pilot block dimensions mismatch");
  if (pilot_index < 0 || pilot_index >= pilot_rx.pilots)
    throw std::invalid_argument("pilot index out of range");
  const double scale =
      mmse_coefficient(beta_target, betas_same_pilot, pilot_power) / std::sqrt(pilot_power);
  const auto column = pilot_rx.column(pilot_index);
  cvec estimate(column.begin(), column.end());
  for (cplx& v : estimate) v *= scale;
  return estimate;
}

}  // namespace csiplan
