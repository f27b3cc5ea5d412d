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

#include <cstdint>
#include <vector>

#include "csiplan/channel.hpp"
#include "csiplan/common.hpp"

namespace csiplan {

/// Everything needed to evaluate uplink spectral efficiency for a set of
/// copilot groups: links are indexed [station][group][cell] with a present
/// mask for partial groups.
struct RateContext {
  int antennas = 0;           // M
  int coherence_samples = 0;  // T_s
  double pilot_power = 0.0;   // P_p
  double uplink_power = 0.0;  // P_u
  LinkStatistics links;

  int groups() const { return links.transmitters; }
  int cells() const { return links.cells; }
  void validate() const;
};

/// Per-user SINR decomposition under maximum ratio combining with a
/// `delay`-slot-old channel estimate. sinr equals
/// (M-1)*signal / ((M-1)*pilot_interference + noise_and_error).
struct SinrBreakdown {
  double signal = 0.0;
  double pilot_interference = 0.0;
  double noise_and_error = 0.0;
  double sinr = 0.0;
};

SinrBreakdown sinr_mrc(const RateContext& ctx, int group, int cell, int delay);

/// Sum over serving cells of log2(1 + SINR) for one group at one delay.
/// Shared by every spectral-efficiency path so that identical inputs give
/// bitwise-identical sums.
double group_stage_se(const RateContext& ctx, int group, int delay);

/// Closed-form lower bound on the per-slot sum spectral efficiency
/// (bits/s/Hz): sum over groups and cells of
/// (1 - active_trainers/T_s) * log2(1 + SINR).
double se_lower_bound(const RateContext& ctx, const std::vector<int>& delays,
                      int active_trainers);

/// Large-antenna-regime condition under which delayed training improves
/// every user's spectral efficiency:
/// (rho_min^2/rho_max^2)^delay >= ((1+sinr_inf)^((T_s-N_G)/(T_s-tau)) - 1)/sinr_inf.
bool gain_condition(double rho_min, double rho_max, int delay, double sinr_inf,
                    int coherence_samples, int n_groups, int tau);

struct MonteCarloSe {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal-approximation confidence half-width
};

/// Link-level Monte Carlo estimate of the per-slot sum spectral
/// efficiency: simulates the pilot phase, MMSE estimation, delay-step
/// channel aging and MRC detection with stale estimates, and averages
/// log2(1 + instantaneous SINR) with the training prefactor.
MonteCarloSe monte_carlo_se(const RateContext& ctx, const std::vector<int>& delays,
                            int active_trainers, int trials, std::uint64_t seed);

}  // namespace csiplan
