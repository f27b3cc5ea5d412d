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

#include "csiplan/rate.hpp"

#include <cmath>

namespace csiplan {

void RateContext::validate() const {
  if (antennas < 2) throw std::invalid_argument("antennas must be >= 2");
  if (coherence_samples <= groups())
    throw std::invalid_argument("coherence interval must exceed the group count");
  if (pilot_power <= 0 || uplink_power <= 0)
    throw std::invalid_argument("powers must be positive");
  links.validate();
}

SinrBreakdown sinr_mrc(const RateContext& ctx, int group, int cell, int delay) {
  if (delay < 0) throw std::invalid_argument("delay must be non-negative");
  const LinkStatistics& links = ctx.links;
  if (!links.present_at(group, cell))
    throw std::invalid_argument("no group member in the requested cell");

  // 1/P_p + sum of same-pilot gains toward this station.
  double q = 1.0 / ctx.pilot_power;
  for (int b = 0; b < links.cells; ++b)
    if (links.present_at(group, b)) q += links.beta_at(cell, group, b);

  const double beta_own = links.beta_at(cell, group, cell);
  const double rho_own = links.rho_at(cell, group, cell);
  SinrBreakdown out;
  out.signal = beta_own * beta_own * std::pow(rho_own * rho_own, delay);

  double off_group = 0.0;
  for (int k = 0; k < links.transmitters; ++k) {
    if (k == group) continue;
    for (int c = 0; c < links.cells; ++c)
      if (links.present_at(k, c)) off_group += links.beta_at(cell, k, c);
  }
  double own_group = 0.0;
  for (int c = 0; c < links.cells; ++c) {
    if (!links.present_at(group, c)) continue;
    const double beta = links.beta_at(cell, group, c);
    const double rho = links.rho_at(cell, group, c);
    const double aged = std::pow(rho * rho, delay);
    if (c != cell) out.pilot_interference += aged * beta * beta;
    own_group += beta - aged * beta * beta / q;
  }
  out.noise_and_error = q * (off_group + own_group + 1.0 / ctx.uplink_power);

  const double m1 = static_cast<double>(ctx.antennas - 1);
  out.sinr = m1 * out.signal / (m1 * out.pilot_interference + out.noise_and_error);
  return out;
}

double group_stage_se(const RateContext& ctx, int group, int delay) {
  double sum = 0.0;
  for (int cell = 0; cell < ctx.cells(); ++cell) {
    if (!ctx.links.present_at(group, cell)) continue;
    sum += std::log2(1.0 + sinr_mrc(ctx, group, cell, delay).sinr);
  }
  return sum;
}

double se_lower_bound(const RateContext& ctx, const std::vector<int>& delays,
                      int active_trainers) {
  if (static_cast<int>(delays.size()) != ctx.groups())
    throw std::invalid_argument("delay vector length mismatch");
  if (active_trainers < 0 || active_trainers > ctx.groups())
    throw std::invalid_argument("active trainer count out of range");
  const double prefactor =
      1.0 - static_cast<double>(active_trainers) / static_cast<double>(ctx.coherence_samples);
  double sum = 0.0;
  for (int g = 0; g < ctx.groups(); ++g) sum += group_stage_se(ctx, g, delays[g]);
  return prefactor * sum;
}

bool gain_condition(double rho_min, double rho_max, int delay, double sinr_inf,
                    int coherence_samples, int n_groups, int tau) {
  if (rho_max <= 0) throw std::invalid_argument("rho_max must be positive");
  if (rho_min <= 0 || rho_min > rho_max || rho_max > 1.0)
    throw std::invalid_argument("require 0 < rho_min <= rho_max <= 1");
  if (sinr_inf <= 0) throw std::invalid_argument("asymptotic SINR must be positive");
  if (delay < 0) throw std::invalid_argument("delay must be non-negative");
  if (coherence_samples <= tau || coherence_samples <= n_groups)
    throw std::invalid_argument("coherence interval must exceed tau and the group count");
  const double ratio = (rho_min * rho_min) / (rho_max * rho_max);
  const double lhs = std::pow(ratio, delay);
  const double exponent = static_cast<double>(coherence_samples - n_groups) /
                          static_cast<double>(coherence_samples - tau);
  const double rhs = (std::pow(1.0 + sinr_inf, exponent) - 1.0) / sinr_inf;
  return lhs >= rhs;
}

}  // namespace csiplan
