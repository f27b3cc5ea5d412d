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
#include <string>
#include <vector>

#include "csiplan/channel.hpp"
#include "csiplan/grouping.hpp"
#include "csiplan/rate.hpp"
#include "csiplan/slow_policy.hpp"

namespace csiplan {

/// Flat key-value experiment configuration. -1 for u_max or tau means
/// "resolve from the group count once the scenario is generated" (all
/// groups, respectively half of them rounded up).
struct ScenarioConfig {
  int cells = 7;
  double radius_m = 1500.0;
  int users_per_cell = 8;
  int antennas = 100;
  double speed_min_kmh = 4.0;
  double speed_max_kmh = 80.0;
  int coherence_samples = 200;
  double slot_seconds = 1e-3;
  double carrier_hz = 2e9;
  double pathloss_exponent = 3.5;
  double pilot_power = 1e12;
  double uplink_power = 1e12;
  double bandwidth_hz = 2e8;
  int locations = 5;
  int u_max = -1;
  int horizon = 4;
  int tau = -1;
  std::uint64_t seed = 1;
  int trials = 10000;
  int epochs = 3;
  double discount = 0.9;
  double vi_tol = 1e-6;
  double mobility_stickiness = 0.5;
  double local_search_eps = 0.5;

  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses the key = value configuration format. Unknown keys are errors.
ScenarioConfig load_scenario_config(const std::string& path);
ScenarioConfig parse_scenario_config(const std::string& text);

/// A fully instantiated multi-cell system: geometry, per-user mobility,
/// link statistics, copilot grouping, the rate context at the base
/// locations, and the slow-scale mobility model.
struct Scenario {
  ScenarioConfig config;
  SystemConstants sys;
  std::vector<std::array<double, 2>> bs_positions;
  std::vector<UserMobility> users;  // index cell * K + k
  LinkStatistics user_links;        // [station][user k][cell]
  std::vector<double> serving_rho;  // per global user index
  std::vector<Cluster> clusters;
  std::vector<CopilotGroup> groups;
  RateContext base_context;  // gains at location-combination 0
  MobilityModel mobility;
  int tau = 0;
  int feedback_budget = 0;

  int group_count() const { return static_cast<int>(groups.size()); }
};

/// Deterministically instantiates a scenario: hexagonal station layout,
/// user placement (at least 10 m from the serving station), random speeds
/// and headings, per-link gains and Jakes autocorrelations, clustering and
/// copilot grouping, and randomly drawn mobility chains with per-location
/// gain tables.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);
inline Scenario generate_scenario(const ScenarioConfig& config) {
  return generate_scenario(config, config.seed);
}

/// Per-slot spectral efficiency of the classical protocol where every
/// group trains every slot: zero delays, N_G trainers.
double reference_protocol_se(const RateContext& ctx);
double reference_protocol_se(const Scenario& scenario);

}  // namespace csiplan
