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

#include "csiplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace csiplan {

namespace {

// Half-correlation coherence time of a Jakes process (0.423 / f_D).
constexpr double kCoherenceTimeFactor = 0.423;

std::vector<std::array<double, 2>> hexagonal_layout(int cells, double radius_m) {
  // Axial-coordinate spiral; neighboring stations sit sqrt(3) * radius apart.
  const double spacing = std::numbers::sqrt3 * radius_m;
  std::vector<std::array<int, 2>> axial{{0, 0}};
  static constexpr std::array<std::array<int, 2>, 6> kDirs{
      {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};
  for (int ring = 1; static_cast<int>(axial.size()) < cells; ++ring) {
    std::array<int, 2> cur{-ring, ring};  // start at dir[4] * ring
    for (const auto& dir : kDirs)
      for (int step = 0; step < ring; ++step) {
        axial.push_back(cur);
        cur = {cur[0] + dir[0], cur[1] + dir[1]};
      }
  }
  std::vector<std::array<double, 2>> positions(cells);
  for (int c = 0; c < cells; ++c) {
    const double q = axial[c][0], r = axial[c][1];
    positions[c] = {spacing * (q + r / 2.0), spacing * (std::numbers::sqrt3 / 2.0) * r};
  }
  return positions;
}

bool inside_hexagon(double x, double y, double radius) {
  const double ax = std::fabs(x), ay = std::fabs(y);
  const double limit = std::numbers::sqrt3 / 2.0 * radius;
  return ay <= limit && std::numbers::sqrt3 * ax + ay <= std::numbers::sqrt3 * radius;
}

std::array<double, 2> sample_user_position(const std::array<double, 2>& bs, double radius,
                                           Rng& rng) {
  while (true) {
    const double x = rng.uniform(-radius, radius);
    const double y = rng.uniform(-radius, radius);
    if (!inside_hexagon(x, y, radius)) continue;
    if (std::hypot(x, y) < kMinLinkDistanceM) continue;
    return {bs[0] + x, bs[1] + y};
  }
}

double link_beta(const std::array<double, 2>& user, const std::array<double, 2>& bs,
                 double exponent) {
  const double distance =
      std::max(kMinLinkDistanceM, std::hypot(user[0] - bs[0], user[1] - bs[1]));
  return pathloss_beta(distance, exponent);
}

double link_rho(const UserMobility& user, const std::array<double, 2>& bs, double carrier_hz,
                double slot_seconds) {
  const double azimuth =
      std::atan2(bs[1] - user.position_m[1], bs[0] - user.position_m[0]);
  const double doppler =
      doppler_shift(user.speed_mps, carrier_hz, user.heading_rad - azimuth);
  return autocorrelation(doppler, slot_seconds);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (cells < 1) throw ConfigError("cells must be >= 1");
  if (radius_m <= 0) throw ConfigError("radius_m must be positive");
  if (users_per_cell < 1) throw ConfigError("users_per_cell must be >= 1");
  if (antennas < 2) throw ConfigError("antennas must be >= 2");
  if (speed_min_kmh < 0 || speed_max_kmh < speed_min_kmh)
    throw ConfigError("speed range must satisfy 0 <= min <= max");
  if (coherence_samples < 2) throw ConfigError("coherence_samples must be >= 2");
  if (slot_seconds <= 0) throw ConfigError("slot_seconds must be positive");
  if (carrier_hz <= 0) throw ConfigError("carrier_hz must be positive");
  if (pathloss_exponent <= 0) throw ConfigError("pathloss_exponent must be positive");
  if (pilot_power <= 0 || uplink_power <= 0) throw ConfigError("powers must be positive");
  if (bandwidth_hz <= 0) throw ConfigError("bandwidth_hz must be positive");
  if (locations < 1) throw ConfigError("locations must be >= 1");
  if (u_max < -1) throw ConfigError("u_max must be -1 (all groups) or >= 0");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (tau < -1) throw ConfigError("tau must be -1 (half the groups) or >= 0");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(discount > 0 && discount < 1)) throw ConfigError("discount must be in (0, 1)");
  if (vi_tol <= 0) throw ConfigError("vi_tol must be positive");
  if (mobility_stickiness < 0 || mobility_stickiness > 1)
    throw ConfigError("mobility_stickiness must be in [0, 1]");
  if (local_search_eps <= 0) throw ConfigError("local_search_eps must be positive");
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Scenario sc;
  sc.config = config;
  sc.config.seed = seed;
  sc.sys.antennas = config.antennas;
  sc.sys.cells = config.cells;
  sc.sys.users_per_cell = config.users_per_cell;
  sc.sys.coherence_samples = config.coherence_samples;
  sc.sys.slot_seconds = config.slot_seconds;
  sc.sys.carrier_hz = config.carrier_hz;
  sc.sys.pilot_power = config.pilot_power;
  sc.sys.uplink_power = config.uplink_power;
  sc.sys.pathloss_exponent = config.pathloss_exponent;
  sc.sys.bandwidth_hz = config.bandwidth_hz;
  sc.sys.validate();

  const int cells = config.cells;
  const int k_users = config.users_per_cell;
  sc.bs_positions = hexagonal_layout(cells, config.radius_m);

  Rng placement(derive_seed(seed, 0x706C6163));
  const double v_min = config.speed_min_kmh / 3.6, v_max = config.speed_max_kmh / 3.6;
  sc.users.resize(static_cast<std::size_t>(cells) * k_users);
  for (int c = 0; c < cells; ++c)
    for (int k = 0; k < k_users; ++k) {
      UserMobility& user = sc.users[static_cast<std::size_t>(c) * k_users + k];
      user.position_m = sample_user_position(sc.bs_positions[c], config.radius_m, placement);
      user.speed_mps = placement.uniform(v_min, v_max);
      user.heading_rad = placement.uniform(0.0, 2.0 * std::numbers::pi);
    }

  sc.user_links = LinkStatistics::make(cells, k_users, cells);
  for (int c = 0; c < cells; ++c)
    for (int k = 0; k < k_users; ++k) {
      sc.user_links.set_present(k, c);
      const UserMobility& user = sc.users[static_cast<std::size_t>(c) * k_users + k];
      for (int j = 0; j < cells; ++j) {
        sc.user_links.beta_at(j, k, c) =
            link_beta(user.position_m, sc.bs_positions[j], config.pathloss_exponent);
        sc.user_links.rho_at(j, k, c) =
            link_rho(user, sc.bs_positions[j], config.carrier_hz, config.slot_seconds);
      }
    }

  // Cluster on the serving-link autocorrelation. The cluster count follows
  // the coherence-time ratio, capped at the per-cell user count so that
  // clusters can still host cross-cell groups.
  const int user_count = cells * k_users;
  sc.serving_rho.resize(user_count);
  std::vector<int> user_cell(user_count);
  double max_coherence = 0.0;
  for (int u = 0; u < user_count; ++u) {
    const int c = u / k_users, k = u % k_users;
    user_cell[u] = c;
    sc.serving_rho[u] = sc.user_links.rho_at(c, k, c);
    const UserMobility& user = sc.users[u];
    const double azimuth = std::atan2(sc.bs_positions[c][1] - user.position_m[1],
                                      sc.bs_positions[c][0] - user.position_m[0]);
    const double doppler = std::fabs(
        doppler_shift(user.speed_mps, config.carrier_hz, user.heading_rad - azimuth));
    const double coherence =
        doppler > 0 ? kCoherenceTimeFactor / doppler : std::numeric_limits<double>::infinity();
    max_coherence = std::max(max_coherence, coherence);
  }
  const double capped = std::clamp(max_coherence, config.slot_seconds,
                                   static_cast<double>(k_users) * config.slot_seconds);
  const int n_clusters = cluster_count(capped, config.slot_seconds);
  sc.clusters = kmeans_rho(sc.serving_rho, n_clusters, derive_seed(seed, 0x636C7573));
  sc.groups = form_copilot_groups(sc.clusters, sc.serving_rho, user_cell, cells);

  const int n_groups = sc.group_count();
  if (n_groups >= config.coherence_samples)
    throw GuardError("coherence interval too short for the resulting group count");
  sc.tau = config.tau >= 0 ? config.tau : (n_groups + 1) / 2;
  if (sc.tau > n_groups) throw ConfigError("tau exceeds the group count");
  sc.feedback_budget = config.u_max >= 0 ? config.u_max : n_groups;
  if (sc.feedback_budget > n_groups) throw ConfigError("u_max exceeds the group count");

  sc.base_context.antennas = config.antennas;
  sc.base_context.coherence_samples = config.coherence_samples;
  sc.base_context.pilot_power = config.pilot_power;
  sc.base_context.uplink_power = config.uplink_power;
  sc.base_context.links = LinkStatistics::make(cells, n_groups, cells);
  for (int g = 0; g < n_groups; ++g)
    for (int c = 0; c < cells; ++c) {
      const int u = sc.groups[g].member_user[c];
      if (u < 0) continue;
      sc.base_context.links.set_present(g, c);
      for (int j = 0; j < cells; ++j) {
        sc.base_context.links.beta_at(j, g, c) = sc.user_links.beta_at(j, u % k_users, c);
        sc.base_context.links.rho_at(j, g, c) = sc.user_links.rho_at(j, u % k_users, c);
      }
    }
  sc.base_context.validate();

  // Slow-scale mobility: sticky random row-stochastic chains, and a gain
  // table per (group, location) with location 0 at the base positions.
  const int locations = config.locations;
  Rng mobility_rng(derive_seed(seed, 0x6D6F6269));
  sc.mobility.locations = locations;
  sc.mobility.transition.resize(n_groups);
  sc.mobility.beta_table.resize(n_groups);
  for (int g = 0; g < n_groups; ++g) {
    auto& matrix = sc.mobility.transition[g];
    matrix.resize(static_cast<std::size_t>(locations) * locations);
    for (int i = 0; i < locations; ++i) {
      double total = 0.0;
      std::vector<double> raw(locations);
      for (int j = 0; j < locations; ++j) {
        raw[j] = mobility_rng.uniform();
        total += raw[j];
      }
      for (int j = 0; j < locations; ++j) {
        const double random_part = raw[j] / total;
        matrix[static_cast<std::size_t>(i) * locations + j] =
            (1.0 - config.mobility_stickiness) * random_part +
            (i == j ? config.mobility_stickiness : 0.0);
      }
    }

    auto& table = sc.mobility.beta_table[g];
    table.assign(locations, std::vector<double>(static_cast<std::size_t>(cells) * cells, 0.0));
    for (int loc = 0; loc < locations; ++loc)
      for (int c = 0; c < cells; ++c) {
        const int u = sc.groups[g].member_user[c];
        if (u < 0) continue;
        std::array<double, 2> position = sc.users[u].position_m;
        if (loc > 0)
          position = sample_user_position(sc.bs_positions[c], config.radius_m, mobility_rng);
        for (int j = 0; j < cells; ++j)
          table[loc][static_cast<std::size_t>(j) * cells + c] =
              link_beta(position, sc.bs_positions[j], config.pathloss_exponent);
      }
  }
  sc.mobility.validate(n_groups, cells);
  return sc;
}

double reference_protocol_se(const RateContext& ctx) {
  return se_lower_bound(ctx, std::vector<int>(ctx.groups(), 0), ctx.groups());
}

double reference_protocol_se(const Scenario& scenario) {
  return reference_protocol_se(scenario.base_context);
}

}  // namespace csiplan
