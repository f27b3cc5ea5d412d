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

#include <compare>
#include <vector>

#include "csiplan/rate.hpp"

namespace csiplan {

/// Per-group CSI delays (slots since last training).
using DelayState = std::vector<int>;
/// Binary training decision per group for one slot.
using ActionVector = std::vector<std::uint8_t>;

/// An H-stage training schedule. actions[0] is the forced all-train first
/// stage; every later stage trains at most tau groups. value is the total
/// reward of the schedule, consistent with re-evaluating the action matrix.
struct SchedulePolicy {
  int horizon = 0;
  int tau = 0;
  std::vector<ActionVector> actions;
  double value = 0.0;
};

/// Deterministic delay dynamics: d' = (1 + d) * (1 - a) per group.
DelayState delay_transition(const DelayState& delays, const ActionVector& action);

/// Closed-form delay after `stage` decisions, from the action history at
/// stages t_1..t_stage with the delay reset to zero at t_0. Equals the
/// iterated delay_transition exactly.
DelayState delay_from_actions(const std::vector<ActionVector>& actions_after_first, int stage);

/// Per-slot reward (bits/s/Hz): (1 - sum(a)/T_s) * sum log2(1 + SINR) at
/// the given delays. `delays` is the delay state the slot's SINRs are
/// evaluated at, i.e. after applying the slot's action. When tau >= 0 the
/// training budget is enforced (the all-train vector is always allowed).
double reward_low(const RateContext& ctx, const DelayState& delays, const ActionVector& action,
                  int tau = -1);

/// Exhaustive search over budget-feasible action sequences (oracle-sized
/// instances only). Ties resolve to the lexicographically smallest action
/// matrix.
SchedulePolicy brute_force_policy(const RateContext& ctx, int horizon, int tau);

/// Backward induction over reachable delay states. Matches the brute-force
/// value exactly wherever both run.
SchedulePolicy dp_optimal_policy(const RateContext& ctx, int horizon, int tau);

/// Myopic baseline: maximizes the single-slot reward at every stage.
SchedulePolicy per_slot_greedy_policy(const RateContext& ctx, int horizon, int tau);

/// Ground-set element: train group `group` at stage `stage` (1..H-1).
struct GroundElement {
  int group = 0;
  int stage = 0;
  friend std::strong_ordering operator<=>(const GroundElement& a, const GroundElement& b) {
    if (auto c = a.stage <=> b.stage; c != 0) return c;
    return a.group <=> b.group;
  }
  friend bool operator==(const GroundElement&, const GroundElement&) = default;
};

/// Total schedule reward of the action matrix induced by S (plus the
/// forced all-train first stage). Feasibility of S is not required.
double objective_set_value(const std::vector<GroundElement>& s, const RateContext& ctx,
                           int horizon);

/// Single-group component of objective_set_value (the submodular summand).
double objective_group_value(const std::vector<GroundElement>& s, int group,
                             const RateContext& ctx, int horizon);

/// Approximate schedule via repeated local search (delete and exchange
/// moves with improvement factor 1 + eps/N_G^4) over shrinking ground
/// sets, under the per-stage partition matroids |S at stage t| <= tau.
SchedulePolicy local_search_policy(const RateContext& ctx, int horizon, int tau,
                                   double eps = 0.5);

/// Cached per-group, per-delay spectral-efficiency sums; all policy
/// solvers read SINRs through this table so equal inputs stay bitwise
/// comparable.
class SeTable {
 public:
  SeTable(const RateContext& ctx, int max_delay);
  double group_se(int group, int delay) const {
    return table_[static_cast<std::size_t>(group) * (max_delay_ + 1) + delay];
  }
  int max_delay() const { return max_delay_; }
  int groups() const { return groups_; }

 private:
  int groups_;
  int max_delay_;
  std::vector<double> table_;
};

}  // namespace csiplan
