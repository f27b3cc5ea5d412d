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
#include <map>
#include <string>
#include <vector>

#include "csiplan/fast_policy.hpp"
#include "csiplan/rate.hpp"

namespace csiplan {

/// Markov mobility on the slow time scale: one L x L row-stochastic
/// transition matrix per copilot group, plus the large-scale gains each
/// group's members see from every location combination.
/// beta_table[g][location] holds a station-major C x C slice matching the
/// group's row of LinkStatistics.
struct MobilityModel {
  int locations = 0;
  std::vector<std::vector<double>> transition;
  std::vector<std::vector<std::vector<double>>> beta_table;

  double probability(int group, int from, int to) const {
    return transition[group][static_cast<std::size_t>(from) * locations + to];
  }
  void validate(int groups, int cells) const;
};

/// Column-stochastic L x N_G matrix; column g is group g's location belief.
struct BeliefMatrix {
  int locations = 0;
  int groups = 0;
  std::vector<double> x;  // column-major

  static BeliefMatrix uniform(int locations, int groups);
  static BeliefMatrix one_hot(int locations, const std::vector<int>& state);

  double at(int location, int group) const {
    return x[static_cast<std::size_t>(group) * locations + location];
  }
  double& at(int location, int group) {
    return x[static_cast<std::size_t>(group) * locations + location];
  }
  void validate() const;
};

using FeedbackAction = std::vector<std::uint8_t>;

/// Collapses the columns of observed groups (u_g = 1) to one-hot vectors at
/// the reported locations. Observations must be given exactly for the
/// groups with u_g = 1.
BeliefMatrix collapse_observed(const BeliefMatrix& belief, const FeedbackAction& u,
                               const std::map<int, int>& observations);

/// One slow-scale belief step: collapse observed columns, then propagate
/// every column through its mobility chain (b' = P^T b).
BeliefMatrix belief_update(const BeliefMatrix& belief, const FeedbackAction& u,
                           const std::map<int, int>& observations, const MobilityModel& mobility);

/// Per-column argmax; ties resolve to the lowest location index. Because
/// group movements are independent the factored argmax equals the argmax
/// of the joint product.
std::vector<int> most_likely_state(const BeliefMatrix& belief);

enum class FastMethod { kDynamicProgramming, kLocalSearch, kPerSlotGreedy };

FastMethod fast_method_from_string(const std::string& name);
std::string to_string(FastMethod method);

/// Rebuilds the rate context with the large-scale gains the groups see
/// from the given location combination (autocorrelations are
/// velocity-driven and stay fixed).
RateContext context_at(const RateContext& proto, const MobilityModel& mobility,
                       const std::vector<int>& locations);

SchedulePolicy solve_fast_policy(const RateContext& ctx, int horizon, int tau, FastMethod method,
                                 double eps = 0.5);

/// Best H-horizon training reward reachable from the most likely locations
/// of `belief`, with observed groups (u_g = 1) pinned to their reported
/// locations.
double r_max(const BeliefMatrix& belief, const FeedbackAction& u,
             const std::map<int, int>& observations, const RateContext& proto,
             const MobilityModel& mobility, int horizon, int tau, FastMethod method,
             double eps = 0.5);
/// Same, for a known location state (the value-iteration reward).
double r_max(const std::vector<int>& state, const RateContext& proto,
             const MobilityModel& mobility, int horizon, int tau, FastMethod method,
             double eps = 0.5);

/// Greedy feedback policy over most-likely-state vectors, with the value
/// table of the underlying Markov decision process.
struct UpperPolicy {
  int locations = 0;
  int groups = 0;
  int feedback_budget = 0;
  std::vector<FeedbackAction> action_by_state;  // indexed by packed state
  std::vector<double> value_by_state;

  std::size_t state_index(const std::vector<int>& state) const;
  const FeedbackAction& action(const std::vector<int>& state) const;
};

struct ValueIterationStats {
  int sweeps = 0;
  std::vector<double> sup_diffs;  // sup-norm update per sweep
};

/// Discounted value iteration on the most-likely-state reduction of the
/// location process, with r_max as the stage reward. Stops when the
/// sup-norm update drops below tol.
UpperPolicy mls_value_iteration(const RateContext& proto, const MobilityModel& mobility,
                                int horizon, int tau, double alpha, int feedback_budget,
                                double tol, FastMethod method = FastMethod::kDynamicProgramming,
                                double eps = 0.5, ValueIterationStats* stats = nullptr);

struct SlotRecord {
  int slot = 0;
  int epoch = 0;
  ActionVector action;
  DelayState delays;
  double reward = 0.0;            // scored against the true gains
  double reference_reward = 0.0;  // all-train protocol on the same true gains
  double case_se = 0.0;           // running mean of reward
  double reference_case = 0.0;

  friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

struct EpochRecord {
  int epoch = 0;
  FeedbackAction feedback;
  std::vector<int> mls_state;      // most likely state before observation
  std::vector<int> planned_state;  // locations the fast policy was planned at
  std::vector<int> true_state;
  double planned_value = 0.0;  // fast-policy value under believed gains
  double scored_value = 0.0;   // executed schedule scored under true gains

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct PolicyTrace {
  std::string method;
  int horizon = 0;
  int tau = 0;
  int feedback_budget = 0;
  std::uint64_t seed = 0;
  std::vector<SlotRecord> slots;
  std::vector<EpochRecord> epochs;

  friend bool operator==(const PolicyTrace&, const PolicyTrace&) = default;
};

/// Simulates `epochs` slow-scale epochs: true locations evolve through the
/// mobility chains, the upper policy picks which groups feedback, beliefs
/// collapse and propagate, and the fast policy planned on believed gains
/// is scored against the true gains.
PolicyTrace run_two_timescale(const RateContext& proto, const MobilityModel& mobility,
                              const UpperPolicy& upper, FastMethod method, int horizon, int tau,
                              int epochs, std::uint64_t seed, double eps = 0.5);

}  // namespace csiplan
