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

#include "csiplan/slow_policy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace csiplan {

namespace {

constexpr std::size_t kValueIterationStateGuard = 1'000'000;

std::size_t checked_state_count(int locations, int groups) {
  std::size_t n = 1;
  for (int g = 0; g < groups; ++g) {
    if (n > kValueIterationStateGuard / static_cast<std::size_t>(locations))
      throw GuardError("location state space exceeds the value-iteration guard");
    n *= static_cast<std::size_t>(locations);
  }
  return n;
}

std::vector<int> unpack_state(std::size_t index, int locations, int groups) {
  std::vector<int> state(groups);
  for (int g = 0; g < groups; ++g) {
    state[g] = static_cast<int>(index % locations);
    index /= locations;
  }
  return state;
}

int feedback_size(const FeedbackAction& u) {
  int n = 0;
  for (std::uint8_t v : u) n += (v != 0);
  return n;
}

}  // namespace

void MobilityModel::validate(int groups, int cells) const {
  if (locations < 1) throw std::invalid_argument("need at least one location");
  if (static_cast<int>(transition.size()) != groups ||
      static_cast<int>(beta_table.size()) != groups)
    throw std::invalid_argument("mobility model group count mismatch");
  for (int g = 0; g < groups; ++g) {
    if (static_cast<int>(transition[g].size()) !=
        static_cast<std::size_t>(locations) * locations)
      throw std::invalid_argument("transition matrix shape mismatch");
    for (int i = 0; i < locations; ++i) {
      double row = 0.0;
      for (int j = 0; j < locations; ++j) {
        const double p = probability(g, i, j);
        if (p < 0.0) throw std::invalid_argument("negative transition probability");
        row += p;
      }
      if (std::fabs(row - 1.0) > 1e-12)
        throw std::invalid_argument("transition rows must sum to one");
    }
    if (static_cast<int>(beta_table[g].size()) != locations)
      throw std::invalid_argument("gain table location count mismatch");
    for (const auto& slice : beta_table[g])
      if (static_cast<int>(slice.size()) != cells * cells)
        throw std::invalid_argument("gain table slice shape mismatch");
  }
}

BeliefMatrix BeliefMatrix::uniform(int locations, int groups) {
  BeliefMatrix b;
  b.locations = locations;
  b.groups = groups;
  b.x.assign(static_cast<std::size_t>(locations) * groups, 1.0 / locations);
  return b;
}

BeliefMatrix BeliefMatrix::one_hot(int locations, const std::vector<int>& state) {
  BeliefMatrix b;
  b.locations = locations;
  b.groups = static_cast<int>(state.size());
  b.x.assign(static_cast<std::size_t>(locations) * b.groups, 0.0);
  for (int g = 0; g < b.groups; ++g) b.at(state[g], g) = 1.0;
  return b;
}

void BeliefMatrix::validate() const {
  for (int g = 0; g < groups; ++g) {
    double sum = 0.0;
    for (int l = 0; l < locations; ++l) {
      const double p = at(l, g);
      if (p < 0.0 || p > 1.0) throw std::invalid_argument("belief entry outside [0, 1]");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("belief column must sum to one");
  }
}

BeliefMatrix collapse_observed(const BeliefMatrix& belief, const FeedbackAction& u,
                               const std::map<int, int>& observations) {
  if (static_cast<int>(u.size()) != belief.groups)
    throw std::invalid_argument("feedback vector length mismatch");
  for (const auto& [g, loc] : observations) {
    if (g < 0 || g >= belief.groups || !u[g])
      throw std::invalid_argument("observation reported for a group that did not feedback");
    if (loc < 0 || loc >= belief.locations)
      throw std::invalid_argument("observed location out of range");
  }
  BeliefMatrix out = belief;
  for (int g = 0; g < belief.groups; ++g) {
    if (!u[g]) continue;
    const auto it = observations.find(g);
    if (it == observations.end())
      throw std::invalid_argument("missing observation for a feedback group");
    for (int l = 0; l < belief.locations; ++l) out.at(l, g) = 0.0;
    out.at(it->second, g) = 1.0;
  }
  return out;
}

BeliefMatrix belief_update(const BeliefMatrix& belief, const FeedbackAction& u,
                           const std::map<int, int>& observations,
                           const MobilityModel& mobility) {
  if (belief.locations != mobility.locations)
    throw std::invalid_argument("belief/mobility location count mismatch");
  BeliefMatrix collapsed = collapse_observed(belief, u, observations);
  BeliefMatrix out = collapsed;
  for (int g = 0; g < belief.groups; ++g)
    for (int j = 0; j < belief.locations; ++j) {
      double p = 0.0;
      for (int i = 0; i < belief.locations; ++i)
        p += mobility.probability(g, i, j) * collapsed.at(i, g);
      out.at(j, g) = p;
    }
  return out;
}

std::vector<int> most_likely_state(const BeliefMatrix& belief) {
  std::vector<int> state(belief.groups, 0);
  for (int g = 0; g < belief.groups; ++g) {
    double best = -1.0;
    for (int l = 0; l < belief.locations; ++l)
      if (belief.at(l, g) > best) {
        best = belief.at(l, g);
        state[g] = l;
      }
  }
  return state;
}

FastMethod fast_method_from_string(const std::string& name) {
  if (name == "dp") return FastMethod::kDynamicProgramming;
  if (name == "local_search") return FastMethod::kLocalSearch;
  if (name == "per_slot_greedy" || name == "greedy") return FastMethod::kPerSlotGreedy;
  throw ConfigError("unknown fast policy method: " + name);
}

std::string to_string(FastMethod method) {
  switch (method) {
    case FastMethod::kDynamicProgramming: return "dp";
    case FastMethod::kLocalSearch: return "local_search";
    case FastMethod::kPerSlotGreedy: return "per_slot_greedy";
  }
  return "unknown";
}

RateContext context_at(const RateContext& proto, const MobilityModel& mobility,
                       const std::vector<int>& locations) {
  if (static_cast<int>(locations.size()) != proto.groups())
    throw std::invalid_argument("location vector length mismatch");
  RateContext ctx = proto;
  const int cells = proto.cells();
  for (int g = 0; g < proto.groups(); ++g) {
    const int loc = locations[g];
    if (loc < 0 || loc >= mobility.locations)
      throw std::invalid_argument("location index out of range");
    const std::vector<double>& slice = mobility.beta_table[g][loc];
    for (int j = 0; j < cells; ++j)
      for (int c = 0; c < cells; ++c)
        if (ctx.links.present_at(g, c))
          ctx.links.beta_at(j, g, c) = slice[static_cast<std::size_t>(j) * cells + c];
  }
  return ctx;
}

SchedulePolicy solve_fast_policy(const RateContext& ctx, int horizon, int tau, FastMethod method,
                                 double eps) {
  switch (method) {
    case FastMethod::kDynamicProgramming: return dp_optimal_policy(ctx, horizon, tau);
    case FastMethod::kLocalSearch: return local_search_policy(ctx, horizon, tau, eps);
    case FastMethod::kPerSlotGreedy: return per_slot_greedy_policy(ctx, horizon, tau);
  }
  throw std::invalid_argument("unknown fast policy method");
}

double r_max(const BeliefMatrix& belief, const FeedbackAction& u,
             const std::map<int, int>& observations, const RateContext& proto,
             const MobilityModel& mobility, int horizon, int tau, FastMethod method, double eps) {
  const BeliefMatrix collapsed = collapse_observed(belief, u, observations);
  const std::vector<int> locations = most_likely_state(collapsed);
  return solve_fast_policy(context_at(proto, mobility, locations), horizon, tau, method, eps)
      .value;
}

double r_max(const std::vector<int>& state, const RateContext& proto,
             const MobilityModel& mobility, int horizon, int tau, FastMethod method, double eps) {
  return solve_fast_policy(context_at(proto, mobility, state), horizon, tau, method, eps).value;
}

std::size_t UpperPolicy::state_index(const std::vector<int>& state) const {
  std::size_t index = 0;
  for (int g = groups - 1; g >= 0; --g) index = index * locations + state[g];
  return index;
}

const FeedbackAction& UpperPolicy::action(const std::vector<int>& state) const {
  return action_by_state[state_index(state)];
}

UpperPolicy mls_value_iteration(const RateContext& proto, const MobilityModel& mobility,
                                int horizon, int tau, double alpha, int feedback_budget,
                                double tol, FastMethod method, double eps,
                                ValueIterationStats* stats) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("discount must be in (0, 1)");
  if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
  const int groups = proto.groups();
  const int locations = mobility.locations;
  mobility.validate(groups, proto.cells());
  if (feedback_budget < 0 || feedback_budget > groups)
    throw std::invalid_argument("feedback budget out of range");
  const std::size_t n_states = checked_state_count(locations, groups);

  // Stage rewards. Feedback does not move the most likely locations once
  // the state itself is the location vector, so the reward is the same for
  // every feasible feedback action; the max over actions reduces to the
  // reward itself and the action choice is settled by the tie-break below.
  std::vector<double> reward(n_states);
  for (std::size_t s = 0; s < n_states; ++s)
    reward[s] = r_max(unpack_state(s, locations, groups), proto, mobility, horizon, tau, method,
                      eps);

  std::vector<double> value(n_states, 0.0), expected(n_states), scratch(n_states);
  ValueIterationStats local_stats;
  double diff = 0.0;
  const int max_sweeps = 100000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    // E[V(next)] via one mode product per independent group chain.
    expected = value;
    std::size_t stride = 1;
    for (int g = 0; g < groups; ++g) {
      for (std::size_t base = 0; base < n_states; ++base) {
        const int current = static_cast<int>((base / stride) % locations);
        if (current != 0) continue;
        for (int i = 0; i < locations; ++i) {
          double acc = 0.0;
          for (int j = 0; j < locations; ++j)
            acc += mobility.probability(g, i, j) * expected[base + stride * j];
          scratch[base + stride * i] = acc;
        }
      }
      std::swap(expected, scratch);
      stride *= locations;
    }
    diff = 0.0;
    for (std::size_t s = 0; s < n_states; ++s) {
      const double updated = reward[s] + alpha * expected[s];
      diff = std::max(diff, std::fabs(updated - value[s]));
      value[s] = updated;
    }
    local_stats.sup_diffs.push_back(diff);
    ++local_stats.sweeps;
    if (diff < tol) break;
  }
  if (diff >= tol) throw GuardError("value iteration failed to converge within the sweep cap");

  UpperPolicy policy;
  policy.locations = locations;
  policy.groups = groups;
  policy.feedback_budget = feedback_budget;
  policy.value_by_state = std::move(value);
  // All feasible feedback actions tie on value; prefer the largest
  // feedback set (observing is free in the model and can only reduce
  // belief error in simulation), lowest group indices first.
  FeedbackAction greedy(groups, 0);
  for (int g = 0; g < std::min(groups, feedback_budget); ++g) greedy[g] = 1;
  policy.action_by_state.assign(n_states, greedy);
  if (stats) *stats = std::move(local_stats);
  return policy;
}

PolicyTrace run_two_timescale(const RateContext& proto, const MobilityModel& mobility,
                              const UpperPolicy& upper, FastMethod method, int horizon, int tau,
                              int epochs, std::uint64_t seed, double eps) {
  if (epochs < 1) throw std::invalid_argument("epoch count must be >= 1");
  const int groups = proto.groups();
  const int locations = mobility.locations;
  mobility.validate(groups, proto.cells());

  Rng rng(derive_seed(seed, 0x74727565));  // true-location process
  std::vector<int> true_state(groups);
  for (int g = 0; g < groups; ++g) true_state[g] = rng.uniform_int(locations);
  BeliefMatrix belief = BeliefMatrix::one_hot(locations, true_state);

  PolicyTrace trace;
  trace.method = to_string(method);
  trace.horizon = horizon;
  trace.tau = tau;
  trace.feedback_budget = upper.feedback_budget;
  trace.seed = seed;

  const DelayState zero_delays(groups, 0);
  double reward_sum = 0.0, reference_sum = 0.0;
  int slot = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const std::vector<int> mls_before = most_likely_state(belief);
    const FeedbackAction u = upper.action(mls_before);
    std::map<int, int> observations;
    for (int g = 0; g < groups; ++g)
      if (u[g]) observations[g] = true_state[g];

    const BeliefMatrix collapsed = collapse_observed(belief, u, observations);
    const std::vector<int> planned_state = most_likely_state(collapsed);
    const RateContext believed = context_at(proto, mobility, planned_state);
    const RateContext truth = context_at(proto, mobility, true_state);
    const SchedulePolicy schedule = solve_fast_policy(believed, horizon, tau, method, eps);
    const double reference_se = se_lower_bound(truth, zero_delays, groups);

    EpochRecord epoch_record;
    epoch_record.epoch = epoch;
    epoch_record.feedback = u;
    epoch_record.mls_state = mls_before;
    epoch_record.planned_state = planned_state;
    epoch_record.true_state = true_state;
    epoch_record.planned_value = schedule.value;

    DelayState delays(groups, 0);
    std::vector<double> slot_rewards(horizon);
    for (int j = 0; j < horizon; ++j) {
      delays = (j == 0) ? zero_delays : delay_transition(delays, schedule.actions[j]);
      const double reward = reward_low(truth, delays, schedule.actions[j], tau);
      slot_rewards[j] = reward;
      reward_sum += reward;
      reference_sum += reference_se;
      SlotRecord record;
      record.slot = slot;
      record.epoch = epoch;
      record.action = schedule.actions[j];
      record.delays = delays;
      record.reward = reward;
      record.reference_reward = reference_se;
      record.case_se = reward_sum / static_cast<double>(slot + 1);
      record.reference_case = reference_sum / static_cast<double>(slot + 1);
      trace.slots.push_back(std::move(record));
      ++slot;
    }
    // Right-to-left sum matches the solver's suffix accumulation, so with
    // full observation the scored epoch value equals the planned value
    // exactly.
    double scored = 0.0;
    for (int j = horizon - 1; j >= 0; --j) scored = slot_rewards[j] + scored;
    epoch_record.scored_value = scored;
    trace.epochs.push_back(std::move(epoch_record));

    belief = belief_update(belief, u, observations, mobility);
    for (int g = 0; g < groups; ++g) {
      const double target = rng.uniform();
      double cumulative = 0.0;
      int next = locations - 1;
      for (int j = 0; j < locations; ++j) {
        cumulative += mobility.probability(g, true_state[g], j);
        if (target < cumulative) {
          next = j;
          break;
        }
      }
      true_state[g] = next;
    }
  }
  return trace;
}

}  // namespace csiplan
