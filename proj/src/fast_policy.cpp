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

#include "csiplan/fast_policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace csiplan {

namespace {

constexpr std::size_t kDpStateGuard = 10'000'000;

double prefactor(int trainers, int coherence_samples) {
  return 1.0 - static_cast<double>(trainers) / static_cast<double>(coherence_samples);
}

ActionVector all_ones(int groups) { return ActionVector(groups, 1); }

ActionVector mask_to_action(std::uint32_t mask, int groups) {
  ActionVector a(groups, 0);
  for (int g = 0; g < groups; ++g) a[g] = (mask >> g) & 1u;
  return a;
}

// Budget-feasible masks ordered so that the induced action vectors
// (a_0, a_1, ...) are lexicographically increasing; scanning in this order
// plus strict-improvement updates yields the documented tie-breaking.
std::vector<std::uint32_t> feasible_masks(int groups, int tau) {
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1u << groups); ++m)
    if (std::popcount(m) <= tau) masks.push_back(m);
  std::sort(masks.begin(), masks.end(), [groups](std::uint32_t a, std::uint32_t b) {
    for (int g = 0; g < groups; ++g) {
      const unsigned ba = (a >> g) & 1u, bb = (b >> g) & 1u;
      if (ba != bb) return ba < bb;
    }
    return false;
  });
  return masks;
}

struct Packing {
  int bits = 0;
  std::uint64_t mask = 0;
};

Packing make_packing(int groups, int horizon) {
  Packing p;
  p.bits = std::max(1, std::bit_width(static_cast<unsigned>(horizon - 1)));
  if (p.bits * groups > 64)
    throw GuardError("delay-state space does not fit the 64-bit packing");
  p.mask = (p.bits == 64) ? ~0ull : ((1ull << p.bits) - 1);
  return p;
}

std::uint64_t packed_transition(std::uint64_t packed, std::uint32_t action_mask, int groups,
                                const Packing& p) {
  std::uint64_t out = 0;
  for (int g = 0; g < groups; ++g) {
    const std::uint64_t d = (packed >> (g * p.bits)) & p.mask;
    const std::uint64_t next = ((action_mask >> g) & 1u) ? 0 : d + 1;
    out |= next << (g * p.bits);
  }
  return out;
}

double packed_slot_se(const SeTable& table, std::uint64_t packed, int groups, const Packing& p) {
  double sum = 0.0;
  for (int g = 0; g < groups; ++g)
    sum += table.group_se(g, static_cast<int>((packed >> (g * p.bits)) & p.mask));
  return sum;
}

void check_policy_args(const RateContext& ctx, int horizon, int tau) {
  ctx.validate();
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (tau < 0 || tau > ctx.groups()) throw std::invalid_argument("tau out of range");
  if (ctx.groups() > 31) throw GuardError("group count exceeds the action-mask width");
}

}  // namespace

SeTable::SeTable(const RateContext& ctx, int max_delay) : groups_(ctx.groups()), max_delay_(max_delay) {
  table_.resize(static_cast<std::size_t>(groups_) * (max_delay_ + 1));
  for (int g = 0; g < groups_; ++g)
    for (int d = 0; d <= max_delay_; ++d)
      table_[static_cast<std::size_t>(g) * (max_delay_ + 1) + d] = group_stage_se(ctx, g, d);
}

DelayState delay_transition(const DelayState& delays, const ActionVector& action) {
  if (delays.size() != action.size()) throw std::invalid_argument("shape mismatch");
  DelayState next(delays.size());
  for (std::size_t g = 0; g < delays.size(); ++g)
    next[g] = action[g] ? 0 : delays[g] + 1;
  return next;
}

DelayState delay_from_actions(const std::vector<ActionVector>& actions_after_first, int stage) {
  if (stage < 0 || stage > static_cast<int>(actions_after_first.size()))
    throw std::invalid_argument("stage outside the recorded history");
  if (stage == 0) return {};
  const int groups = static_cast<int>(actions_after_first[0].size());
  DelayState delays(groups, 0);
  for (int g = 0; g < groups; ++g) {
    auto a = [&](int t) -> int { return actions_after_first[t - 1][g]; };  // a(t_t)
    // Never-trained term: stage * prod(1 - a(t)).
    double never = stage;
    for (int t = 1; t <= stage; ++t) never *= 1 - a(t);
    // Trained-then-aged terms: t * a(t_stage - t) * prod_{h > stage-t}(1 - a(h)).
    double aged = 0.0;
    for (int t = 1; t < stage; ++t) {
      double term = t * a(stage - t);
      for (int h = stage - t + 1; h <= stage; ++h) term *= 1 - a(h);
      aged += term;
    }
    delays[g] = static_cast<int>(never + aged);
  }
  return delays;
}

double reward_low(const RateContext& ctx, const DelayState& delays, const ActionVector& action,
                  int tau) {
  if (static_cast<int>(delays.size()) != ctx.groups() ||
      static_cast<int>(action.size()) != ctx.groups())
    throw std::invalid_argument("shape mismatch");
  int trainers = 0;
  for (std::uint8_t a : action) trainers += (a != 0);
  if (tau >= 0 && trainers > tau && trainers != ctx.groups())
    throw std::invalid_argument("training budget violated");
  double sum = 0.0;
  for (int g = 0; g < ctx.groups(); ++g) sum += group_stage_se(ctx, g, delays[g]);
  return prefactor(trainers, ctx.coherence_samples) * sum;
}

SchedulePolicy brute_force_policy(const RateContext& ctx, int horizon, int tau) {
  check_policy_args(ctx, horizon, tau);
  if (ctx.groups() > 6 || horizon > 5)
    throw GuardError("brute force restricted to N_G <= 6 and H <= 5");

  const int groups = ctx.groups();
  const Packing packing = make_packing(groups, horizon);
  const SeTable table(ctx, horizon - 1);
  const auto masks = feasible_masks(groups, tau);

  struct SuffixResult {
    double value = 0.0;
    std::vector<std::uint32_t> tail;
  };
  // Exhaustive depth-first enumeration. Suffix rewards accumulate right to
  // left so totals associate exactly like the dynamic program's; scanning
  // masks in lexicographic order with strict improvement keeps the
  // lexicographically smallest optimal action matrix.
  auto search = [&](auto&& self, int stage, std::uint64_t packed) -> SuffixResult {
    if (stage == horizon) return {};
    SuffixResult best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::uint32_t mask : masks) {
      const std::uint64_t next = packed_transition(packed, mask, groups, packing);
      const double reward = prefactor(std::popcount(mask), ctx.coherence_samples) *
                            packed_slot_se(table, next, groups, packing);
      SuffixResult sub = self(self, stage + 1, next);
      const double value = reward + sub.value;
      if (value > best.value) {
        best.value = value;
        best.tail.clear();
        best.tail.push_back(mask);
        best.tail.insert(best.tail.end(), sub.tail.begin(), sub.tail.end());
      }
    }
    return best;
  };

  const double first_reward = prefactor(groups, ctx.coherence_samples) *
                              packed_slot_se(table, 0, groups, packing);
  SuffixResult suffix = horizon > 1 ? search(search, 1, 0) : SuffixResult{};

  SchedulePolicy policy;
  policy.horizon = horizon;
  policy.tau = tau;
  policy.value = first_reward + suffix.value;
  policy.actions.push_back(all_ones(groups));
  for (std::uint32_t mask : suffix.tail) policy.actions.push_back(mask_to_action(mask, groups));
  return policy;
}

SchedulePolicy dp_optimal_policy(const RateContext& ctx, int horizon, int tau) {
  check_policy_args(ctx, horizon, tau);
  const int groups = ctx.groups();
  const Packing packing = make_packing(groups, horizon);
  const SeTable table(ctx, horizon - 1);
  const auto masks = feasible_masks(groups, tau);

  // Forward pass: reachable post-action delay states per stage.
  std::vector<std::vector<std::uint64_t>> states(horizon);
  states[0] = {0};
  std::size_t total_states = 1;
  for (int j = 1; j < horizon; ++j) {
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t d : states[j - 1])
      for (std::uint32_t mask : masks) seen.insert(packed_transition(d, mask, groups, packing));
    states[j].assign(seen.begin(), seen.end());
    std::sort(states[j].begin(), states[j].end());
    total_states += states[j].size();
    if (total_states > kDpStateGuard)
      throw GuardError("reachable delay-state space exceeds the solver guard");
  }

  // Backward induction. values[j][d] is the best reward of stages j+1..H-1
  // from post-stage-j state d.
  std::vector<std::unordered_map<std::uint64_t, double>> values(horizon);
  for (std::uint64_t d : states[horizon - 1]) values[horizon - 1][d] = 0.0;
  for (int j = horizon - 2; j >= 0; --j) {
    values[j].reserve(states[j].size());
    for (std::uint64_t d : states[j]) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::uint32_t mask : masks) {
        const std::uint64_t next = packed_transition(d, mask, groups, packing);
        const double reward = prefactor(std::popcount(mask), ctx.coherence_samples) *
                              packed_slot_se(table, next, groups, packing);
        const double value = reward + values[j + 1].at(next);
        if (value > best) best = value;
      }
      values[j][d] = best;
    }
  }

  SchedulePolicy policy;
  policy.horizon = horizon;
  policy.tau = tau;
  policy.actions.push_back(all_ones(groups));
  const double first_reward = prefactor(groups, ctx.coherence_samples) *
                              packed_slot_se(table, 0, groups, packing);
  policy.value = first_reward + (horizon > 1 ? values[0].at(0) : 0.0);

  std::uint64_t state = 0;
  for (int j = 1; j < horizon; ++j) {
    std::uint32_t chosen_mask = 0;
    std::uint64_t chosen_next = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint32_t mask : masks) {
      const std::uint64_t next = packed_transition(state, mask, groups, packing);
      const double reward = prefactor(std::popcount(mask), ctx.coherence_samples) *
                            packed_slot_se(table, next, groups, packing);
      const double value = reward + values[j].at(next);
      if (value > best) {
        best = value;
        chosen_mask = mask;
        chosen_next = next;
      }
    }
    policy.actions.push_back(mask_to_action(chosen_mask, groups));
    state = chosen_next;
  }
  return policy;
}

SchedulePolicy per_slot_greedy_policy(const RateContext& ctx, int horizon, int tau) {
  check_policy_args(ctx, horizon, tau);
  const int groups = ctx.groups();
  const Packing packing = make_packing(groups, horizon);
  const SeTable table(ctx, horizon - 1);
  const auto masks = feasible_masks(groups, tau);

  SchedulePolicy policy;
  policy.horizon = horizon;
  policy.tau = tau;
  policy.actions.push_back(all_ones(groups));
  double total = prefactor(groups, ctx.coherence_samples) *
                 packed_slot_se(table, 0, groups, packing);
  std::uint64_t state = 0;
  for (int j = 1; j < horizon; ++j) {
    double best = -std::numeric_limits<double>::infinity();
    std::uint32_t best_mask = 0;
    std::uint64_t best_next = 0;
    for (std::uint32_t mask : masks) {
      const std::uint64_t next = packed_transition(state, mask, groups, packing);
      const double reward = prefactor(std::popcount(mask), ctx.coherence_samples) *
                            packed_slot_se(table, next, groups, packing);
      if (reward > best) {
        best = reward;
        best_mask = mask;
        best_next = next;
      }
    }
    policy.actions.push_back(mask_to_action(best_mask, groups));
    total += best;
    state = best_next;
  }
  policy.value = total;
  return policy;
}

namespace {

double objective_impl(const std::vector<GroundElement>& s, const SeTable& table,
                      const RateContext& ctx, int horizon, int only_group) {
  const int groups = ctx.groups();
  std::vector<std::uint32_t> stage_mask(horizon, 0);
  stage_mask[0] = (groups == 31) ? 0x7FFFFFFFu : ((1u << groups) - 1);
  for (const GroundElement& e : s) {
    if (e.group < 0 || e.group >= groups || e.stage < 1 || e.stage >= horizon)
      throw std::invalid_argument("ground element outside the stage/group grid");
    stage_mask[e.stage] |= 1u << e.group;
  }
  const Packing packing = make_packing(groups, horizon);
  std::uint64_t state = 0;
  double total = 0.0;
  for (int j = 0; j < horizon; ++j) {
    state = packed_transition(state, stage_mask[j], groups, packing);
    const double pf = prefactor(std::popcount(stage_mask[j]), ctx.coherence_samples);
    if (only_group < 0)
      total += pf * packed_slot_se(table, state, groups, packing);
    else
      total += pf * table.group_se(only_group,
                                   static_cast<int>((state >> (only_group * packing.bits)) &
                                                    packing.mask));
  }
  return total;
}

}  // namespace

double objective_set_value(const std::vector<GroundElement>& s, const RateContext& ctx,
                           int horizon) {
  check_policy_args(ctx, horizon, ctx.groups());
  const SeTable table(ctx, horizon - 1);
  return objective_impl(s, table, ctx, horizon, -1);
}

double objective_group_value(const std::vector<GroundElement>& s, int group,
                             const RateContext& ctx, int horizon) {
  check_policy_args(ctx, horizon, ctx.groups());
  if (group < 0 || group >= ctx.groups()) throw std::invalid_argument("group out of range");
  const SeTable table(ctx, horizon - 1);
  return objective_impl(s, table, ctx, horizon, group);
}

SchedulePolicy local_search_policy(const RateContext& ctx, int horizon, int tau, double eps) {
  check_policy_args(ctx, horizon, tau);
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  const int groups = ctx.groups();
  const SeTable table(ctx, horizon - 1);
  auto f = [&](const std::vector<GroundElement>& s) {
    return objective_impl(s, table, ctx, horizon, -1);
  };

  const double factor = 1.0 + eps / std::pow(static_cast<double>(groups), 4);
  double f_upper = 0.0;
  for (int g = 0; g < groups; ++g) f_upper += table.group_se(g, 0);
  f_upper *= horizon;

  std::vector<GroundElement> ground;
  for (int t = 1; t < horizon; ++t)
    for (int g = 0; g < groups; ++g) ground.push_back({g, t});

  auto stage_count = [&](const std::vector<GroundElement>& s, int stage) {
    int n = 0;
    for (const GroundElement& e : s) n += (e.stage == stage);
    return n;
  };

  auto local_search = [&](const std::vector<GroundElement>& available) {
    std::vector<GroundElement> s;
    if (available.empty() || tau == 0) return s;
    double best_single = -std::numeric_limits<double>::infinity();
    GroundElement seed{};
    for (const GroundElement& e : available) {
      const double value = f({e});
      if (value > best_single) {
        best_single = value;
        seed = e;
      }
    }
    s = {seed};
    double f_s = best_single;

    const long max_moves =
        64 + static_cast<long>(std::ceil(std::log(std::max(f_upper / f_s, 1.0)) /
                                         std::log1p(eps / std::pow(groups, 4))));
    long moves = 0;
    while (true) {
      bool moved = false;
      // Delete operation.
      for (std::size_t i = 0; i < s.size() && !moved; ++i) {
        std::vector<GroundElement> candidate = s;
        candidate.erase(candidate.begin() + i);
        const double value = f(candidate);
        if (value > factor * f_s) {
          s = std::move(candidate);
          f_s = value;
          moved = true;
        }
      }
      // Exchange operation: swap one outside element in, removing at most
      // one element per stage matroid so the result stays independent.
      if (!moved) {
        for (const GroundElement& d : available) {
          if (std::find(s.begin(), s.end(), d) != s.end()) continue;
          std::vector<int> removable;  // indices into s, or -1 for none
          if (stage_count(s, d.stage) < tau) removable.push_back(-1);
          for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i].stage == d.stage) removable.push_back(static_cast<int>(i));
          for (int r : removable) {
            std::vector<GroundElement> candidate = s;
            if (r >= 0) candidate.erase(candidate.begin() + r);
            candidate.push_back(d);
            std::sort(candidate.begin(), candidate.end());
            const double value = f(candidate);
            if (value > factor * f_s) {
              s = std::move(candidate);
              f_s = value;
              moved = true;
              break;
            }
          }
          if (moved) break;
        }
      }
      if (!moved) break;
      if (++moves > max_moves)
        throw std::logic_error("local search exceeded its accepted-move bound");
    }
    return s;
  };

  // Repeated rounds over shrinking ground sets; one round per matroid plus
  // one, keeping the best round's solution.
  std::vector<GroundElement> remaining = ground;
  std::vector<GroundElement> best_set;
  double best_value = f({});
  const int rounds = horizon;
  for (int round = 0; round < rounds && !remaining.empty(); ++round) {
    const std::vector<GroundElement> s = local_search(remaining);
    const double value = f(s);
    if (value > best_value) {
      best_value = value;
      best_set = s;
    }
    if (s.empty()) break;
    std::vector<GroundElement> next;
    for (const GroundElement& e : remaining)
      if (std::find(s.begin(), s.end(), e) == s.end()) next.push_back(e);
    remaining = std::move(next);
  }

  SchedulePolicy policy;
  policy.horizon = horizon;
  policy.tau = tau;
  policy.actions.assign(horizon, ActionVector(groups, 0));
  policy.actions[0] = all_ones(groups);
  for (const GroundElement& e : best_set) policy.actions[e.stage][e.group] = 1;
  policy.value = best_value;
  return policy;
}

}  // namespace csiplan
