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

#include <string>
#include <vector>

#include "csiplan/scenario.hpp"
#include "csiplan/slow_policy.hpp"

namespace csiplan {

/// Across-seed mean series for one method in a policy comparison.
struct MethodSeries {
  std::string method;
  std::vector<double> reward;
  std::vector<double> case_se;
  std::vector<double> case_gain;  // vs. the all-train reference protocol

  friend bool operator==(const MethodSeries&, const MethodSeries&) = default;
};

struct MethodSummary {
  std::string method;
  double final_case_mean = 0.0;
  double final_case_min = 0.0;
  double final_case_max = 0.0;
  double final_gain_mean = 0.0;

  friend bool operator==(const MethodSummary&, const MethodSummary&) = default;
};

struct ComparisonReport {
  int horizon = 0;
  int epochs = 0;
  int slots = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodSeries> series;
  std::vector<MethodSummary> summary;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

/// The feedback policy that discounted value iteration settles on under
/// the most-likely-state reduction (all feasible actions tie on value, the
/// tie-break takes the largest feedback set, lowest group indices first).
/// Lets comparisons scale past the value-iteration state guard.
UpperPolicy full_feedback_policy(int locations, int groups, int feedback_budget);

/// Runs each method through the two-time-scale simulation on a shared
/// true-location path per seed and aggregates per-slot means. "reference"
/// is the all-train protocol; "per_slot_greedy" maximizes each slot's
/// reward myopically under the same budget.
ComparisonReport compare_policies(const Scenario& scenario,
                                  const std::vector<std::string>& methods, int horizon,
                                  const std::vector<std::uint64_t>& seeds);

enum class ExportFormat { kCsv, kJson };
ExportFormat export_format_from_string(const std::string& name);

/// CSV columns: slot, method, reward, case, case_gain. JSON mirrors the
/// full structure. I/O failures carry the path in the message.
void export_results(const PolicyTrace& trace, const std::string& path, ExportFormat format);
void export_results(const ComparisonReport& report, const std::string& path,
                    ExportFormat format);
std::string trace_to_csv(const PolicyTrace& trace);
std::string report_to_csv(const ComparisonReport& report);

/// Empirical p-quantile with linear interpolation (p in [0, 1]); the 5%
/// outage metric is percentile(values, 0.05).
double percentile(std::vector<double> values, double p);

/// The per-user spectral-efficiency terms of the closed-form bound, in
/// (group-major, cell) order over present users.
std::vector<double> per_user_se(const RateContext& ctx, const std::vector<int>& delays,
                                int active_trainers);

}  // namespace csiplan
