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

#include "csiplan/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "csiplan/serialize.hpp"

namespace csiplan {

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

UpperPolicy full_feedback_policy(int locations, int groups, int feedback_budget) {
  if (feedback_budget < 0 || feedback_budget > groups)
    throw std::invalid_argument("feedback budget out of range");
  UpperPolicy policy;
  policy.locations = locations;
  policy.groups = groups;
  policy.feedback_budget = feedback_budget;
  FeedbackAction action(groups, 0);
  for (int g = 0; g < std::min(groups, feedback_budget); ++g) action[g] = 1;
  std::size_t n_states = 1;
  for (int g = 0; g < groups; ++g) n_states *= static_cast<std::size_t>(locations);
  policy.action_by_state.assign(n_states, action);
  policy.value_by_state.assign(n_states, 0.0);
  return policy;
}

ComparisonReport compare_policies(const Scenario& scenario,
                                  const std::vector<std::string>& methods, int horizon,
                                  const std::vector<std::uint64_t>& seeds) {
  if (methods.empty()) throw std::invalid_argument("need at least one method");
  if (seeds.empty()) throw std::invalid_argument("need at least one seed");
  const int groups = scenario.group_count();
  const UpperPolicy upper =
      full_feedback_policy(scenario.mobility.locations, groups, scenario.feedback_budget);

  ComparisonReport report;
  report.horizon = horizon;
  report.epochs = scenario.config.epochs;
  report.slots = horizon * scenario.config.epochs;
  report.seeds = seeds;

  std::vector<double> reference_case_mean(report.slots, 0.0);
  std::vector<double> reference_reward_mean(report.slots, 0.0);
  bool have_reference = false;
  const double inv_seeds = 1.0 / static_cast<double>(seeds.size());

  for (const std::string& name : methods) {
    if (name == "reference") continue;
    const FastMethod method = fast_method_from_string(name);
    MethodSeries series;
    series.method = to_string(method);
    series.reward.assign(report.slots, 0.0);
    series.case_se.assign(report.slots, 0.0);
    series.case_gain.assign(report.slots, 0.0);
    MethodSummary summary;
    summary.method = series.method;
    summary.final_case_min = std::numeric_limits<double>::infinity();
    summary.final_case_max = -std::numeric_limits<double>::infinity();
    for (std::uint64_t seed : seeds) {
      const PolicyTrace trace =
          run_two_timescale(scenario.base_context, scenario.mobility, upper, method, horizon,
                            scenario.tau, scenario.config.epochs, seed,
                            scenario.config.local_search_eps);
      for (int s = 0; s < report.slots; ++s) {
        series.reward[s] += trace.slots[s].reward * inv_seeds;
        series.case_se[s] += trace.slots[s].case_se * inv_seeds;
        series.case_gain[s] +=
            (trace.slots[s].case_se - trace.slots[s].reference_case) * inv_seeds;
        if (!have_reference) {
          reference_case_mean[s] += trace.slots[s].reference_case * inv_seeds;
          reference_reward_mean[s] += trace.slots[s].reference_reward * inv_seeds;
        }
      }
      const double final_case = trace.slots.back().case_se;
      summary.final_case_mean += final_case * inv_seeds;
      summary.final_case_min = std::min(summary.final_case_min, final_case);
      summary.final_case_max = std::max(summary.final_case_max, final_case);
      summary.final_gain_mean +=
          (final_case - trace.slots.back().reference_case) * inv_seeds;
    }
    have_reference = true;
    report.series.push_back(std::move(series));
    report.summary.push_back(summary);
  }

  if (std::find(methods.begin(), methods.end(), "reference") != methods.end()) {
    if (!have_reference) {
      // Reference requested alone: its series is method independent, so
      // any fast method's trace bookkeeping carries it.
      for (std::uint64_t seed : seeds) {
        const PolicyTrace t = run_two_timescale(
            scenario.base_context, scenario.mobility, upper, FastMethod::kPerSlotGreedy, horizon,
            scenario.tau, scenario.config.epochs, seed, scenario.config.local_search_eps);
        for (int s = 0; s < report.slots; ++s) {
          reference_case_mean[s] += t.slots[s].reference_case * inv_seeds;
          reference_reward_mean[s] += t.slots[s].reference_reward * inv_seeds;
        }
      }
    }
    MethodSeries series;
    series.method = "reference";
    series.reward = reference_reward_mean;
    series.case_se = reference_case_mean;
    series.case_gain.assign(report.slots, 0.0);
    MethodSummary summary;
    summary.method = "reference";
    summary.final_case_mean = reference_case_mean.back();
    summary.final_case_min = reference_case_mean.back();
    summary.final_case_max = reference_case_mean.back();
    report.series.push_back(std::move(series));
    report.summary.push_back(summary);
  }
  return report;
}

ExportFormat export_format_from_string(const std::string& name) {
  if (name == "csv") return ExportFormat::kCsv;
  if (name == "json") return ExportFormat::kJson;
  throw ConfigError("unknown export format: " + name);
}

std::string trace_to_csv(const PolicyTrace& trace) {
  std::ostringstream out;
  out << "slot,method,reward,case,case_gain\n";
  for (const SlotRecord& slot : trace.slots)
    out << slot.slot << ',' << trace.method << ',' << format_double(slot.reward) << ','
        << format_double(slot.case_se) << ','
        << format_double(slot.case_se - slot.reference_case) << '\n';
  return out.str();
}

std::string report_to_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "slot,method,reward,case,case_gain\n";
  for (const MethodSeries& series : report.series)
    for (int s = 0; s < report.slots; ++s)
      out << s << ',' << series.method << ',' << format_double(series.reward[s]) << ','
          << format_double(series.case_se[s]) << ',' << format_double(series.case_gain[s])
          << '\n';
  return out.str();
}

void export_results(const PolicyTrace& trace, const std::string& path, ExportFormat format) {
  if (format == ExportFormat::kCsv)
    write_file(path, trace_to_csv(trace));
  else
    write_file(path, nlohmann::json(trace).dump(2) + "\n");
}

void export_results(const ComparisonReport& report, const std::string& path,
                    ExportFormat format) {
  if (format == ExportFormat::kCsv)
    write_file(path, report_to_csv(report));
  else
    write_file(path, nlohmann::json(report).dump(2) + "\n");
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double rank = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(rank));
  const double frac = rank - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::vector<double> per_user_se(const RateContext& ctx, const std::vector<int>& delays,
                                int active_trainers) {
  if (static_cast<int>(delays.size()) != ctx.groups())
    throw std::invalid_argument("delay vector length mismatch");
  const double prefactor = 1.0 - static_cast<double>(active_trainers) /
                                     static_cast<double>(ctx.coherence_samples);
  std::vector<double> out;
  for (int g = 0; g < ctx.groups(); ++g)
    for (int l = 0; l < ctx.cells(); ++l) {
      if (!ctx.links.present_at(g, l)) continue;
      out.push_back(prefactor * std::log2(1.0 + sinr_mrc(ctx, g, l, delays[g]).sinr));
    }
  return out;
}

}  // namespace csiplan
