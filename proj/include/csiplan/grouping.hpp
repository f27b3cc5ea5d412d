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

#include "csiplan/common.hpp"

namespace csiplan {

/// One autocorrelation cluster produced by 1-D k-means.
struct Cluster {
  std::vector<int> members;  // user indices
  double mean_rho = 0.0;
  double var_rho = 0.0;
};

/// A set of users (at most one per cell) sharing a pilot sequence and a
/// common CSI delay. member_user[c] is a global user index, or -1 when the
/// group has no member in cell c.
struct CopilotGroup {
  int id = 0;
  int pilot_index = 0;
  std::vector<int> member_user;
  double rho_min = 0.0;
  double rho_max = 0.0;

  int size() const {
    int n = 0;
    for (int u : member_user) n += (u >= 0);
    return n;
  }
};

/// Number of autocorrelation clusters: ceil(D_max / D_c).
int cluster_count(double max_coherence_s, double slot_s);

/// 1-D k-means over per-user serving-link autocorrelations with
/// k-means++ style seeding. Deterministic given the seed; if fewer
/// distinct values than clusters are present the count collapses.
std::vector<Cluster> kmeans_rho(const std::vector<double>& rhos, int clusters,
                                std::uint64_t seed);

/// Builds copilot groups from clusters by rank-matching: inside each
/// cluster the users of every cell are sorted by autocorrelation and
/// matched across cells by rank, which minimizes within-group variance in
/// the two-cell case. Groups may span fewer than `cells` cells. Every user
/// lands in exactly one group.
std::vector<CopilotGroup> form_copilot_groups(const std::vector<Cluster>& clusters,
                                              const std::vector<double>& rhos,
                                              const std::vector<int>& user_cell, int cells);

}  // namespace csiplan
