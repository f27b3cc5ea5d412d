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

#include "csiplan/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace csiplan {

int cluster_count(double max_coherence_s, double slot_s) {
  if (slot_s <= 0) throw std::invalid_argument("slot duration must be positive");
  if (max_coherence_s < slot_s)
    throw std::invalid_argument("maximum coherence time must be >= slot duration");
  // Small backoff keeps exact integer ratios (e.g. 5ms / 1ms) from landing
  // one above the intended ceiling.
  const double ratio = max_coherence_s / slot_s;
  return static_cast<int>(std::ceil(ratio - 1e-9));
}

namespace {

void refresh_stats(Cluster& cluster, const std::vector<double>& rhos) {
  double sum = 0.0;
  for (int u : cluster.members) sum += rhos[u];
  cluster.mean_rho = sum / static_cast<double>(cluster.members.size());
  double ss = 0.0;
  for (int u : cluster.members) {
    const double d = rhos[u] - cluster.mean_rho;
    ss += d * d;
  }
  cluster.var_rho = ss / static_cast<double>(cluster.members.size());
}

}  // namespace

std::vector<Cluster> kmeans_rho(const std::vector<double>& rhos, int clusters,
                                std::uint64_t seed) {
  if (rhos.empty()) throw std::invalid_argument("cannot cluster an empty set of users");
  if (clusters < 1) throw std::invalid_argument("cluster count must be >= 1");

  const int n = static_cast<int>(rhos.size());
  const std::set<double> distinct(rhos.begin(), rhos.end());
  const int k = std::min<int>(clusters, static_cast<int>(distinct.size()));

  // k-means++ seeding.
  Rng rng(derive_seed(seed, 0x6B6D6561));
  std::vector<double> centroids;
  centroids.reserve(k);
  centroids.push_back(rhos[rng.uniform_int(n)]);
  std::vector<double> dist2(n);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centroids) best = std::min(best, (rhos[i] - c) * (rhos[i] - c));
      dist2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      // All remaining mass sits on existing centroids; pick any unseen value.
      for (double v : distinct)
        if (std::find(centroids.begin(), centroids.end(), v) == centroids.end()) {
          centroids.push_back(v);
          break;
        }
      continue;
    }
    double target = rng.uniform() * total;
    int chosen = n - 1;
    for (int i = 0; i < n; ++i) {
      target -= dist2[i];
      if (target <= 0.0) {
        chosen = i;
        break;
      }
    }
    centroids.push_back(rhos[chosen]);
  }

  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < 200; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (rhos[i] - centroids[c]) * (rhos[i] - centroids[c]);
        if (d < best_d) {  // ties go to the lower-index centroid
          best_d = d;
          best = c;
        }
      }
      if (best != assign[i]) {
        assign[i] = best;
        changed = true;
      }
    }
    std::vector<double> sum(k, 0.0);
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      sum[assign[i]] += rhos[i];
      ++count[assign[i]];
    }
    for (int c = 0; c < k; ++c)
      if (count[c] > 0) centroids[c] = sum[c] / count[c];
    if (!changed && iter > 0) break;
  }

  std::vector<Cluster> result;
  for (int c = 0; c < k; ++c) {
    Cluster cluster;
    for (int i = 0; i < n; ++i)
      if (assign[i] == c) cluster.members.push_back(i);
    if (cluster.members.empty()) continue;
    refresh_stats(cluster, rhos);
    result.push_back(std::move(cluster));
  }
  std::sort(result.begin(), result.end(),
            [](const Cluster& a, const Cluster& b) { return a.mean_rho > b.mean_rho; });
  return result;
}

std::vector<CopilotGroup> form_copilot_groups(const std::vector<Cluster>& clusters,
                                              const std::vector<double>& rhos,
                                              const std::vector<int>& user_cell, int cells) {
  if (cells < 1) throw std::invalid_argument("cell count must be >= 1");
  std::vector<CopilotGroup> groups;
  for (const Cluster& cluster : clusters) {
    std::vector<std::vector<int>> by_cell(cells);
    for (int u : cluster.members) by_cell[user_cell[u]].push_back(u);
    std::size_t ranks = 0;
    for (auto& bucket : by_cell) {
      std::sort(bucket.begin(), bucket.end(),
                [&](int a, int b) { return rhos[a] > rhos[b] || (rhos[a] == rhos[b] && a < b); });
      ranks = std::max(ranks, bucket.size());
    }
    for (std::size_t r = 0; r < ranks; ++r) {
      CopilotGroup group;
      group.member_user.assign(cells, -1);
      group.rho_min = std::numeric_limits<double>::infinity();
      group.rho_max = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < cells; ++c) {
        if (r >= by_cell[c].size()) continue;
        const int u = by_cell[c][r];
        group.member_user[c] = u;
        group.rho_min = std::min(group.rho_min, rhos[u]);
        group.rho_max = std::max(group.rho_max, rhos[u]);
      }
      group.id = static_cast<int>(groups.size());
      group.pilot_index = group.id;
      groups.push_back(std::move(group));
    }
  }
  return groups;
}

}  // namespace csiplan
