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

#include <cmath>
#include <future>
#include <thread>

#include "csiplan/rate.hpp"

namespace csiplan {

namespace {

constexpr int kChunks = 64;  // fixed trial chunking keeps results thread-count independent

struct ChunkSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// One independent realization of the uplink: pilot phase, MMSE estimation,
// per-group aging to the detection slot, MRC detection against every other
// user's aged channel, then log2(1 + instantaneous SINR) summed over users.
class TrialWorld {
 public:
  TrialWorld(const RateContext& ctx, const std::vector<int>& delays, double prefactor)
      : ctx_(ctx), delays_(delays), prefactor_(prefactor) {
    const std::size_t links = static_cast<std::size_t>(ctx.groups()) * ctx.cells();
    const std::size_t m = static_cast<std::size_t>(ctx.antennas);
    train_.resize(links * m);
    aged_.resize(links * m);
    pilot_.resize(static_cast<std::size_t>(ctx.groups()) * m);
    noise_.resize(m);
    received_.resize(m);
    symbols_.resize(links);
    mmse_coef_.assign(links, 0.0);
    q_sum_.assign(static_cast<std::size_t>(ctx.cells()) * ctx.groups(), 0.0);
    for (int l = 0; l < ctx.cells(); ++l)
      for (int g = 0; g < ctx.groups(); ++g) {
        std::vector<double> betas;
        for (int c = 0; c < ctx.cells(); ++c)
          if (ctx.links.present_at(g, c)) betas.push_back(ctx.links.beta_at(l, g, c));
        double q = 1.0 / ctx.pilot_power;
        for (double b : betas) q += b;
        q_sum_[static_cast<std::size_t>(l) * ctx.groups() + g] = q;
      }
  }

  double run(Rng& rng) {
    const int m = ctx_.antennas;
    const int groups = ctx_.groups();
    const int cells = ctx_.cells();
    const LinkStatistics& links = ctx_.links;

    for (int k = 0; k < groups; ++k)
      for (int c = 0; c < cells; ++c)
        symbols_[idx(k, c)] = links.present_at(k, c) ? rng.cnormal(1.0) : cplx{0.0, 0.0};

    double se_sum = 0.0;
    for (int l = 0; l < cells; ++l) {
      // Channels toward station l at each group's training slot, then aged
      // forward delay slots via the order-1 fading recursion.
      for (int k = 0; k < groups; ++k) {
        auto z = span_of(pilot_, k, m);
        const double pilot_noise_var = 1.0 / ctx_.pilot_power;
        for (int i = 0; i < m; ++i) z[i] = rng.cnormal(pilot_noise_var);
        for (int c = 0; c < cells; ++c) {
          if (!links.present_at(k, c)) continue;
          const double beta = links.beta_at(l, k, c);
          const double rho = links.rho_at(l, k, c);
          auto g0 = span_of(train_, idx(k, c), m);
          for (int i = 0; i < m; ++i) {
            g0[i] = rng.cnormal(beta);
            z[i] += g0[i];
          }
          auto gt = span_of(aged_, idx(k, c), m);
          std::copy(g0.begin(), g0.end(), gt.begin());
          for (int step = 0; step < delays_[k]; ++step) evolve_channel_in(gt, rho, beta, rng);
          mmse_coef_[idx(k, c)] = beta / q_sum_[static_cast<std::size_t>(l) * groups + k];
        }
      }

      for (int i = 0; i < m; ++i) noise_[i] = rng.cnormal(1.0);
      std::fill(received_.begin(), received_.end(), cplx{0.0, 0.0});
      for (int k = 0; k < groups; ++k)
        for (int c = 0; c < cells; ++c) {
          if (!links.present_at(k, c)) continue;
          const cplx s = symbols_[idx(k, c)];
          auto gt = span_of(aged_, idx(k, c), m);
          for (int i = 0; i < m; ++i) received_[i] += gt[i] * s;
        }

      const double inv_sqrt_pu = 1.0 / std::sqrt(ctx_.uplink_power);
      for (int g = 0; g < groups; ++g) {
        if (!links.present_at(g, l)) continue;
        const int d = delays_[g];
        auto z = span_of(pilot_, g, m);

        // The MRC filter is the normalized own-cell estimate, which is a
        // positive multiple of the pilot projection; all inner products
        // reduce to projections onto z.
        double z_norm_sq = 0.0;
        for (int i = 0; i < m; ++i) z_norm_sq += std::norm(z[i]);
        const double z_norm = std::sqrt(z_norm_sq);

        cplx useful{0.0, 0.0};
        cplx contamination{0.0, 0.0};
        cplx residual = project(z, received_) / z_norm;
        for (int c = 0; c < cells; ++c) {
          if (!links.present_at(g, c)) continue;
          const double rho_d = std::pow(links.rho_at(l, g, c), d);
          const cplx s = symbols_[idx(g, c)];
          auto g0 = span_of(train_, idx(g, c), m);
          auto gt = span_of(aged_, idx(g, c), m);
          const cplx p_train = project(z, g0) / z_norm;
          const cplx p_aged = project(z, gt) / z_norm;
          const double p_est = mmse_coef_[idx(g, c)] * z_norm;
          const cplx p_error = p_train - p_est;
          const cplx p_innovation = p_aged - rho_d * p_train;
          if (c == l)
            useful = rho_d * p_est * s;
          else
            contamination += rho_d * p_est * s;
          // Remove the own-group aged channels from the total reception,
          // then add back estimation error and aging innovation.
          residual += (rho_d * p_error + p_innovation - p_aged) * s;
        }
        residual += project(z, noise_) / z_norm * inv_sqrt_pu;

        const double sig = std::norm(useful);
        const double interference = std::norm(contamination) + std::norm(residual);
        se_sum += std::log2(1.0 + sig / interference);
      }
    }
    return prefactor_ * se_sum;
  }

 private:
  std::size_t idx(int k, int c) const { return static_cast<std::size_t>(k) * ctx_.cells() + c; }

  static std::span<cplx> span_of(cvec& buf, std::size_t slot, int m) {
    return {buf.data() + slot * m, static_cast<std::size_t>(m)};
  }

  static cplx project(std::span<const cplx> u, std::span<const cplx> v) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
    return acc;
  }

  const RateContext& ctx_;
  const std::vector<int>& delays_;
  double prefactor_;
  cvec train_, aged_, pilot_, noise_, received_;
  cvec symbols_;
  std::vector<double> mmse_coef_;
  std::vector<double> q_sum_;
};

ChunkSums run_chunk(const RateContext& ctx, const std::vector<int>& delays, double prefactor,
                    int trials, std::uint64_t seed) {
  TrialWorld world(ctx, delays, prefactor);
  Rng rng(seed);
  ChunkSums sums;
  for (int t = 0; t < trials; ++t) {
    const double se = world.run(rng);
    sums.sum += se;
    sums.sum_sq += se * se;
  }
  return sums;
}

}  // namespace

MonteCarloSe monte_carlo_se(const RateContext& ctx, const std::vector<int>& delays,
                            int active_trainers, int trials, std::uint64_t seed) {
  ctx.validate();
  if (trials < 1) throw std::invalid_argument("trial count must be >= 1");
  if (static_cast<int>(delays.size()) != ctx.groups())
    throw std::invalid_argument("delay vector length mismatch");
  for (int d : delays)
    if (d < 0) throw std::invalid_argument("delay must be non-negative");
  if (active_trainers < 0 || active_trainers > ctx.groups())
    throw std::invalid_argument("active trainer count out of range");

  const double prefactor =
      1.0 - static_cast<double>(active_trainers) / static_cast<double>(ctx.coherence_samples);

  std::vector<int> chunk_trials(kChunks, trials / kChunks);
  for (int i = 0; i < trials % kChunks; ++i) ++chunk_trials[i];

  std::vector<ChunkSums> sums(kChunks);
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers > 1) {
    std::vector<std::future<ChunkSums>> futures(kChunks);
    for (int i = 0; i < kChunks; ++i) {
      if (chunk_trials[i] == 0) continue;
      futures[i] = std::async(std::launch::async, run_chunk, std::cref(ctx), std::cref(delays),
                              prefactor, chunk_trials[i], derive_seed(seed, 0x4D430000ULL + i));
    }
    for (int i = 0; i < kChunks; ++i)
      if (futures[i].valid()) sums[i] = futures[i].get();
  } else {
    for (int i = 0; i < kChunks; ++i)
      if (chunk_trials[i] > 0)
        sums[i] = run_chunk(ctx, delays, prefactor, chunk_trials[i],
                            derive_seed(seed, 0x4D430000ULL + i));
  }

  double total = 0.0, total_sq = 0.0;
  for (const ChunkSums& s : sums) {
    total += s.sum;
    total_sq += s.sum_sq;
  }
  const double n = static_cast<double>(trials);
  MonteCarloSe out;
  out.mean = total / n;
  if (trials > 1) {
    const double var = std::max(0.0, (total_sq - n * out.mean * out.mean) / (n - 1.0));
    out.half_width = 1.959963984540054 * std::sqrt(var / n);
  }
  return out;
}

}  // namespace csiplan
