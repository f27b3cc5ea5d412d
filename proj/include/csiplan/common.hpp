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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace csiplan {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Raised for malformed configuration input (CLI maps this to exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an instance exceeds a solver's size guard (CLI exit code 3).
struct GuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Counter-based pseudo-random source (splitmix64). Every stochastic
/// operation in the library takes an explicit seed or an Rng derived from
/// one, so results are reproducible bit-for-bit across platforms; no
/// implementation-defined standard-library distributions are used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97f4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(n)) >>
                            64);
  }

  /// Standard normal via the polar Box-Muller transform.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, r;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      r = u * u + v * v;
    } while (r >= 1.0 || r == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r) / r);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Circularly symmetric complex normal with the given total variance
  /// (variance/2 per real component).
  cplx cnormal(double variance) {
    const double s = std::sqrt(variance * 0.5);
    return {s * normal(), s * normal()};
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Mixes a base seed with a stream tag so disjoint consumers get
/// independent, reproducible streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng mixer(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  return mixer.next_u64();
}

}  // namespace csiplan
