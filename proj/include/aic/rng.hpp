// Copyright 2026 the aic-estimate authors
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

#include <cmath>
#include <cstdint>
#include <random>

namespace aic {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

// One stream per (seed, agent). Streams for a fixed agent are identical no
// matter which other agents are sampled alongside it.
inline std::mt19937_64 agent_engine(std::uint64_t seed, int agent) {
  std::uint64_t s =
      seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(agent + 1));
  s = detail::mix64(s + 0x9e3779b97f4a7c15ULL);
  return std::mt19937_64(detail::mix64(s));
}

// Uniform draw in [0,1). Fixed 53-bit conversion, not the
// implementation-defined std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Box-Muller without caching: two uniforms per variate, so the stream
// position is a fixed function of the draw count.
inline double standard_normal(std::mt19937_64& eng) {
  const double u1 = 1.0 - uniform01(eng);  // (0,1]
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Marsaglia-Tsang. Requires shape >= 1.
inline double gamma_sample(std::mt19937_64& eng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double z, v;
    do {
      z = standard_normal(eng);
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform01(eng);  // (0,1]
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

}  // namespace aic
