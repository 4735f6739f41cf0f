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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aic/rng.hpp"

namespace aic {

using TypeVector = std::vector<double>;
using Profile = std::vector<TypeVector>;

// A density on [0,1] with a finite supremum.
struct DensitySpec {
  enum class Kind { Uniform, TruncatedNormal, Beta };

  Kind kind = Kind::Uniform;
  double p1 = 0.0;  // lo | mean | alpha
  double p2 = 1.0;  // hi | sigma | beta

  static DensitySpec uniform(double lo, double hi) {
    return {Kind::Uniform, lo, hi};
  }
  static DensitySpec truncated_normal(double mean, double sigma) {
    return {Kind::TruncatedNormal, mean, sigma};
  }
  static DensitySpec beta(double a, double b) { return {Kind::Beta, a, b}; }

  void validate() const {
    switch (kind) {
      case Kind::Uniform:
        if (!(0.0 <= p1 && p1 < p2 && p2 <= 1.0)) {
          throw std::invalid_argument("uniform density needs 0 <= lo < hi <= 1");
        }
        return;
      case Kind::TruncatedNormal:
        if (!(0.0 <= p1 && p1 <= 1.0) || !(p2 > 0.0)) {
          throw std::invalid_argument(
              "truncated normal needs mean in [0,1] and sigma > 0");
        }
        return;
      case Kind::Beta:
        if (!(p1 >= 1.0 && p2 >= 1.0)) {
          throw std::invalid_argument(
              "beta density needs both shapes >= 1 (bounded density)");
        }
        return;
    }
    throw std::invalid_argument("unsupported density kind");
  }
};

namespace detail {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace detail

// Supremum of the density. Tight for the supported families.
inline double kappa_bound(const DensitySpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case DensitySpec::Kind::Uniform:
      return 1.0 / (spec.p2 - spec.p1);
    case DensitySpec::Kind::TruncatedNormal: {
      const double mean = spec.p1, sigma = spec.p2;
      const double mass = detail::normal_cdf((1.0 - mean) / sigma) -
                          detail::normal_cdf((0.0 - mean) / sigma);
      // Peak of the untruncated normal lies inside [0,1] since mean does.
      return detail::normal_pdf(0.0) / (sigma * mass);
    }
    case DensitySpec::Kind::Beta: {
      const double a = spec.p1, b = spec.p2;
      if (a == 1.0 && b == 1.0) return 1.0;
      const double mode = (a - 1.0) / (a + b - 2.0);
      const double lbeta =
          std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
      double lp = -lbeta;
      if (a != 1.0) lp += (a - 1.0) * std::log(mode);
      if (b != 1.0) lp += (b - 1.0) * std::log(1.0 - mode);
      return std::exp(lp);
    }
  }
  throw std::invalid_argument("unsupported density kind");
}

inline double sample_density(const DensitySpec& spec, std::mt19937_64& eng) {
  switch (spec.kind) {
    case DensitySpec::Kind::Uniform:
      return spec.p1 + (spec.p2 - spec.p1) * uniform01(eng);
    case DensitySpec::Kind::TruncatedNormal:
      for (;;) {
        const double x = spec.p1 + spec.p2 * standard_normal(eng);
        if (x >= 0.0 && x <= 1.0) return x;
      }
    case DensitySpec::Kind::Beta: {
      const double ga = gamma_sample(eng, spec.p1);
      const double gb = gamma_sample(eng, spec.p2);
      return ga / (ga + gb);
    }
  }
  throw std::invalid_argument("unsupported density kind");
}

// Independent product of per-agent, per-coordinate densities.
struct ProductDistribution {
  enum class CoordTransform {
    None,
    SortDescending,  // multi-unit types: theta[0] >= theta[1] >= ...
    ZeroFirstCoord,  // combinatorial types: empty-bundle value pinned to 0
  };

  std::vector<std::vector<DensitySpec>> per_agent;
  CoordTransform transform = CoordTransform::None;

  int agents() const { return static_cast<int>(per_agent.size()); }

  void validate() const {
    if (per_agent.empty()) {
      throw std::invalid_argument("distribution needs at least one agent");
    }
    for (const auto& coords : per_agent) {
      if (coords.empty()) {
        throw std::invalid_argument("agent needs at least one coordinate");
      }
      for (const auto& d : coords) d.validate();
    }
  }
};

// N profiles drawn from a product distribution, optionally with one agent
// left out. Present agents appear in ascending index order in each profile.
struct SampleSet {
  int n_agents = 0;
  int excluded_agent = -1;  // -1: full profiles
  std::uint64_t seed = 0;
  std::vector<Profile> profiles;

  std::size_t size() const { return profiles.size(); }

  std::vector<int> agents_present() const {
    std::vector<int> out;
    for (int a = 0; a < n_agents; ++a) {
      if (a != excluded_agent) out.push_back(a);
    }
    return out;
  }

  // Position of `agent` within each profile, or -1 if excluded.
  int slot_of(int agent) const {
    if (agent == excluded_agent) return -1;
    return agent - (excluded_agent >= 0 && agent > excluded_agent ? 1 : 0);
  }

  void to_csv(std::ostream& os) const {
    const auto present = agents_present();
    bool first = true;
    for (int a : present) {
      const std::size_t dim = profiles.empty() ? 0 : profiles[0][slot_of(a)].size();
      for (std::size_t c = 0; c < dim; ++c) {
        if (!first) os << ',';
        os << "agent" << a << ".c" << c;
        first = false;
      }
    }
    os << '\n';
    os.precision(17);
    for (const auto& profile : profiles) {
      first = true;
      for (const auto& type : profile) {
        for (double v : type) {
          if (!first) os << ',';
          os << v;
          first = false;
        }
      }
      os << '\n';
    }
  }

  // Content fingerprint used for stale-input checks.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto eat = [&h](std::uint64_t v) {
      for (int k = 0; k < 8; ++k) {
        h ^= (v >> (8 * k)) & 0xff;
        h *= 1099511628211ULL;
      }
    };
    eat(static_cast<std::uint64_t>(n_agents));
    eat(static_cast<std::uint64_t>(excluded_agent + 1));
    eat(seed);
    eat(profiles.size());
    for (const auto& profile : profiles) {
      for (const auto& type : profile) {
        for (double v : type) {
          std::uint64_t bits;
          static_assert(sizeof(bits) == sizeof(v));
          std::memcpy(&bits, &v, sizeof(bits));
          eat(bits);
        }
      }
    }
    return h;
  }
};

namespace detail {

inline TypeVector draw_type(const std::vector<DensitySpec>& coords,
                            ProductDistribution::CoordTransform transform,
                            std::mt19937_64& eng) {
  TypeVector type(coords.size());
  for (std::size_t c = 0; c < coords.size(); ++c) {
    type[c] = sample_density(coords[c], eng);
  }
  switch (transform) {
    case ProductDistribution::CoordTransform::None:
      break;
    case ProductDistribution::CoordTransform::SortDescending:
      std::sort(type.begin(), type.end(), std::greater<double>());
      break;
    case ProductDistribution::CoordTransform::ZeroFirstCoord:
      type[0] = 0.0;
      break;
  }
  return type;
}

inline SampleSet sample_impl(const ProductDistribution& dist, int excluded,
                             std::size_t n_profiles, std::uint64_t seed) {
  dist.validate();
  if (n_profiles == 0) {
    throw std::invalid_argument("sample count must be at least 1");
  }
  const int n = dist.agents();
  if (excluded >= n) {
    throw std::out_of_range("excluded agent index out of range");
  }

  SampleSet out;
  out.n_agents = n;
  out.excluded_agent = excluded;
  out.seed = seed;
  out.profiles.assign(n_profiles, Profile{});

  for (int a = 0; a < n; ++a) {
    if (a == excluded) continue;
    auto eng = agent_engine(seed, a);
    for (std::size_t j = 0; j < n_profiles; ++j) {
      out.profiles[j].push_back(
          draw_type(dist.per_agent[a], dist.transform, eng));
    }
  }
  return out;
}

}  // namespace detail

inline SampleSet sample_profiles(const ProductDistribution& dist,
                                 std::size_t n_profiles, std::uint64_t seed) {
  return detail::sample_impl(dist, -1, n_profiles, seed);
}

inline SampleSet sample_excluding(const ProductDistribution& dist, int agent,
                                  std::size_t n_profiles, std::uint64_t seed) {
  if (agent < 0) throw std::out_of_range("agent index out of range");
  return detail::sample_impl(dist, agent, n_profiles, seed);
}

}  // namespace aic
