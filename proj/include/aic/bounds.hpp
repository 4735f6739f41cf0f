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
#include <stdexcept>
#include <variant>

#include "aic/mechanisms.hpp"

namespace aic {

// Leading constants the paper leaves inside O(.) / O~(.), exposed as
// configuration. Every report records which constants were assumed.
struct BoundConstants {
  double pdim_scale = 1.0;    // multiplies the pdim upper-bound formulas
  int spiteful_pdim = 3;      // pinned constant for the O(1) spiteful class
  double rate_scale = 1.0;    // multiplies the dispersion-rate table entries
  double interval_count = 8.0;  // constant of the interval-counting law
};

namespace detail {

inline void check_bound_domain(double n_samples, double d, double delta) {
  if (!(n_samples >= 1.0)) throw std::domain_error("N must be >= 1");
  if (!(d >= 1.0)) throw std::domain_error("pseudo-dimension must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::domain_error("delta must lie in (0,1]");
  }
}

}  // namespace detail

// Uniform deviation of empirical means over a class of pseudo-dimension d:
// sqrt(2d/N ln(eN/d)) + sqrt(1/(2N) ln(2/delta)).
inline double pollard_bound(double n_samples, double d, double delta) {
  detail::check_bound_domain(n_samples, d, delta);
  const double e = 2.718281828459045235360287;
  return std::sqrt(2.0 * d / n_samples * std::log(e * n_samples / d)) +
         std::sqrt(1.0 / (2.0 * n_samples) * std::log(2.0 / delta));
}

// Ex-interim statistical error, uniform over all n agents:
// 2 sqrt(2d/N ln(eN/d)) + 2 sqrt(1/(2N) ln(2n/delta)).
inline double interim_error(double n_samples, double d, double n_agents,
                            double delta) {
  detail::check_bound_domain(n_samples, d, delta);
  if (!(n_agents >= 1.0)) throw std::domain_error("n must be >= 1");
  const double e = 2.718281828459045235360287;
  return 2.0 * std::sqrt(2.0 * d / n_samples * std::log(e * n_samples / d)) +
         2.0 * std::sqrt(1.0 / (2.0 * n_samples) *
                         std::log(2.0 * n_agents / delta));
}

// Grid discretization error under (w,k)-dispersion: 4Lw + 8k/N.
inline double dispersion_error(double lipschitz, double w, double k,
                               double n_samples) {
  if (!(lipschitz >= 0.0 && w >= 0.0 && k >= 0.0)) {
    throw std::domain_error("dispersion parameters must be non-negative");
  }
  if (!(n_samples >= 1.0)) throw std::domain_error("N must be >= 1");
  return 4.0 * lipschitz * w + 8.0 * k / n_samples;
}

// Combined grid bound; holds with probability 1 - 2 delta.
inline double total_grid_error(double n_samples, double d, double n_agents,
                               double delta, double lipschitz, double w,
                               double k) {
  return dispersion_error(lipschitz, w, k, n_samples) +
         interim_error(n_samples, d, n_agents, delta);
}

// Combined greedy-cover bound: the cover radius plus the statistical term.
inline double total_greedy_error(double cover_epsilon, double n_samples,
                                 double d, double n_agents, double delta) {
  if (!(cover_epsilon >= 0.0)) throw std::domain_error("epsilon must be >= 0");
  return cover_epsilon + interim_error(n_samples, d, n_agents, delta);
}

// Greedy cover size bound (8eN/(eps d))^{2d}, with the log form for scales
// where the plain value overflows.
struct CoverSizeBound {
  double value = 0.0;      // may be +inf when not representable
  double log_value = 0.0;  // natural log, always finite
};

inline CoverSizeBound cover_size_bound(double n_samples, double epsilon,
                                       double d) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be > 0");
  if (!(d >= 1.0)) throw std::domain_error("pseudo-dimension must be >= 1");
  if (!(n_samples >= 1.0)) throw std::domain_error("N must be >= 1");
  const double e = 2.718281828459045235360287;
  const double base = 8.0 * e * n_samples / (epsilon * d);
  CoverSizeBound out;
  out.log_value = 2.0 * d * std::log(base);
  out.value = std::exp(out.log_value);
  return out;
}

// Ex-ante statistical error; same form as the ex-interim one with the
// pseudo-dimension of the single-report utility class.
inline double ante_error(double n_samples, double d, double n_agents,
                         double delta) {
  return interim_error(n_samples, d, n_agents, delta);
}

// Ex-ante grid discretization error: Lw + 2k/N.
inline double ante_dispersion_error(double lipschitz, double w, double k,
                                    double n_samples) {
  if (!(lipschitz >= 0.0 && w >= 0.0 && k >= 0.0)) {
    throw std::domain_error("dispersion parameters must be non-negative");
  }
  if (!(n_samples >= 1.0)) throw std::domain_error("N must be >= 1");
  return lipschitz * w + 2.0 * k / n_samples;
}

// Pseudo-dimension registry: exact values where proven exact, otherwise the
// ceiling of the upper-bound formula with base-2 logs and a leading constant.
inline int pdim(const MechanismSpec& mech,
                const BoundConstants& constants = {}) {
  mech.validate();
  const double c = constants.pdim_scale;
  const double n = static_cast<double>(mech.n);
  double raw = 1.0;
  if (std::holds_alternative<FirstPriceSingle>(mech.variant)) {
    return 2;  // exact
  } else if (const auto* fpc =
                 std::get_if<FirstPriceCombinatorial>(&mech.variant)) {
    const double l = fpc->items;
    raw = c * l * std::pow(2.0, l) * std::log2(std::max(2.0, n));
  } else if (std::holds_alternative<Gsp>(mech.variant)) {
    raw = c * n * std::log2(std::max(2.0, n));
  } else if (const auto* d = std::get_if<Discriminatory>(&mech.variant)) {
    raw = c * d->units * std::log2(std::max(2.0, n * d->units));
  } else if (const auto* u = std::get_if<UniformPrice>(&mech.variant)) {
    raw = c * u->units * std::log2(std::max(2.0, n * u->units));
  } else {
    return constants.spiteful_pdim;
  }
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

// Dispersion-based estimation error rates (log factors absorbed into c).
inline double table1_rate(const MechanismSpec& mech, double kappa,
                          double n_samples,
                          const BoundConstants& constants = {}) {
  mech.validate();
  if (!(kappa > 0.0)) throw std::domain_error("kappa must be > 0");
  if (!(n_samples >= 1.0)) throw std::domain_error("N must be >= 1");
  const double n = static_cast<double>(mech.n);
  double complexity = n;
  if (const auto* fpc = std::get_if<FirstPriceCombinatorial>(&mech.variant)) {
    const double l = fpc->items;
    complexity = std::pow(n + 1.0, 2.0 * l) * std::sqrt(l);
  } else if (std::holds_alternative<Gsp>(mech.variant)) {
    complexity = std::pow(n, 1.5);
  } else if (const auto* d = std::get_if<Discriminatory>(&mech.variant)) {
    complexity = n * d->units * d->units;
  } else if (const auto* u = std::get_if<UniformPrice>(&mech.variant)) {
    complexity = n * u->units * u->units;
  }
  return constants.rate_scale * (1.0 / kappa + complexity) /
         std::sqrt(n_samples);
}

// High-probability cap on how many of r kappa-bounded draws land in any
// width-w interval: c (r w kappa + sqrt(r ln(1/delta))).
inline double interval_count_bound(double r, double w, double kappa,
                                   double delta,
                                   const BoundConstants& constants = {}) {
  if (!(r >= 0.0 && w >= 0.0 && kappa >= 0.0)) {
    throw std::domain_error("interval-count parameters must be non-negative");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0,1)");
  }
  return constants.interval_count *
         (r * w * kappa + std::sqrt(r * std::log(1.0 / delta)));
}

}  // namespace aic
