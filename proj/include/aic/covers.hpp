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
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aic/distributions.hpp"
#include "aic/mechanisms.hpp"

namespace aic {

// ---------------------------------------------------------------------------
// Uniform grids
// ---------------------------------------------------------------------------

// Lattice over [0,1]^dim with the l1 covering property: every point of the
// cube lies within l1 distance `width` of some lattice point.
struct GridCover {
  int dim = 1;
  double width = 1.0;
  int per_axis = 1;                // subdivisions; lattice {0, 1/K, ..., 1}
  std::vector<TypeVector> points;  // row-major, lexicographically ascending
};

// Per-axis spacing 1/floor(1/s) with s = width for dim 1 (the one-dimensional
// grid {0, 1/floor(1/w), ..., 1}) and s = width/dim otherwise. Either choice
// snaps any cube point within l1 distance `width`.
inline GridCover build_grid(int dim, double width) {
  if (dim < 1) throw std::invalid_argument("grid dimension must be >= 1");
  if (!(width > 0.0 && width <= 1.0)) {
    throw std::invalid_argument("grid width must lie in (0,1]");
  }
  const double spacing = dim == 1 ? width : width / dim;
  const int k = std::max(1, static_cast<int>(std::floor(1.0 / spacing)));

  double total = 1.0;
  for (int d = 0; d < dim; ++d) total *= k + 1;
  if (total > 2e7) throw std::invalid_argument("grid too large");

  GridCover grid;
  grid.dim = dim;
  grid.width = width;
  grid.per_axis = k;
  grid.points.reserve(static_cast<std::size_t>(total));
  std::vector<int> idx(dim, 0);
  for (;;) {
    TypeVector p(dim);
    for (int d = 0; d < dim; ++d) p[d] = static_cast<double>(idx[d]) / k;
    grid.points.push_back(std::move(p));
    int d = dim - 1;
    while (d >= 0 && idx[d] == k) idx[d--] = 0;
    if (d < 0) break;
    ++idx[d];
  }
  return grid;
}

// Grid points restricted to the mechanism's type space: multi-unit types keep
// only non-increasing lattice points; combinatorial types are lattice points
// over the non-empty bundle coordinates with the empty bundle pinned at 0.
inline std::vector<TypeVector> type_pool(const MechanismSpec& mech,
                                         const GridCover& grid) {
  std::vector<TypeVector> pool;
  if (mech.combinatorial_types()) {
    if (grid.dim != mech.type_dim() - 1) {
      throw std::invalid_argument(
          "combinatorial pool grid must span the non-empty bundle coordinates");
    }
    pool.reserve(grid.points.size());
    for (const auto& p : grid.points) {
      TypeVector t(mech.type_dim(), 0.0);
      std::copy(p.begin(), p.end(), t.begin() + 1);
      pool.push_back(std::move(t));
    }
    return pool;
  }
  if (grid.dim != mech.type_dim()) {
    throw std::invalid_argument("pool grid dimension mismatch");
  }
  if (!mech.monotone_types()) return grid.points;
  for (const auto& p : grid.points) {
    bool monotone = true;
    for (std::size_t c = 0; c + 1 < p.size(); ++c) {
      if (p[c + 1] > p[c]) {
        monotone = false;
        break;
      }
    }
    if (monotone) pool.push_back(p);
  }
  return pool;
}

// ---------------------------------------------------------------------------
// Greedy covers
// ---------------------------------------------------------------------------

// Output of the greedy sweep: type pairs whose regret vectors form an
// epsilon-cover of the candidate pool and a pairwise epsilon-packing.
struct GreedyCover {
  bool ex_ante = false;
  std::vector<std::pair<TypeVector, TypeVector>> pairs;  // (theta, theta_hat)
  std::vector<std::vector<double>> vectors;  // selected regret vectors (1/N scaled)
  double epsilon = 0.0;
  double pool_width = 0.0;
  std::uint64_t source_tag = 0;

  std::size_t size() const { return pairs.size(); }

  void to_csv(std::ostream& os) const {
    os << "theta,theta_hat,mean_regret\n";
    os.precision(17);
    for (std::size_t t = 0; t < pairs.size(); ++t) {
      for (std::size_t c = 0; c < pairs[t].first.size(); ++c) {
        os << (c ? ";" : "") << pairs[t].first[c];
      }
      os << ',';
      for (std::size_t c = 0; c < pairs[t].second.size(); ++c) {
        os << (c ? ";" : "") << pairs[t].second[c];
      }
      double mean = 0.0;
      for (double v : vectors[t]) mean += v;
      os << ',' << mean << '\n';
    }
  }
};

namespace detail {

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) {
    h ^= (v >> (8 * k)) & 0xff;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t double_bits(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  return bits;
}

inline std::uint64_t cover_tag(const MechanismSpec& mech, int agent,
                               const SampleSet& samples, double epsilon,
                               double pool_width) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : mech.variant_name()) h = hash_mix(h, static_cast<std::uint64_t>(c));
  h = hash_mix(h, static_cast<std::uint64_t>(mech.n));
  h = hash_mix(h, static_cast<std::uint64_t>(mech.type_dim()));
  h = hash_mix(h, static_cast<std::uint64_t>(agent));
  h = hash_mix(h, samples.fingerprint());
  h = hash_mix(h, double_bits(epsilon));
  h = hash_mix(h, double_bits(pool_width));
  return h;
}

// l1 distance with early exit once `limit` is exceeded.
inline bool within_l1(const std::vector<double>& a, const std::vector<double>& b,
                      double limit) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    d += std::abs(a[j] - b[j]);
    if (d > limit) return false;
  }
  return true;
}

// Per-sample affine coefficients of one report column.
struct AffineColumn {
  std::vector<double> slope;      // N * dim, sample-major
  std::vector<double> intercept;  // N
};

inline std::vector<AffineColumn> affine_columns(
    const MechanismSpec& mech, int i, const std::vector<SampleContext>& ctxs,
    const std::vector<TypeVector>& reports) {
  const int dim = mech.type_dim();
  const std::size_t n_samples = ctxs.size();
  std::vector<AffineColumn> cols(reports.size());
  for (std::size_t r = 0; r < reports.size(); ++r) {
    cols[r].slope.resize(n_samples * dim);
    cols[r].intercept.resize(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) {
      affine_utility(mech, i, reports[r], ctxs[j], &cols[r].slope[j * dim],
                     cols[r].intercept[j]);
    }
  }
  return cols;
}

inline std::vector<SampleContext> make_contexts(const MechanismSpec& mech,
                                                int i,
                                                const SampleSet& samples) {
  std::vector<SampleContext> ctxs;
  ctxs.reserve(samples.size());
  if (samples.excluded_agent == i) {
    for (const auto& profile : samples.profiles) {
      ctxs.push_back(make_context(mech, i, profile));
    }
  } else if (samples.excluded_agent < 0) {
    for (const auto& profile : samples.profiles) {
      Profile others;
      others.reserve(profile.size() - 1);
      for (std::size_t a = 0; a < profile.size(); ++a) {
        if (static_cast<int>(a) != i) others.push_back(profile[a]);
      }
      ctxs.push_back(make_context(mech, i, others));
    }
  } else {
    throw std::invalid_argument("sample set excludes a different agent");
  }
  return ctxs;
}

}  // namespace detail

// Candidate regret vectors over pool pairs in row-major (theta, theta_hat)
// order; entry j is (1/N) (u(theta, theta_hat, sample_j) - u(theta, theta,
// sample_j)). Exposed for cover verification.
inline std::vector<std::vector<double>> pool_regret_vectors(
    const MechanismSpec& mech, int i, const SampleSet& samples,
    const std::vector<TypeVector>& pool) {
  const auto ctxs = detail::make_contexts(mech, i, samples);
  const auto cols = detail::affine_columns(mech, i, ctxs, pool);
  const int dim = mech.type_dim();
  const std::size_t n_samples = ctxs.size();
  const double inv_n = 1.0 / static_cast<double>(n_samples);

  std::vector<std::vector<double>> out;
  out.reserve(pool.size() * pool.size());
  for (std::size_t t = 0; t < pool.size(); ++t) {
    for (std::size_t r = 0; r < pool.size(); ++r) {
      std::vector<double> vec(n_samples);
      for (std::size_t j = 0; j < n_samples; ++j) {
        double dev = cols[r].intercept[j];
        double truthful = cols[t].intercept[j];
        for (int c = 0; c < dim; ++c) {
          dev += cols[r].slope[j * dim + c] * pool[t][c];
          truthful += cols[t].slope[j * dim + c] * pool[t][c];
        }
        vec[j] = inv_n * (dev - truthful);
      }
      out.push_back(std::move(vec));
    }
  }
  return out;
}

// Ex-ante candidate vectors, one per pool report, in pool order.
inline std::vector<std::vector<double>> pool_regret_vectors_ex_ante(
    const MechanismSpec& mech, int i, const SampleSet& samples,
    const std::vector<TypeVector>& pool) {
  if (samples.excluded_agent >= 0) {
    throw std::invalid_argument("ex-ante vectors need full profiles");
  }
  const auto ctxs = detail::make_contexts(mech, i, samples);
  const auto cols = detail::affine_columns(mech, i, ctxs, pool);
  const int dim = mech.type_dim();
  const std::size_t n_samples = ctxs.size();
  const double inv_n = 1.0 / static_cast<double>(n_samples);

  std::vector<double> truthful(n_samples);
  std::vector<double> slope(dim);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const auto& own = samples.profiles[j][samples.slot_of(i)];
    double b = 0.0;
    affine_utility(mech, i, own, ctxs[j], slope.data(), b);
    double u = b;
    for (int c = 0; c < dim; ++c) u += slope[c] * own[c];
    truthful[j] = u;
  }

  std::vector<std::vector<double>> out;
  out.reserve(pool.size());
  for (std::size_t r = 0; r < pool.size(); ++r) {
    std::vector<double> vec(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) {
      const auto& own = samples.profiles[j][samples.slot_of(i)];
      double dev = cols[r].intercept[j];
      for (int c = 0; c < dim; ++c) dev += cols[r].slope[j * dim + c] * own[c];
      vec[j] = inv_n * (dev - truthful[j]);
    }
    out.push_back(std::move(vec));
  }
  return out;
}

// Greedy ex-interim cover: sweeps the finite candidate pool in row-major
// (theta, theta_hat) order, selecting every vector not already within l1
// epsilon of a selected one.
inline GreedyCover greedy_cover(const MechanismSpec& mech, int i,
                                const SampleSet& samples, double epsilon,
                                const GridCover& theta_grid,
                                const GridCover& theta_hat_grid) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const auto theta_pool = type_pool(mech, theta_grid);
  const auto report_pool = type_pool(mech, theta_hat_grid);
  if (theta_pool.empty() || report_pool.empty()) {
    throw std::invalid_argument("candidate pool must be non-empty");
  }

  const auto ctxs = detail::make_contexts(mech, i, samples);
  const auto report_cols = detail::affine_columns(mech, i, ctxs, report_pool);
  std::vector<detail::AffineColumn> own_truth_cols;
  const std::vector<detail::AffineColumn>* truth_cols = &report_cols;
  if (&theta_grid != &theta_hat_grid) {
    own_truth_cols = detail::affine_columns(mech, i, ctxs, theta_pool);
    truth_cols = &own_truth_cols;
  }
  const int dim = mech.type_dim();
  const std::size_t n_samples = ctxs.size();
  const double inv_n = 1.0 / static_cast<double>(n_samples);

  GreedyCover cover;
  cover.ex_ante = false;
  cover.epsilon = epsilon;
  cover.pool_width = theta_hat_grid.width;
  cover.source_tag =
      detail::cover_tag(mech, i, samples, epsilon, theta_hat_grid.width);

  std::vector<double> vec(n_samples);
  for (std::size_t t = 0; t < theta_pool.size(); ++t) {
    for (std::size_t r = 0; r < report_pool.size(); ++r) {
      for (std::size_t j = 0; j < n_samples; ++j) {
        double dev = report_cols[r].intercept[j];
        double truthful = (*truth_cols)[t].intercept[j];
        for (int c = 0; c < dim; ++c) {
          dev += report_cols[r].slope[j * dim + c] * theta_pool[t][c];
          truthful += (*truth_cols)[t].slope[j * dim + c] * theta_pool[t][c];
        }
        vec[j] = inv_n * (dev - truthful);
      }
      bool covered = false;
      for (const auto& sel : cover.vectors) {
        if (detail::within_l1(vec, sel, epsilon)) {
          covered = true;
          break;
        }
      }
      if (!covered) {
        cover.vectors.push_back(vec);
        cover.pairs.emplace_back(theta_pool[t], report_pool[r]);
      }
    }
  }
  return cover;
}

inline GreedyCover greedy_cover(const MechanismSpec& mech, int i,
                                const SampleSet& samples, double epsilon,
                                const GridCover& pool) {
  return greedy_cover(mech, i, samples, epsilon, pool, pool);
}

// Greedy ex-ante cover over reported types only: vector entry j uses the
// sampled true type theta^(j).
inline GreedyCover greedy_cover_ex_ante(const MechanismSpec& mech, int i,
                                        const SampleSet& samples,
                                        double epsilon, const GridCover& pool) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (samples.excluded_agent >= 0) {
    throw std::invalid_argument("ex-ante cover needs full profiles");
  }
  const auto report_pool = type_pool(mech, pool);
  if (report_pool.empty()) {
    throw std::invalid_argument("candidate pool must be non-empty");
  }

  const auto ctxs = detail::make_contexts(mech, i, samples);
  const auto report_cols = detail::affine_columns(mech, i, ctxs, report_pool);
  const int dim = mech.type_dim();
  const std::size_t n_samples = ctxs.size();
  const double inv_n = 1.0 / static_cast<double>(n_samples);

  // Truthful per-sample utilities u(theta^(j), theta^(j), .).
  std::vector<double> truthful(n_samples);
  std::vector<double> slope(dim);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const auto& own = samples.profiles[j][samples.slot_of(i)];
    double b = 0.0;
    affine_utility(mech, i, own, ctxs[j], slope.data(), b);
    double u = b;
    for (int c = 0; c < dim; ++c) u += slope[c] * own[c];
    truthful[j] = u;
  }

  GreedyCover cover;
  cover.ex_ante = true;
  cover.epsilon = epsilon;
  cover.pool_width = pool.width;
  cover.source_tag = detail::cover_tag(mech, i, samples, epsilon, pool.width);

  std::vector<double> vec(n_samples);
  for (std::size_t r = 0; r < report_pool.size(); ++r) {
    for (std::size_t j = 0; j < n_samples; ++j) {
      const auto& own = samples.profiles[j][samples.slot_of(i)];
      double dev = report_cols[r].intercept[j];
      for (int c = 0; c < dim; ++c) {
        dev += report_cols[r].slope[j * dim + c] * own[c];
      }
      vec[j] = inv_n * (dev - truthful[j]);
    }
    bool covered = false;
    for (const auto& sel : cover.vectors) {
      if (detail::within_l1(vec, sel, epsilon)) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      cover.vectors.push_back(vec);
      cover.pairs.emplace_back(TypeVector{}, report_pool[r]);
    }
  }
  return cover;
}

// True iff the selected vectors epsilon-cover the pool vectors and are
// pairwise at least epsilon apart.
inline bool verify_cover(const GreedyCover& cover,
                         const std::vector<std::vector<double>>& pool_vectors) {
  for (const auto& vec : pool_vectors) {
    bool covered = false;
    for (const auto& sel : cover.vectors) {
      if (detail::within_l1(vec, sel, cover.epsilon)) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  for (std::size_t a = 0; a < cover.vectors.size(); ++a) {
    for (std::size_t b = a + 1; b < cover.vectors.size(); ++b) {
      double d = 0.0;
      for (std::size_t j = 0; j < cover.vectors[a].size(); ++j) {
        d += std::abs(cover.vectors[a][j] - cover.vectors[b][j]);
      }
      if (d < cover.epsilon) return false;
    }
  }
  return true;
}

}  // namespace aic
