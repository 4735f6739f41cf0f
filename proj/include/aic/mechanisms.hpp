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
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "aic/distributions.hpp"

namespace aic {

// ---------------------------------------------------------------------------
// Mechanism specifications
// ---------------------------------------------------------------------------

struct FirstPriceSingle {};

struct FirstPriceCombinatorial {
  int items = 1;  // type dimension is 2^items, empty bundle pinned to value 0
};

struct Gsp {
  int slots = 1;
  // click_rates[s][i]: probability of a click when agent i sits in slot s.
  std::vector<std::vector<double>> click_rates;
  std::vector<double> weights;  // omega_i in (0,1], omega_i * granularity integral
  int weight_granularity = 1;
};

struct Discriminatory {
  int units = 1;
};

struct UniformPrice {
  int units = 1;
};

struct SpitefulSecondPrice {
  std::vector<double> spite;  // alpha_i in [0,1]; closer to 0 = more spiteful
};

struct MechanismSpec {
  using Variant = std::variant<FirstPriceSingle, FirstPriceCombinatorial, Gsp,
                               Discriminatory, UniformPrice,
                               SpitefulSecondPrice>;

  Variant variant;
  int n = 2;

  int type_dim() const {
    return std::visit(
        [](const auto& v) -> int {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, FirstPriceSingle>) return 1;
          if constexpr (std::is_same_v<T, FirstPriceCombinatorial>)
            return 1 << v.items;
          if constexpr (std::is_same_v<T, Gsp>) return 1;
          if constexpr (std::is_same_v<T, Discriminatory>) return v.units;
          if constexpr (std::is_same_v<T, UniformPrice>) return v.units;
          if constexpr (std::is_same_v<T, SpitefulSecondPrice>) return 1;
        },
        variant);
  }

  bool monotone_types() const {
    return std::holds_alternative<Discriminatory>(variant) ||
           std::holds_alternative<UniformPrice>(variant);
  }

  bool combinatorial_types() const {
    return std::holds_alternative<FirstPriceCombinatorial>(variant);
  }

  std::string variant_name() const {
    if (std::holds_alternative<FirstPriceSingle>(variant))
      return "first_price_single";
    if (std::holds_alternative<FirstPriceCombinatorial>(variant))
      return "first_price_combinatorial";
    if (std::holds_alternative<Gsp>(variant)) return "gsp";
    if (std::holds_alternative<Discriminatory>(variant))
      return "discriminatory";
    if (std::holds_alternative<UniformPrice>(variant)) return "uniform_price";
    return "spiteful_second_price";
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("mechanism needs n >= 1 agents");
    if (const auto* fpc = std::get_if<FirstPriceCombinatorial>(&variant)) {
      if (fpc->items < 1 || fpc->items > 4) {
        throw std::invalid_argument(
            "combinatorial auction supports 1 <= items <= 4");
      }
    } else if (const auto* gsp = std::get_if<Gsp>(&variant)) {
      if (gsp->slots < 1 || n <= gsp->slots) {
        throw std::invalid_argument("gsp needs n > slots >= 1");
      }
      if (static_cast<int>(gsp->click_rates.size()) != gsp->slots) {
        throw std::invalid_argument("gsp click-rate matrix needs one row per slot");
      }
      for (const auto& row : gsp->click_rates) {
        if (static_cast<int>(row.size()) != n) {
          throw std::invalid_argument("gsp click-rate row needs one entry per agent");
        }
        for (double a : row) {
          if (!(a >= 0.0 && a <= 1.0)) {
            throw std::invalid_argument("gsp click rates must lie in [0,1]");
          }
        }
      }
      for (int i = 0; i < n; ++i) {
        for (int s = 0; s + 1 < gsp->slots; ++s) {
          if (gsp->click_rates[s][i] < gsp->click_rates[s + 1][i]) {
            throw std::invalid_argument(
                "gsp click rates must be non-increasing in slot index");
          }
        }
      }
      if (static_cast<int>(gsp->weights.size()) != n) {
        throw std::invalid_argument("gsp needs one weight per agent");
      }
      if (gsp->weight_granularity < 1) {
        throw std::invalid_argument("gsp weight granularity must be >= 1");
      }
      for (double w : gsp->weights) {
        if (!(w > 0.0 && w <= 1.0)) {
          throw std::invalid_argument("gsp weights must lie in (0,1]");
        }
        const double scaled = w * gsp->weight_granularity;
        if (std::abs(scaled - std::round(scaled)) > 1e-9) {
          throw std::invalid_argument(
              "gsp weights must be multiples of 1/granularity");
        }
      }
    } else if (const auto* d = std::get_if<Discriminatory>(&variant)) {
      if (d->units < 1) throw std::invalid_argument("units must be >= 1");
    } else if (const auto* u = std::get_if<UniformPrice>(&variant)) {
      if (u->units < 1) throw std::invalid_argument("units must be >= 1");
    } else if (const auto* sp = std::get_if<SpitefulSecondPrice>(&variant)) {
      if (static_cast<int>(sp->spite.size()) != n) {
        throw std::invalid_argument("spiteful auction needs one alpha per agent");
      }
      for (double a : sp->spite) {
        if (!(a >= 0.0 && a <= 1.0)) {
          throw std::invalid_argument("spite parameters must lie in [0,1]");
        }
      }
    }
  }
};

namespace detail {

inline void check_type(const MechanismSpec& mech, const TypeVector& type,
                       const char* what) {
  if (static_cast<int>(type.size()) != mech.type_dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
  for (double v : type) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string(what) +
                                  ": coordinates must lie in [0,1]");
    }
  }
  if (mech.monotone_types()) {
    for (std::size_t c = 0; c + 1 < type.size(); ++c) {
      if (type[c + 1] > type[c]) {
        throw std::invalid_argument(std::string(what) +
                                    ": multi-unit type must be non-increasing");
      }
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Winner determination (combinatorial first price)
// ---------------------------------------------------------------------------

struct Allocation {
  std::vector<int> item_to_agent;  // -1 = unallocated
  std::vector<int> bundle_of;      // bitmask per agent
  double welfare = 0.0;
};

// Exhaustive search over all (n+1)^items item assignments. Deterministic
// tie-break: the first welfare maximizer in lexicographic assignment order,
// where per item the candidates are ordered unallocated, agent 0, agent 1, ...
// so all-zero bids resolve to the empty allocation.
inline Allocation winner_determination(
    const FirstPriceCombinatorial& spec,
    const std::vector<TypeVector>& bids) {
  const int items = spec.items;
  if (items < 1 || items > 4) {
    throw std::invalid_argument("combinatorial auction supports 1 <= items <= 4");
  }
  const int n = static_cast<int>(bids.size());
  if (n < 1) throw std::invalid_argument("winner determination needs bids");
  const int bundles = 1 << items;
  for (const auto& table : bids) {
    if (static_cast<int>(table.size()) != bundles) {
      throw std::invalid_argument("malformed bid table: wrong length");
    }
    for (double v : table) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("malformed bid table: value outside [0,1]");
      }
    }
  }

  std::uint64_t total = 1;
  for (int t = 0; t < items; ++t) total *= static_cast<std::uint64_t>(n + 1);

  Allocation best;
  best.welfare = -1.0;
  std::vector<int> assignment(items);
  std::vector<int> bundle(n);
  for (std::uint64_t code = 0; code < total; ++code) {
    // Item 0 is the most significant digit so ascending codes enumerate
    // assignment vectors in lexicographic order.
    std::uint64_t rest = code;
    for (int t = items - 1; t >= 0; --t) {
      assignment[t] = static_cast<int>(rest % (n + 1)) - 1;
      rest /= (n + 1);
    }
    std::fill(bundle.begin(), bundle.end(), 0);
    for (int t = 0; t < items; ++t) {
      if (assignment[t] >= 0) bundle[assignment[t]] |= 1 << t;
    }
    double welfare = 0.0;
    for (int a = 0; a < n; ++a) {
      if (bundle[a] != 0) welfare += bids[a][bundle[a]];
    }
    if (welfare > best.welfare) {
      best.welfare = welfare;
      best.item_to_agent = assignment;
      best.bundle_of = bundle;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Per-sample evaluation contexts
// ---------------------------------------------------------------------------

// Everything about one opponent profile that utility evaluation needs,
// precomputed once so report columns can be swept cheaply.
namespace detail {

struct FpContext {
  double best = 0.0;  // max competing report
};

struct SpiteContext {
  double best = 0.0;
  double second = 0.0;  // 0 when only one competitor
};

struct GspContext {
  // Competing weighted reports, descending; ties by agent index ascending.
  std::vector<std::pair<double, int>> weighted;
};

struct MultiUnitContext {
  // Top `units` competing bids, descending under (value desc, agent asc,
  // unit asc); shorter when fewer competitors exist.
  std::vector<double> value;
  std::vector<int> agent;
};

struct CombContext {
  std::vector<TypeVector> competitor_bids;  // ascending competitor agent order
  std::vector<int> competitor_agents;
};

using SampleContext =
    std::variant<FpContext, SpiteContext, GspContext, MultiUnitContext,
                 CombContext>;

inline double max_coord(const Profile& others) {
  double best = -1.0;
  for (const auto& t : others) {
    for (double v : t) best = std::max(best, v);
  }
  return best;
}

}  // namespace detail

// Builds the evaluation context of agent `i` against one opponent profile
// (the other agents' types in ascending agent order).
inline detail::SampleContext make_context(const MechanismSpec& mech, int i,
                                          const Profile& others) {
  mech.validate();
  if (i < 0 || i >= mech.n) throw std::out_of_range("agent index out of range");
  if (static_cast<int>(others.size()) != mech.n - 1) {
    throw std::invalid_argument("opponent profile: wrong number of agents");
  }
  for (const auto& t : others) detail::check_type(mech, t, "opponent type");

  if (std::holds_alternative<FirstPriceSingle>(mech.variant)) {
    return detail::FpContext{detail::max_coord(others)};
  }
  if (std::holds_alternative<SpitefulSecondPrice>(mech.variant)) {
    double best = -1.0, second = -1.0;
    for (const auto& t : others) {
      const double v = t[0];
      if (v > best) {
        second = best;
        best = v;
      } else if (v > second) {
        second = v;
      }
    }
    return detail::SpiteContext{best, std::max(second, 0.0)};
  }
  if (const auto* gsp = std::get_if<Gsp>(&mech.variant)) {
    detail::GspContext ctx;
    int a = 0;
    for (int j = 0; j < mech.n; ++j) {
      if (j == i) continue;
      ctx.weighted.emplace_back(gsp->weights[j] * others[a][0], j);
      ++a;
    }
    std::sort(ctx.weighted.begin(), ctx.weighted.end(),
              [](const auto& x, const auto& y) {
                if (x.first != y.first) return x.first > y.first;
                return x.second < y.second;
              });
    return ctx;
  }
  if (mech.monotone_types()) {
    const int m = mech.type_dim();
    struct Entry {
      double v;
      int agent;
      int unit;
    };
    std::vector<Entry> entries;
    int a = 0;
    for (int j = 0; j < mech.n; ++j) {
      if (j == i) continue;
      for (int u = 0; u < m; ++u) entries.push_back({others[a][u], j, u});
      ++a;
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      if (x.v != y.v) return x.v > y.v;
      if (x.agent != y.agent) return x.agent < y.agent;
      return x.unit < y.unit;
    });
    detail::MultiUnitContext ctx;
    const int keep = std::min<std::size_t>(m, entries.size());
    for (int t = 0; t < keep; ++t) {
      ctx.value.push_back(entries[t].v);
      ctx.agent.push_back(entries[t].agent);
    }
    return ctx;
  }
  // Combinatorial.
  detail::CombContext ctx;
  int a = 0;
  for (int j = 0; j < mech.n; ++j) {
    if (j == i) continue;
    ctx.competitor_bids.push_back(others[a]);
    ctx.competitor_agents.push_back(j);
    ++a;
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// Affine utility: u(theta, report, others) = slope . theta + intercept
// ---------------------------------------------------------------------------

// Holding the reports fixed, utility is affine in the agent's true type: the
// allocation cannot depend on it. `slope` must point at type_dim() doubles.
inline void affine_utility(const MechanismSpec& mech, int i,
                           const TypeVector& report,
                           const detail::SampleContext& ctx, double* slope,
                           double& intercept) {
  const int dim = mech.type_dim();
  std::fill(slope, slope + dim, 0.0);
  intercept = 0.0;

  if (const auto* fp = std::get_if<detail::FpContext>(&ctx)) {
    const double r = report[0];
    if (r > fp->best) {
      slope[0] = 1.0;
      intercept = -r;
    }
    return;
  }
  if (const auto* sp = std::get_if<detail::SpiteContext>(&ctx)) {
    const double alpha = std::get<SpitefulSecondPrice>(mech.variant).spite[i];
    const double r = report[0];
    if (r > sp->best) {
      slope[0] = alpha;
      intercept = -alpha * sp->best;
    } else {
      // Surplus of the winning competitor, if any: it pays the best of the
      // remaining reports, max(r, second). Zero when the top two tie.
      const double surplus = sp->best - std::max(r, sp->second);
      if (surplus > 0.0) intercept = -(1.0 - alpha) * surplus;
    }
    return;
  }
  if (const auto* gsp_ctx = std::get_if<detail::GspContext>(&ctx)) {
    const auto& gsp = std::get<Gsp>(mech.variant);
    const double b = gsp.weights[i] * report[0];
    int rank = 0;
    for (const auto& [w, j] : gsp_ctx->weighted) {
      if (w > b || (w == b && j < i)) {
        ++rank;
      } else {
        break;
      }
    }
    const int slot = rank;  // 0-based
    if (slot < gsp.slots) {
      const double alpha = gsp.click_rates[slot][i];
      // Next-ranked weighted report; exists because n > slots.
      const double pay = gsp_ctx->weighted[rank].first / gsp.weights[i];
      slope[0] = alpha;
      intercept = -alpha * pay;
    }
    return;
  }
  if (const auto* mu = std::get_if<detail::MultiUnitContext>(&ctx)) {
    const int m = dim;
    // report[u] takes a unit iff it beats the (m-u)-th largest competing bid
    // under (value desc, agent asc); missing competing bids never win.
    int won = 0;
    for (int u = 0; u < m; ++u) {
      const int rival = m - u - 1;  // 0-based index of the (m-u)-th largest
      bool beats = true;
      if (rival < static_cast<int>(mu->value.size())) {
        const double rv = mu->value[rival];
        beats = report[u] > rv || (report[u] == rv && i < mu->agent[rival]);
      }
      if (!beats) break;  // report sorted: later units cannot win either
      ++won;
    }
    if (won == 0) return;
    const double inv_m = 1.0 / static_cast<double>(m);
    for (int u = 0; u < won; ++u) slope[u] = inv_m;
    if (std::holds_alternative<Discriminatory>(mech.variant)) {
      double pay = 0.0;
      for (int u = 0; u < won; ++u) pay += report[u];
      intercept = -pay * inv_m;
    } else {
      // Market-clearing price: the highest losing bid.
      const double own_next = won < m ? report[won] : 0.0;
      const int rival = m - won;  // 0-based index of c[m - won + 1]
      const double comp_next =
          rival < static_cast<int>(mu->value.size()) ? mu->value[rival] : 0.0;
      const double price = std::max(own_next, comp_next);
      intercept = -static_cast<double>(won) * price * inv_m;
    }
    return;
  }
  const auto& comb_ctx = std::get<detail::CombContext>(ctx);
  const auto& spec = std::get<FirstPriceCombinatorial>(mech.variant);
  std::vector<TypeVector> bids;
  bids.reserve(mech.n);
  TypeVector own = report;
  own[0] = 0.0;  // empty bundle bids nothing
  int a = 0;
  for (int j = 0; j < mech.n; ++j) {
    if (j == i) {
      bids.push_back(own);
    } else {
      bids.push_back(comb_ctx.competitor_bids[a]);
      ++a;
    }
  }
  const Allocation alloc = winner_determination(spec, bids);
  const int bundle = alloc.bundle_of[i];
  if (bundle != 0) {
    slope[bundle] = 1.0;
    intercept = -report[bundle];
  }
}

// u_{i,M}(theta_i, report_i, theta_{-i}) with the other agents truthful.
// Multi-unit utilities are scaled by 1/units so the range stays in [-1,1].
inline double utility(const MechanismSpec& mech, int i, const TypeVector& type,
                      const TypeVector& report, const Profile& others) {
  detail::check_type(mech, type, "true type");
  detail::check_type(mech, report, "reported type");
  const auto ctx = make_context(mech, i, others);
  std::vector<double> slope(mech.type_dim());
  double intercept = 0.0;
  affine_utility(mech, i, report, ctx, slope.data(), intercept);
  double u = intercept;
  for (std::size_t c = 0; c < slope.size(); ++c) u += slope[c] * type[c];
  return u;
}

// ---------------------------------------------------------------------------
// Discontinuity structure
// ---------------------------------------------------------------------------

// Reported-type discontinuity (or kink) locations of u_{i,M}(theta, ., others)
// for one opponent profile, sorted ascending.
inline std::vector<double> discontinuities(const MechanismSpec& mech, int i,
                                           const Profile& others) {
  mech.validate();
  if (i < 0 || i >= mech.n) throw std::out_of_range("agent index out of range");
  if (static_cast<int>(others.size()) != mech.n - 1) {
    throw std::invalid_argument("opponent profile: wrong number of agents");
  }
  std::vector<double> points;
  if (std::holds_alternative<FirstPriceSingle>(mech.variant)) {
    points.push_back(detail::max_coord(others));
  } else if (std::holds_alternative<SpitefulSecondPrice>(mech.variant)) {
    const auto ctx =
        std::get<detail::SpiteContext>(make_context(mech, i, others));
    points.push_back(ctx.best);
    points.push_back(ctx.second);  // kink, kept for conservative dispersion
  } else if (const auto* gsp = std::get_if<Gsp>(&mech.variant)) {
    int a = 0;
    for (int j = 0; j < mech.n; ++j) {
      if (j == i) continue;
      points.push_back(gsp->weights[j] * others[a][0] / gsp->weights[i]);
      ++a;
    }
  } else if (mech.monotone_types()) {
    for (const auto& t : others) {
      for (double v : t) points.push_back(v);
    }
  } else {
    throw std::invalid_argument(
        "discontinuities: unsupported variant (combinatorial)");
  }
  std::sort(points.begin(), points.end());
  return points;
}

// Piecewise Lipschitz constant of u in the reported type.
inline double lipschitz_constant(const MechanismSpec& mech) {
  return std::holds_alternative<Gsp>(mech.variant) ? 0.0 : 1.0;
}

}  // namespace aic
