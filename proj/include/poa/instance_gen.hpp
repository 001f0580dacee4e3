// Copyright 2026 The poa_forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POA_INSTANCE_GEN_HPP
#define POA_INSTANCE_GEN_HPP

// Seeded generators for the two application families: vehicle-target
// assignment (singleton action pairs, submodular basis) and content caching
// on a grid (capped item sets, covering basis). Instances are pure functions
// of (config, seed); the draw order is fixed and uses only uniform_below and
// uniform_unit, so a seed reproduces the same instance everywhere.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "poa/error.hpp"
#include "poa/game.hpp"
#include "poa/mechanisms.hpp"

namespace poa {

struct VehicleTargetConfig {
  int agents = 10;
  int resources = 11;
  double p = 0.8;
  int actions_per_agent = 2;  // distinct singletons per agent
  int n = 10;                 // bound on agents for (w, f)
  std::uint64_t seed = 0;
};

inline void validate(const VehicleTargetConfig& c) {
  if (c.agents < 1) throw InvalidParameter("vehicle config needs at least one agent");
  if (c.n < c.agents) throw InvalidParameter("vehicle config needs n >= agents");
  if (c.actions_per_agent < 1 || c.actions_per_agent > c.resources) {
    throw InvalidParameter("actions_per_agent must lie in [1, resources]");
  }
  if (!(c.p > 0.0 && c.p <= 1.0)) throw InvalidParameter("p must lie in (0, 1]");
}

// Draw order: resource values r = 0..m-1, redrawn as a block if all are zero;
// then per agent a partial Fisher-Yates shuffle picking the distinct targets.
inline GameInstance gen_vehicle_target(const VehicleTargetConfig& cfg, std::optional<Mechanism> mechanism = std::nullopt) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::vector<Resource> resources(static_cast<std::size_t>(cfg.resources));
  bool any_positive = false;
  while (!any_positive) {
    for (int r = 0; r < cfg.resources; ++r) {
      resources[r] = Resource{"r" + std::to_string(r + 1), uniform_unit(rng)};
      any_positive = any_positive || resources[r].value > 0.0;
    }
  }
  std::vector<ActionSet> actions;
  std::vector<int> pool(static_cast<std::size_t>(cfg.resources));
  for (int i = 0; i < cfg.agents; ++i) {
    for (int r = 0; r < cfg.resources; ++r) pool[r] = r;
    ExplicitActions set;
    for (int k = 0; k < cfg.actions_per_agent; ++k) {
      const auto pick = k + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(cfg.resources - k)));
      std::swap(pool[k], pool[pick]);
      set.actions.push_back(Action{pool[k]});
    }
    actions.emplace_back(std::move(set));
  }
  WelfareBasis w = vehicle_target_basis(cfg.p, cfg.n);
  Mechanism f = mechanism ? std::move(*mechanism) : shapley_value(w);
  return GameInstance(std::move(resources), std::move(actions), std::move(w), std::move(f));
}

struct ContentDistributionConfig {
  int nx = 100;
  int ny = 100;
  int nodes = 20;
  int items = 100;
  double alpha = 0.7;
  double radius = 25.0;
  std::vector<double> radii;  // per item; overrides radius when non-empty
  int cap = 3;
  std::vector<int> caps;  // per node; overrides cap when non-empty
  std::uint64_t seed = 0;
};

inline void validate(const ContentDistributionConfig& c) {
  if (c.nx < 1 || c.ny < 1) throw InvalidParameter("grid must have at least one bin per side");
  if (c.nodes < 1 || c.items < 1) throw InvalidParameter("need at least one node and one item");
  if (!(c.alpha >= 0.0)) throw InvalidParameter("alpha must be >= 0");
  if (!c.radii.empty() && static_cast<int>(c.radii.size()) != c.items) throw InvalidParameter("radii must list one radius per item");
  if (!c.caps.empty() && static_cast<int>(c.caps.size()) != c.nodes) throw InvalidParameter("caps must list one cap per node");
  if (c.cap < 1) throw InvalidParameter("cap must be >= 1");
  for (int k : c.caps) {
    if (k < 1) throw InvalidParameter("caps must be >= 1");
  }
}

// q_r = 1 / r^alpha for item rank r = 1..items.
inline std::vector<double> zipf_rates(int items, double alpha) {
  std::vector<double> q(static_cast<std::size_t>(items));
  for (int r = 1; r <= items; ++r) q[r - 1] = 1.0 / std::pow(static_cast<double>(r), alpha);
  return q;
}

struct GridPoint {
  int x = 0;
  int y = 0;
};

struct ContentLayout {
  std::vector<GridPoint> nodes;
  std::vector<GridPoint> items;
};

// Node positions first, then item positions, each as (x, y) integer bins.
inline ContentLayout content_layout(const ContentDistributionConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  ContentLayout layout;
  auto draw = [&] {
    GridPoint p;
    p.x = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(cfg.nx)));
    p.y = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(cfg.ny)));
    return p;
  };
  for (int i = 0; i < cfg.nodes; ++i) layout.nodes.push_back(draw());
  for (int r = 0; r < cfg.items; ++r) layout.items.push_back(draw());
  return layout;
}

// Closed ball: ||O_r - P_i||_2 <= rho_r.
inline bool within_radius(const GridPoint& node, const GridPoint& item, double rho) {
  const double dx = node.x - item.x;
  const double dy = node.y - item.y;
  return std::sqrt(dx * dx + dy * dy) <= rho;
}

inline GameInstance gen_content_distribution(const ContentDistributionConfig& cfg, std::optional<Mechanism> mechanism = std::nullopt) {
  const ContentLayout layout = content_layout(cfg);
  const auto q = zipf_rates(cfg.items, cfg.alpha);
  std::vector<Resource> resources;
  resources.reserve(q.size());
  for (int r = 0; r < cfg.items; ++r) resources.push_back({"q" + std::to_string(r + 1), q[r]});
  std::vector<ActionSet> actions;
  for (int i = 0; i < cfg.nodes; ++i) {
    CappedActions set;
    set.cap = cfg.caps.empty() ? cfg.cap : cfg.caps[i];
    for (int r = 0; r < cfg.items; ++r) {
      const double rho = cfg.radii.empty() ? cfg.radius : cfg.radii[r];
      if (within_radius(layout.nodes[i], layout.items[r], rho)) set.feasible.push_back(r);
    }
    actions.emplace_back(std::move(set));
  }
  WelfareBasis w = covering_basis(cfg.nodes);
  Mechanism f = mechanism ? std::move(*mechanism) : shapley_value(w);
  return GameInstance(std::move(resources), std::move(actions), std::move(w), std::move(f));
}

// W_tot = sum_r q_r; an upper bound on the optimal covering welfare.
inline double total_query_mass(const ContentDistributionConfig& cfg) {
  double s = 0.0;
  for (double v : zipf_rates(cfg.items, cfg.alpha)) s += v;
  return s;
}

inline double total_query_mass(const GameInstance& g) {
  double s = 0.0;
  for (const auto& r : g.resources()) s += r.value;
  return s;
}

}  // namespace poa

#endif  // POA_INSTANCE_GEN_HPP
