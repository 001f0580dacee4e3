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

#ifndef POA_GAME_HPP
#define POA_GAME_HPP

// Resource-allocation congestion games: each agent picks a subset of
// resources, welfare is sum_r v_r w(|a|_r) over covered resources and agent i
// earns sum_{r in a_i} v_r f(|a|_r). Every such game admits the potential
// Phi(a) = sum_r v_r sum_{k=1}^{|a|_r} f(k).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "poa/error.hpp"
#include "poa/matroid.hpp"
#include "poa/mechanisms.hpp"

namespace poa {

// Sorted, duplicate-free resource indices.
using Action = std::vector<int>;

struct Resource {
  std::string id;
  double value = 0.0;
};

struct ExplicitActions {
  std::vector<Action> actions;
};

// Every subset of `feasible` with exactly min(cap, |feasible|) elements: the
// bases of a uniform matroid restricted to `feasible`. An empty feasible set
// leaves only the empty action.
struct CappedActions {
  std::vector<int> feasible;
  int cap = 1;
};

using ActionSet = std::variant<ExplicitActions, CappedActions>;

namespace detail {

inline void normalize(Action& a) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
}

inline std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(r + 0.5L);
}

}  // namespace detail

class GameInstance {
 public:
  GameInstance(std::vector<Resource> resources, std::vector<ActionSet> actions, WelfareBasis w, Mechanism f)
      : resources_(std::move(resources)), actions_(std::move(actions)), w_(std::move(w)), f_(std::move(f)) {
    if (w_.n() != f_.n()) throw InvalidParameter("basis and mechanism must share n");
    if (actions_.empty()) throw InvalidParameter("game needs at least one agent");
    if (num_agents() > n()) {
      throw GameDefinitionError(std::to_string(num_agents()) + " agents exceed the bound n=" + std::to_string(n()));
    }
    for (const auto& r : resources_) {
      if (!(r.value >= 0.0) || !std::isfinite(r.value)) throw InvalidParameter("resource values must be finite and >= 0");
    }
    const int m = num_resources();
    auto check_index = [m](int r) {
      if (r < 0 || r >= m) throw InvalidParameter("action references unknown resource " + std::to_string(r));
    };
    for (auto& set : actions_) {
      if (auto* e = std::get_if<ExplicitActions>(&set)) {
        if (e->actions.empty()) throw InvalidParameter("every agent needs a non-empty action set");
        for (auto& a : e->actions) {
          detail::normalize(a);
          for (int r : a) check_index(r);
        }
      } else {
        auto& c = std::get<CappedActions>(set);
        if (c.cap < 0) throw InvalidParameter("cap must be >= 0");
        detail::normalize(c.feasible);
        for (int r : c.feasible) check_index(r);
      }
    }
  }

  int n() const { return w_.n(); }
  int num_agents() const { return static_cast<int>(actions_.size()); }
  int num_resources() const { return static_cast<int>(resources_.size()); }
  const std::vector<Resource>& resources() const { return resources_; }
  double value(int r) const { return resources_[r].value; }
  const ActionSet& action_set(int i) const { return actions_.at(i); }
  const WelfareBasis& basis() const { return w_; }
  const Mechanism& mechanism() const { return f_; }

  GameInstance with_mechanism(Mechanism f) const {
    return GameInstance(resources_, actions_, w_, std::move(f));
  }

  double max_value() const {
    double m = 0.0;
    for (const auto& r : resources_) m = std::max(m, r.value);
    return m;
  }

  bool contains(int i, const Action& a) const {
    if (!std::is_sorted(a.begin(), a.end()) || std::adjacent_find(a.begin(), a.end()) != a.end()) return false;
    if (const auto* e = std::get_if<ExplicitActions>(&actions_.at(i))) {
      return std::find(e->actions.begin(), e->actions.end(), a) != e->actions.end();
    }
    const auto& c = std::get<CappedActions>(actions_.at(i));
    return static_cast<int>(a.size()) == capped_size(c) && std::includes(c.feasible.begin(), c.feasible.end(), a.begin(), a.end());
  }

  // Lexicographically smallest action.
  Action first_action(int i) const {
    if (const auto* e = std::get_if<ExplicitActions>(&actions_.at(i))) {
      return *std::min_element(e->actions.begin(), e->actions.end());
    }
    const auto& c = std::get<CappedActions>(actions_.at(i));
    return Action(c.feasible.begin(), c.feasible.begin() + capped_size(c));
  }

  // Number of actions of agent i, saturating at cap + 1.
  std::uint64_t action_count(int i, std::uint64_t cap) const {
    if (const auto* e = std::get_if<ExplicitActions>(&actions_.at(i))) return e->actions.size();
    const auto& c = std::get<CappedActions>(actions_.at(i));
    return detail::binomial_capped(static_cast<int>(c.feasible.size()), capped_size(c), cap);
  }

  // All actions of agent i in lexicographic order.
  std::vector<Action> expand_actions(int i) const {
    if (const auto* e = std::get_if<ExplicitActions>(&actions_.at(i))) {
      auto out = e->actions;
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    const auto& c = std::get<CappedActions>(actions_.at(i));
    const int k = capped_size(c);
    const int size = static_cast<int>(c.feasible.size());
    std::vector<Action> out;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      Action a(k);
      for (int t = 0; t < k; ++t) a[t] = c.feasible[idx[t]];
      out.push_back(std::move(a));
      int t = k - 1;
      while (t >= 0 && idx[t] == size - k + t) --t;
      if (t < 0) break;
      ++idx[t];
      for (int u = t + 1; u < k; ++u) idx[u] = idx[u - 1] + 1;
    }
    return out;
  }

  // Rank of the matroid whose bases form A_i (largest action size).
  int action_rank(int i) const {
    if (const auto* c = std::get_if<CappedActions>(&actions_.at(i))) return capped_size(*c);
    int r = 0;
    for (const auto& a : std::get<ExplicitActions>(actions_.at(i)).actions) r = std::max(r, static_cast<int>(a.size()));
    return r;
  }

  // Whether A_i is the basis family of a matroid over the resources. Explicit
  // sets are checked by brute force on the resources they mention, and only
  // when there are at most kMaxMatroidGround of them.
  bool matroid_structured(int i) const {
    if (std::holds_alternative<CappedActions>(actions_.at(i))) return true;
    const auto& acts = std::get<ExplicitActions>(actions_.at(i)).actions;
    std::vector<int> local;
    for (const auto& a : acts) local.insert(local.end(), a.begin(), a.end());
    detail::normalize(local);
    if (static_cast<int>(local.size()) > kMaxMatroidGround) return false;
    std::vector<Subset> bases;
    for (const auto& a : acts) {
      Subset s = 0;
      for (int r : a) s |= Subset{1} << (std::lower_bound(local.begin(), local.end(), r) - local.begin());
      bases.push_back(s);
    }
    return basis_family_check(static_cast<int>(local.size()), bases).is_matroid;
  }

  bool matroid_structured() const {
    for (int i = 0; i < num_agents(); ++i) {
      if (!matroid_structured(i)) return false;
    }
    return true;
  }

 private:
  static int capped_size(const CappedActions& c) { return std::min(c.cap, static_cast<int>(c.feasible.size())); }

  std::vector<Resource> resources_;
  std::vector<ActionSet> actions_;
  WelfareBasis w_;
  Mechanism f_;
};

// One action per agent plus the congestion counts |a|_r.
class Allocation {
 public:
  Allocation() = default;
  Allocation(std::vector<Action> actions, int num_resources) : actions_(std::move(actions)), counts_(num_resources, 0) {
    for (auto& a : actions_) {
      detail::normalize(a);
      for (int r : a) {
        if (r < 0 || r >= num_resources) throw InvalidParameter("allocation references unknown resource");
        ++counts_[r];
      }
    }
  }

  int num_agents() const { return static_cast<int>(actions_.size()); }
  const Action& action(int i) const { return actions_.at(i); }
  const std::vector<Action>& actions() const { return actions_; }
  int count(int r) const { return counts_.at(r); }
  const std::vector<int>& counts() const { return counts_; }

  Allocation with_action(int i, Action a) const {
    auto acts = actions_;
    acts.at(i) = std::move(a);
    return Allocation(std::move(acts), static_cast<int>(counts_.size()));
  }

  bool operator==(const Allocation& o) const { return actions_ == o.actions_; }

 private:
  std::vector<Action> actions_;
  std::vector<int> counts_;
};

inline Allocation initial_allocation(const GameInstance& g) {
  std::vector<Action> acts;
  for (int i = 0; i < g.num_agents(); ++i) acts.push_back(g.first_action(i));
  return Allocation(std::move(acts), g.num_resources());
}

inline void require_feasible(const GameInstance& g, const Allocation& a) {
  if (a.num_agents() != g.num_agents()) throw InvalidParameter("allocation has the wrong number of agents");
  if (static_cast<int>(a.counts().size()) != g.num_resources()) throw InvalidParameter("allocation resource count mismatch");
  for (int i = 0; i < g.num_agents(); ++i) {
    if (!g.contains(i, a.action(i))) throw InfeasibleAllocation("agent " + std::to_string(i) + " plays an action outside its set", i);
  }
}

namespace detail {

inline double welfare_of_counts(const GameInstance& g, const std::vector<int>& counts) {
  double total = 0.0;
  for (int r = 0; r < g.num_resources(); ++r) {
    if (counts[r] > 0) total += g.value(r) * g.basis()(counts[r]);
  }
  return total;
}

inline double potential_of_counts(const GameInstance& g, const std::vector<int>& counts) {
  double total = 0.0;
  const Mechanism& f = g.mechanism();
  for (int r = 0; r < g.num_resources(); ++r) {
    double s = 0.0;
    for (int k = 1; k <= counts[r]; ++k) s += f(k);
    total += g.value(r) * s;
  }
  return total;
}

// Utility of playing `act` when the other agents produce `others` counts.
inline double utility_against(const GameInstance& g, const std::vector<int>& others, const Action& act) {
  double u = 0.0;
  for (int r : act) u += g.value(r) * g.mechanism()(others[r] + 1);
  return u;
}

inline std::vector<int> counts_without(const Allocation& a, int i) {
  auto c = a.counts();
  for (int r : a.action(i)) --c[r];
  return c;
}

}  // namespace detail

inline double evaluate_welfare(const GameInstance& g, const Allocation& a) {
  require_feasible(g, a);
  return detail::welfare_of_counts(g, a.counts());
}

inline double evaluate_utility(const GameInstance& g, const Allocation& a, int i) {
  require_feasible(g, a);
  double u = 0.0;
  for (int r : a.action(i)) u += g.value(r) * g.mechanism()(a.count(r));
  return u;
}

inline double potential(const GameInstance& g, const Allocation& a) {
  require_feasible(g, a);
  return detail::potential_of_counts(g, a.counts());
}

struct BestResponse {
  Action action;
  double utility = 0.0;          // of `action` against a_{-i}
  double current_utility = 0.0;  // of a_i against a_{-i}
  double gain() const { return utility - current_utility; }
};

namespace detail {

inline bool lex_less(const Action& p, const Action& q) { return p < q; }

// Ties within this slack of the best utility count as optimal.
inline double tie_slack(double best) { return 1e-12 * std::max(1.0, std::abs(best)); }

inline BestResponse best_response_against(const GameInstance& g, const std::vector<int>& others, int i, const Action& current) {
  BestResponse br;
  br.current_utility = utility_against(g, others, current);
  const ActionSet& set = g.action_set(i);
  if (const auto* e = std::get_if<ExplicitActions>(&set)) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> u(e->actions.size());
    for (std::size_t k = 0; k < e->actions.size(); ++k) {
      u[k] = utility_against(g, others, e->actions[k]);
      best = std::max(best, u[k]);
    }
    if (br.current_utility >= best - tie_slack(best)) {
      br.action = current;
      br.utility = br.current_utility;
      return br;
    }
    const Action* pick = nullptr;
    double pick_u = 0.0;
    for (std::size_t k = 0; k < e->actions.size(); ++k) {
      if (u[k] >= best - tie_slack(best) && (pick == nullptr || lex_less(e->actions[k], *pick))) {
        pick = &e->actions[k];
        pick_u = u[k];
      }
    }
    br.action = *pick;
    br.utility = pick_u;
    return br;
  }
  // Top-k by marginal score v_r f(|a_{-i}|_r + 1), ties to the smaller index.
  const auto& c = std::get<CappedActions>(set);
  const int k = std::min(c.cap, static_cast<int>(c.feasible.size()));
  std::vector<std::pair<double, int>> scored;
  scored.reserve(c.feasible.size());
  for (int r : c.feasible) scored.emplace_back(g.value(r) * g.mechanism()(others[r] + 1), r);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& p, const auto& q) {
    return p.first > q.first || (p.first == q.first && p.second < q.second);
  });
  double best = 0.0;
  Action top;
  for (int t = 0; t < k; ++t) {
    best += scored[t].first;
    top.push_back(scored[t].second);
  }
  std::sort(top.begin(), top.end());
  if (br.current_utility >= best - tie_slack(best)) {
    br.action = current;
    br.utility = br.current_utility;
  } else {
    br.action = std::move(top);
    br.utility = best;
  }
  return br;
}

}  // namespace detail

// Utility-maximizing action of agent i given a_{-i}. Ties prefer the current
// action, then the lexicographically smallest.
inline BestResponse best_response_detail(const GameInstance& g, const Allocation& a, int i) {
  require_feasible(g, a);
  return detail::best_response_against(g, detail::counts_without(a, i), i, a.action(i));
}

inline Action best_response(const GameInstance& g, const Allocation& a, int i) {
  return best_response_detail(g, a, i).action;
}

// 1e-9 times the largest resource value.
inline double default_epsilon(const GameInstance& g) {
  const double m = g.max_value();
  return 1e-9 * (m > 0.0 ? m : 1.0);
}

struct Deviation {
  int agent = -1;
  Action action;
  double gain = 0.0;
};

struct NashCheck {
  bool is_nash = true;
  std::optional<Deviation> best_deviation;  // largest gain above epsilon
};

inline NashCheck is_nash(const GameInstance& g, const Allocation& a, std::optional<double> epsilon = std::nullopt) {
  require_feasible(g, a);
  const double eps = epsilon.value_or(default_epsilon(g));
  NashCheck out;
  for (int i = 0; i < g.num_agents(); ++i) {
    const auto br = detail::best_response_against(g, detail::counts_without(a, i), i, a.action(i));
    if (br.gain() > eps && (!out.best_deviation || br.gain() > out.best_deviation->gain)) {
      out.is_nash = false;
      out.best_deviation = Deviation{i, br.action, br.gain()};
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Best-response dynamics

enum class Schedule { kRoundRobin, kRandom };

inline const char* to_string(Schedule s) { return s == Schedule::kRoundRobin ? "round_robin" : "random"; }

// Unbiased integer in [0, bound) by rejection on a 64-bit draw; unlike
// std::uniform_int_distribution this is identical across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct DynamicsOptions {
  Schedule schedule = Schedule::kRoundRobin;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;  // default_epsilon(g) when unset
  int max_rounds = 10000;
};

struct TraceStep {
  long step = 0;  // query index at which the move was accepted
  int agent = 0;
  Action old_action;
  Action new_action;
  double gain = 0.0;
  double potential = 0.0;  // after the move
};

struct DynamicsTrace {
  std::vector<TraceStep> steps;
  int rounds = 0;  // rounds with at least one accepted move
  int sweeps = 0;  // rounds executed, including the final quiet one
  bool converged = false;
  long queries = 0;  // best-response evaluations, accepted or not
  std::string schedule;
  std::string generator = "mt19937_64";
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  Allocation start;
  double initial_potential = 0.0;

  long accepted() const { return static_cast<long>(steps.size()); }
};

struct DynamicsResult {
  Allocation allocation;
  DynamicsTrace trace;
};

// Accepts a best response only if it raises the mover's utility by more than
// epsilon. Round robin visits agents 0..n'-1 each round; the random schedule
// draws n' agents uniformly per round and stops after a quiet round whose
// allocation passes is_nash.
inline DynamicsResult run_best_response_dynamics(const GameInstance& g, const Allocation& start, const DynamicsOptions& opts = {}) {
  require_feasible(g, start);
  const double eps = opts.epsilon.value_or(default_epsilon(g));
  if (!(eps > 0.0)) throw InvalidParameter("epsilon must be > 0");

  DynamicsResult res;
  auto& tr = res.trace;
  tr.schedule = to_string(opts.schedule);
  tr.seed = opts.seed;
  tr.epsilon = eps;
  tr.start = start;

  std::vector<Action> acts = start.actions();
  std::vector<int> counts = start.counts();
  double phi = detail::potential_of_counts(g, counts);
  tr.initial_potential = phi;
  std::mt19937_64 rng(opts.seed);
  const int agents = g.num_agents();

  auto query = [&](int i) {
    ++tr.queries;
    for (int r : acts[i]) --counts[r];
    const auto br = detail::best_response_against(g, counts, i, acts[i]);
    const bool accept = br.gain() > eps;
    if (accept) {
      TraceStep s;
      s.step = tr.queries;
      s.agent = i;
      s.old_action = acts[i];
      s.new_action = br.action;
      s.gain = br.gain();
      acts[i] = br.action;
      for (int r : acts[i]) ++counts[r];
      phi = detail::potential_of_counts(g, counts);
      s.potential = phi;
      tr.steps.push_back(std::move(s));
    } else {
      for (int r : acts[i]) ++counts[r];
    }
    return accept;
  };

  for (int round = 0; round < opts.max_rounds; ++round) {
    bool moved = false;
    for (int t = 0; t < agents; ++t) {
      const int i = opts.schedule == Schedule::kRoundRobin ? t : static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(agents)));
      moved = query(i) || moved;
    }
    ++tr.sweeps;
    if (moved) {
      ++tr.rounds;
      continue;
    }
    if (opts.schedule == Schedule::kRoundRobin || is_nash(g, Allocation(acts, g.num_resources()), eps).is_nash) {
      tr.converged = true;
      break;
    }
  }
  res.allocation = Allocation(std::move(acts), g.num_resources());
  return res;
}

// n'^2 m max_i rank(M_i): bound on accepted moves when every A_i is the basis
// family of a matroid.
inline long best_response_move_bound(const GameInstance& g) {
  int rank = 0;
  for (int i = 0; i < g.num_agents(); ++i) rank = std::max(rank, g.action_rank(i));
  const long na = g.num_agents();
  return na * na * g.num_resources() * rank;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

struct OracleOptions {
  std::uint64_t cap = std::uint64_t{1} << 20;  // max number of joint allocations
  std::optional<double> epsilon;               // Nash tolerance, default_epsilon(g) when unset
  bool keep_equilibria = true;
};

struct OracleResult {
  double optimum = 0.0;
  Allocation optimal_allocation;
  std::vector<Allocation> equilibria;
  std::uint64_t equilibrium_count = 0;
  double worst_equilibrium = 0.0;
  Allocation worst_allocation;
  double efficiency = 0.0;  // worst equilibrium welfare / optimum
  std::uint64_t allocations = 0;
};

inline OracleResult exhaustive_oracle(const GameInstance& g, const OracleOptions& opts = {}) {
  const int agents = g.num_agents();
  std::uint64_t total = 1;
  for (int i = 0; i < agents; ++i) {
    const std::uint64_t k = g.action_count(i, opts.cap);
    if (k == 0) throw InvalidParameter("agent " + std::to_string(i) + " has no action");
    if (k > opts.cap || total > opts.cap / k) {
      throw SizeError("joint action space exceeds the enumeration cap of " + std::to_string(opts.cap));
    }
    total *= k;
  }
  const double eps = opts.epsilon.value_or(default_epsilon(g));

  std::vector<std::vector<Action>> sets(agents);
  for (int i = 0; i < agents; ++i) sets[i] = g.expand_actions(i);

  OracleResult out;
  out.allocations = total;
  std::vector<std::size_t> digit(agents, 0);
  std::vector<int> counts(g.num_resources(), 0);
  for (int i = 0; i < agents; ++i) {
    for (int r : sets[i][0]) ++counts[r];
  }
  bool have_opt = false;
  bool have_ne = false;
  std::vector<std::size_t> opt_digits, worst_digits;

  auto materialize = [&](const std::vector<std::size_t>& d) {
    std::vector<Action> acts(agents);
    for (int i = 0; i < agents; ++i) acts[i] = sets[i][d[i]];
    return Allocation(std::move(acts), g.num_resources());
  };

  for (std::uint64_t idx = 0; idx < total; ++idx) {
    const double welfare = detail::welfare_of_counts(g, counts);
    if (!have_opt || welfare > out.optimum) {
      out.optimum = welfare;
      opt_digits = digit;
      have_opt = true;
    }
    bool nash = true;
    for (int i = 0; i < agents && nash; ++i) {
      const Action& cur = sets[i][digit[i]];
      for (int r : cur) --counts[r];
      const double u_cur = detail::utility_against(g, counts, cur);
      for (const auto& alt : sets[i]) {
        if (detail::utility_against(g, counts, alt) > u_cur + eps) {
          nash = false;
          break;
        }
      }
      for (int r : cur) ++counts[r];
    }
    if (nash) {
      ++out.equilibrium_count;
      if (opts.keep_equilibria) out.equilibria.push_back(materialize(digit));
      if (!have_ne || welfare < out.worst_equilibrium) {
        out.worst_equilibrium = welfare;
        worst_digits = digit;
        have_ne = true;
      }
    }
    // Mixed-radix increment, agent 0 fastest.
    for (int i = 0; i < agents; ++i) {
      for (int r : sets[i][digit[i]]) --counts[r];
      if (++digit[i] < sets[i].size()) {
        for (int r : sets[i][digit[i]]) ++counts[r];
        break;
      }
      digit[i] = 0;
      for (int r : sets[i][0]) ++counts[r];
    }
  }
  if (!(out.optimum > 0.0)) throw GameDefinitionError("optimal welfare is zero; the game class requires W(a_opt) > 0");
  if (!have_ne) throw SolverError("no pure Nash equilibrium found; the potential argument guarantees one");
  out.optimal_allocation = materialize(opt_digits);
  out.worst_allocation = materialize(worst_digits);
  out.efficiency = out.worst_equilibrium / out.optimum;
  return out;
}

}  // namespace poa

#endif  // POA_GAME_HPP
