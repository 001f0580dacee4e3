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

#ifndef POA_IO_HPP
#define POA_IO_HPP

// JSON and CSV encodings. Non-finite reals are written as null.
//
// Basis / mechanism:  {"n": int, "values": [real...], "label": str}
// Game instance:      {"n": int,
//                      "resources": [{"id": str, "value": real}],
//                      "actions": [[[id...]...] | {"feasible": [id...], "cap": int}],
//                      "basis": label | [real...],
//                      "mechanism": label | [real...]}

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "poa/catalog.hpp"
#include "poa/error.hpp"
#include "poa/game.hpp"
#include "poa/instance_gen.hpp"
#include "poa/mechanisms.hpp"
#include "poa/report.hpp"

namespace poa::io {

using nlohmann::json;

inline json real_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// 12 significant digits.
inline std::string csv_real(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Sequences

template <class Seq>
json sequence_to_json(const Seq& s) {
  return json{{"n", s.n()}, {"values", std::vector<double>(s.values().begin(), s.values().end())}, {"label", s.label()}};
}

inline json to_json(const WelfareBasis& w) { return sequence_to_json(w); }
inline json to_json(const Mechanism& f) { return sequence_to_json(f); }

namespace detail {

inline std::vector<double> values_from(const json& j, const char* what) {
  const json& v = j.is_object() ? j.at("values") : j;
  if (!v.is_array()) throw InvalidParameter(std::string(what) + " values must be an array");
  auto out = v.get<std::vector<double>>();
  if (j.is_object() && j.contains("n") && j.at("n").get<int>() != static_cast<int>(out.size())) {
    throw InvalidParameter(std::string(what) + " n does not match the number of values");
  }
  return out;
}

inline std::string label_from(const json& j) {
  return j.is_object() && j.contains("label") ? j.at("label").get<std::string>() : std::string("custom");
}

}  // namespace detail

inline WelfareBasis basis_from_json(const json& j) {
  return WelfareBasis(detail::values_from(j, "basis"), detail::label_from(j));
}

inline Mechanism mechanism_from_json(const json& j) {
  return Mechanism(detail::values_from(j, "mechanism"), detail::label_from(j));
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const PoaReport& r) {
  json binding = json::array();
  for (const auto& t : r.binding) binding.push_back({t.a, t.x, t.b});
  json argmax = json::array();
  for (const auto& t : r.argmax) {
    json e{{"j", t.j}, {"term", t.term}};
    if (t.l >= 0) e["l"] = t.l;
    argmax.push_back(std::move(e));
  }
  json out{{"poa", r.poa},
           {"w_star", real_or_null(r.w_star)},
           {"lambda_star", r.lambda_star ? real_or_null(*r.lambda_star) : json(nullptr)},
           {"mu_star", real_or_null(r.mu_star)},
           {"binding", std::move(binding)},
           {"argmax", std::move(argmax)},
           {"method", to_string(r.method)}};
  if (r.lambda_range) out["lambda_range"] = {real_or_null(r.lambda_range->first), real_or_null(r.lambda_range->second)};
  return out;
}

// ---------------------------------------------------------------------------
// Game instances

namespace detail {

inline json action_ids(const GameInstance& g, const Action& a) {
  json ids = json::array();
  for (int r : a) ids.push_back(g.resources()[r].id);
  return ids;
}

inline bool same_values(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

inline json basis_field(const WelfareBasis& w) {
  try {
    if (same_values(make_basis(w.label(), w.n()).values(), w.values())) return w.label();
  } catch (const std::exception&) {
  }
  return std::vector<double>(w.values().begin(), w.values().end());
}

inline json mechanism_field(const Mechanism& f, const WelfareBasis& w) {
  if (is_closed_mechanism_label(f.label())) {
    try {
      if (same_values(make_mechanism(f.label(), w).values(), f.values())) return f.label();
    } catch (const std::exception&) {
    }
  }
  return std::vector<double>(f.values().begin(), f.values().end());
}

}  // namespace detail

inline json to_json(const GameInstance& g) {
  json resources = json::array();
  for (const auto& r : g.resources()) resources.push_back({{"id", r.id}, {"value", r.value}});
  json actions = json::array();
  for (int i = 0; i < g.num_agents(); ++i) {
    const auto& set = g.action_set(i);
    if (const auto* e = std::get_if<ExplicitActions>(&set)) {
      json list = json::array();
      for (const auto& a : e->actions) list.push_back(detail::action_ids(g, a));
      actions.push_back(std::move(list));
    } else {
      const auto& c = std::get<CappedActions>(set);
      actions.push_back({{"feasible", detail::action_ids(g, c.feasible)}, {"cap", c.cap}});
    }
  }
  return json{{"n", g.n()},
              {"resources", std::move(resources)},
              {"actions", std::move(actions)},
              {"basis", detail::basis_field(g.basis())},
              {"mechanism", detail::mechanism_field(g.mechanism(), g.basis())}};
}

inline GameInstance game_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<Resource> resources;
  std::map<std::string, int> index;
  for (const auto& r : j.at("resources")) {
    Resource res{r.at("id").get<std::string>(), r.at("value").get<double>()};
    if (!index.emplace(res.id, static_cast<int>(resources.size())).second) {
      throw InvalidParameter("duplicate resource id '" + res.id + "'");
    }
    resources.push_back(std::move(res));
  }
  auto lookup = [&](const json& ids) {
    Action a;
    for (const auto& id : ids) {
      const auto it = index.find(id.get<std::string>());
      if (it == index.end()) throw InvalidParameter("unknown resource id '" + id.get<std::string>() + "'");
      a.push_back(it->second);
    }
    return a;
  };
  std::vector<ActionSet> actions;
  for (const auto& set : j.at("actions")) {
    if (set.is_object()) {
      actions.emplace_back(CappedActions{lookup(set.at("feasible")), set.at("cap").get<int>()});
    } else {
      ExplicitActions e;
      for (const auto& a : set) e.actions.push_back(lookup(a));
      actions.emplace_back(std::move(e));
    }
  }
  const json& jb = j.at("basis");
  WelfareBasis w = jb.is_string() ? make_basis(jb.get<std::string>(), n) : basis_from_json(jb);
  if (w.n() != n) throw InvalidParameter("basis length does not match n");
  const json& jf = j.at("mechanism");
  Mechanism f = jf.is_string() ? make_mechanism(jf.get<std::string>(), w) : mechanism_from_json(jf);
  return GameInstance(std::move(resources), std::move(actions), std::move(w), std::move(f));
}

inline json to_json(const GameInstance& g, const Allocation& a) {
  json out = json::array();
  for (const auto& act : a.actions()) out.push_back(detail::action_ids(g, act));
  return out;
}

// ---------------------------------------------------------------------------
// Generator configs

inline json to_json(const VehicleTargetConfig& c) {
  return json{{"family", "vehicle"},        {"agents", c.agents}, {"resources", c.resources},
              {"p", c.p},                   {"actions_per_agent", c.actions_per_agent},
              {"n", c.n},                   {"seed", c.seed}};
}

inline json to_json(const ContentDistributionConfig& c) {
  json out{{"family", "content"}, {"nx", c.nx},       {"ny", c.ny},     {"nodes", c.nodes}, {"items", c.items},
           {"alpha", c.alpha},    {"radius", c.radius}, {"cap", c.cap}, {"seed", c.seed}};
  if (!c.radii.empty()) out["radii"] = c.radii;
  if (!c.caps.empty()) out["caps"] = c.caps;
  return out;
}

inline VehicleTargetConfig vehicle_config_from_json(const json& j) {
  VehicleTargetConfig c;
  c.agents = j.value("agents", c.agents);
  c.resources = j.value("resources", c.agents + 1);
  c.p = j.value("p", c.p);
  c.actions_per_agent = j.value("actions_per_agent", c.actions_per_agent);
  c.n = j.value("n", c.agents);
  c.seed = j.value("seed", c.seed);
  return c;
}

inline ContentDistributionConfig content_config_from_json(const json& j) {
  ContentDistributionConfig c;
  c.nx = j.value("nx", c.nx);
  c.ny = j.value("ny", c.ny);
  c.nodes = j.value("nodes", c.nodes);
  c.items = j.value("items", c.items);
  c.alpha = j.value("alpha", c.alpha);
  c.radius = j.value("radius", c.radius);
  c.radii = j.value("radii", c.radii);
  c.cap = j.value("cap", c.cap);
  c.caps = j.value("caps", c.caps);
  c.seed = j.value("seed", c.seed);
  return c;
}

// ---------------------------------------------------------------------------
// Dynamics and oracle

// step,agent,gain,potential; step 0 is the start allocation.
inline void write_trace_csv(std::ostream& os, const DynamicsTrace& tr) {
  os << "step,agent,gain,potential\n";
  os << "0,,," << csv_real(tr.initial_potential) << '\n';
  for (const auto& s : tr.steps) {
    os << s.step << ',' << s.agent << ',' << csv_real(s.gain) << ',' << csv_real(s.potential) << '\n';
  }
}

inline json to_json(const GameInstance& g, const DynamicsTrace& tr) {
  json steps = json::array();
  for (const auto& s : tr.steps) {
    steps.push_back({{"step", s.step},
                     {"agent", s.agent},
                     {"old_action", to_json(g, Allocation({s.old_action}, g.num_resources()))[0]},
                     {"new_action", to_json(g, Allocation({s.new_action}, g.num_resources()))[0]},
                     {"gain", s.gain},
                     {"potential", s.potential}});
  }
  return json{{"converged", tr.converged},   {"rounds", tr.rounds},       {"sweeps", tr.sweeps},
              {"accepted", tr.accepted()},   {"queries", tr.queries},     {"schedule", tr.schedule},
              {"generator", tr.generator},   {"seed", tr.seed},           {"epsilon", tr.epsilon},
              {"start", to_json(g, tr.start)}, {"initial_potential", tr.initial_potential}, {"steps", std::move(steps)}};
}

inline json to_json(const GameInstance& g, const OracleResult& o) {
  json eq = json::array();
  for (const auto& a : o.equilibria) eq.push_back({{"allocation", to_json(g, a)}, {"welfare", evaluate_welfare(g, a)}});
  return json{{"optimum", o.optimum},
              {"optimal_allocation", to_json(g, o.optimal_allocation)},
              {"equilibrium_count", o.equilibrium_count},
              {"equilibria", std::move(eq)},
              {"worst_equilibrium", o.worst_equilibrium},
              {"worst_allocation", to_json(g, o.worst_allocation)},
              {"efficiency", o.efficiency},
              {"allocations", o.allocations}};
}

}  // namespace poa::io

#endif  // POA_IO_HPP
