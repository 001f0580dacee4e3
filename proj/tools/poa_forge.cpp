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

// poa_forge: command-line front end.
//
// Exit codes: 0 success, 2 precondition or validation failure, 3 resource cap,
// 4 solver anomaly (including a closed-form/LP disagreement).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "poa/catalog.hpp"
#include "poa/error.hpp"
#include "poa/game.hpp"
#include "poa/instance_gen.hpp"
#include "poa/io.hpp"
#include "poa/mechanisms.hpp"
#include "poa/parallel.hpp"
#include "poa/poa_closed.hpp"
#include "poa/poa_lp.hpp"

namespace {

using nlohmann::json;

constexpr int kExitPrecondition = 2;
constexpr int kExitCap = 3;
constexpr int kExitSolver = 4;
constexpr double kAgreementTol = 1e-6;

struct DisagreementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw poa::InvalidParameter("cannot open '" + path + "'");
  return json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw poa::InvalidParameter("cannot write '" + path + "'");
  out << text;
}

// A mechanism label, or file:<path> naming a mechanism JSON.
poa::Mechanism resolve_mechanism(const std::string& label, const poa::WelfareBasis& w) {
  if (label.rfind("file:", 0) == 0) {
    auto f = poa::io::mechanism_from_json(read_json_file(label.substr(5)));
    if (f.n() != w.n()) throw poa::InvalidParameter("mechanism file has n=" + std::to_string(f.n()) + ", expected " + std::to_string(w.n()));
    return f;
  }
  return poa::make_mechanism(label, w);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------
// poa

struct PoaArgs {
  std::string basis = "covering";
  int n = 10;
  std::string mech = "sv";
  std::string method = "lp";
  std::string dump_lp;
};

int cmd_poa(const PoaArgs& a) {
  const auto w = poa::make_basis(a.basis, a.n);
  const auto f = resolve_mechanism(a.mech, w);
  if (!a.dump_lp.empty()) write_text_file(a.dump_lp, poa::lp::dump(poa::build_poa_dual_lp(f, w, a.n)));
  json out{{"basis", a.basis}, {"n", a.n}, {"mechanism", poa::io::to_json(f)}};
  std::optional<poa::PoaReport> lp, closed;
  if (a.method == "lp" || a.method == "both") lp = poa::poa_dual_lp(f, w, a.n);
  if (a.method == "closed" || a.method == "both") closed = poa::poa_closed_form(f, w, a.n);
  if (lp) out["lp"] = poa::io::to_json(*lp);
  if (closed) out["closed"] = poa::io::to_json(*closed);
  out["poa"] = lp ? lp->poa : closed->poa;
  if (lp && closed) {
    const double diff = std::abs(lp->poa - closed->poa);
    out["agree"] = diff <= kAgreementTol;
    out["difference"] = diff;
    std::cout << out.dump(2) << '\n';
    if (diff > kAgreementTol) throw DisagreementError("lp and closed form differ by " + poa::io::csv_real(diff));
    return 0;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// design

struct DesignArgs {
  std::string basis = "covering";
  int n = 10;
  std::string variant = "lp";
  std::string out;
};

int cmd_design(const DesignArgs& a) {
  const auto w = poa::make_basis(a.basis, a.n);
  poa::DesignResult d;
  if (a.variant == "lp") {
    d = poa::design_optimal_mechanism(w, a.n);
  } else if (a.variant == "lp_submodular") {
    d = poa::design_optimal_mechanism_submodular(w, a.n);
  } else {
    if (!w.is_covering()) throw poa::PreconditionError("covering basis (w = 1)", 1);
    d.mechanism = poa::gairing_optimal_covering(a.n);
    d.report = poa::poa_covering(d.mechanism, a.n);
  }
  const json m = poa::io::to_json(d.mechanism);
  if (!a.out.empty()) write_text_file(a.out, m.dump(2) + "\n");
  std::cout << json{{"basis", a.basis}, {"n", a.n}, {"variant", a.variant}, {"mechanism", m}, {"report", poa::io::to_json(d.report)}}.dump(2)
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string family = "power";
  double from = 0.0;
  double to = 1.0;
  int steps = 11;
  int n = 20;
  std::string mechs = "sv,mc,optimal";
  std::string out;
};

std::string family_label(const std::string& family, double param) {
  if (family == "power") return "power:d=" + poa::detail::format_real(param);
  if (family == "vehicle") return "vehicle:p=" + poa::detail::format_real(param);
  return "covering";
}

int cmd_sweep(const SweepArgs& a) {
  if (a.family != "power" && a.family != "vehicle" && a.family != "covering") {
    throw poa::InvalidParameter("unknown family '" + a.family + "'");
  }
  if (a.steps < 1) throw poa::InvalidParameter("steps must be >= 1");
  const auto mechs = split(a.mechs, ',');
  if (mechs.empty()) throw poa::InvalidParameter("no mechanisms given");
  std::vector<double> params;
  if (a.family == "covering") {
    params.push_back(0.0);
  } else {
    for (int k = 0; k < a.steps; ++k) {
      params.push_back(a.steps == 1 ? a.from : a.from + (a.to - a.from) * k / (a.steps - 1));
    }
  }
  struct Row {
    std::string line;
  };
  const std::size_t cells = params.size() * mechs.size();
  auto rows = poa::parallel_map<Row>(cells, [&](std::size_t k) {
    const double param = params[k / mechs.size()];
    const std::string& mech = mechs[k % mechs.size()];
    const auto w = poa::make_basis(family_label(a.family, param), a.n);
    double poa_value;
    if (mech == "optimal") {
      poa_value = poa::design_optimal_mechanism(w, a.n).report.poa;
    } else if (mech == "optimal_submodular") {
      poa_value = poa::design_optimal_mechanism_submodular(w, a.n).report.poa;
    } else {
      poa_value = poa::poa_dual_lp(resolve_mechanism(mech, w), w, a.n).poa;
    }
    const double app = a.n >= 2 ? poa::approximation_ratio_curvature(w, a.n) : std::numeric_limits<double>::quiet_NaN();
    std::ostringstream os;
    os << a.family << ',' << poa::io::csv_real(param) << ',' << a.n << ',' << mech << ',' << poa::io::csv_real(poa_value) << ','
       << poa::io::csv_real(app) << '\n';
    return Row{os.str()};
  });
  std::ostringstream csv;
  csv << "family,param,n,mechanism,poa,app_ratio\n";
  for (const auto& r : rows) csv << r.line;
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(a.out, csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string family = "vehicle";
  int count = 100;
  std::uint64_t seed = 0;
  std::string mech = "sv";
  bool oracle = false;
  std::uint64_t cap = std::uint64_t{1} << 20;
  double p = 0.8;
  int agents = 10;
  int grid = 100;
  int nodes = 20;
  int items = 100;
  int k = 3;
  double alpha = 0.7;
  double radius = 25.0;
  std::string out;
};

struct SimRow {
  std::uint64_t seed = 0;
  bool converged = false;
  int rounds = 0;
  long moves = 0;
  long bound = 0;
  double welfare = 0.0;
  double reference = 0.0;  // optimum (vehicle with oracle) or W_tot (content)
  double worst_ne = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  bool skipped = false;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.family != "vehicle" && a.family != "content") throw poa::InvalidParameter("family must be vehicle or content");
  if (a.count < 1) throw poa::InvalidParameter("count must be >= 1");
  const bool vehicle = a.family == "vehicle";
  const int n = vehicle ? a.agents : a.nodes;
  const auto w = vehicle ? poa::vehicle_target_basis(a.p, n) : poa::covering_basis(n);
  const auto f = resolve_mechanism(a.mech, w);
  const double theory = poa::poa_dual_lp(f, w, n).poa;

  auto rows = poa::parallel_map<SimRow>(static_cast<std::size_t>(a.count), [&](std::size_t idx) {
    SimRow row;
    row.seed = a.seed + idx;
    std::optional<poa::GameInstance> g;
    double w_tot = 0.0;
    if (vehicle) {
      poa::VehicleTargetConfig c;
      c.agents = a.agents;
      c.resources = a.agents + 1;
      c.p = a.p;
      c.n = n;
      c.seed = row.seed;
      g.emplace(poa::gen_vehicle_target(c, f));
    } else {
      poa::ContentDistributionConfig c;
      c.nx = c.ny = a.grid;
      c.nodes = a.nodes;
      c.items = a.items;
      c.cap = a.k;
      c.alpha = a.alpha;
      c.radius = a.radius;
      c.seed = row.seed;
      g.emplace(poa::gen_content_distribution(c, f));
      w_tot = poa::total_query_mass(c);
    }
    const auto dyn = poa::run_best_response_dynamics(*g, poa::initial_allocation(*g));
    row.converged = dyn.trace.converged;
    row.rounds = dyn.trace.rounds;
    row.moves = dyn.trace.accepted();
    row.bound = poa::best_response_move_bound(*g);
    row.welfare = poa::evaluate_welfare(*g, dyn.allocation);
    if (vehicle) {
      if (a.oracle) {
        try {
          poa::OracleOptions opts;
          opts.cap = a.cap;
          opts.keep_equilibria = false;
          const auto o = poa::exhaustive_oracle(*g, opts);
          row.reference = o.optimum;
          row.worst_ne = o.worst_equilibrium;
          row.ratio = o.efficiency;
        } catch (const poa::SizeError&) {
          row.skipped = true;
        }
      }
    } else {
      row.reference = w_tot;
      row.ratio = row.welfare / w_tot;
    }
    return row;
  });

  std::ostringstream csv;
  csv << "seed,converged,rounds,moves,move_bound,welfare_ne," << (vehicle ? "optimum,worst_ne,efficiency" : "w_tot,worst_ne,ratio") << '\n';
  double min_ratio = std::numeric_limits<double>::infinity();
  double sum_ratio = 0.0;
  int counted = 0, skipped = 0, unconverged = 0, over_bound = 0, max_rounds = 0;
  for (const auto& r : rows) {
    csv << r.seed << ',' << (r.converged ? 1 : 0) << ',' << r.rounds << ',' << r.moves << ',' << r.bound << ','
        << poa::io::csv_real(r.welfare) << ',' << poa::io::csv_real(r.reference) << ',' << poa::io::csv_real(r.worst_ne) << ','
        << poa::io::csv_real(r.ratio) << '\n';
    skipped += r.skipped;
    unconverged += !r.converged;
    over_bound += r.moves > r.bound;
    max_rounds = std::max(max_rounds, r.rounds);
    if (std::isfinite(r.ratio)) {
      min_ratio = std::min(min_ratio, r.ratio);
      sum_ratio += r.ratio;
      ++counted;
    }
  }
  if (!a.out.empty()) write_text_file(a.out, csv.str());
  json summary{{"family", a.family},
               {"count", a.count},
               {"seed", a.seed},
               {"mechanism", f.label()},
               {"theoretical_poa", theory},
               {"evaluated", counted},
               {"skipped_cap", skipped},
               {"unconverged", unconverged},
               {"over_move_bound", over_bound},
               {"max_rounds", max_rounds},
               {"min_ratio", counted ? json(min_ratio) : json(nullptr)},
               {"mean_ratio", counted ? json(sum_ratio / counted) : json(nullptr)}};
  if (a.out.empty()) std::cout << csv.str();
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// oracle / dynamics

int cmd_oracle(const std::string& path, std::uint64_t cap) {
  const auto g = poa::io::game_from_json(read_json_file(path));
  poa::OracleOptions opts;
  opts.cap = cap;
  const auto o = poa::exhaustive_oracle(g, opts);
  std::cout << poa::io::to_json(g, o).dump(2) << '\n';
  return 0;
}

int cmd_dynamics(const std::string& path, const std::string& schedule, std::uint64_t seed, const std::string& trace_csv) {
  const auto g = poa::io::game_from_json(read_json_file(path));
  poa::DynamicsOptions opts;
  if (schedule == "round_robin") {
    opts.schedule = poa::Schedule::kRoundRobin;
  } else if (schedule == "random") {
    opts.schedule = poa::Schedule::kRandom;
  } else {
    throw poa::InvalidParameter("schedule must be round_robin or random");
  }
  opts.seed = seed;
  const auto res = poa::run_best_response_dynamics(g, poa::initial_allocation(g), opts);
  if (!trace_csv.empty()) {
    std::ofstream out(trace_csv);
    if (!out) throw poa::InvalidParameter("cannot write '" + trace_csv + "'");
    poa::io::write_trace_csv(out, res.trace);
  }
  json out{{"allocation", poa::io::to_json(g, res.allocation)},
           {"welfare", poa::evaluate_welfare(g, res.allocation)},
           {"potential", poa::potential(g, res.allocation)},
           {"move_bound", g.matroid_structured() ? json(poa::best_response_move_bound(g)) : json(nullptr)},
           {"trace", poa::io::to_json(g, res.trace)}};
  std::cout << out.dump(2) << '\n';
  return res.trace.converged ? 0 : kExitSolver;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::string family = "vehicle";
  int count = 1;
  std::uint64_t seed = 0;
  std::string config;
  std::string out_dir = ".";
};

int cmd_gen(const GenArgs& a) {
  if (a.count < 1) throw poa::InvalidParameter("count must be >= 1");
  const json cfg = a.config.empty() ? json::object() : read_json_file(a.config);
  std::filesystem::create_directories(a.out_dir);
  json manifest{{"family", a.family}, {"config", json::object()}, {"instances", json::array()}};
  for (int k = 0; k < a.count; ++k) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(k);
    json inst;
    if (a.family == "vehicle") {
      auto c = poa::io::vehicle_config_from_json(cfg);
      c.seed = seed;
      if (k == 0) manifest["config"] = poa::io::to_json(c);
      inst = poa::io::to_json(poa::gen_vehicle_target(c));
    } else if (a.family == "content") {
      auto c = poa::io::content_config_from_json(cfg);
      c.seed = seed;
      if (k == 0) manifest["config"] = poa::io::to_json(c);
      inst = poa::io::to_json(poa::gen_content_distribution(c));
    } else {
      throw poa::InvalidParameter("family must be vehicle or content");
    }
    const std::string file = a.family + "_" + std::to_string(seed) + ".json";
    write_text_file((std::filesystem::path(a.out_dir) / file).string(), inst.dump(2) + "\n");
    manifest["instances"].push_back({{"seed", seed}, {"file", file}});
  }
  manifest["config"].erase("seed");
  write_text_file((std::filesystem::path(a.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << manifest.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Price-of-anarchy computation, mechanism design and equilibrium simulation"};
  app.require_subcommand(1);

  PoaArgs poa_args;
  auto* poa_cmd = app.add_subcommand("poa", "PoA of a mechanism on a welfare basis");
  poa_cmd->add_option("--basis", poa_args.basis, "covering | power:d=X | vehicle:p=X")->capture_default_str();
  poa_cmd->add_option("--n", poa_args.n, "maximum number of agents")->capture_default_str()->check(CLI::PositiveNumber);
  poa_cmd->add_option("--mech", poa_args.mech, "sv | mc | gairing | optimal | optimal_submodular | file:PATH")->capture_default_str();
  poa_cmd->add_option("--method", poa_args.method, "lp | closed | both")
      ->capture_default_str()
      ->check(CLI::IsMember({"lp", "closed", "both"}));
  poa_cmd->add_option("--dump-lp", poa_args.dump_lp, "write the dual program as text");

  DesignArgs design_args;
  auto* design_cmd = app.add_subcommand("design", "Optimal mechanism for a welfare basis");
  design_cmd->add_option("--basis", design_args.basis)->capture_default_str();
  design_cmd->add_option("--n", design_args.n)->capture_default_str()->check(CLI::PositiveNumber);
  design_cmd->add_option("--variant", design_args.variant, "lp | lp_submodular | gairing_covering")
      ->capture_default_str()
      ->check(CLI::IsMember({"lp", "lp_submodular", "gairing_covering"}));
  design_cmd->add_option("--out", design_args.out, "also write the mechanism JSON here");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "PoA over a basis family grid, as CSV");
  sweep_cmd->add_option("--family", sweep_args.family, "power | vehicle | covering")->capture_default_str();
  sweep_cmd->add_option("--from", sweep_args.from)->capture_default_str();
  sweep_cmd->add_option("--to", sweep_args.to)->capture_default_str();
  sweep_cmd->add_option("--steps", sweep_args.steps)->capture_default_str();
  sweep_cmd->add_option("--n", sweep_args.n)->capture_default_str()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--mechs", sweep_args.mechs, "comma-separated mechanism list")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_args.out, "CSV path (stdout if omitted)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Best-response dynamics on generated instances");
  sim_cmd->add_option("--family", sim.family, "vehicle | content")->capture_default_str();
  sim_cmd->add_option("--count", sim.count)->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--mech", sim.mech)->capture_default_str();
  sim_cmd->add_flag("--oracle", sim.oracle, "exhaustive oracle per vehicle instance");
  sim_cmd->add_option("--cap", sim.cap, "oracle enumeration cap")->capture_default_str();
  sim_cmd->add_option("--p", sim.p)->capture_default_str();
  sim_cmd->add_option("--agents", sim.agents)->capture_default_str();
  sim_cmd->add_option("--grid", sim.grid)->capture_default_str();
  sim_cmd->add_option("--nodes", sim.nodes)->capture_default_str();
  sim_cmd->add_option("--items", sim.items)->capture_default_str();
  sim_cmd->add_option("--k", sim.k)->capture_default_str();
  sim_cmd->add_option("--alpha", sim.alpha)->capture_default_str();
  sim_cmd->add_option("--radius", sim.radius)->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "per-instance CSV path (stdout if omitted)");

  std::string oracle_path;
  std::uint64_t oracle_cap = std::uint64_t{1} << 20;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive equilibrium enumeration for one instance");
  oracle_cmd->add_option("--instance", oracle_path)->required();
  oracle_cmd->add_option("--cap", oracle_cap)->capture_default_str();

  std::string dyn_path, dyn_schedule = "round_robin", dyn_trace;
  std::uint64_t dyn_seed = 0;
  auto* dyn_cmd = app.add_subcommand("dynamics", "Best-response dynamics on one instance");
  dyn_cmd->add_option("--instance", dyn_path)->required();
  dyn_cmd->add_option("--schedule", dyn_schedule, "round_robin | random")->capture_default_str();
  dyn_cmd->add_option("--seed", dyn_seed)->capture_default_str();
  dyn_cmd->add_option("--trace", dyn_trace, "write the trace as CSV");

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Generate instances and a manifest");
  gen_cmd->add_option("--family", gen_args.family, "vehicle | content")->capture_default_str();
  gen_cmd->add_option("--count", gen_args.count)->capture_default_str();
  gen_cmd->add_option("--seed", gen_args.seed)->capture_default_str();
  gen_cmd->add_option("--config", gen_args.config, "generator config JSON");
  gen_cmd->add_option("--out-dir", gen_args.out_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPrecondition;
  }

  try {
    if (poa_cmd->parsed()) return cmd_poa(poa_args);
    if (design_cmd->parsed()) return cmd_design(design_args);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args);
    if (sim_cmd->parsed()) return cmd_simulate(sim);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_path, oracle_cap);
    if (dyn_cmd->parsed()) return cmd_dynamics(dyn_path, dyn_schedule, dyn_seed, dyn_trace);
    if (gen_cmd->parsed()) return cmd_gen(gen_args);
  } catch (const poa::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const poa::SizeError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return kExitCap;
  } catch (const poa::SolverError& e) {
    std::cerr << "solver: " << e.what() << '\n';
    return kExitSolver;
  } catch (const DisagreementError& e) {
    std::cerr << "disagreement: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  }
  return 0;
}
