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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "poa/game.hpp"
#include "poa/instance_gen.hpp"
#include "poa/matroid.hpp"
#include "poa/mechanisms.hpp"
#include "poa/parallel.hpp"
#include "poa/poa_closed.hpp"
#include "poa/poa_lp.hpp"

namespace {

using namespace poa;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

double lp_poa(const Mechanism& f, const WelfareBasis& w, int n) { return poa_dual_lp(f, w, n).poa; }

// Covering W* as the plain three-term maximum.
double covering_w_star(const Mechanism& f, int n) {
  double best = 0.0;
  for (int j = 1; j < n; ++j) {
    const double a = (j + 1) * f(j + 1) - 1.0;
    const double b = j * f(j) - f(j + 1);
    const double c = j * f(j + 1);
    best = std::max(best, std::max(a, std::max(b, c)));
  }
  return 1.0 + best;
}

struct GridPoint {
  std::string family;
  WelfareBasis w;
  int n;
  std::vector<Mechanism> mechs;
};

std::vector<GridPoint> closed_form_grid() {
  std::vector<GridPoint> grid;
  for (int k = 0; k <= 10; ++k) {
    const double d = k / 10.0;
    for (int n = 2; n <= 20; ++n) {
      auto w = power_basis(d, n);
      grid.push_back({"power d=" + fmt(d), w, n, {shapley_value(w), marginal_contribution(w)}});
    }
  }
  for (int k = 1; k <= 10; ++k) {
    const double p = k / 10.0;
    for (int n = 2; n <= 10; ++n) {
      auto w = vehicle_target_basis(p, n);
      grid.push_back({"vehicle p=" + fmt(p), w, n, {shapley_value(w), marginal_contribution(w)}});
    }
  }
  for (int n = 2; n <= 20; ++n) {
    auto w = covering_basis(n);
    grid.push_back({"covering", w, n, {shapley_value(w), marginal_contribution(w), gairing_optimal_covering(n)}});
  }
  for (int k = 10; k <= 20; ++k) {
    const double d = k / 10.0;
    for (int n = 2; n <= 20; ++n) {
      auto w = power_basis(d, n);
      grid.push_back({"power d=" + fmt(d), w, n, {shapley_value(w), marginal_contribution(w)}});
    }
  }
  return grid;
}

void criterion1(Outcome& o) {
  const int n = 10;
  const auto w = vehicle_target_basis(0.8, n);
  const double sv = lp_poa(shapley_value(w), w, n);
  const double mc = lp_poa(marginal_contribution(w), w, n);
  const double opt = design_optimal_mechanism(w, n).report.poa;
  o.require(std::abs(sv - 0.568) <= 0.005, "PoA_SV " + fmt(sv));
  o.require(std::abs(mc - 0.556) <= 0.005, "PoA_MC " + fmt(mc));
  o.require(std::abs(opt - 0.688) <= 0.005, "PoA_opt " + fmt(opt));
  o.detail << "sv=" << fmt(sv) << " mc=" << fmt(mc) << " opt=" << fmt(opt);
}

void criterion2(Outcome& o) {
  double worst = 0.0;
  for (int n = 2; n <= 50; ++n) {
    const auto w = covering_basis(n);
    const auto sv = shapley_value(w);
    const double expect = static_cast<double>(n) / (2 * n - 1);
    const double lp = lp_poa(sv, w, n);
    const double oracle = 1.0 / covering_w_star(sv, n);
    const double closed = poa_covering(sv, n).poa;
    worst = std::max({worst, std::abs(lp - expect), std::abs(oracle - expect), std::abs(closed - expect)});
    o.require(std::abs(lp - expect) <= 1e-9 && std::abs(oracle - expect) <= 1e-9 && std::abs(closed - expect) <= 1e-9,
              "SV covering n=" + std::to_string(n));
    const auto mc = marginal_contribution(w);
    const double mlp = lp_poa(mc, w, n);
    o.require(std::abs(mlp - 0.5) <= 1e-9 && std::abs(1.0 / covering_w_star(mc, n) - 0.5) <= 1e-9,
              "MC covering n=" + std::to_string(n) + " got " + fmt(mlp));
  }
  const double g = lp_poa(gairing_optimal_covering(100), covering_basis(100), 100);
  const double target = 1.0 - 1.0 / std::numbers::e;
  o.require(std::abs(g - target) <= 0.01, "gairing n=100 " + fmt(g));
  o.detail << "max |SV - n/(2n-1)|=" << fmt(worst) << " gairing(100)=" << fmt(g);
}

void criterion3(Outcome& o) {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (double d : {1.0, 1.5, 2.0}) {
    for (int n = 2; n <= 20; ++n) {
      const auto w = power_basis(d, n);
      const double expect = n / std::pow(n, d);
      const double lp = lp_poa(shapley_value(w), w, n);
      const double closed = poa_supermodular(shapley_value(w), w, n).poa;
      worst = std::max({worst, std::abs(lp - expect), std::abs(closed - expect)});
      o.require(std::abs(lp - expect) <= 1e-9 && std::abs(closed - expect) <= 1e-9,
                "SV d=" + fmt(d) + " n=" + std::to_string(n) + " lp=" + fmt(lp));
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> v(n);
        v[0] = 1.0;
        for (int j = 2; j <= n; ++j) v[j - 1] = 1.0 + uniform_unit(rng) * (w(j) / j - 1.0);
        const Mechanism f(v, "band");
        const double got = lp_poa(f, w, n);
        worst = std::max(worst, std::abs(got - expect));
        o.require(std::abs(got - expect) <= 1e-9, "band mechanism d=" + fmt(d) + " n=" + std::to_string(n));
      }
    }
  }
  o.detail << "max deviation=" << fmt(worst);
}

struct GridCheck {
  double max_gap = 0.0;
  std::string where;
};

void criterion4(Outcome& o, const std::vector<GridPoint>& grid) {
  const auto results = parallel_map<GridCheck>(grid.size(), [&](std::size_t k) {
    const auto& g = grid[k];
    GridCheck c;
    for (const auto& f : g.mechs) {
      const double gap = std::abs(lp_poa(f, g.w, g.n) - poa_closed_form(f, g.w, g.n).poa);
      if (gap > c.max_gap) {
        c.max_gap = gap;
        c.where = g.family + " n=" + std::to_string(g.n) + " " + f.label();
      }
    }
    return c;
  });
  std::size_t triples = 0;
  for (const auto& g : grid) triples += g.mechs.size();
  GridCheck worst;
  for (const auto& c : results) {
    if (c.max_gap > worst.max_gap) worst = c;
  }
  o.require(worst.max_gap <= 1e-6, "gap " + fmt(worst.max_gap) + " at " + worst.where);
  o.detail << triples << " triples, max |lp - closed|=" << fmt(worst.max_gap);
}

void criterion5(Outcome& o, const std::vector<GridPoint>& grid) {
  struct Row {
    double slack = 0.0;  // design - max(sv, mc), most negative wins
    double gairing_gap = 0.0;
    std::string where;
  };
  const auto rows = parallel_map<Row>(grid.size(), [&](std::size_t k) {
    const auto& g = grid[k];
    Row r;
    const double design = design_optimal_mechanism(g.w, g.n).report.poa;
    const double sv = lp_poa(shapley_value(g.w), g.w, g.n);
    const double mc = lp_poa(marginal_contribution(g.w), g.w, g.n);
    r.slack = design - std::max(sv, mc);
    r.where = g.family + " n=" + std::to_string(g.n);
    if (g.family == "covering") {
      r.gairing_gap = std::abs(design - poa_covering(gairing_optimal_covering(g.n), g.n).poa);
    }
    return r;
  });
  double min_slack = 1.0;
  double max_gap = 0.0;
  std::string where;
  for (const auto& r : rows) {
    if (r.slack < min_slack) {
      min_slack = r.slack;
      where = r.where;
    }
    max_gap = std::max(max_gap, r.gairing_gap);
  }
  o.require(min_slack >= -1e-7, "design below baseline at " + where);
  o.require(max_gap <= 1e-6, "covering design vs gairing gap " + fmt(max_gap));
  o.detail << rows.size() << " bases, min(design - max(sv, mc))=" << fmt(min_slack)
           << " max |design - gairing|=" << fmt(max_gap);
}

void criterion6(Outcome& o) {
  const int n = 10;
  const auto w = vehicle_target_basis(0.8, n);
  struct Mech {
    Mechanism f;
    double poa;
  };
  const auto design = design_optimal_mechanism(w, n);
  const std::vector<Mech> mechs = {
      {shapley_value(w), lp_poa(shapley_value(w), w, n)},
      {marginal_contribution(w), lp_poa(marginal_contribution(w), w, n)},
      {design.mechanism, lp_poa(design.mechanism, w, n)},
  };
  constexpr int kInstances = 1000;
  for (const auto& m : mechs) {
    struct Row {
      double efficiency = 0.0;
      bool converged = false;
      bool within_bound = false;
    };
    const auto rows = parallel_map<Row>(kInstances, [&](std::size_t k) {
      VehicleTargetConfig cfg;
      cfg.seed = k;
      const auto g = gen_vehicle_target(cfg, m.f);
      const auto dyn = run_best_response_dynamics(g, initial_allocation(g));
      Row r;
      r.converged = dyn.trace.converged;
      r.within_bound = dyn.trace.accepted() <= best_response_move_bound(g);
      r.efficiency = exhaustive_oracle(g).efficiency;
      return r;
    });
    double min_eff = 1.0;
    int unconverged = 0;
    int over_bound = 0;
    for (const auto& r : rows) {
      min_eff = std::min(min_eff, r.efficiency);
      unconverged += r.converged ? 0 : 1;
      over_bound += r.within_bound ? 0 : 1;
    }
    o.require(min_eff >= m.poa - 1e-9, m.f.label() + " efficiency " + fmt(min_eff) + " below PoA " + fmt(m.poa));
    o.require(unconverged == 0, m.f.label() + " unconverged runs");
    o.require(over_bound == 0, m.f.label() + " move bound exceeded");
    o.detail << m.f.label() << ": min eff " << fmt(min_eff) << " >= PoA " << fmt(m.poa) << "; ";
  }
}

void criterion7(Outcome& o) {
  constexpr int kSeeds = 200;
  const auto gairing = gairing_optimal_covering(20);
  for (double alpha : {0.7, 0.8, 0.9}) {
    struct Row {
      double sv = 0.0;
      double opt = 0.0;
      int rounds = 0;
      bool converged = true;
    };
    const auto rows = parallel_map<Row>(kSeeds, [&](std::size_t k) {
      ContentDistributionConfig cfg;
      cfg.alpha = alpha;
      cfg.seed = k;
      const double total = total_query_mass(cfg);
      Row r;
      for (int which = 0; which < 2; ++which) {
        const auto g = which == 0 ? gen_content_distribution(cfg) : gen_content_distribution(cfg, gairing);
        const auto dyn = run_best_response_dynamics(g, initial_allocation(g));
        const double ratio = evaluate_welfare(g, dyn.allocation) / total;
        (which == 0 ? r.sv : r.opt) = ratio;
        r.rounds = std::max(r.rounds, dyn.trace.rounds);
        r.converged = r.converged && dyn.trace.converged;
      }
      return r;
    });
    double sv_sum = 0.0, opt_sum = 0.0, sv_min = 1.0, opt_min = 1.0;
    int rounds = 0;
    bool converged = true;
    for (const auto& r : rows) {
      sv_sum += r.sv;
      opt_sum += r.opt;
      sv_min = std::min(sv_min, r.sv);
      opt_min = std::min(opt_min, r.opt);
      rounds = std::max(rounds, r.rounds);
      converged = converged && r.converged;
    }
    const double sv_mean = sv_sum / kSeeds;
    const double opt_mean = opt_sum / kSeeds;
    const std::string tag = "alpha=" + fmt(alpha);
    o.require(opt_mean >= sv_mean, tag + " mean");
    o.require(opt_min >= sv_min, tag + " min");
    o.require(converged && rounds <= 15, tag + " rounds " + std::to_string(rounds));
    o.detail << tag << " mean " << fmt(opt_mean) << " vs " << fmt(sv_mean) << ", min " << fmt(opt_min) << " vs "
             << fmt(sv_min) << ", rounds<=" << rounds << "; ";
  }
}

Mechanism random_mechanism(std::mt19937_64& rng, int n) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform_unit(rng);
  v[0] = 1.0;
  return Mechanism(v, "random");
}

void criterion8(Outcome& o) {
  std::mt19937_64 rng(2026);
  double dev_err = 0.0, bb_err = 0.0, mc_err = 0.0;
  for (int t = 0; t < 300; ++t) {
    VehicleTargetConfig cfg;
    cfg.seed = 5000 + t;
    cfg.p = 0.1 + 0.9 * uniform_unit(rng);
    const auto base = gen_vehicle_target(cfg);
    const auto& w = base.basis();
    const std::vector<GameInstance> games = {base.with_mechanism(random_mechanism(rng, w.n())),
                                             base.with_mechanism(shapley_value(w)),
                                             base.with_mechanism(marginal_contribution(w))};
    std::vector<Action> acts(base.num_agents());
    for (int i = 0; i < base.num_agents(); ++i) {
      const auto options = base.expand_actions(i);
      acts[i] = options[uniform_below(rng, options.size())];
    }
    const Allocation a(acts, base.num_resources());
    const int i = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(base.num_agents())));
    const auto options = base.expand_actions(i);
    auto moved = acts;
    moved[i] = options[uniform_below(rng, options.size())];
    const Allocation b(moved, base.num_resources());

    for (const auto& g : games) {
      const double dphi = potential(g, b) - potential(g, a);
      const double du = evaluate_utility(g, b, i) - evaluate_utility(g, a, i);
      dev_err = std::max(dev_err, std::abs(dphi - du));
    }
    double total = 0.0;
    for (int k = 0; k < base.num_agents(); ++k) total += evaluate_utility(games[1], a, k);
    bb_err = std::max(bb_err, std::abs(total - evaluate_welfare(games[1], a)));
    for (int k = 0; k < base.num_agents(); ++k) {
      const double marginal = evaluate_welfare(games[2], a) - detail::welfare_of_counts(games[2], detail::counts_without(a, k));
      mc_err = std::max(mc_err, std::abs(evaluate_utility(games[2], a, k) - marginal));
    }
  }
  o.require(dev_err <= 1e-12, "potential deviation identity " + fmt(dev_err));
  o.require(bb_err <= 1e-12, "Shapley budget balance " + fmt(bb_err));
  o.require(mc_err <= 1e-12, "marginal contribution identity " + fmt(mc_err));

  double scale_err = 0.0;
  for (int n : {2, 5, 10, 20}) {
    for (double d : {0.3, 1.0, 1.7}) {
      const auto w = power_basis(d, n);
      for (const auto& f : {shapley_value(w), marginal_contribution(w), random_mechanism(rng, n)}) {
        const double ref = lp_poa(f, w, n);
        for (double c : {0.01, 0.5, 3.0, 250.0}) scale_err = std::max(scale_err, std::abs(lp_poa(f.scaled(c), w, n) - ref));
      }
    }
  }
  o.require(scale_err <= 1e-7, "scale invariance " + fmt(scale_err));

  double remark_err = 0.0;
  auto remark = [&](const WelfareBasis& w, int n) {
    remark_err = std::max(remark_err, std::abs(poa_shapley_submodular(w, n).w_star - poa_shapley_reformulated(w, n).w_star));
  };
  for (int n = 1; n <= 20; ++n) {
    for (int k = 0; k <= 10; ++k) remark(power_basis(k / 10.0, n), n);
    for (int k = 1; k <= 10; ++k) remark(vehicle_target_basis(k / 10.0, n), n);
  }
  o.require(remark_err <= 1e-12, "reformulated Shapley bound " + fmt(remark_err));

  constexpr Subset r1 = 1U << 0, r2 = 1U << 1, r3 = 1U << 2;
  bool rank_one = true;
  for (int m = 2; m <= 12; ++m) {
    const auto c = matroid_check(m, {0, r1, r2});
    rank_one = rank_one && c.is_matroid && c.rank == 1;
  }
  o.require(rank_one, "{{}, {r1}, {r2}} should be a rank-1 matroid");
  o.require(!basis_family_check(3, {r1, r2 | r3}).is_matroid, "{{r1}, {r2, r3}} should be rejected");

  o.detail << "deviation " << fmt(dev_err) << ", budget " << fmt(bb_err) << ", mc " << fmt(mc_err) << ", scale "
           << fmt(scale_err) << ", reformulation " << fmt(remark_err) << ", matroid examples ok";
}

}  // namespace

int main() {
  const auto grid = closed_form_grid();
  struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "vehicle-target certificates", 5, criterion1},
      {2, "covering closed forms", 1, criterion2},
      {3, "supermodular optimality", 1, criterion3},
      {4, "LP and closed-form agreement", 60, [&](Outcome& o) { criterion4(o, grid); }},
      {5, "design dominance", 60, [&](Outcome& o) { criterion5(o, grid); }},
      {6, "simulation soundness", 600, criterion6},
      {7, "content caching comparison", 600, criterion7},
      {8, "property suite", 30, criterion8},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.limit_s, "runtime " + fmt(secs) + " s over " + fmt(c.limit_s) + " s");
    failures += o.ok ? 0 : 1;
    std::printf("%s criterion %d: %s (%.2f s) %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
