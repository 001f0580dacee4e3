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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "poa/error.hpp"
#include "poa/mechanisms.hpp"
#include "poa/poa_lp.hpp"

namespace poa {
namespace {

// Literal reading of the membership predicate, looped over a wider box.
std::vector<IndexTuple> BruteIndexSet(int n) {
  std::vector<IndexTuple> out;
  for (int a = 0; a <= n; ++a)
    for (int x = 0; x <= n; ++x)
      for (int b = 0; b <= n; ++b) {
        const int s = a + x + b;
        if (s >= 1 && s <= n && (a * x * b == 0 || s == n)) out.push_back({a, x, b});
      }
  return out;
}

// Covering W* by the three-term maximum, written out independently.
double CoveringWStar(const Mechanism& f, int n) {
  double m = 0.0;
  for (int j = 1; j <= n - 1; ++j) {
    m = std::max({m, (j + 1) * f(j + 1) - 1.0, j * f(j) - f(j + 1), j * f(j + 1)});
  }
  return 1.0 + m;
}

TEST(IndexSet, SmallCases) {
  const std::vector<IndexTuple> n1 = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
  EXPECT_EQ(enumerate_index_set(1), n1);
  EXPECT_EQ(enumerate_index_set(2).size(), 9u);
}

TEST(IndexSet, MatchesBruteForceAndCount) {
  for (int n = 1; n <= 25; ++n) {
    const auto got = enumerate_index_set(n);
    EXPECT_EQ(got, BruteIndexSet(n)) << n;
    // Tuples with a zero entry and sum <= n: C(n+3, 3) - 1 - C(n, 3) (all
    // positive). Tuples with sum n and all entries positive: C(n-1, 2).
    auto c3 = [](long k) { return k < 3 ? 0 : k * (k - 1) * (k - 2) / 6; };
    auto c2 = [](long k) { return k < 2 ? 0 : k * (k - 1) / 2; };
    const long with_zero = c3(n + 3) - 1 - c3(n);
    EXPECT_EQ(static_cast<long>(got.size()), with_zero + c2(n - 1)) << n;
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    for (const auto& t : got) EXPECT_TRUE(in_index_set(t, n));
  }
  EXPECT_THROW(enumerate_index_set(0), InvalidParameter);
}

TEST(PoaDualLp, CoveringShapleyN2) {
  const auto w = covering_basis(2);
  const auto r = poa_dual_lp(shapley_value(w), w, 2);
  EXPECT_NEAR(r.poa, 2.0 / 3, 1e-12);
  EXPECT_NEAR(r.w_star, 1.5, 1e-12);
  EXPECT_EQ(r.method, Method::kLp);
  EXPECT_NEAR(poa_dual_lp(shapley_value(w).scaled(2.0), w, 2).poa, 2.0 / 3, 1e-12);
}

TEST(PoaDualLp, VehicleShapley) {
  const auto w = vehicle_target_basis(0.8, 10);
  EXPECT_NEAR(poa_dual_lp(shapley_value(w), w, 10).poa, 0.568, 0.0005);
  EXPECT_NEAR(poa_dual_lp(marginal_contribution(w), w, 10).poa, 0.556, 0.0005);
}

TEST(PoaDualLp, Degenerate) {
  const auto w = covering_basis(3);
  const auto r = poa_dual_lp(Mechanism({0.0, 1.0, 1.0}), w, 3);
  EXPECT_EQ(r.poa, 0.0);
  EXPECT_TRUE(std::isinf(r.w_star));
  EXPECT_TRUE(r.degenerate());
  EXPECT_EQ(poa_dual_lp(Mechanism({-1.0, 1.0, 1.0}), w, 3).poa, 0.0);
}

TEST(PoaDualLp, DimensionMismatch) {
  EXPECT_THROW(poa_dual_lp(shapley_value(covering_basis(3)), covering_basis(4), 4), InvalidParameter);
}

TEST(PoaDualLp, EnvelopeMatchesSimplex) {
  std::vector<std::pair<Mechanism, WelfareBasis>> cases;
  for (int n : {2, 5, 12}) {
    for (const auto& w : {covering_basis(n), power_basis(0.5, n), power_basis(1.7, n), vehicle_target_basis(0.3, n)}) {
      cases.push_back({shapley_value(w), w});
      cases.push_back({marginal_contribution(w), w});
    }
    cases.push_back({gairing_optimal_covering(n), covering_basis(n)});
    cases.push_back({Mechanism(std::vector<double>(n, 1.0)), power_basis(0.5, n)});
  }
  for (const auto& [f, w] : cases) {
    const auto a = poa_dual_lp(f, w, w.n(), DualSolver::kEnvelope);
    const auto b = poa_dual_lp(f, w, w.n(), DualSolver::kSimplex);
    EXPECT_NEAR(a.w_star, b.w_star, 1e-9) << w.label() << " " << f.label() << " n=" << w.n();
  }
}

TEST(PoaDualLp, BindingTuplesAreTight) {
  for (int n : {3, 8}) {
    const auto w = vehicle_target_basis(0.6, n);
    const auto f = shapley_value(w);
    const auto r = poa_dual_lp(f, w, n);
    ASSERT_FALSE(r.binding.empty());
    for (const auto& t : r.binding) {
      const int ax = t.a + t.x;
      const double lhs = w(t.b + t.x) - r.mu_star * w(ax) + *r.lambda_star * (t.a * f(ax) - t.b * f(ax + 1));
      EXPECT_LE(std::abs(lhs), 1e-7);
    }
  }
}

TEST(PoaDualLp, ScaleInvariance) {
  const auto w = power_basis(0.4, 9);
  const auto f = shapley_value(w);
  const double base = poa_dual_lp(f, w, 9).poa;
  for (double c : {0.1, 2.0, 10.0}) EXPECT_NEAR(poa_dual_lp(f.scaled(c), w, 9).poa, base, 1e-7) << c;
}

TEST(PoaDualLp, LambdaIsOneUnderSubmodularHypotheses) {
  for (int n = 2; n <= 12; ++n) {
    for (double d : {0.0, 0.3, 0.7, 1.0}) {
      const auto w = power_basis(d, n);
      for (const auto& f : {shapley_value(w), marginal_contribution(w)}) {
        const auto r = poa_dual_lp(f, w, n);
        ASSERT_TRUE(r.lambda_star.has_value());
        const double lo = *r.lambda_star;
        const double hi = r.lambda_range ? r.lambda_range->second : lo;
        EXPECT_LE(lo, 1.0 + 1e-9) << "d=" << d << " n=" << n << " " << f.label();
        EXPECT_GE(hi, 1.0 - 1e-9) << "d=" << d << " n=" << n << " " << f.label();
      }
    }
  }
}

TEST(PoaDualLp, CoveringAgreesWithThreeTermMaximum) {
  for (int n = 2; n <= 20; ++n) {
    const auto w = covering_basis(n);
    for (const auto& f : {shapley_value(w), marginal_contribution(w), gairing_optimal_covering(n)}) {
      EXPECT_NEAR(poa_dual_lp(f, w, n).w_star, CoveringWStar(f, n), 1e-9) << f.label() << " n=" << n;
    }
  }
}

TEST(Design, CoveringN2MatchesGairing) {
  const auto w = covering_basis(2);
  const auto d = design_optimal_mechanism(w, 2);
  EXPECT_NEAR(d.report.poa, 2.0 / 3, 1e-9);
  EXPECT_EQ(d.mechanism.label(), "optimal");
  EXPECT_GE(d.mechanism(1), 1.0 - 1e-12);
  EXPECT_NEAR(d.report.poa, 1.0 / CoveringWStar(gairing_optimal_covering(2), 2), 1e-9);
}

TEST(Design, CoveringMatchesGairingAcrossN) {
  for (int n = 2; n <= 20; ++n) {
    const auto w = covering_basis(n);
    EXPECT_NEAR(design_optimal_mechanism(w, n).report.poa, 1.0 / CoveringWStar(gairing_optimal_covering(n), n), 1e-6) << n;
  }
}

TEST(Design, VehicleAndSupermodular) {
  const auto w = vehicle_target_basis(0.8, 10);
  const auto d = design_optimal_mechanism(w, 10);
  EXPECT_NEAR(d.report.poa, 0.688, 0.0005);
  // The designed mechanism, evaluated on its own, reaches the design value.
  EXPECT_NEAR(poa_dual_lp(d.mechanism, w, 10).poa, d.report.poa, 1e-7);
  EXPECT_NEAR(design_optimal_mechanism(power_basis(2.0, 5), 5).report.poa, 0.2, 1e-9);
}

TEST(Design, BindingRowsAreTight) {
  const auto w = vehicle_target_basis(0.5, 6);
  const auto d = design_optimal_mechanism(w, 6);
  ASSERT_FALSE(d.report.binding.empty());
  for (const auto& t : d.report.binding) {
    const int ax = t.a + t.x;
    const double lhs = w(t.b + t.x) - d.report.mu_star * w(ax) + t.a * d.mechanism(ax) - t.b * d.mechanism(ax + 1);
    EXPECT_LE(std::abs(lhs), 1e-7);
  }
}

TEST(Design, DominatesNamedMechanisms) {
  for (int n : {2, 4, 8}) {
    for (double d : {0.0, 0.5, 1.0, 1.5}) {
      const auto w = power_basis(d, n);
      const double opt = design_optimal_mechanism(w, n).report.poa;
      EXPECT_GE(opt, poa_dual_lp(shapley_value(w), w, n).poa - 1e-7);
      EXPECT_GE(opt, poa_dual_lp(marginal_contribution(w), w, n).poa - 1e-7);
    }
  }
}

TEST(Design, BadlyScaledSupermodularRoutesAgree) {
  for (double d : {1.8, 1.9, 2.0}) {
    for (int n : {15, 19, 20}) {
      const auto w = power_basis(d, n);
      const auto prog = build_design_lp(w, n);
      lp::Options primal, dual;
      primal.route = lp::Route::kPrimal;
      dual.route = lp::Route::kDual;
      const auto a = lp::solve_lp(prog, primal);
      const auto b = lp::solve_lp(prog, dual);
      ASSERT_EQ(b.status, lp::Status::kOptimal);
      EXPECT_NEAR(a.value, b.value, 1e-7 * a.value) << d << " " << n;
      EXPECT_LE(lp::max_violation(prog, b.x), 1e-7);
      EXPECT_NEAR(design_optimal_mechanism(w, n).report.poa, n / std::pow(n, d), 1e-9);
    }
  }
}

TEST(DesignSubmodular, Examples) {
  EXPECT_NEAR(design_optimal_mechanism_submodular(covering_basis(2), 2).report.poa, 2.0 / 3, 1e-9);
  const auto lin = design_optimal_mechanism_submodular(power_basis(1.0, 6), 6);
  EXPECT_NEAR(lin.report.poa, 1.0, 1e-9);
  const auto w = vehicle_target_basis(0.8, 10);
  const double sub = design_optimal_mechanism_submodular(w, 10).report.poa;
  const double sv = poa_dual_lp(shapley_value(w), w, 10).poa;
  const double mc = poa_dual_lp(marginal_contribution(w), w, 10).poa;
  EXPECT_GE(sub, std::max(sv, mc) - 1e-7);
  EXPECT_LE(sub, design_optimal_mechanism(w, 10).report.poa + 1e-6);
  EXPECT_GE(sub, 0.556);
  EXPECT_LE(sub, 0.688 + 0.0005);
}

TEST(DesignSubmodular, MechanismIsAdmissible) {
  const auto w = power_basis(0.5, 8);
  const auto d = design_optimal_mechanism_submodular(w, 8);
  EXPECT_GE(d.mechanism(1), 1.0 - 1e-9);
  EXPECT_TRUE(d.mechanism.non_increasing(1e-9));
  EXPECT_TRUE(dominates_marginal(d.mechanism, w, 1e-9));
  EXPECT_FALSE(d.report.argmax.empty());
}

TEST(DesignSubmodular, RejectsSupermodularBasis) {
  EXPECT_THROW(design_optimal_mechanism_submodular(power_basis(2.0, 4), 4), InvalidParameter);
}

}  // namespace
}  // namespace poa
