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

#ifndef POA_POA_LP_HPP
#define POA_POA_LP_HPP

// Price of anarchy as a linear program.
//
// For a fixed mechanism f the PoA is 1/W*, W* the optimum of
//
//   min_{lambda >= 0, mu}  mu
//   s.t.  w(b+x) - mu w(a+x) + lambda [a f(a+x) - b f(a+x+1)] <= 0
//
// over all tuples (a, x, b) of the index set. Making f a variable (and
// absorbing lambda into it) gives the design program whose optimum is the
// best achievable PoA.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "poa/error.hpp"
#include "poa/lp.hpp"
#include "poa/mechanisms.hpp"
#include "poa/report.hpp"

namespace poa {

inline constexpr double kBindingTol = 1e-7;

// Entries of the index set also satisfy a + x + b <= n so that w(b+x),
// w(a+x) and f(a+x+1) stay inside [0, n+1]. Flip this to drop the cap.
inline constexpr bool kCapIndexSum = true;

inline bool in_index_set(const IndexTuple& t, int n) {
  const int s = t.a + t.x + t.b;
  if (t.a < 0 || t.x < 0 || t.b < 0 || t.a > n || t.x > n || t.b > n) return false;
  if (s < 1) return false;
  if (kCapIndexSum && s > n) return false;
  return t.a * t.x * t.b == 0 || s == n;
}

// Lexicographic in (a, x, b).
inline std::vector<IndexTuple> enumerate_index_set(int n) {
  if (n < 1) throw InvalidParameter("index set needs n >= 1");
  std::vector<IndexTuple> out;
  for (int a = 0; a <= n; ++a) {
    for (int x = 0; x <= n; ++x) {
      for (int b = 0; b <= n; ++b) {
        const IndexTuple t{a, x, b};
        if (in_index_set(t, n)) out.push_back(t);
      }
    }
  }
  return out;
}

namespace detail {

inline void require_dimension(const WelfareBasis& w, int n) {
  if (n < 1) throw InvalidParameter("n must be >= 1");
  if (w.n() != n) throw InvalidParameter("welfare basis has n=" + std::to_string(w.n()) + ", expected " + std::to_string(n));
}

inline void require_dimension(const Mechanism& f, const WelfareBasis& w, int n) {
  require_dimension(w, n);
  if (f.n() != n) throw InvalidParameter("mechanism has n=" + std::to_string(f.n()) + ", expected " + std::to_string(n));
}

// Left-hand side of the fixed-f constraint at (lambda, mu).
inline double dual_constraint(const Mechanism& f, const WelfareBasis& w, const IndexTuple& t, double lambda, double mu) {
  const int ax = t.a + t.x;
  return w(t.b + t.x) - mu * w(ax) + lambda * (t.a * f(ax) - t.b * f(ax + 1));
}

}  // namespace detail

// Variables: [lambda >= 0, mu free].
inline lp::LinearProgram build_poa_dual_lp(const Mechanism& f, const WelfareBasis& w, int n) {
  detail::require_dimension(f, w, n);
  lp::LinearProgram prog;
  prog.add_variable("lambda", 0.0, 0.0);
  prog.add_variable("mu", 1.0, std::nullopt);
  for (const auto& t : enumerate_index_set(n)) {
    const int ax = t.a + t.x;
    prog.add_row({t.a * f(ax) - t.b * f(ax + 1), -w(ax)}, lp::Relation::kLessEqual, -w(t.b + t.x));
  }
  return prog;
}

enum class DualSolver { kEnvelope, kSimplex };

namespace detail {

struct Line {
  double slope;
  double intercept;
};

// min over lambda >= lambda_min of max_k (intercept_k + slope_k lambda).
// Returns (lambda*, right end of the optimal interval).
inline std::pair<double, double> minimize_envelope(std::vector<Line> lines, double lambda_min) {
  std::sort(lines.begin(), lines.end(), [](const Line& p, const Line& q) {
    return p.slope < q.slope || (p.slope == q.slope && p.intercept > q.intercept);
  });
  // Upper hull, slopes increasing.
  std::vector<Line> hull;
  auto cross = [](const Line& p, const Line& q) { return (p.intercept - q.intercept) / (q.slope - p.slope); };
  for (const Line& l : lines) {
    if (!hull.empty() && hull.back().slope == l.slope) continue;  // dominated by larger intercept
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], l) <= cross(hull[hull.size() - 2], hull.back())) {
      hull.pop_back();
    }
    hull.push_back(l);
  }
  std::size_t first_up = 0;
  while (first_up < hull.size() && hull[first_up].slope < 0.0) ++first_up;
  if (first_up == hull.size()) throw SolverError("PoA dual program unbounded: every constraint slope is negative");
  const double inf = std::numeric_limits<double>::infinity();
  double left = first_up == 0 ? lambda_min : std::max(lambda_min, cross(hull[first_up - 1], hull[first_up]));
  double right = left;
  if (hull[first_up].slope == 0.0) {
    const double end = first_up + 1 < hull.size() ? cross(hull[first_up], hull[first_up + 1]) : inf;
    right = std::max(left, end);
  }
  return {left, right};
}

}  // namespace detail

// PoA of a fixed mechanism through the dual program. kEnvelope minimizes the
// piecewise-linear upper envelope in lambda directly; kSimplex solves the LP.
// Debug builds run both and require agreement.
inline PoaReport poa_dual_lp(const Mechanism& f, const WelfareBasis& w, int n, DualSolver solver = DualSolver::kEnvelope) {
  detail::require_dimension(f, w, n);
  if (!f.first_positive()) return degenerate_report(Method::kLp);

  const auto tuples = enumerate_index_set(n);
  double lambda = 0.0;
  std::optional<std::pair<double, double>> range;
  if (solver == DualSolver::kEnvelope) {
    double lambda_min = 0.0;
    std::vector<detail::Line> lines;
    lines.reserve(tuples.size());
    for (const auto& t : tuples) {
      const int ax = t.a + t.x;
      const double c = t.a * f(ax) - t.b * f(ax + 1);
      if (ax == 0) {
        // w(b) - lambda b f(1) <= 0
        lambda_min = std::max(lambda_min, w(t.b) / (t.b * f(1)));
      } else {
        lines.push_back({c / w(ax), w(t.b + t.x) / w(ax)});
      }
    }
    const auto [lo, hi] = detail::minimize_envelope(std::move(lines), lambda_min);
    lambda = lo;
    if (hi > lo) range = std::pair{lo, hi};
  } else {
    const auto sol = lp::solve_lp(build_poa_dual_lp(f, w, n));
    if (sol.status != lp::Status::kOptimal) {
      throw SolverError(std::string("PoA dual program ") + lp::to_string(sol.status));
    }
    lambda = sol.x[0];
  }

  // mu* = smallest mu feasible at lambda*.
  double mu = -std::numeric_limits<double>::infinity();
  for (const auto& t : tuples) {
    const int ax = t.a + t.x;
    if (ax == 0) continue;
    mu = std::max(mu, (w(t.b + t.x) + lambda * (t.a * f(ax) - t.b * f(ax + 1))) / w(ax));
  }

  PoaReport r;
  r.method = Method::kLp;
  r.lambda_star = lambda;
  r.lambda_range = range;
  r.mu_star = mu;
  r.w_star = mu;
  r.poa = 1.0 / mu;
  for (const auto& t : tuples) {
    if (std::abs(detail::dual_constraint(f, w, t, lambda, mu)) <= kBindingTol) r.binding.push_back(t);
  }

#ifndef NDEBUG
  if (solver == DualSolver::kEnvelope) {
    const PoaReport check = poa_dual_lp(f, w, n, DualSolver::kSimplex);
    if (std::abs(check.w_star - r.w_star) > 1e-7 * std::max(1.0, std::abs(r.w_star))) {
      throw SolverError("envelope and simplex disagree on W*");
    }
  }
#endif
  return r;
}

// Variables: [f(1) >= 1, f(2..n) free, mu free].
inline lp::LinearProgram build_design_lp(const WelfareBasis& w, int n) {
  detail::require_dimension(w, n);
  lp::LinearProgram prog;
  for (int j = 1; j <= n; ++j) {
    prog.add_variable("f" + std::to_string(j), 0.0, j == 1 ? std::optional<double>(1.0) : std::nullopt);
  }
  prog.add_variable("mu", 1.0, std::nullopt);
  for (const auto& t : enumerate_index_set(n)) {
    const int ax = t.a + t.x;
    std::vector<double> row(static_cast<std::size_t>(n + 1), 0.0);
    if (ax >= 1 && ax <= n) row[ax - 1] += t.a;
    if (ax + 1 <= n) row[ax] -= t.b;
    row[n] = -w(ax);
    prog.add_row(std::move(row), lp::Relation::kLessEqual, -w(t.b + t.x));
  }
  return prog;
}

struct DesignResult {
  Mechanism mechanism;
  PoaReport report;
};

namespace detail {

inline DesignResult solve_design(const lp::LinearProgram& prog, int n, std::string label) {
  const auto sol = lp::solve_lp(prog);
  if (sol.status != lp::Status::kOptimal) {
    throw SolverError(std::string("design program ") + lp::to_string(sol.status));
  }
  std::vector<double> fv(sol.x.begin(), sol.x.begin() + n);
  DesignResult out{Mechanism(std::move(fv), std::move(label)), PoaReport{}};
  out.report.method = Method::kLp;
  out.report.mu_star = sol.x[n];
  out.report.w_star = sol.x[n];
  out.report.poa = 1.0 / sol.x[n];
  return out;
}

}  // namespace detail

// Mechanism maximizing the PoA over all f in R^n with f(1) >= 1. The optimum
// is generally not unique; the simplex's basic solution is returned.
inline DesignResult design_optimal_mechanism(const WelfareBasis& w, int n) {
  auto out = detail::solve_design(build_design_lp(w, n), n, "optimal");
  const double mu = out.report.mu_star;
  for (const auto& t : enumerate_index_set(n)) {
    // The design row is the fixed-f row at lambda = 1.
    if (std::abs(detail::dual_constraint(out.mechanism, w, t, 1.0, mu)) <= kBindingTol) out.report.binding.push_back(t);
  }
  return out;
}

// Restricted design program over non-increasing f with f >= f_MC, with the
// constraints split by j + l <= n and j + l >= n. Variables as in
// build_design_lp. Requires a submodular basis.
inline lp::LinearProgram build_design_lp_submodular(const WelfareBasis& w, int n) {
  detail::require_dimension(w, n);
  const auto check = check_assumption(w, Assumption::kSubmodular);
  if (!check.holds) {
    throw InvalidParameter("submodular design needs a concave non-decreasing basis; fails at j=" +
                           std::to_string(check.violations.front()));
  }
  lp::LinearProgram prog;
  for (int j = 1; j <= n; ++j) {
    prog.add_variable("f" + std::to_string(j), 0.0, j == 1 ? std::optional<double>(1.0) : std::nullopt);
  }
  prog.add_variable("mu", 1.0, std::nullopt);
  auto row_for = [&](int j, int l, double cj, double cj1) {
    // mu w(j) >= w(l) + cj f(j) - cj1 f(j+1)
    std::vector<double> row(static_cast<std::size_t>(n + 1), 0.0);
    if (j >= 1 && j <= n) row[j - 1] += cj;
    if (j + 1 <= n) row[j] -= cj1;
    row[n] = -w(j);
    prog.add_row(std::move(row), lp::Relation::kLessEqual, -w(l));
  };
  for (int j = 0; j <= n; ++j) {
    for (int l = 0; l <= j; ++l) {
      if (j + l >= 1 && j + l <= n) row_for(j, l, j, l);
      if (j + l >= n) row_for(j, l, n - l, n - j);
    }
  }
  for (int j = 1; j <= n; ++j) {
    std::vector<double> row(static_cast<std::size_t>(n + 1), 0.0);
    row[j - 1] = 1.0;
    prog.add_row(row, lp::Relation::kGreaterEqual, w(j) - w(j - 1));
    // f(j+1) <= f(j), with f(n+1) = 0 at j = n
    std::vector<double> mono(static_cast<std::size_t>(n + 1), 0.0);
    mono[j - 1] = -1.0;
    if (j + 1 <= n) mono[j] = 1.0;
    prog.add_row(std::move(mono), lp::Relation::kLessEqual, 0.0);
  }
  return prog;
}

inline DesignResult design_optimal_mechanism_submodular(const WelfareBasis& w, int n) {
  auto out = detail::solve_design(build_design_lp_submodular(w, n), n, "optimal_submodular");
  const Mechanism& f = out.mechanism;
  const double mu = out.report.mu_star;
  for (int j = 1; j <= n; ++j) {
    for (int l = 0; l <= j; ++l) {
      auto tight = [&](double cj, double cj1) {
        return std::abs(w(l) + cj * f(j) - cj1 * f(j + 1) - mu * w(j)) <= kBindingTol;
      };
      if (j + l >= 1 && j + l <= n && tight(j, l)) out.report.argmax.push_back({l, j, 0});
      if (j + l >= n && tight(n - l, n - j)) out.report.argmax.push_back({l, j, 1});
    }
  }
  return out;
}

}  // namespace poa

#endif  // POA_POA_LP_HPP
