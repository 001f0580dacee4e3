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

#ifndef POA_LP_HPP
#define POA_LP_HPP

// Dense two-phase simplex for the small programs used by the PoA machinery.
//
// A program is "minimize c.x subject to rows (<=, >=, =) with per-variable
// lower bounds (free, or x >= L)". Internally it is brought to standard form
// (x >= 0 after shifting bounds and splitting free variables) and solved on a
// dense tableau. Programs with many more rows than columns are solved through
// their dual, whose tableau has one row per primal column; the primal point
// is then read off the dual's row multipliers.
//
// Pricing is Dantzig's rule; after a run of degenerate pivots the solver
// switches to Bland's rule until the objective moves again, which rules out
// cycling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "poa/error.hpp"

namespace poa::lp {

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kOptimalityTol = 1e-9;
inline constexpr double kRelativePivotTol = 1e-7;

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct Row {
  std::vector<double> coeffs;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  std::vector<double> objective;                     // minimized
  std::vector<std::optional<double>> lower_bounds;   // nullopt: free
  std::vector<std::string> names;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }

  int add_variable(std::string name, double cost, std::optional<double> lower) {
    objective.push_back(cost);
    lower_bounds.push_back(lower);
    names.push_back(std::move(name));
    return num_vars() - 1;
  }

  void add_row(std::vector<double> coeffs, Relation rel, double rhs) {
    rows.push_back(Row{std::move(coeffs), rel, rhs});
  }

  void validate() const {
    const auto nv = objective.size();
    if (lower_bounds.size() != nv) throw InvalidParameter("lower_bounds size mismatch");
    for (double c : objective) {
      if (!std::isfinite(c)) throw InvalidParameter("non-finite objective coefficient");
    }
    for (const auto& lb : lower_bounds) {
      if (lb && !std::isfinite(*lb)) throw InvalidParameter("non-finite lower bound");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].coeffs.size() != nv) {
        throw InvalidParameter("row " + std::to_string(i) + " has wrong width");
      }
      if (!std::isfinite(rows[i].rhs)) throw InvalidParameter("non-finite rhs in row " + std::to_string(i));
      for (double a : rows[i].coeffs) {
        if (!std::isfinite(a)) throw InvalidParameter("non-finite coefficient in row " + std::to_string(i));
      }
    }
  }
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
  }
  return "?";
}

enum class Route { kAuto, kPrimal, kDual };

struct Options {
  Route route = Route::kAuto;
  // kAuto picks the dual route when rows > dual_ratio * standard columns.
  double dual_ratio = 3.0;
};

struct Solution {
  Status status = Status::kInfeasible;
  double value = 0.0;
  std::vector<double> x;      // original variables
  std::vector<double> duals;  // one per row; d(value)/d(rhs). Primal route only.
  Route route = Route::kPrimal;
  long pivots = 0;
};

namespace detail {

// min c.x, rows, x >= 0
struct StandardForm {
  std::vector<double> cost;
  std::vector<Row> rows;
  double cost_offset = 0.0;
  // original variable k = shift[k] + x[plus[k]] - (minus[k] >= 0 ? x[minus[k]] : 0)
  std::vector<int> plus, minus;
  std::vector<double> shift;
};

inline StandardForm standardize(const LinearProgram& lp) {
  StandardForm sf;
  const int nv = lp.num_vars();
  sf.plus.assign(nv, -1);
  sf.minus.assign(nv, -1);
  sf.shift.assign(nv, 0.0);
  int cols = 0;
  for (int k = 0; k < nv; ++k) {
    sf.plus[k] = cols++;
    if (lp.lower_bounds[k]) {
      sf.shift[k] = *lp.lower_bounds[k];
    } else {
      sf.minus[k] = cols++;
    }
  }
  sf.cost.assign(cols, 0.0);
  for (int k = 0; k < nv; ++k) {
    sf.cost[sf.plus[k]] = lp.objective[k];
    if (sf.minus[k] >= 0) sf.cost[sf.minus[k]] = -lp.objective[k];
    sf.cost_offset += lp.objective[k] * sf.shift[k];
  }
  sf.rows.reserve(lp.rows.size());
  for (const auto& r : lp.rows) {
    Row out{std::vector<double>(cols, 0.0), r.relation, r.rhs};
    for (int k = 0; k < nv; ++k) {
      const double a = r.coeffs[k];
      if (a == 0.0) continue;
      out.coeffs[sf.plus[k]] = a;
      if (sf.minus[k] >= 0) out.coeffs[sf.minus[k]] = -a;
      out.rhs -= a * sf.shift[k];
    }
    sf.rows.push_back(std::move(out));
  }
  return sf;
}

struct StandardResult {
  Status status = Status::kInfeasible;
  double value = 0.0;  // excludes cost_offset
  std::vector<double> x;
  std::vector<double> duals;
  long pivots = 0;
};

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), a_(static_cast<std::size_t>(rows) * (cols + 1), 0.0),
                                d_(cols + 1, 0.0), basis_(rows, -1) {}

  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * (n_ + 1) + j]; }
  double& rhs(int i) { return at(i, n_); }
  double rhs(int i) const { return at(i, n_); }
  std::vector<int>& basis() { return basis_; }
  const std::vector<double>& reduced() const { return d_; }
  long pivots() const { return pivots_; }

  // Reduced costs d = c - c_B B^-1 A from scratch; d_[n] holds -objective.
  void price(const std::vector<double>& cost) {
    for (int j = 0; j < n_; ++j) d_[j] = cost[j];
    d_[n_] = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &a_[static_cast<std::size_t>(i) * (n_ + 1)];
      for (int j = 0; j <= n_; ++j) d_[j] -= cb * row[j];
    }
  }

  void pivot(int r, int c) {
    double* prow = &a_[static_cast<std::size_t>(r) * (n_ + 1)];
    const double inv = 1.0 / prow[c];
    for (int j = 0; j <= n_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &a_[static_cast<std::size_t>(i) * (n_ + 1)];
      const double factor = row[c];
      if (factor == 0.0) continue;
      for (int j = 0; j <= n_; ++j) row[j] -= factor * prow[j];
      row[c] = 0.0;
    }
    const double factor = d_[c];
    if (factor != 0.0) {
      for (int j = 0; j <= n_; ++j) d_[j] -= factor * prow[j];
      d_[c] = 0.0;
    }
    basis_[r] = c;
    ++pivots_;
  }

  // Runs simplex iterations on the current reduced-cost row. Columns with
  // allowed[j] == false never enter. Returns false on unboundedness.
  bool optimize(const std::vector<char>& allowed) {
    const long cap = 200L * (m_ + n_) + 10000;
    int degenerate_run = 0;
    bool bland = false;
    std::vector<char> skipped(n_, 0);
    for (long it = 0; it < cap; ++it) {
      int enter = -1;
      double best = -kOptimalityTol;
      for (int j = 0; j < n_; ++j) {
        if (!allowed[j] || skipped[j] || d_[j] >= -kOptimalityTol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (d_[j] < best) {
          best = d_[j];
          enter = j;
        }
      }
      if (enter < 0) {
        if (std::find(skipped.begin(), skipped.end(), 1) == skipped.end()) return true;
        throw SolverError("simplex stalled on numerically tiny pivots");
      }

      double col_max = 0.0;
      for (int i = 0; i < m_; ++i) col_max = std::max(col_max, at(i, enter));
      if (col_max <= kFeasibilityTol) return false;
      const double piv_tol = std::max(kFeasibilityTol, kRelativePivotTol * col_max);

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double aij = at(i, enter);
        if (aij <= piv_tol) continue;
        const double ratio = std::max(rhs(i), 0.0) / aij;
        if (leave < 0 || ratio < best_ratio - 1e-12) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + 1e-12 &&
                   (bland ? basis_[i] < basis_[leave] : aij > at(leave, enter))) {
          leave = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
      // A small positive entry in a row with lower ratio would be violated by
      // the step; leave the column out until the basis changes.
      bool blocked = false;
      for (int i = 0; i < m_ && leave >= 0; ++i) {
        const double aij = at(i, enter);
        if (aij > kFeasibilityTol && aij <= piv_tol && std::max(rhs(i), 0.0) < best_ratio * aij - kFeasibilityTol) blocked = true;
      }
      if (blocked || leave < 0) {
        skipped[enter] = 1;
        continue;
      }

      if (best_ratio <= kFeasibilityTol) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      pivot(leave, enter);
      std::fill(skipped.begin(), skipped.end(), 0);
    }
    throw SolverError("simplex iteration cap exceeded");
  }

 private:
  int m_, n_;
  std::vector<double> a_;
  std::vector<double> d_;
  std::vector<int> basis_;
  long pivots_ = 0;
};

inline StandardResult solve_standard(const std::vector<double>& cost, const std::vector<Row>& rows) {
  const int m = static_cast<int>(rows.size());
  const int nx = static_cast<int>(cost.size());
  StandardResult out;

  // Column layout: [structural | one slack/surplus per inequality row | artificials].
  std::vector<int> slack_col(m, -1);
  std::vector<double> row_sign(m, 1.0);
  int cols = nx;
  for (int i = 0; i < m; ++i) {
    if (rows[i].relation != Relation::kEqual) slack_col[i] = cols++;
    if (rows[i].rhs < 0.0) row_sign[i] = -1.0;
  }
  // Rows whose (sign-adjusted) slack has coefficient +1 start with it basic.
  std::vector<int> identity_col(m, -1);
  std::vector<int> art_col(m, -1);
  for (int i = 0; i < m; ++i) {
    const double slack_coef = rows[i].relation == Relation::kLessEqual    ? 1.0
                              : rows[i].relation == Relation::kGreaterEqual ? -1.0
                                                                            : 0.0;
    if (slack_coef * row_sign[i] > 0.0) {
      identity_col[i] = slack_col[i];
    } else {
      art_col[i] = cols++;
      identity_col[i] = art_col[i];
    }
  }
  const int first_art = cols - static_cast<int>(std::count_if(art_col.begin(), art_col.end(), [](int c) { return c >= 0; }));

  Tableau t(m, cols);
  for (int i = 0; i < m; ++i) {
    const double s = row_sign[i];
    for (int j = 0; j < nx; ++j) t.at(i, j) = s * rows[i].coeffs[j];
    if (slack_col[i] >= 0) {
      t.at(i, slack_col[i]) = s * (rows[i].relation == Relation::kLessEqual ? 1.0 : -1.0);
    }
    if (art_col[i] >= 0) t.at(i, art_col[i]) = 1.0;
    t.rhs(i) = s * rows[i].rhs;
    t.basis()[i] = identity_col[i];
  }

  std::vector<char> allowed(cols, 1);
  if (first_art < cols) {
    std::vector<double> phase1(cols, 0.0);
    for (int j = first_art; j < cols; ++j) phase1[j] = 1.0;
    t.price(phase1);
    t.optimize(allowed);  // bounded below by zero
    double scale = 1.0;
    for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));
    if (-t.reduced()[cols] > kFeasibilityTol * scale) {
      out.status = Status::kInfeasible;
      out.pivots = t.pivots();
      return out;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (t.basis()[i] < first_art) continue;
      int best = -1;
      double mag = 1e-9;
      for (int j = 0; j < first_art; ++j) {
        if (std::abs(t.at(i, j)) > mag) {
          mag = std::abs(t.at(i, j));
          best = j;
        }
      }
      if (best >= 0) t.pivot(i, best);
    }
    for (int j = first_art; j < cols; ++j) allowed[j] = 0;
  }

  std::vector<double> phase2(cols, 0.0);
  std::copy(cost.begin(), cost.end(), phase2.begin());
  t.price(phase2);
  if (!t.optimize(allowed)) {
    out.status = Status::kUnbounded;
    out.pivots = t.pivots();
    return out;
  }

  out.status = Status::kOptimal;
  out.pivots = t.pivots();
  out.x.assign(nx, 0.0);
  for (int i = 0; i < m; ++i) {
    const int b = t.basis()[i];
    if (b < nx) out.x[b] = std::max(t.rhs(i), 0.0);
  }
  out.value = 0.0;
  for (int j = 0; j < nx; ++j) out.value += cost[j] * out.x[j];
  // y_i (sign-adjusted row) = c_B B^-1 e_i = cost(identity col) - d(identity col); both costs are 0.
  out.duals.assign(m, 0.0);
  for (int i = 0; i < m; ++i) out.duals[i] = -t.reduced()[identity_col[i]] * row_sign[i];
  return out;
}

inline std::vector<double> unstandardize(const StandardForm& sf, const std::vector<double>& xs) {
  std::vector<double> x(sf.plus.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = sf.shift[k] + xs[sf.plus[k]] - (sf.minus[k] >= 0 ? xs[sf.minus[k]] : 0.0);
  }
  return x;
}

// Dual of  min c.x, rows, x >= 0  as  min d.v, M v <= c  with v >= 0 for
// inequality rows and v free for equalities. Row multiplier y_i = s_i v_i with
// s_i = -1 for <=, +1 for >=.
inline LinearProgram dual_program(const std::vector<double>& cost, const std::vector<Row>& rows) {
  LinearProgram d;
  const int m = static_cast<int>(rows.size());
  const int nx = static_cast<int>(cost.size());
  std::vector<double> sign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    sign[i] = rows[i].relation == Relation::kLessEqual ? -1.0 : 1.0;
    const bool free = rows[i].relation == Relation::kEqual;
    d.add_variable("y" + std::to_string(i), -rows[i].rhs * sign[i], free ? std::nullopt : std::optional<double>(0.0));
  }
  d.rows.assign(nx, Row{std::vector<double>(m, 0.0), Relation::kLessEqual, 0.0});
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < nx; ++k) {
      const double a = rows[i].coeffs[k];
      if (a != 0.0) d.rows[k].coeffs[i] = sign[i] * a;
    }
  }
  for (int k = 0; k < nx; ++k) d.rows[k].rhs = cost[k];
  return d;
}

inline StandardResult solve_standard_via_dual(const std::vector<double>& cost, const std::vector<Row>& rows) {
  LinearProgram d = dual_program(cost, rows);
  StandardForm dsf = standardize(d);
  StandardResult dres = solve_standard(dsf.cost, dsf.rows);
  StandardResult out;
  out.pivots = dres.pivots;
  if (dres.status == Status::kUnbounded) {
    out.status = Status::kInfeasible;
    return out;
  }
  if (dres.status == Status::kInfeasible) {
    // Primal is infeasible or unbounded; the zero-cost dual tells which.
    LinearProgram d0 = dual_program(std::vector<double>(cost.size(), 0.0), rows);
    StandardForm d0sf = standardize(d0);
    StandardResult d0res = solve_standard(d0sf.cost, d0sf.rows);
    out.pivots += d0res.pivots;
    out.status = d0res.status == Status::kUnbounded ? Status::kInfeasible : Status::kUnbounded;
    return out;
  }
  out.status = Status::kOptimal;
  out.x.assign(cost.size(), 0.0);
  for (std::size_t k = 0; k < cost.size(); ++k) out.x[k] = std::max(-dres.duals[k], 0.0);
  out.value = 0.0;
  for (std::size_t k = 0; k < cost.size(); ++k) out.value += cost[k] * out.x[k];
  return out;
}

}  // namespace detail

inline Solution solve_lp(const LinearProgram& lp, const Options& opts = {}) {
  lp.validate();
  const detail::StandardForm sf = detail::standardize(lp);
  Route route = opts.route;
  if (route == Route::kAuto) {
    route = static_cast<double>(sf.rows.size()) > opts.dual_ratio * static_cast<double>(sf.cost.size())
                ? Route::kDual
                : Route::kPrimal;
  }
  const detail::StandardResult res = route == Route::kDual ? detail::solve_standard_via_dual(sf.cost, sf.rows)
                                                           : detail::solve_standard(sf.cost, sf.rows);
  Solution out;
  out.status = res.status;
  out.route = route;
  out.pivots = res.pivots;
  if (res.status != Status::kOptimal) return out;
  out.x = detail::unstandardize(sf, res.x);
  out.value = 0.0;
  for (int k = 0; k < lp.num_vars(); ++k) out.value += lp.objective[k] * out.x[k];
  if (route == Route::kPrimal) out.duals = res.duals;
  return out;
}

// Largest violation of any row or bound at x (0 when feasible).
inline double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& r : lp.rows) {
    double lhs = 0.0;
    for (int k = 0; k < lp.num_vars(); ++k) lhs += r.coeffs[k] * x[k];
    double v = 0.0;
    switch (r.relation) {
      case Relation::kLessEqual: v = lhs - r.rhs; break;
      case Relation::kGreaterEqual: v = r.rhs - lhs; break;
      case Relation::kEqual: v = std::abs(lhs - r.rhs); break;
    }
    worst = std::max(worst, v);
  }
  for (int k = 0; k < lp.num_vars(); ++k) {
    if (lp.lower_bounds[k]) worst = std::max(worst, *lp.lower_bounds[k] - x[k]);
  }
  return worst;
}

// Plain-text dump, one line per row:
//   # vars: name[lb] ...       (lb is "free" or the numeric lower bound)
//   min: c_1 ... c_k
//   r<i>: a_1 ... a_k <op> rhs  (op is one of <=, >=, =)
inline std::string dump(const LinearProgram& lp) {
  std::ostringstream os;
  os.precision(17);
  os << "# vars:";
  for (int k = 0; k < lp.num_vars(); ++k) {
    os << ' ' << (k < static_cast<int>(lp.names.size()) ? lp.names[k] : "x" + std::to_string(k)) << '[';
    if (lp.lower_bounds[k]) os << *lp.lower_bounds[k]; else os << "free";
    os << ']';
  }
  os << "\nmin:";
  for (double c : lp.objective) os << ' ' << c;
  os << '\n';
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const auto& r = lp.rows[i];
    os << 'r' << i << ':';
    for (double a : r.coeffs) os << ' ' << a;
    os << (r.relation == Relation::kLessEqual ? " <= " : r.relation == Relation::kGreaterEqual ? " >= " : " = ")
       << r.rhs << '\n';
  }
  return os.str();
}

}  // namespace poa::lp

#endif  // POA_LP_HPP
