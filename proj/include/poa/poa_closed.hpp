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

#ifndef POA_POA_CLOSED_HPP
#define POA_POA_CLOSED_HPP

// Closed-form price of anarchy for the three welfare classes, plus the
// curvature-based approximation ratio used as a baseline. Each function
// checks the hypotheses its formula needs and throws PreconditionError
// otherwise. All maxima are plain exhaustive scans.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "poa/error.hpp"
#include "poa/mechanisms.hpp"
#include "poa/report.hpp"

namespace poa {

// Slack for mechanism-side hypotheses (f(1) = 1, monotonicity, f >= f_MC).
// Looser than kShapeTolerance because designed mechanisms come out of an LP.
inline constexpr double kPreconditionTol = 1e-9;

namespace detail {

inline void require_basis(const WelfareBasis& w, int n, Assumption kind, const char* what) {
  if (w.n() != n) throw InvalidParameter("welfare basis has n=" + std::to_string(w.n()) + ", expected " + std::to_string(n));
  const auto c = check_assumption(w, kind);
  if (!c.holds) throw PreconditionError(what, c.violations.front());
}

inline void require_unit_first(const Mechanism& f) {
  if (std::abs(f(1) - 1.0) > kPreconditionTol) throw PreconditionError("f(1) = 1", 1);
}

inline void require_non_increasing(const Mechanism& f) {
  for (int j = 1; j < f.n(); ++j) {
    if (f(j + 1) > f(j) + kPreconditionTol) throw PreconditionError("f non-increasing", j);
  }
}

inline void require_non_negative(const Mechanism& f) {
  for (int j = 1; j <= f.n(); ++j) {
    if (f(j) < -kPreconditionTol) throw PreconditionError("f >= 0", j);
  }
}

// Collects candidates; the maximum and every candidate within a relative
// 1e-9 of it are reported.
class ArgmaxScan {
 public:
  void offer(double value, ArgmaxTerm where) { candidates_.push_back({value, where}); }

  bool empty() const { return candidates_.empty(); }

  double value() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : candidates_) best = std::max(best, c.value);
    return best;
  }

  std::vector<ArgmaxTerm> where() const {
    const double best = value();
    const double tol = 1e-9 * std::max(1.0, std::abs(best));
    std::vector<ArgmaxTerm> out;
    for (const auto& c : candidates_) {
      if (c.value >= best - tol) out.push_back(c.where);
    }
    return out;
  }

 private:
  struct Candidate {
    double value;
    ArgmaxTerm where;
  };
  std::vector<Candidate> candidates_;
};

inline PoaReport closed_report(double w_star, std::vector<ArgmaxTerm> argmax, Method m) {
  PoaReport r;
  r.method = m;
  r.w_star = w_star;
  r.mu_star = w_star;
  r.poa = 1.0 / w_star;
  r.argmax = std::move(argmax);
  return r;
}

}  // namespace detail

// beta(j) = (j/(j+1)) w(j+1)/w(j); beta(n) = 0 through w(n+1) = 0.
struct BetaProfile {
  std::vector<double> values;  // values[j-1] = beta(j)
  double operator()(int j) const { return values.at(static_cast<std::size_t>(j - 1)); }
};

inline BetaProfile beta_profile(const WelfareBasis& w) {
  BetaProfile b;
  b.values.resize(static_cast<std::size_t>(w.n()));
  for (int j = 1; j <= w.n(); ++j) {
    b.values[j - 1] = (static_cast<double>(j) / (j + 1)) * (w(j + 1) / w(j));
  }
  return b;
}

// Submodular welfare, f(1) = 1, f non-increasing, f >= f_MC:
//   W* = max_{1 <= l <= j <= n} w(l)/w(j) + min(j, n-l) f(j)/w(j) - min(l, n-j) f(j+1)/w(j)
inline PoaReport poa_submodular(const Mechanism& f, const WelfareBasis& w, int n) {
  detail::require_basis(w, n, Assumption::kSubmodular, "concave non-decreasing w with w(1) = 1");
  if (f.n() != n) throw InvalidParameter("mechanism dimension mismatch");
  detail::require_unit_first(f);
  detail::require_non_increasing(f);
  for (int j = 1; j <= n; ++j) {
    if (f(j) < w(j) - w(j - 1) - kPreconditionTol) throw PreconditionError("f >= f_MC", j);
  }
  detail::ArgmaxScan scan;
  for (int j = 1; j <= n; ++j) {
    for (int l = 1; l <= j; ++l) {
      const double v = w(l) / w(j) + std::min(j, n - l) * f(j) / w(j) - std::min(l, n - j) * f(j + 1) / w(j);
      scan.offer(v, {l, j, 0});
    }
  }
  return detail::closed_report(scan.value(), scan.where(), Method::kClosedFormSubmodular);
}

// Shapley value on submodular welfare:
//   W*_SV = max_{l <= j} w(l)/w(j) + min(j, n-l)/j - min(l, n-j) w(j+1)/((j+1) w(j))
inline PoaReport poa_shapley_submodular(const WelfareBasis& w, int n) {
  detail::require_basis(w, n, Assumption::kSubmodular, "concave non-decreasing w with w(1) = 1");
  detail::ArgmaxScan scan;
  for (int j = 1; j <= n; ++j) {
    for (int l = 1; l <= j; ++l) {
      const double v = w(l) / w(j) + static_cast<double>(std::min(j, n - l)) / j -
                       std::min(l, n - j) * w(j + 1) / ((j + 1) * w(j));
      scan.offer(v, {l, j, 0});
    }
  }
  return detail::closed_report(scan.value(), scan.where(), Method::kClosedFormSubmodular);
}

// Same quantity written through beta:
//   W*_SV = 1 + max_{l <= j} w(l)/w(j) - (1/j) [max(j+l-n, 0) + min(l, n-j) beta(j)]
inline PoaReport poa_shapley_reformulated(const WelfareBasis& w, int n) {
  detail::require_basis(w, n, Assumption::kSubmodular, "concave non-decreasing w with w(1) = 1");
  const BetaProfile beta = beta_profile(w);
  detail::ArgmaxScan scan;
  for (int j = 1; j <= n; ++j) {
    for (int l = 1; l <= j; ++l) {
      const double v = w(l) / w(j) - (std::max(j + l - n, 0) + std::min(l, n - j) * beta(j)) / j;
      scan.offer(v, {l, j, 0});
    }
  }
  return detail::closed_report(1.0 + scan.value(), scan.where(), Method::kClosedFormSubmodular);
}

// Marginal contribution on submodular welfare:
//   W*_MC = 1 + max_j min(j, n-j) [2 w(j) - w(j-1) - w(j+1)] / w(j)
inline PoaReport poa_marginal_submodular(const WelfareBasis& w, int n) {
  detail::require_basis(w, n, Assumption::kSubmodular, "concave non-decreasing w with w(1) = 1");
  detail::ArgmaxScan scan;
  for (int j = 1; j <= n; ++j) {
    const double v = std::min(j, n - j) * (2.0 * w(j) - w(j - 1) - w(j + 1)) / w(j);
    scan.offer(v, {-1, j, 0});
  }
  return detail::closed_report(1.0 + scan.value(), scan.where(), Method::kClosedFormSubmodular);
}

// Set covering (w = 1), f >= 0, f(1) = 1:
//   W* = 1 + max_{j in [n-1]} {(j+1) f(j+1) - 1, j f(j) - f(j+1), j f(j+1)}
// With n = 1 the maximum is empty and W* = 1.
inline PoaReport poa_covering(const Mechanism& f, int n) {
  if (f.n() != n) throw InvalidParameter("mechanism dimension mismatch");
  detail::require_non_negative(f);
  detail::require_unit_first(f);
  detail::ArgmaxScan scan;
  for (int j = 1; j <= n - 1; ++j) {
    scan.offer((j + 1) * f(j + 1) - 1.0, {-1, j, 0});
    scan.offer(j * f(j) - f(j + 1), {-1, j, 1});
    scan.offer(j * f(j + 1), {-1, j, 2});
  }
  const double w_star = 1.0 + (scan.empty() ? 0.0 : scan.value());
  return detail::closed_report(w_star, scan.where(), Method::kClosedFormCovering);
}

// Non-increasing covering mechanisms:
//   W* = 1 + max{ max_{j in [n-1]} j f(j) - f(j+1), (n-1) f(n) }
inline PoaReport poa_covering_nonincreasing(const Mechanism& f, int n) {
  if (f.n() != n) throw InvalidParameter("mechanism dimension mismatch");
  detail::require_non_negative(f);
  detail::require_unit_first(f);
  detail::require_non_increasing(f);
  detail::ArgmaxScan scan;
  for (int j = 1; j <= n - 1; ++j) scan.offer(j * f(j) - f(j + 1), {-1, j, 0});
  scan.offer((n - 1) * f(n), {-1, n, 1});
  return detail::closed_report(1.0 + scan.value(), scan.where(), Method::kClosedFormCovering);
}

// Supermodular welfare, f(1) = 1, f(j) >= 1:
//   PoA = (n / w(n)) / max_j j f(j) / w(j)
inline PoaReport poa_supermodular(const Mechanism& f, const WelfareBasis& w, int n) {
  detail::require_basis(w, n, Assumption::kSupermodular, "convex non-decreasing w with w(1) = 1");
  if (f.n() != n) throw InvalidParameter("mechanism dimension mismatch");
  detail::require_unit_first(f);
  for (int j = 1; j <= n; ++j) {
    if (f(j) < 1.0 - kPreconditionTol) throw PreconditionError("f(j) >= 1", j);
  }
  detail::ArgmaxScan scan;
  for (int j = 1; j <= n; ++j) scan.offer(j * f(j) / w(j), {-1, j, 0});
  const double poa = (n / w(n)) / scan.value();
  auto r = detail::closed_report(1.0 / poa, scan.where(), Method::kClosedFormSupermodular);
  r.poa = poa;
  return r;
}

// Picks the closed form whose hypotheses the basis meets: covering, then
// submodular, then supermodular.
inline PoaReport poa_closed_form(const Mechanism& f, const WelfareBasis& w, int n) {
  if (w.is_covering()) return poa_covering(f, n);
  if (w.is_concave()) return poa_submodular(f, w, n);
  if (w.is_convex()) return poa_supermodular(f, w, n);
  throw PreconditionError("basis concave or convex", 1);
}

// 1 - c/e with curvature c = 1 + w(n-1) - w(n).
inline double approximation_ratio_curvature(const WelfareBasis& w, int n) {
  if (w.n() != n) throw InvalidParameter("welfare basis dimension mismatch");
  return 1.0 - curvature(w) / std::numbers::e;
}

}  // namespace poa

#endif  // POA_POA_CLOSED_HPP
