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

#ifndef POA_MECHANISMS_HPP
#define POA_MECHANISMS_HPP

// Welfare bases w and utility-generating mechanisms f, both functions on
// {1..n} extended with zeros at 0 and n+1.

#include <charconv>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "poa/error.hpp"

namespace poa {

// Absolute slack on first/second differences in the shape predicates.
inline constexpr double kShapeTolerance = 1e-12;

namespace detail {

inline std::string format_real(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// Values on {1..n} with the zero extension at 0 and n+1.
class ExtendedSequence {
 public:
  ExtendedSequence() = default;
  ExtendedSequence(std::vector<double> values, std::string label)
      : values_(std::move(values)), label_(std::move(label)) {
    if (values_.empty()) throw InvalidParameter("sequence needs n >= 1 values");
    for (double v : values_) {
      if (!std::isfinite(v)) throw InvalidParameter("sequence values must be finite");
    }
  }

  int n() const noexcept { return static_cast<int>(values_.size()); }

  // j in [0, n+1]; the two boundary points are exactly zero.
  double operator()(int j) const {
    if (j == 0 || j == n() + 1) return 0.0;
    if (j < 0 || j > n() + 1) throw std::out_of_range("index " + std::to_string(j) + " outside [0, n+1]");
    return values_[static_cast<std::size_t>(j - 1)];
  }

  std::span<const double> values() const noexcept { return values_; }
  const std::string& label() const noexcept { return label_; }

 protected:
  std::vector<double> values_;
  std::string label_;
};

}  // namespace detail

enum class Assumption { kSubmodular, kSupermodular, kCovering };

struct AssumptionCheck {
  bool holds = true;
  std::vector<int> violations;  // offending j
};

class WelfareBasis : public detail::ExtendedSequence {
 public:
  WelfareBasis() = default;

  // Rescales so that w(1) = 1. Every entry must be strictly positive.
  explicit WelfareBasis(std::vector<double> values, std::string label = "custom")
      : ExtendedSequence(std::move(values), std::move(label)) {
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!(values_[k] > 0.0)) {
        throw InvalidParameter("welfare basis requires w(j) > 0, fails at j=" + std::to_string(k + 1));
      }
    }
    const double w1 = values_.front();
    if (w1 != 1.0) {
      for (double& v : values_) v /= w1;
    }
  }

  bool is_concave() const;
  bool is_convex() const;
  bool is_covering() const;
};

// No sign constraint; the predicates below report shape.
class Mechanism : public detail::ExtendedSequence {
 public:
  Mechanism() = default;
  explicit Mechanism(std::vector<double> values, std::string label = "custom")
      : ExtendedSequence(std::move(values), std::move(label)) {}

  bool first_positive() const { return (*this)(1) > 0.0; }

  bool non_increasing(double tol = kShapeTolerance) const {
    for (int j = 1; j < n(); ++j) {
      if ((*this)(j + 1) > (*this)(j) + tol) return false;
    }
    return true;
  }

  Mechanism scaled(double c) const {
    std::vector<double> v(values().begin(), values().end());
    for (double& x : v) x *= c;
    return Mechanism(std::move(v), label_ + "*" + detail::format_real(c));
  }
};

inline AssumptionCheck check_assumption(const WelfareBasis& w, Assumption kind) {
  AssumptionCheck out;
  const int n = w.n();
  auto flag = [&](int j) {
    out.holds = false;
    if (out.violations.empty() || out.violations.back() != j) out.violations.push_back(j);
  };
  if (kind == Assumption::kCovering) {
    for (int j = 1; j <= n; ++j) {
      if (std::abs(w(j) - 1.0) > kShapeTolerance) flag(j);
    }
    return out;
  }
  if (std::abs(w(1) - 1.0) > kShapeTolerance) flag(1);
  for (int j = 1; j <= n - 1; ++j) {
    const double up = w(j + 1) - w(j);
    const double down = w(j) - w(j - 1);
    if (up < -kShapeTolerance) flag(j);
    if (kind == Assumption::kSubmodular && up > down + kShapeTolerance) flag(j);
    if (kind == Assumption::kSupermodular && up < down - kShapeTolerance) flag(j);
  }
  return out;
}

inline bool WelfareBasis::is_concave() const { return check_assumption(*this, Assumption::kSubmodular).holds; }
inline bool WelfareBasis::is_convex() const { return check_assumption(*this, Assumption::kSupermodular).holds; }
inline bool WelfareBasis::is_covering() const { return check_assumption(*this, Assumption::kCovering).holds; }

// ---------------------------------------------------------------------------
// Named bases

inline WelfareBasis covering_basis(int n) {
  if (n < 1) throw InvalidParameter("n must be >= 1");
  return WelfareBasis(std::vector<double>(static_cast<std::size_t>(n), 1.0), "covering");
}

inline WelfareBasis power_basis(double d, int n) {
  if (!(d >= 0.0)) throw InvalidParameter("power basis exponent must be >= 0");
  if (n < 1) throw InvalidParameter("n must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) v[j - 1] = std::pow(static_cast<double>(j), d);
  return WelfareBasis(std::move(v), "power:d=" + detail::format_real(d));
}

// Success probability p per vehicle; w(j) = (1 - (1-p)^j) / p.
inline WelfareBasis vehicle_target_basis(double p, int n) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidParameter("vehicle basis needs p in (0, 1]");
  if (n < 1) throw InvalidParameter("n must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    // -expm1(j*log1p(-p)) keeps precision for tiny p; p == 1 gives exactly 1.
    v[j - 1] = (p == 1.0) ? 1.0 : -std::expm1(j * std::log1p(-p)) / p;
  }
  return WelfareBasis(std::move(v), "vehicle:p=" + detail::format_real(p));
}

// c = 1 + w(n-1) - w(n)
inline double curvature(const WelfareBasis& w) {
  if (w.n() < 2) throw InvalidParameter("curvature needs n >= 2");
  return 1.0 + w(w.n() - 1) - w(w.n());
}

// ---------------------------------------------------------------------------
// Named mechanisms

inline Mechanism shapley_value(const WelfareBasis& w) {
  std::vector<double> f(static_cast<std::size_t>(w.n()));
  for (int j = 1; j <= w.n(); ++j) f[j - 1] = w(j) / j;
  return Mechanism(std::move(f), "sv");
}

inline Mechanism marginal_contribution(const WelfareBasis& w) {
  std::vector<double> f(static_cast<std::size_t>(w.n()));
  for (int j = 1; j <= w.n(); ++j) f[j - 1] = w(j) - w(j - 1);
  return Mechanism(std::move(f), "mc");
}

// Optimal covering mechanism
//   f(j) = (j-1)! [1/((n-1)(n-1)!) + sum_{i=j}^{n-1} 1/i!]
//               / [1/((n-1)(n-1)!) + sum_{i=1}^{n-1} 1/i!].
// Every factorial appears as a ratio (j-1)!/i! = 1/(j (j+1) ... i), so the
// terms are accumulated as running products of reciprocals and never overflow;
// they underflow to zero harmlessly for large n.
inline Mechanism gairing_optimal_covering(int n) {
  if (n < 2) throw InvalidParameter("gairing mechanism needs n >= 2");
  auto shifted_sum = [n](int j) {
    // (j-1)! * [1/((n-1)(n-1)!) + sum_{i=j}^{n-1} 1/i!]
    double sum = 0.0;
    double term = 1.0;  // (j-1)!/i! for the running i
    for (int i = j; i <= n - 1; ++i) {
      term /= i;
      sum += term;
    }
    // After the loop term == (j-1)!/(n-1)! (or 1 when j == n).
    return sum + term / (n - 1);
  };
  const double denom = shifted_sum(1);
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) f[j - 1] = shifted_sum(j) / denom;
  f[0] = 1.0;
  return Mechanism(std::move(f), "gairing");
}

// f(j) >= f_MC(j) for all j in [n].
inline bool dominates_marginal(const Mechanism& f, const WelfareBasis& w, double tol = kShapeTolerance) {
  for (int j = 1; j <= f.n(); ++j) {
    if (f(j) < w(j) - w(j - 1) - tol) return false;
  }
  return true;
}

}  // namespace poa

#endif  // POA_MECHANISMS_HPP
