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

#ifndef POA_REPORT_HPP
#define POA_REPORT_HPP

#include <compare>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace poa {

// (a, x, b): agents only in the equilibrium, in both, only in the optimum.
struct IndexTuple {
  int a = 0;
  int x = 0;
  int b = 0;
  auto operator<=>(const IndexTuple&) const = default;
};

// A maximizing candidate of a closed-form W*. `term` selects among the
// printed expressions when a formula takes a max over several (0-based);
// `l` is -1 when the formula has no second index.
struct ArgmaxTerm {
  int l = -1;
  int j = 0;
  int term = 0;
  auto operator<=>(const ArgmaxTerm&) const = default;
};

enum class Method { kLp, kClosedFormSubmodular, kClosedFormCovering, kClosedFormSupermodular };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kLp: return "lp";
    case Method::kClosedFormSubmodular: return "closed_form_submodular";
    case Method::kClosedFormCovering: return "closed_form_covering";
    case Method::kClosedFormSupermodular: return "closed_form_supermodular";
  }
  return "?";
}

struct PoaReport {
  double poa = 0.0;
  // +inf in the degenerate f(1) <= 0 case, where poa is 0.
  double w_star = std::numeric_limits<double>::infinity();
  std::optional<double> lambda_star;
  // Closed interval of optimal lambda when the envelope minimum is flat.
  std::optional<std::pair<double, double>> lambda_range;
  double mu_star = std::numeric_limits<double>::infinity();
  std::vector<IndexTuple> binding;
  std::vector<ArgmaxTerm> argmax;
  Method method = Method::kLp;

  bool degenerate() const { return poa == 0.0; }
};

inline PoaReport degenerate_report(Method m) {
  PoaReport r;
  r.method = m;
  return r;
}

}  // namespace poa

#endif  // POA_REPORT_HPP
