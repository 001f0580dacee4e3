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

#ifndef POA_CATALOG_HPP
#define POA_CATALOG_HPP

// String labels for the named bases and mechanisms:
//
//   basis:      covering | power:d=<real> | vehicle:p=<real>
//   mechanism:  sv | mc | gairing | optimal | optimal_submodular

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "poa/error.hpp"
#include "poa/mechanisms.hpp"
#include "poa/poa_lp.hpp"

namespace poa {

namespace detail {

inline double parse_real(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidParameter("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return v;
}

inline bool strip_prefix(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

}  // namespace detail

inline WelfareBasis make_basis(std::string_view label, int n) {
  std::string_view rest = label;
  if (label == "covering") return covering_basis(n);
  if (detail::strip_prefix(rest, "power:d=")) return power_basis(detail::parse_real(rest, "d"), n);
  if (detail::strip_prefix(rest, "vehicle:p=")) return vehicle_target_basis(detail::parse_real(rest, "p"), n);
  throw InvalidParameter("unknown basis '" + std::string(label) + "'");
}

// Whether `label` names a mechanism make_mechanism can rebuild without an LP.
inline bool is_closed_mechanism_label(std::string_view label) {
  return label == "sv" || label == "mc" || label == "gairing";
}

inline Mechanism make_mechanism(std::string_view label, const WelfareBasis& w) {
  if (label == "sv") return shapley_value(w);
  if (label == "mc") return marginal_contribution(w);
  if (label == "gairing") {
    if (!w.is_covering()) throw PreconditionError("covering basis (w = 1)", 1);
    return gairing_optimal_covering(w.n());
  }
  if (label == "optimal") return design_optimal_mechanism(w, w.n()).mechanism;
  if (label == "optimal_submodular") return design_optimal_mechanism_submodular(w, w.n()).mechanism;
  throw InvalidParameter("unknown mechanism '" + std::string(label) + "'");
}

}  // namespace poa

#endif  // POA_CATALOG_HPP
