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

#ifndef POA_MATROID_HPP
#define POA_MATROID_HPP

// Brute-force matroid axioms on small ground sets. Subsets are bitmasks over
// elements 0..ground-1.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "poa/error.hpp"

namespace poa {

using Subset = std::uint32_t;

inline constexpr int kMaxMatroidGround = 12;

inline int subset_size(Subset s) { return std::popcount(s); }

inline std::string subset_to_string(Subset s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int e = 0; e < 32; ++e) {
    if (s >> e & 1U) {
      if (!first) os << ',';
      os << 'r' << (e + 1);
      first = false;
    }
  }
  os << '}';
  return os.str();
}

class Matroid {
 public:
  struct Explicit {
    std::vector<Subset> independent;
  };
  struct Uniform {
    int rank;
  };
  // Subsets of `support` with at most `rank` elements.
  struct RestrictedUniform {
    Subset support;
    int rank;
  };

  Matroid(int ground, std::variant<Explicit, Uniform, RestrictedUniform> oracle)
      : ground_(ground), oracle_(std::move(oracle)) {
    if (ground < 0 || ground > kMaxMatroidGround) {
      throw InvalidParameter("matroid ground set must have at most " + std::to_string(kMaxMatroidGround) + " elements");
    }
    if (auto* e = std::get_if<Explicit>(&oracle_)) {
      member_.assign(std::size_t{1} << ground_, 0);
      for (Subset s : e->independent) {
        if (s >> ground_) throw InvalidParameter("family member outside the ground set");
        member_[s] = 1;
      }
    }
  }

  int ground() const { return ground_; }

  bool independent(Subset s) const {
    if (s >> ground_) return false;
    return std::visit(
        [&](const auto& o) -> bool {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, Explicit>) {
            return member_[s] != 0;
          } else if constexpr (std::is_same_v<T, Uniform>) {
            return subset_size(s) <= o.rank;
          } else {
            return (s & ~o.support) == 0 && subset_size(s) <= o.rank;
          }
        },
        oracle_);
  }

  std::vector<Subset> family() const {
    std::vector<Subset> out;
    for (Subset s = 0; s < (Subset{1} << ground_); ++s) {
      if (independent(s)) out.push_back(s);
    }
    return out;
  }

  // Maximal independent sets.
  std::vector<Subset> bases() const {
    std::vector<Subset> out;
    for (Subset s : family()) {
      bool maximal = true;
      for (int e = 0; e < ground_ && maximal; ++e) {
        const Subset bit = Subset{1} << e;
        if (!(s & bit) && independent(s | bit)) maximal = false;
      }
      if (maximal) out.push_back(s);
    }
    return out;
  }

  int rank() const {
    int r = 0;
    for (Subset b : bases()) r = std::max(r, subset_size(b));
    return r;
  }

 private:
  int ground_;
  std::variant<Explicit, Uniform, RestrictedUniform> oracle_;
  std::vector<char> member_;
};

struct MatroidCheck {
  bool is_matroid = false;
  std::string counterexample;  // empty when is_matroid
  int rank = 0;
  std::vector<Subset> bases;
};

// Checks: the empty set is independent, subsets of independent sets are
// independent, and any smaller independent set extends by an element of a
// larger one.
inline MatroidCheck matroid_check(const Matroid& m) {
  MatroidCheck out;
  const auto fam = m.family();
  if (!m.independent(0)) {
    out.counterexample = "empty set is not independent";
    return out;
  }
  for (Subset b : fam) {
    for (Subset a = (b - 1) & b;; a = (a - 1) & b) {
      if (!m.independent(a)) {
        out.counterexample = subset_to_string(a) + " subset of " + subset_to_string(b) + " is not independent";
        return out;
      }
      if (a == 0) break;
    }
  }
  for (Subset a : fam) {
    for (Subset b : fam) {
      if (subset_size(a) >= subset_size(b)) continue;
      bool extends = false;
      for (int e = 0; e < m.ground() && !extends; ++e) {
        const Subset bit = Subset{1} << e;
        if ((b & bit) && !(a & bit) && m.independent(a | bit)) extends = true;
      }
      if (!extends) {
        out.counterexample = subset_to_string(a) + " cannot be extended from " + subset_to_string(b);
        return out;
      }
    }
  }
  out.is_matroid = true;
  out.bases = m.bases();
  out.rank = m.rank();
  return out;
}

inline MatroidCheck matroid_check(int ground, const std::vector<Subset>& family) {
  return matroid_check(Matroid(ground, Matroid::Explicit{family}));
}

// Whether `bases` can be the basis family of some matroid: equal sizes and
// the basis exchange property.
inline MatroidCheck basis_family_check(int ground, const std::vector<Subset>& bases) {
  MatroidCheck out;
  if (bases.empty()) {
    out.counterexample = "no bases";
    return out;
  }
  const int r = subset_size(bases.front());
  for (Subset b : bases) {
    if (b >> ground) throw InvalidParameter("basis outside the ground set");
    if (subset_size(b) != r) {
      out.counterexample = "bases " + subset_to_string(bases.front()) + " and " + subset_to_string(b) + " differ in size";
      return out;
    }
  }
  auto is_basis = [&](Subset s) { return std::find(bases.begin(), bases.end(), s) != bases.end(); };
  for (Subset b1 : bases) {
    for (Subset b2 : bases) {
      for (int e = 0; e < ground; ++e) {
        const Subset x = Subset{1} << e;
        if (!(b1 & x) || (b2 & x)) continue;
        bool found = false;
        for (int f = 0; f < ground && !found; ++f) {
          const Subset y = Subset{1} << f;
          if ((b2 & y) && !(b1 & y) && is_basis((b1 & ~x) | y)) found = true;
        }
        if (!found) {
          out.counterexample = "no exchange for " + subset_to_string(x) + " between " + subset_to_string(b1) + " and " +
                               subset_to_string(b2);
          return out;
        }
      }
    }
  }
  out.is_matroid = true;
  out.rank = r;
  out.bases = bases;
  std::sort(out.bases.begin(), out.bases.end());
  out.bases.erase(std::unique(out.bases.begin(), out.bases.end()), out.bases.end());
  return out;
}

// All subsets of the given sets.
inline std::vector<Subset> downward_closure(const std::vector<Subset>& sets) {
  std::vector<Subset> out;
  for (Subset b : sets) {
    for (Subset a = b;; a = (a - 1) & b) {
      out.push_back(a);
      if (a == 0) break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace poa

#endif  // POA_MATROID_HPP
