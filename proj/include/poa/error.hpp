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

#ifndef POA_ERROR_HPP
#define POA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace poa {

// Bad argument to a constructor or generator (p outside (0,1], n too small).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A closed-form expression was applied outside the hypotheses it is valid
// for. The message names the failed condition and the offending index.
class PreconditionError : public std::domain_error {
 public:
  PreconditionError(std::string condition, int index)
      : std::domain_error(condition + " violated at j=" + std::to_string(index)),
        condition_(std::move(condition)),
        index_(index) {}

  const std::string& condition() const noexcept { return condition_; }
  int index() const noexcept { return index_; }

 private:
  std::string condition_;
  int index_;
};

// An enumeration would exceed its configured cap.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// The game class requires W(a_opt) > 0 and at most n agents.
class GameDefinitionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An allocation picked an action outside the agent's action set.
class InfeasibleAllocation : public std::invalid_argument {
 public:
  InfeasibleAllocation(const std::string& what, int agent)
      : std::invalid_argument(what), agent_(agent) {}
  int agent() const noexcept { return agent_; }

 private:
  int agent_;
};

// The LP backend returned a status that must not occur for valid inputs.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace poa

#endif  // POA_ERROR_HPP
