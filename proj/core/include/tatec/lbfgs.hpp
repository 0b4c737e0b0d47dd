// Copyright 2026 The Tatec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tatec {

/// Value-and-gradient callback: writes the (sub)gradient into `grad` and
/// returns the objective value at `x`.
using Objective =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  std::size_t memory = 10;
  std::size_t max_iterations = 200;
  /// Stop when the relative decrease of one iteration falls below this.
  double relative_tolerance = 1e-10;
  double gradient_tolerance = 1e-10;
  double armijo = 1e-4;
  std::size_t max_line_search = 40;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with a backtracking Armijo line search. Every accepted
/// step strictly decreases the objective, so the returned value never exceeds
/// the value at x0; a failed line search (as happens at kinks of piecewise
/// linear objectives) ends the run at the best point found.
LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0,
                           const LbfgsOptions& options = {});

}  // namespace tatec
