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

#include "tatec/lbfgs.hpp"

#include <cmath>
#include <deque>

#include "tatec/matrix.hpp"

namespace tatec {

LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0,
                           const LbfgsOptions& options) {
  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n), next_x(n), next_grad(n), dir(n), alpha_hist;
  result.value = f(result.x, grad);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    const double gnorm = norm(grad);
    if (gnorm <= options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    // Two-loop recursion: dir = -H grad.
    dir.assign(grad.begin(), grad.end());
    alpha_hist.assign(history.size(), 0.0);
    for (std::size_t k = history.size(); k-- > 0;) {
      const auto& p = history[k];
      alpha_hist[k] = p.rho * dot(p.s, dir);
      axpy(-alpha_hist[k], p.y, dir);
    }
    if (!history.empty()) {
      const auto& p = history.back();
      scale(dot(p.s, p.y) / dot(p.y, p.y), dir);
    } else {
      scale(1.0 / gnorm, dir);
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const auto& p = history[k];
      const double beta = p.rho * dot(p.y, dir);
      axpy(alpha_hist[k] - beta, p.s, dir);
    }
    scale(-1.0, dir);

    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      // Not a descent direction: restart from steepest descent.
      history.clear();
      dir.assign(grad.begin(), grad.end());
      scale(-1.0 / gnorm, dir);
      slope = dot(grad, dir);
    }

    double step = 1.0;
    double next_value = 0.0;
    bool accepted = false;
    for (std::size_t ls = 0; ls < options.max_line_search; ++ls) {
      for (std::size_t i = 0; i < n; ++i)
        next_x[i] = result.x[i] + step * dir[i];
      next_value = f(next_x, next_grad);
      if (std::isfinite(next_value) &&
          next_value <= result.value + options.armijo * step * slope &&
          next_value < result.value) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }

    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = next_x[i] - result.x[i];
      p.y[i] = next_grad[i] - grad[i];
    }
    const double sy = dot(p.s, p.y);
    const double previous = result.value;
    result.x.swap(next_x);
    grad.swap(next_grad);
    result.value = next_value;
    result.iterations = iter + 1;
    // Curvature condition; skipped pairs keep H positive definite.
    if (sy > 1e-12 * dot(p.y, p.y)) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (history.size() > options.memory) history.pop_front();
    }
    if (previous - result.value <=
        options.relative_tolerance * std::max(1.0, std::fabs(previous))) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace tatec
