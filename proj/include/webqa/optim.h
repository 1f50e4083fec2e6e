#pragma once

#include <functional>
#include <vector>

namespace webqa {

// Objective: fills the gradient and returns f(x).
using Objective = std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct LbfgsSettings {
  int max_iterations = 500;
  double rel_tol = 1e-6;  // stop when |f_prev - f| / max(1, |f_prev|) < rel_tol
  int memory = 10;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
};

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // f after each accepted step
};

// Limited-memory BFGS with backtracking (Armijo) line search. Each accepted
// step strictly decreases f, so the trace is non-increasing.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsSettings& settings = {});

}  // namespace webqa
