#include "webqa/optim.h"

#include <algorithm>
#include <cmath>
#include <deque>

namespace webqa {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsSettings& settings) {
  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);

  std::vector<double> grad(n, 0.0);
  double f = objective(result.x, grad);
  result.f = f;
  result.trace.push_back(f);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;

  std::vector<double> direction(n), x_new(n), grad_new(n), alpha_buf;
  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    if (inf_norm(grad) < 1e-12) {
      result.converged = true;
      break;
    }

    // Two-loop recursion for d = -H * grad.
    direction = grad;
    alpha_buf.assign(history.size(), 0.0);
    for (std::size_t h = history.size(); h-- > 0;) {
      const Pair& p = history[h];
      alpha_buf[h] = p.rho * dot(p.s, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha_buf[h] * p.y[i];
    }
    if (!history.empty()) {
      const Pair& last = history.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& d : direction) d *= gamma;
    }
    for (std::size_t h = 0; h < history.size(); ++h) {
      const Pair& p = history[h];
      const double beta = p.rho * dot(p.y, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] += p.s[i] * (alpha_buf[h] - beta);
    }
    for (double& d : direction) d = -d;

    double descent = dot(grad, direction);
    if (descent >= 0) {  // not a descent direction; fall back to steepest descent
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      descent = -dot(grad, grad);
    }

    double step = history.empty() ? 1.0 / std::max(1.0, inf_norm(grad)) : 1.0;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = result.x[i] + step * direction[i];
      f_new = objective(x_new, grad_new);
      if (std::isfinite(f_new) && f_new <= f + settings.armijo_c1 * step * descent) {
        accepted = true;
        break;
      }
      step *= settings.backtrack;
    }
    if (!accepted) break;  // objective is flat along every tried step

    Pair pair;
    pair.s.resize(n);
    pair.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = x_new[i] - result.x[i];
      pair.y[i] = grad_new[i] - grad[i];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-10) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > settings.memory) history.pop_front();
    }

    result.x.swap(x_new);
    grad.swap(grad_new);
    const double f_prev = f;
    f = f_new;
    result.f = f;
    result.trace.push_back(f);
    ++result.iterations;

    if (std::fabs(f_prev - f) / std::max(1.0, std::fabs(f_prev)) < settings.rel_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace webqa
