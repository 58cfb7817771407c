#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hashbench::detail {

struct LbfgsOptions {
  std::size_t max_iter = 500;
  double gradient_tolerance = 1e-6;
  std::size_t history = 10;
};

struct LbfgsResult {
  std::vector<double> x;
  std::vector<double> losses;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Objective callback: returns f(x) and writes the gradient.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

/// Limited-memory BFGS with Armijo backtracking. Only steps that satisfy the
/// sufficient-decrease condition are accepted, so `losses` is non-increasing.
LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& opt);

}  // namespace hashbench::detail
