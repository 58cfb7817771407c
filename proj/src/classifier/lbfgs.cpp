#include "lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace hashbench::detail {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

/// d = -H g by the two-loop recursion.
std::vector<double> direction(const std::deque<Pair>& hist, std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(hist.size());
  for (std::size_t k = hist.size(); k-- > 0;) {
    alpha[k] = hist[k].rho * dot(hist[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * hist[k].y[i];
  }
  if (!hist.empty()) {
    const auto& last = hist.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < hist.size(); ++k) {
    const double beta = hist[k].rho * dot(hist[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * hist[k].s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, std::vector<double> x0, const LbfgsOptions& opt) {
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 50;

  LbfgsResult res;
  res.x = std::move(x0);
  const std::size_t n = res.x.size();
  std::vector<double> g(n), g_new(n), x_new(n);
  double fx = f(res.x, g);
  res.losses.push_back(fx);
  std::deque<Pair> hist;

  while (res.iterations < opt.max_iter) {
    if (max_abs(g) < opt.gradient_tolerance) {
      res.converged = true;
      break;
    }
    auto d = direction(hist, g);
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      hist.clear();
      d = direction(hist, g);
      slope = dot(g, d);
    }
    // Without curvature information, start from a unit-length step.
    double t = hist.empty() ? 1.0 / std::max(1.0, std::sqrt(dot(g, g))) : 1.0;

    bool accepted = false;
    double f_new = fx;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + t * d[i];
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (hist.empty()) break;  // no descent possible at machine precision
      hist.clear();
      continue;
    }

    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = x_new[i] - res.x[i];
      p.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12 * std::sqrt(dot(p.s, p.s) * dot(p.y, p.y))) {
      p.rho = 1.0 / sy;
      hist.push_back(std::move(p));
      if (hist.size() > opt.history) hist.pop_front();
    }
    res.x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    res.losses.push_back(fx);
    ++res.iterations;
  }
  if (!res.converged && max_abs(g) < opt.gradient_tolerance) res.converged = true;
  return res;
}

}  // namespace hashbench::detail
