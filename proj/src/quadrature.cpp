#include "uvstat/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace uvstat {
namespace {

constexpr int kOrder = 15;

struct GaussRule {
  std::array<double, kOrder> node;
  std::array<double, kOrder> weight;
};

// Nodes are the roots of P_15, found by Newton from the Chebyshev-like
// initial guess; weights w = 2 / ((1-x^2) P'_15(x)^2). Computing them once
// at startup avoids hand-transcribed constants.
GaussRule make_rule() {
  GaussRule r{};
  for (int i = 0; i < kOrder; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= kOrder; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.node[static_cast<std::size_t>(i)] = x;
    r.weight[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GaussRule& rule() {
  static const GaussRule r = make_rule();
  return r;
}

double panel(const std::function<double(double)>& f, double a, double b) {
  const GaussRule& r = rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < kOrder; ++i) {
    const auto u = static_cast<std::size_t>(i);
    s += r.weight[u] * f(mid + half * r.node[u]);
  }
  return s * half;
}

void refine(const std::function<double(double)>& f, double a, double b,
            double whole, double tol, int depth, int max_depth,
            QuadratureResult& acc) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid);
  const double right = panel(f, mid, b);
  const double err = std::abs(left + right - whole);
  if (err <= tol || depth >= max_depth) {
    acc.value += left + right;
    acc.error_estimate += err;
    if (err > tol) acc.converged = false;
    return;
  }
  refine(f, a, mid, left, 0.5 * tol, depth + 1, max_depth, acc);
  refine(f, mid, b, right, 0.5 * tol, depth + 1, max_depth, acc);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol, int max_depth) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: abs_tol must be positive");
  if (a == b) return {0.0, 0.0, true};
  QuadratureResult acc;
  acc.converged = true;
  refine(f, a, b, panel(f, a, b), abs_tol, 0, max_depth, acc);
  return acc;
}

double integrate_or_throw(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_depth) {
  const QuadratureResult r = integrate(f, a, b, abs_tol, max_depth);
  if (!r.converged)
    throw QuadratureError("quadrature did not reach the requested tolerance",
                          r.error_estimate);
  return r.value;
}

}  // namespace uvstat
