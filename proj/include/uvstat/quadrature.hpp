#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace uvstat {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

// Adaptive Gauss-Legendre: 15-point panels, a panel is accepted when the
// bisection error estimate |I(panel) - I(left)+I(right)| meets its share of
// the absolute tolerance, otherwise both halves recurse.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol = 1e-10,
                           int max_depth = 24);

// Same scheme; throws QuadratureError (carrying the achieved estimate) when
// the tolerance cannot be met.
double integrate_or_throw(const std::function<double(double)>& f, double a,
                          double b, double abs_tol = 1e-10,
                          int max_depth = 24);

}  // namespace uvstat
