#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace blochball {

struct QuadratureSpec {
  enum class Method { adaptive, fixed_panels };
  Method method = Method::adaptive;
  double abs_tol = 1e-10;
  // Adaptive: panel budget. Fixed: the panel count itself.
  int max_panels = 1 << 14;
};

void validate(const QuadratureSpec& spec);

// Thrown when the panel budget runs out before the tolerance is met; the best
// running estimate is preserved.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best, double err)
      : std::runtime_error(what), best_estimate(best), error_estimate(err) {}
  double best_estimate;
  double error_estimate;
};

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on the Legendre recurrence.
const std::vector<std::pair<double, double>>& gauss_legendre(int order);

// Integral of f over [a,b] and continuation with explicit interior split
// points (smoothness breaks); adaptive bisection with a 16-point rule.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec);
double integrate_split(const std::function<double(double)>& f, double a,
                       double b, const std::vector<double>& splits,
                       const QuadratureSpec& spec);

}  // namespace blochball
