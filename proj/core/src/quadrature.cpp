#include "blochball/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace blochball {

void validate(const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0.0))
    throw std::invalid_argument("QuadratureSpec: abs_tol must be > 0");
  if (spec.max_panels < 1)
    throw std::invalid_argument("QuadratureSpec: max_panels must be >= 1");
}

const std::vector<std::pair<double, double>>& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  std::vector<std::pair<double, double>> nw(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        // one polishing step after convergence
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nw[i] = {-x, w};
    nw[n - 1 - i] = {x, w};
  }
  auto [pos, inserted] = cache.emplace(order, std::move(nw));
  (void)inserted;
  return pos->second;
}

namespace {

constexpr int kPanelOrder = 16;

double panel_value(const std::function<double(double)>& f, double a,
                   double b) {
  const auto& nw = gauss_legendre(kPanelOrder);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (const auto& [x, w] : nw) s += w * f(mid + half * x);
  return s * half;
}

struct Panel {
  double a, b, value;
};

}  // namespace

double integrate_split(const std::function<double(double)>& f, double a,
                       double b, const std::vector<double>& splits,
                       const QuadratureSpec& spec) {
  validate(spec);
  if (!(b > a)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate: b < a");
  }

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double s : splits)
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double total_len = b - a;

  if (spec.method == QuadratureSpec::Method::fixed_panels) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double len = cuts[i + 1] - cuts[i];
      const int panels = std::max(
          1, static_cast<int>(std::lround(spec.max_panels * len / total_len)));
      for (int p = 0; p < panels; ++p)
        sum += panel_value(f, cuts[i] + len * p / panels,
                           cuts[i] + len * (p + 1) / panels);
    }
    return sum;
  }

  std::vector<Panel> stack;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    stack.push_back({cuts[i], cuts[i + 1], panel_value(f, cuts[i], cuts[i + 1])});

  double result = 0.0;
  double err = 0.0;
  int used = static_cast<int>(stack.size());
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.a + p.b);
    const double left = panel_value(f, p.a, mid);
    const double right = panel_value(f, mid, p.b);
    used += 2;
    const double diff = std::abs(p.value - (left + right));
    const double local_tol = spec.abs_tol * (p.b - p.a) / total_len +
                             1e-15 * (std::abs(left) + std::abs(right));
    // Panels near the roundoff width cannot be resolved further; force-accept
    // them and let the accumulated error speak at the end.
    const double min_width =
        std::max(64.0 * 2.220446049250313e-16 *
                     std::max({1.0, std::abs(p.a), std::abs(p.b)}),
                 1e-13 * total_len);
    if ((diff <= local_tol || (p.b - p.a) <= min_width) &&
        std::isfinite(diff)) {
      result += left + right;
      err += diff;
      continue;
    }
    if (used + 2 > spec.max_panels) {
      // best effort: flush everything unrefined into the estimate
      double best = result + left + right;
      double rem_err = err + diff;
      for (const Panel& q : stack) {
        best += q.value;
        rem_err += local_tol;  // unknown, at least the local scale
      }
      throw QuadratureError("quadrature: panel budget exhausted before tolerance",
                            best, rem_err);
    }
    stack.push_back({p.a, mid, left});
    stack.push_back({mid, p.b, right});
  }
  if (!(err <= spec.abs_tol) || !std::isfinite(result))
    throw QuadratureError("quadrature: roundoff-limited below the tolerance",
                          result, err);
  return result;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  return integrate_split(f, a, b, {}, spec);
}

}  // namespace blochball
