#include "blochball/rng.hpp"

#include <cmath>

namespace blochball {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finalizer over (master, counter).
  std::uint64_t x = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller with explicit formulas; uniform01 is engine-exact.
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

namespace {
// Root of x^(d+1) = x + 1 (the generalized golden ratio).
double harmonious(int d) {
  double x = 1.5;
  for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (d + 1));
  return x;
}
}  // namespace

KroneckerSequence::KroneckerSequence(int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("KroneckerSequence: dim >= 1");
  alpha_.resize(dim);
  state_.resize(dim);
  const double g = harmonious(dim);
  double p = 1.0;
  for (int k = 0; k < dim; ++k) {
    p /= g;
    alpha_[k] = p;
    // Seed-derived phase offset keeps distinct streams decorrelated while
    // staying fully deterministic.
    const std::uint64_t h = mix_seed(seed, static_cast<std::uint64_t>(k));
    state_[k] = 0.5 + static_cast<double>(h >> 11) * 0x1.0p-53;
    state_[k] -= std::floor(state_[k]);
  }
}

const std::vector<double>& KroneckerSequence::next() {
  for (std::size_t k = 0; k < state_.size(); ++k) {
    state_[k] += alpha_[k];
    if (state_[k] >= 1.0) state_[k] -= 1.0;
  }
  return state_;
}

BallSampler::BallSampler(int n, double rmax, std::uint64_t seed)
    : n_(n), rmax_(rmax), seq_(2 * n + 1, seed) {
  if (n < 1) throw std::invalid_argument("BallSampler: n >= 1");
  if (!(rmax > 0.0 && rmax < 1.0))
    throw std::invalid_argument("BallSampler: rmax in (0,1)");
}

BallPoint BallSampler::next() {
  const std::vector<double>& u = seq_.next();
  CVec v(n_);
  double s = 0.0;
  for (int k = 0; k < n_; ++k) {
    const double re = 2.0 * u[2 * k] - 1.0;
    const double im = 2.0 * u[2 * k + 1] - 1.0;
    v[k] = {re, im};
    s += re * re + im * im;
  }
  if (s == 0.0) return BallPoint::origin(n_);
  // Ball-volume radial inversion: uniform-in-volume radius profile.
  const double r = rmax_ * std::pow(u[2 * n_], 1.0 / (2.0 * n_));
  const double scale = r / std::sqrt(s);
  for (cplx& c : v) c *= scale;
  return BallPoint(std::move(v));
}

std::vector<BallPoint> radial_axis_grid(int n, int per_axis, double rmax) {
  static const cplx phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::vector<BallPoint> pts;
  pts.reserve(static_cast<std::size_t>(n) * per_axis * 4 + 1);
  pts.push_back(BallPoint::origin(n));
  for (int axis = 0; axis < n; ++axis)
    for (int q = 0; q < 4; ++q)
      for (int i = 1; i <= per_axis; ++i) {
        CVec v(n, cplx(0.0));
        v[axis] = phases[q] * cplx(rmax * i / per_axis);
        pts.push_back(BallPoint(std::move(v)));
      }
  return pts;
}

}  // namespace blochball
