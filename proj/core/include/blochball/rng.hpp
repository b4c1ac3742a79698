#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "blochball/complexvec.hpp"

namespace blochball {

// Counter-mode stream split: worker k of a campaign draws from
// substream(master, k), so thread scheduling cannot change any result.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  std::uint64_t seed() const { return seed_; }
  Rng substream(std::uint64_t stream) const {
    return Rng(mix_seed(seed_, stream));
  }

  std::uint64_t next_u64() { return eng_(); }

  // 53-bit uniform in [0,1); avoids the implementation-defined
  // std::uniform_real_distribution so reruns are engine-exact.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double gaussian();
  cplx cgaussian() { return {gaussian() * 0.5, gaussian() * 0.5}; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Additive-recurrence (Kronecker) low-discrepancy sequence on [0,1)^d.
// Alphas come from the generalized golden ratio; the seed only shifts the
// starting phase, keeping the sequence deterministic per (dim, seed).
class KroneckerSequence {
 public:
  explicit KroneckerSequence(int dim, std::uint64_t seed = 0);
  const std::vector<double>& next();
  int dim() const { return static_cast<int>(alpha_.size()); }

 private:
  std::vector<double> alpha_;
  std::vector<double> state_;
};

// Deterministic quasi-random interior points with radius <= rmax.
// Directions come from the centered cube, radii from the ball-volume
// inversion u -> u^(1/2n).
class BallSampler {
 public:
  BallSampler(int n, double rmax, std::uint64_t seed);
  BallPoint next();

 private:
  int n_;
  double rmax_;
  KroneckerSequence seq_;
};

// Radial grid along the coordinate axes: points t * phase * e_j for the
// four unit phases and `per_axis` radii in (0, rmax].
std::vector<BallPoint> radial_axis_grid(int n, int per_axis, double rmax);

}  // namespace blochball
