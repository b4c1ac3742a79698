#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "blochball/bloch.hpp"
#include "blochball/complexvec.hpp"
#include "blochball/holo.hpp"
#include "blochball/rng.hpp"

namespace blochball::verify {

struct Violation {
  std::string what;             // which inequality failed
  int map_index;
  std::vector<CVec> points;     // inputs, enough to replay
  double computed;
  double bound;
  double excess;                // computed - bound (for upper-style checks)
};

struct WitnessStat {
  double max_ratio = 0.0;  // worst observed statistic
  double bound = 0.0;
  double margin = 0.0;     // bound - max_ratio
  int map_index = -1;
  std::vector<CVec> points;
};

// Per-sample row for the CSV output; columns are theorem-specific.
struct SampleRow {
  int map_index;
  std::vector<double> values;
};

struct VerificationReport {
  std::string theorem;
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::pair<std::string, std::string>> str_params;
  std::uint64_t seed = 0;
  WitnessStat stats;
  std::vector<Violation> violations;
  bool pass = false;          // always: violations.empty()
  bool applicable = true;     // Theorem 3 hypothesis can fail to hold
  std::vector<std::string> notes;
  double runtime_seconds = 0.0;
  std::vector<std::string> row_columns;  // set when rows were collected
  std::vector<SampleRow> rows;
};

struct CampaignOptions {
  double sup_tol = 1e-6;     // relative slack for estimated prenorms
  double assert_tol = 1e-9;  // multiplicative wiggle on exact bounds
  double bound_scale = 1.0;  // testing knob; scales asserted bounds
  bool collect_rows = false;
  int wgrid = 64;            // Theorem 3 hypothesis grid
  int zsearch_evals = 300;   // per-start budget of the z_w search
  bloch::PrenormBudget prenorm_budget{};
  QuadratureSpec quadrature{};
};

// |D(z2) - D(z1)| / rho(z1,z2)^(1/n) for the alpha = 1 density.
double lipschitz_ratio(const holo::HoloMap& f, const BallPoint& z1,
                       const BallPoint& z2, int n);

// Pair pool mixing uniform, near-diagonal, near-boundary and radial pairs.
std::vector<std::pair<BallPoint, BallPoint>> sample_pairs(int n, int count,
                                                          double rmax,
                                                          Rng rng);

// Lipschitz bound with constant M(n) over a normalized battery.
VerificationReport check_theorem1(const std::vector<holo::HoloMap>& battery,
                                  int n, int pairs, std::uint64_t seed,
                                  const CampaignOptions& opt = {});

struct SharpnessResult {
  double ratio;   // measured between the origin and (m, 0, ..., 0)
  double m;
  double lambda;
};

// Extremal-family ratio for the given eps; reaches M(n) - eps.
SharpnessResult sharpness_run(double eps, int n);
// Largest admissible eps (keeps the extremal anchor within range).
double sharpness_eps_max(int n);

struct DiskDerivatives {
  cplx dz;
  cplx dzbar;
};

// Wirtinger derivatives of D_f on the disk away from critical points:
//   d/dz    = -conj(z)|f'| + f'' conj(f') (1-|z|^2) / (2|f'|)
//   d/dzbar = -z|f'| + conj(f'') f' (1-|z|^2) / (2|f'|)
DiskDerivatives density_derivatives_disk(const holo::HoloMap& f, cplx z);

// Disk derivative bounds: the gradient bound with constant 3 sqrt(3)/2 and
// the second-derivative bound, plus extremal equality at the origin.
VerificationReport check_theorem2(const std::vector<holo::HoloMap>& battery,
                                  int grid, std::uint64_t seed,
                                  const CampaignOptions& opt = {});

// Distortion bounds: extremal saturation on the radius plus random
// normalized maps checked inside both validity radii.
VerificationReport check_theoremD(const std::vector<double>& lambda_grid,
                                  double alpha, int n, int samples,
                                  std::uint64_t seed,
                                  const std::vector<holo::HoloMap>& battery,
                                  const CampaignOptions& opt = {});

// k(n,r,eps) = [1 - r M(n) ((n+1)/(n+2))^(1/n)] eps / 2.
double k_constant(int n, double r, double eps);
// Cap on r: (1/M(n)) ((n+2)/(n+1))^(1/n).
double theorem3_r_cap(int n);

struct Theorem3Hypothesis {
  double r_empirical;    // max over grid of [tanh beta(phi(z_w), w)]^(1/n)
  double eps_empirical;  // min over grid of tau_phi(z_w)
  bool satisfied;        // r_empirical below the cap
  std::vector<BallPoint> wgrid;
  std::vector<BallPoint> zw;
  std::vector<double> tanh_beta_pow;
  std::vector<double> tau;
  int worst_r_index = -1;
  int worst_tau_index = -1;
};

// tau_phi(z) = ((1-|z|^2)/(1-|phi(z)|^2))^((n+1)/(2n)) |det phi'(z)|^(1/n).
double tau_of(const holo::HoloMap& phi, const BallPoint& z);

// For each grid w, searches z_w bringing phi(z_w) close to w; multi-start
// local descent seeded at w and at the automorphism pullback when phi is one.
Theorem3Hypothesis hypothesis_scan(const holo::HoloMap& phi, int wgrid,
                                   int zsearch_evals, std::uint64_t seed);

// Composition-operator lower bound ||C_phi f|| >= k(n,r,eps) ||f||.
VerificationReport check_theorem3(const holo::HoloMap& phi, double r,
                                  double eps,
                                  const std::vector<holo::HoloMap>& battery,
                                  std::uint64_t seed,
                                  const CampaignOptions& opt = {});

// Battery helpers: random degree-bounded polynomials, prenorm-normalized.
holo::HoloMap normalized(const holo::HoloMap& f, const bloch::BlochParams& p,
                         const bloch::PrenormBudget& budget,
                         std::uint64_t seed, double* factor = nullptr);
std::vector<holo::HoloMap> random_battery(int count, int degree, int n,
                                          std::uint64_t seed,
                                          const bloch::PrenormBudget& budget,
                                          std::vector<double>* factors = nullptr);

// Proof-internal inequalities, gridded; both return the minimal margin
// (nonnegative up to rounding when the inequality holds).
//   m^(1/n) - (1-w^2)^((n+1)/(2n)) (m-w)^(1/n) / (1-mw)^((n+2)/n) <= w^(1/n)
double inequality_subcase_margin(int n, int grid);
//   m <= (a0 + m) / (1 + a0 m) on [0, a0]
double validity_radius_margin(int n, int grid);

}  // namespace blochball::verify
