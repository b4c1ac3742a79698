#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blochball/complexvec.hpp"
#include "blochball/geometry.hpp"
#include "blochball/matrix.hpp"
#include "blochball/rng.hpp"

namespace blochball::holo {

enum class MapKind {
  polynomial,
  extremal,
  automorphism,
  composition,
  diagonal_stack,
  scalar_rotation,
};

const char* kind_name(MapKind k);

// One monomial c * z^powers of a polynomial component.
struct PolyTerm {
  cplx coeff;
  std::vector<int> powers;
};
using PolyComponent = std::vector<PolyTerm>;

struct Node;

// Immutable holomorphic map of the ball into C^n, closed under the small
// algebra the proofs manipulate. Evaluation and Jacobians are exact per
// kind; compositions use the chain rule.
class HoloMap {
 public:
  int dim() const;
  MapKind kind() const;

  CVec eval(const CVec& z) const;
  CVec eval(const BallPoint& z) const { return eval(z.coords()); }
  ComplexMatrix jacobian(const CVec& z) const;
  ComplexMatrix jacobian(const BallPoint& z) const { return jacobian(z.coords()); }
  cplx jacobian_det(const CVec& z) const { return jacobian(z).determinant(); }
  cplx jacobian_det(const BallPoint& z) const { return jacobian_det(z.coords()); }

  // Disk maps only: (f'(z), f''(z)), exact per kind.
  std::pair<cplx, cplx> derivatives_1d(cplx z) const;

  // True when the map provably sends the ball into itself (automorphisms,
  // rotations, stacks/compositions of such).
  bool provably_ball_self_map() const;

  // Factories.
  static HoloMap identity(int n);
  static HoloMap polynomial(int n, std::vector<PolyComponent> comps);
  static HoloMap automorphism(const BallPoint& a);
  static HoloMap diagonal_stack(std::vector<HoloMap> children);
  static HoloMap scalar_rotation(int n, int row, cplx unit_factor);
  // outer(inner(z)); the range check is the caller's responsibility here,
  // eval still rejects inner values that leave the outer domain.
  static HoloMap composition(HoloMap outer, HoloMap inner);

  // Introspection for serialization and tests; throws on kind mismatch.
  const std::vector<PolyComponent>& poly_components() const;
  double extremal_m() const;
  double extremal_lambda() const;
  const geom::Mobius& mobius() const;
  int child_count() const;
  const HoloMap& child(int i) const;
  int rotation_row() const;
  cplx rotation_factor() const;

  // Opaque node access for the module internals (evaluation kernels,
  // serialization).
  const Node& node() const { return *node_; }

 private:
  friend HoloMap make_map(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

// lambda(m) = m (1-m^2)^((n+1)/2) sqrt(n+2) ((n+2)/(n+1))^((n+1)/2):
// the normalization that gives the extremal family unit prenorm.
double extremal_lambda(double m, int n);

// Largest anchor m accepted by extremal_map; beyond the monotone branch
// a0(1) the family is still well defined and prenorm-one, which the
// sharpness sweep needs for large eps.
inline constexpr double kExtremalMaxM = 0.95;

// f_lambda: first component is the antiderivative of
// lambda (m - xi) / (m (1 - m xi)^(n+2)), remaining components identity.
HoloMap extremal_map(double m, int n);

// Spec-facing alias for the automorphism factory.
HoloMap mobius_auto(const BallPoint& a);

// Sampled ball-into-ball verification over quasi-random interior points;
// throws with a witness point on violation. Provable self-maps
// (automorphisms, rotations, their stacks and compositions) skip the
// sampling.
void require_ball_self_map(const HoloMap& phi, int samples = 10000);

// C_phi f = f o phi after require_ball_self_map(phi, range_samples);
// range_samples = 0 skips the check for callers that already ran it.
HoloMap compose(const HoloMap& f, const HoloMap& phi, int range_samples = 10000);

// c * f as a map (linear entire outer component-scaling).
HoloMap scaled(const HoloMap& f, cplx c);

class DegenerateDeterminant : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RotationResult {
  HoloMap map;     // first component multiplied by e^{-i theta}
  double lambda;   // |det f'(0)|
  double theta;    // arg det f'(0)
};

// Normalizes det f'(0) to the positive real lambda; throws
// DegenerateDeterminant when det f'(0) = 0.
RotationResult rotate_to_positive_det(const HoloMap& f);

// Jacobian oracle: a first-order dual pass over the evaluation tree, i.e.
// the cancellation-free complex-step scheme; h only scales the seed.
// Used by tests against the exact per-kind rules.
ComplexMatrix oracle_jacobian(const HoloMap& f, const BallPoint& z, double h);

// Random test map: all monomials of total degree <= degree with centered
// complex Gaussian coefficients (unnormalized).
HoloMap random_polynomial(int n, int degree, Rng& rng);

}  // namespace blochball::holo
