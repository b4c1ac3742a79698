#include "blochball/holo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace blochball::holo {

namespace {

// First-order dual over complex scalars: value + derivative seed. Carries the
// cancellation-free complex-step pass through the evaluation tree.
struct CDual {
  cplx v{0.0};
  cplx d{0.0};
  CDual() = default;
  CDual(double x) : v(x) {}       // NOLINT(google-explicit-constructor)
  CDual(cplx x) : v(x) {}         // NOLINT(google-explicit-constructor)
  CDual(cplx x, cplx dx) : v(x), d(dx) {}
};

inline CDual operator+(const CDual& a, const CDual& b) { return {a.v + b.v, a.d + b.d}; }
inline CDual operator-(const CDual& a, const CDual& b) { return {a.v - b.v, a.d - b.d}; }
inline CDual operator-(const CDual& a) { return {-a.v, -a.d}; }
inline CDual operator*(const CDual& a, const CDual& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
inline CDual operator/(const CDual& a, const CDual& b) {
  const cplx q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}
inline CDual operator*(const CDual& a, const cplx& c) { return {a.v * c, a.d * c}; }
inline CDual operator*(const cplx& c, const CDual& a) { return a * c; }
inline CDual operator*(const CDual& a, double c) { return {a.v * c, a.d * c}; }
inline CDual operator+(const cplx& c, const CDual& a) { return {c + a.v, a.d}; }
inline CDual operator+(const CDual& a, const cplx& c) { return c + a; }
inline CDual operator-(const cplx& c, const CDual& a) { return {c - a.v, -a.d}; }
inline CDual operator-(const CDual& a, const cplx& c) { return {a.v - c, a.d}; }
inline CDual operator/(const CDual& a, const cplx& c) { return {a.v / c, a.d / c}; }
inline CDual operator/(const cplx& c, const CDual& b) {
  const cplx q = c / b.v;
  return {q, -q * b.d / b.v};
}

inline cplx value_of(const cplx& c) { return c; }
inline cplx value_of(const CDual& d) { return d.v; }

template <class S>
double value_norm(const std::vector<S>& z) {
  double s = 0.0;
  for (const S& c : z) s += std::norm(value_of(c));
  return std::sqrt(s);
}

template <class S>
S int_pow(S base, int e) {
  S r(cplx(1.0));
  for (int i = 0; i < e; ++i) r = r * base;
  return r;
}

}  // namespace

struct Node {
  MapKind kind;
  int n = 1;
  // polynomial
  std::vector<PolyComponent> comps;
  // extremal
  double m = 0.0;
  double lambda = 0.0;
  // automorphism
  std::optional<geom::Mobius> mob;
  // composition {outer, inner} / stack children
  std::vector<HoloMap> children;
  // scalar rotation
  int row = 0;
  cplx factor{1.0, 0.0};
};

HoloMap make_map(std::shared_ptr<const Node> node) {
  HoloMap m;
  m.node_ = std::move(node);
  return m;
}

const char* kind_name(MapKind k) {
  switch (k) {
    case MapKind::polynomial: return "polynomial";
    case MapKind::extremal: return "extremal";
    case MapKind::automorphism: return "automorphism";
    case MapKind::composition: return "composition";
    case MapKind::diagonal_stack: return "diagonal-stack";
    case MapKind::scalar_rotation: return "scalar-rotation";
  }
  return "?";
}

int HoloMap::dim() const { return node_->n; }
MapKind HoloMap::kind() const { return node_->kind; }

namespace {

// Whether the evaluation formulas require |z| < 1 (rational kinds); entire
// kinds accept any input.
bool needs_ball_domain(const Node& nd) {
  switch (nd.kind) {
    case MapKind::automorphism:
    case MapKind::extremal:
      return true;
    case MapKind::polynomial:
    case MapKind::scalar_rotation:
      return false;
    case MapKind::composition:
      return true;  // the inner child is a ball map
    case MapKind::diagonal_stack:
      for (const HoloMap& c : nd.children)
        if (needs_ball_domain(c.node())) return true;
      return false;
  }
  return true;
}

template <class S>
std::vector<S> eval_node(const Node& nd, const std::vector<S>& z);

template <class S>
std::vector<S> eval_polynomial(const Node& nd, const std::vector<S>& z) {
  int maxdeg = 0;
  for (const auto& comp : nd.comps)
    for (const auto& t : comp)
      for (int p : t.powers) maxdeg = std::max(maxdeg, p);
  // power table: pows[k][e] = z_k^e
  std::vector<std::vector<S>> pows(nd.n);
  for (int k = 0; k < nd.n; ++k) {
    pows[k].resize(maxdeg + 1, S(cplx(1.0)));
    for (int e = 1; e <= maxdeg; ++e) pows[k][e] = pows[k][e - 1] * z[k];
  }
  std::vector<S> out(nd.n, S(cplx(0.0)));
  for (int i = 0; i < nd.n; ++i) {
    for (const PolyTerm& t : nd.comps[i]) {
      S mono(t.coeff);
      for (int k = 0; k < nd.n; ++k)
        if (t.powers[k] > 0) mono = mono * pows[k][t.powers[k]];
      out[i] = out[i] + mono;
    }
  }
  return out;
}

// Antiderivative of lambda (m - xi) / (m (1 - m xi)^(n+2)) vanishing at 0:
//   F(z) = (lambda/m^3) [ (m^2-1)/((n+1) u^(n+1)) + 1/(n u^n) ] - F0,
// with u = 1 - m z.
template <class S>
S extremal_first_component(double m, double lambda, int n, const S& z1) {
  const double c = lambda / (m * m * m);
  const double c1 = c * (m * m - 1.0) / (n + 1);
  const double c2 = c / n;
  const S u = cplx(1.0) - cplx(m) * z1;
  const S un = int_pow(u, n);
  const S un1 = un * u;
  const double f0 = c1 + c2;
  return cplx(c1) / un1 + cplx(c2) / un - cplx(f0);
}

template <class S>
std::vector<S> eval_node(const Node& nd, const std::vector<S>& z) {
  if (static_cast<int>(z.size()) != nd.n)
    throw std::invalid_argument("HoloMap::eval: dimension mismatch");
  if (needs_ball_domain(nd) && !(value_norm(z) < 1.0))
    throw std::domain_error("HoloMap::eval: point outside the open unit ball");
  switch (nd.kind) {
    case MapKind::polynomial:
      return eval_polynomial(nd, z);
    case MapKind::extremal: {
      std::vector<S> out(z);
      out[0] = extremal_first_component(nd.m, nd.lambda, nd.n, z[0]);
      return out;
    }
    case MapKind::automorphism:
      return nd.mob->apply_generic<S>(z);
    case MapKind::composition: {
      const Node& inner = nd.children[1].node();
      const Node& outer = nd.children[0].node();
      std::vector<S> w = eval_node(inner, z);
      if (needs_ball_domain(outer) && !(value_norm(w) < 1.0)) {
        std::ostringstream os;
        os << "composition: inner child (" << kind_name(inner.kind)
           << ") left the unit ball, |w| = " << value_norm(w);
        throw std::domain_error(os.str());
      }
      return eval_node(outer, w);
    }
    case MapKind::diagonal_stack: {
      std::vector<S> out;
      out.reserve(nd.n);
      std::size_t off = 0;
      for (const HoloMap& c : nd.children) {
        const std::size_t cn = c.dim();
        std::vector<S> part(z.begin() + off, z.begin() + off + cn);
        std::vector<S> img = eval_node(c.node(), part);
        out.insert(out.end(), img.begin(), img.end());
        off += cn;
      }
      return out;
    }
    case MapKind::scalar_rotation: {
      std::vector<S> out(z);
      out[nd.row] = out[nd.row] * nd.factor;
      return out;
    }
  }
  throw std::logic_error("eval_node: unknown kind");
}

ComplexMatrix jacobian_node(const Node& nd, const CVec& z) {
  if (static_cast<int>(z.size()) != nd.n)
    throw std::invalid_argument("HoloMap::jacobian: dimension mismatch");
  if (needs_ball_domain(nd) && !(vec_norm(z) < 1.0))
    throw std::domain_error("HoloMap::jacobian: point outside the open unit ball");
  switch (nd.kind) {
    case MapKind::polynomial: {
      ComplexMatrix jac(nd.n);
      for (int i = 0; i < nd.n; ++i)
        for (const PolyTerm& t : nd.comps[i])
          for (int j = 0; j < nd.n; ++j) {
            if (t.powers[j] == 0) continue;
            cplx mono = t.coeff * static_cast<double>(t.powers[j]);
            for (int k = 0; k < nd.n; ++k) {
              const int e = k == j ? t.powers[k] - 1 : t.powers[k];
              mono *= int_pow(z[k], e);
            }
            jac.at(i, j) += mono;
          }
      return jac;
    }
    case MapKind::extremal: {
      ComplexMatrix jac = ComplexMatrix::identity(nd.n);
      const cplx u = cplx(1.0) - nd.m * z[0];
      jac.at(0, 0) =
          nd.lambda * (nd.m - z[0]) / (nd.m * int_pow(u, nd.n + 2));
      return jac;
    }
    case MapKind::automorphism:
      return nd.mob->jacobian(z);
    case MapKind::composition: {
      const Node& inner = nd.children[1].node();
      const Node& outer = nd.children[0].node();
      CVec w = eval_node(inner, z);
      if (needs_ball_domain(outer) && !(vec_norm(w) < 1.0))
        throw std::domain_error(
            "composition: inner child left the unit ball in jacobian");
      return jacobian_node(outer, w).mul(jacobian_node(inner, z));
    }
    case MapKind::diagonal_stack: {
      ComplexMatrix jac(nd.n);
      int off = 0;
      for (const HoloMap& c : nd.children) {
        const int cn = c.dim();
        CVec part(z.begin() + off, z.begin() + off + cn);
        ComplexMatrix cj = jacobian_node(c.node(), part);
        for (int i = 0; i < cn; ++i)
          for (int j = 0; j < cn; ++j) jac.at(off + i, off + j) = cj.at(i, j);
        off += cn;
      }
      return jac;
    }
    case MapKind::scalar_rotation: {
      ComplexMatrix jac = ComplexMatrix::identity(nd.n);
      jac.at(nd.row, nd.row) = nd.factor;
      return jac;
    }
  }
  throw std::logic_error("jacobian_node: unknown kind");
}

std::pair<cplx, cplx> derivatives_1d_node(const Node& nd, cplx z) {
  switch (nd.kind) {
    case MapKind::polynomial: {
      cplx d1 = 0.0, d2 = 0.0;
      for (const PolyTerm& t : nd.comps[0]) {
        const int p = t.powers[0];
        if (p >= 1) d1 += t.coeff * static_cast<double>(p) * int_pow(z, p - 1);
        if (p >= 2)
          d2 += t.coeff * static_cast<double>(p) * static_cast<double>(p - 1) *
                int_pow(z, p - 2);
      }
      return {d1, d2};
    }
    case MapKind::extremal: {
      const double m = nd.m, lam = nd.lambda;
      const cplx u = cplx(1.0) - m * z;
      const cplx d1 = lam * (m - z) / (m * int_pow(u, 3));
      const cplx d2 = lam * (3.0 * m * m - 1.0 - 2.0 * m * z) / (m * int_pow(u, 4));
      return {d1, d2};
    }
    case MapKind::automorphism: {
      const cplx a = nd.mob->anchor()[0];
      if (a == cplx(0.0)) return {-1.0, 0.0};
      const double s2 = 1.0 - std::norm(a);
      const cplx den = cplx(1.0) - std::conj(a) * z;
      return {-s2 / (den * den), -2.0 * std::conj(a) * s2 / (den * den * den)};
    }
    case MapKind::composition: {
      const Node& inner = nd.children[1].node();
      const Node& outer = nd.children[0].node();
      const cplx w = eval_node<cplx>(inner, {z})[0];
      const auto [g1, g2] = derivatives_1d_node(inner, z);
      const auto [f1, f2] = derivatives_1d_node(outer, w);
      return {f1 * g1, f2 * g1 * g1 + f1 * g2};
    }
    case MapKind::diagonal_stack:
      return derivatives_1d_node(nd.children[0].node(), z);
    case MapKind::scalar_rotation:
      return {nd.factor, 0.0};
  }
  throw std::logic_error("derivatives_1d_node: unknown kind");
}

}  // namespace

CVec HoloMap::eval(const CVec& z) const { return eval_node<cplx>(node(), z); }

ComplexMatrix HoloMap::jacobian(const CVec& z) const {
  return jacobian_node(node(), z);
}

std::pair<cplx, cplx> HoloMap::derivatives_1d(cplx z) const {
  if (dim() != 1)
    throw std::invalid_argument("derivatives_1d: map is not one-dimensional");
  return derivatives_1d_node(node(), z);
}

bool HoloMap::provably_ball_self_map() const {
  switch (kind()) {
    case MapKind::automorphism:
    case MapKind::scalar_rotation:
      return true;
    case MapKind::composition:
    case MapKind::diagonal_stack:
      for (const HoloMap& c : node_->children)
        if (!c.provably_ball_self_map()) return false;
      return true;
    default:
      return false;
  }
}

HoloMap HoloMap::identity(int n) {
  std::vector<PolyComponent> comps(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> p(n, 0);
    p[i] = 1;
    comps[i].push_back({cplx(1.0), p});
  }
  return polynomial(n, std::move(comps));
}

HoloMap HoloMap::polynomial(int n, std::vector<PolyComponent> comps) {
  if (n < 1) throw std::invalid_argument("polynomial: n >= 1");
  if (static_cast<int>(comps.size()) != n)
    throw std::invalid_argument("polynomial: need one component per dimension");
  for (const auto& comp : comps)
    for (const auto& t : comp) {
      if (static_cast<int>(t.powers.size()) != n)
        throw std::invalid_argument("polynomial: term power list has wrong size");
      for (int p : t.powers)
        if (p < 0) throw std::invalid_argument("polynomial: negative power");
    }
  auto node = std::make_shared<Node>();
  node->kind = MapKind::polynomial;
  node->n = n;
  node->comps = std::move(comps);
  return make_map(std::move(node));
}

HoloMap HoloMap::automorphism(const BallPoint& a) {
  auto node = std::make_shared<Node>();
  node->kind = MapKind::automorphism;
  node->n = a.dim();
  node->mob.emplace(a);
  return make_map(std::move(node));
}

HoloMap HoloMap::diagonal_stack(std::vector<HoloMap> children) {
  if (children.empty())
    throw std::invalid_argument("diagonal_stack: no children");
  auto node = std::make_shared<Node>();
  node->kind = MapKind::diagonal_stack;
  node->n = 0;
  for (const HoloMap& c : children) node->n += c.dim();
  node->children = std::move(children);
  return make_map(std::move(node));
}

HoloMap HoloMap::scalar_rotation(int n, int row, cplx unit_factor) {
  if (n < 1) throw std::invalid_argument("scalar_rotation: n >= 1");
  if (row < 0 || row >= n)
    throw std::invalid_argument("scalar_rotation: row out of range");
  const double mod = std::abs(unit_factor);
  if (std::abs(mod - 1.0) > 1e-9)
    throw std::invalid_argument("scalar_rotation: factor must be unimodular");
  auto node = std::make_shared<Node>();
  node->kind = MapKind::scalar_rotation;
  node->n = n;
  node->row = row;
  node->factor = unit_factor / mod;
  return make_map(std::move(node));
}

HoloMap HoloMap::composition(HoloMap outer, HoloMap inner) {
  if (outer.dim() != inner.dim())
    throw std::invalid_argument("composition: dimension mismatch");
  auto node = std::make_shared<Node>();
  node->kind = MapKind::composition;
  node->n = outer.dim();
  node->children = {std::move(outer), std::move(inner)};
  return make_map(std::move(node));
}

const std::vector<PolyComponent>& HoloMap::poly_components() const {
  if (kind() != MapKind::polynomial)
    throw std::logic_error("poly_components: wrong kind");
  return node_->comps;
}
double HoloMap::extremal_m() const {
  if (kind() != MapKind::extremal) throw std::logic_error("extremal_m: wrong kind");
  return node_->m;
}
double HoloMap::extremal_lambda() const {
  if (kind() != MapKind::extremal)
    throw std::logic_error("extremal_lambda: wrong kind");
  return node_->lambda;
}
const geom::Mobius& HoloMap::mobius() const {
  if (kind() != MapKind::automorphism) throw std::logic_error("mobius: wrong kind");
  return *node_->mob;
}
int HoloMap::child_count() const {
  return static_cast<int>(node_->children.size());
}
const HoloMap& HoloMap::child(int i) const { return node_->children.at(i); }
int HoloMap::rotation_row() const {
  if (kind() != MapKind::scalar_rotation)
    throw std::logic_error("rotation_row: wrong kind");
  return node_->row;
}
cplx HoloMap::rotation_factor() const {
  if (kind() != MapKind::scalar_rotation)
    throw std::logic_error("rotation_factor: wrong kind");
  return node_->factor;
}

double extremal_lambda(double m, int n) {
  return m * std::pow(1.0 - m * m, 0.5 * (n + 1)) * std::sqrt(n + 2.0) *
         std::pow((n + 2.0) / (n + 1.0), 0.5 * (n + 1));
}

HoloMap extremal_map(double m, int n) {
  if (n < 1) throw std::invalid_argument("extremal_map: n >= 1");
  if (!(m > 0.0 && m <= kExtremalMaxM))
    throw std::invalid_argument("extremal_map: m must lie in (0, 0.95]");
  auto node = std::make_shared<Node>();
  node->kind = MapKind::extremal;
  node->n = n;
  node->m = m;
  node->lambda = extremal_lambda(m, n);
  return make_map(std::move(node));
}

HoloMap mobius_auto(const BallPoint& a) {
  require_interior(a);
  return HoloMap::automorphism(a);
}

HoloMap compose(const HoloMap& f, const HoloMap& phi, int range_samples) {
  if (f.dim() != phi.dim())
    throw std::invalid_argument("compose: dimension mismatch");
  if (!phi.provably_ball_self_map() && range_samples > 0) {
    BallSampler sampler(phi.dim(), 1.0 - 1e-6, /*seed=*/0xC0F3u);
    for (int i = 0; i < range_samples; ++i) {
      const BallPoint z = sampler.next();
      const CVec w = phi.eval(z.coords());
      if (!(vec_norm(w) < 1.0)) {
        std::ostringstream os;
        os << "compose: inner map leaves the ball at witness z = (";
        for (int k = 0; k < z.dim(); ++k) {
          if (k) os << ", ";
          os << z[k].real() << (z[k].imag() < 0 ? "-" : "+")
             << std::abs(z[k].imag()) << "i";
        }
        os << "), |phi(z)| = " << vec_norm(w);
        throw std::invalid_argument(os.str());
      }
    }
  }
  return HoloMap::composition(f, phi);
}

HoloMap scaled(const HoloMap& f, cplx c) {
  const int n = f.dim();
  std::vector<PolyComponent> comps(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> p(n, 0);
    p[i] = 1;
    comps[i].push_back({c, p});
  }
  return HoloMap::composition(HoloMap::polynomial(n, std::move(comps)), f);
}

RotationResult rotate_to_positive_det(const HoloMap& f) {
  const cplx det0 = f.jacobian_det(CVec(f.dim(), cplx(0.0)));
  const double lambda = std::abs(det0);
  if (lambda == 0.0)
    throw DegenerateDeterminant("rotate_to_positive_det: det f'(0) = 0");
  const double theta = std::arg(det0);
  if (theta == 0.0) return {f, lambda, 0.0};
  const cplx factor = std::exp(cplx(0.0, -theta));
  return {HoloMap::composition(HoloMap::scalar_rotation(f.dim(), 0, factor), f),
          lambda, theta};
}

ComplexMatrix oracle_jacobian(const HoloMap& f, const BallPoint& z, double h) {
  if (!(h >= 1e-30 && h <= 1e-6))
    throw std::invalid_argument("oracle_jacobian: h must lie in [1e-30, 1e-6]");
  if (!(1.0 - z.norm() > h))
    throw std::domain_error("oracle_jacobian: step too large for the boundary margin");
  const int n = z.dim();
  ComplexMatrix jac(n);
  for (int j = 0; j < n; ++j) {
    std::vector<CDual> zd(n);
    for (int k = 0; k < n; ++k) zd[k] = CDual(z[k], k == j ? cplx(h) : cplx(0.0));
    const std::vector<CDual> img = eval_node<CDual>(f.node(), zd);
    for (int i = 0; i < n; ++i) jac.at(i, j) = img[i].d / h;
  }
  return jac;
}

HoloMap random_polynomial(int n, int degree, Rng& rng) {
  if (n < 1 || degree < 0)
    throw std::invalid_argument("random_polynomial: bad parameters");
  // all multi-indices of total degree <= degree, lexicographic
  std::vector<std::vector<int>> indices;
  std::vector<int> cur(n, 0);
  const std::function<void(int, int)> gen = [&](int pos, int remaining) {
    if (pos == n) {
      indices.push_back(cur);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      cur[pos] = e;
      gen(pos + 1, remaining - e);
    }
    cur[pos] = 0;
  };
  gen(0, degree);

  std::vector<PolyComponent> comps(n);
  for (int i = 0; i < n; ++i)
    for (const auto& p : indices) comps[i].push_back({rng.cgaussian(), p});
  return HoloMap::polynomial(n, std::move(comps));
}

}  // namespace blochball::holo
