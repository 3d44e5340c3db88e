#include "minspace/symbol.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace minspace {

namespace {

constexpr double kDenominatorFloor = 1e-14;
// Rational reduction degree cap: compositions square degrees, so runaway
// trees are cut off before the companion matrix becomes infeasible.
constexpr int kMaxRationalCoeffs = 513;

void require_finite(Complex z, const char* what) {
  if (!is_finite(z)) {
    throw validation_error(std::string(what) + " must be finite");
  }
}

// Jet of the involution (a - z)/(1 - conj(a) z) at z.
Jet2 mobius_jet(Complex a, Complex z) {
  const Complex ac = std::conj(a);
  const Complex den = 1.0 - ac * z;
  if (std::abs(den) < kDenominatorFloor) {
    throw eval_error("Mobius denominator underflow");
  }
  const Complex den2 = den * den;
  const double a2m1 = std::norm(a) - 1.0;
  Jet2 jet;
  jet.f = (a - z) / den;
  jet.d1 = a2m1 / den2;
  jet.d2 = 2.0 * ac * a2m1 / (den2 * den);
  return jet;
}

Jet2 jet_product(const Jet2& u, const Jet2& v) {
  Jet2 jet;
  jet.f = u.f * v.f;
  jet.d1 = u.d1 * v.f + u.f * v.d1;
  jet.d2 = u.d2 * v.f + 2.0 * u.d1 * v.d1 + u.f * v.d2;
  return jet;
}

// Chain rule: jet of outer o inner given outer's jet at inner(z).
Jet2 jet_chain(const Jet2& outer, const Jet2& inner) {
  Jet2 jet;
  jet.f = outer.f;
  jet.d1 = outer.d1 * inner.d1;
  jet.d2 = outer.d2 * inner.d1 * inner.d1 + outer.d1 * inner.d2;
  return jet;
}

Jet2 eval_jet_node(const Symbol::Node& n, Complex z);

struct JetVisitor {
  Complex z;

  Jet2 operator()(const Symbol::Identity&) const {
    return Jet2{z, Complex(1.0, 0.0), Complex(0.0, 0.0)};
  }
  Jet2 operator()(const Symbol::Constant& c) const {
    return Jet2{c.value, Complex(0.0, 0.0), Complex(0.0, 0.0)};
  }
  Jet2 operator()(const Symbol::Mobius& m) const {
    return mobius_jet(m.alpha, z);
  }
  Jet2 operator()(const Symbol::Blaschke& b) const {
    Jet2 jet{b.rotation, Complex(0.0, 0.0), Complex(0.0, 0.0)};
    for (Complex a : b.zeros) {
      jet = jet_product(jet, mobius_jet(a, z));
    }
    return jet;
  }
  Jet2 operator()(const Symbol::Polynomial& p) const {
    // Horner for the value and both derivatives together.
    Complex f(0.0, 0.0), d1(0.0, 0.0), d2(0.0, 0.0);
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
      d2 = d2 * z + 2.0 * d1;
      d1 = d1 * z + f;
      f = f * z + *it;
    }
    return Jet2{f, d1, d2};
  }
  Jet2 operator()(const Symbol::Compose& c) const {
    const Jet2 inner = eval_jet_node(*c.inner, z);
    const Jet2 outer = eval_jet_node(*c.outer, inner.f);
    return jet_chain(outer, inner);
  }
  Jet2 operator()(const Symbol::Product& p) const {
    return jet_product(eval_jet_node(*p.left, z), eval_jet_node(*p.right, z));
  }
};

Jet2 eval_jet_node(const Symbol::Node& n, Complex z) {
  return std::visit(JetVisitor{z}, n.v);
}

Complex eval_node(const Symbol::Node& n, Complex z);

struct EvalVisitor {
  Complex z;

  Complex operator()(const Symbol::Identity&) const { return z; }
  Complex operator()(const Symbol::Constant& c) const { return c.value; }
  Complex operator()(const Symbol::Mobius& m) const {
    const Complex den = 1.0 - std::conj(m.alpha) * z;
    if (std::abs(den) < kDenominatorFloor) {
      throw eval_error("Mobius denominator underflow");
    }
    return (m.alpha - z) / den;
  }
  Complex operator()(const Symbol::Blaschke& b) const {
    Complex v = b.rotation;
    for (Complex a : b.zeros) {
      const Complex den = 1.0 - std::conj(a) * z;
      if (std::abs(den) < kDenominatorFloor) {
        throw eval_error("Blaschke factor denominator underflow");
      }
      v *= (a - z) / den;
    }
    return v;
  }
  Complex operator()(const Symbol::Polynomial& p) const {
    Complex f(0.0, 0.0);
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
      f = f * z + *it;
    }
    return f;
  }
  Complex operator()(const Symbol::Compose& c) const {
    return eval_node(*c.outer, eval_node(*c.inner, z));
  }
  Complex operator()(const Symbol::Product& p) const {
    return eval_node(*p.left, z) * eval_node(*p.right, z);
  }
};

Complex eval_node(const Symbol::Node& n, Complex z) {
  return std::visit(EvalVisitor{z}, n.v);
}

// ---- polynomial helpers for rational reduction (ascending coefficients) --

using Poly = std::vector<Complex>;

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, Complex(0.0, 0.0));
  if (c.size() > static_cast<size_t>(kMaxRationalCoeffs)) {
    throw unsupported_symbol_error(
        "rational reduction exceeds the supported degree cap");
  }
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) {
      c[i + j] += a[i] * b[j];
    }
  }
  return c;
}

void poly_add_inplace(Poly& a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size(), Complex(0.0, 0.0));
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
}

Poly poly_scale(const Poly& a, Complex s) {
  Poly c = a;
  for (auto& x : c) x *= s;
  return c;
}

Poly poly_pow(const Poly& a, int k) {
  Poly r{Complex(1.0, 0.0)};
  for (int i = 0; i < k; ++i) r = poly_mul(r, a);
  return r;
}

// Substitute the rational g = pg/qg into the polynomial f (degree m):
// f(g) = sum_k f_k pg^k qg^{m-k} / qg^m, returned as the homogenized
// numerator (denominator is qg^m, built by the caller).
Poly poly_compose_homogenized(const Poly& f, const Poly& pg, const Poly& qg) {
  const int m = static_cast<int>(f.size()) - 1;
  Poly acc;
  for (int k = 0; k <= m; ++k) {
    if (f[k] == Complex(0.0, 0.0)) continue;
    Poly term = poly_scale(poly_mul(poly_pow(pg, k), poly_pow(qg, m - k)), f[k]);
    poly_add_inplace(acc, term);
  }
  if (acc.empty()) acc = {Complex(0.0, 0.0)};
  return acc;
}

RationalPoly rational_node(const Symbol::Node& n);

struct RationalVisitor {
  RationalPoly operator()(const Symbol::Identity&) const {
    return {{Complex(0.0, 0.0), Complex(1.0, 0.0)}, {Complex(1.0, 0.0)}};
  }
  RationalPoly operator()(const Symbol::Constant& c) const {
    return {{c.value}, {Complex(1.0, 0.0)}};
  }
  RationalPoly operator()(const Symbol::Mobius& m) const {
    return {{m.alpha, Complex(-1.0, 0.0)},
            {Complex(1.0, 0.0), -std::conj(m.alpha)}};
  }
  RationalPoly operator()(const Symbol::Blaschke& b) const {
    Poly num{b.rotation};
    Poly den{Complex(1.0, 0.0)};
    for (Complex a : b.zeros) {
      num = poly_mul(num, Poly{a, Complex(-1.0, 0.0)});
      den = poly_mul(den, Poly{Complex(1.0, 0.0), -std::conj(a)});
    }
    return {num, den};
  }
  RationalPoly operator()(const Symbol::Polynomial& p) const {
    Poly num = p.coeffs;
    if (num.empty()) num = {Complex(0.0, 0.0)};
    return {num, {Complex(1.0, 0.0)}};
  }
  RationalPoly operator()(const Symbol::Compose& c) const {
    const RationalPoly inner = rational_node(*c.inner);
    const RationalPoly outer = rational_node(*c.outer);
    // outer = pf/qf evaluated at inner = pg/qg: homogenize both.
    const int mf = static_cast<int>(
        std::max(outer.num.size(), outer.den.size()) - 1);
    Poly pf = outer.num;
    Poly qf = outer.den;
    pf.resize(mf + 1, Complex(0.0, 0.0));
    qf.resize(mf + 1, Complex(0.0, 0.0));
    RationalPoly r;
    r.num = poly_compose_homogenized(pf, inner.num, inner.den);
    r.den = poly_compose_homogenized(qf, inner.num, inner.den);
    return r;
  }
  RationalPoly operator()(const Symbol::Product& p) const {
    const RationalPoly a = rational_node(*p.left);
    const RationalPoly b = rational_node(*p.right);
    return {poly_mul(a.num, b.num), poly_mul(a.den, b.den)};
  }
};

RationalPoly rational_node(const Symbol::Node& n) {
  return std::visit(RationalVisitor{}, n.v);
}

void trim_leading(Poly& p) {
  double maxmag = 0.0;
  for (Complex c : p) maxmag = std::max(maxmag, std::abs(c));
  const double cut = 1e-14 * maxmag;
  while (p.size() > 1 && std::abs(p.back()) <= cut) p.pop_back();
}

}  // namespace

Symbol identity_symbol() { return Symbol(Symbol::Node{Symbol::Identity{}}); }

Symbol make_constant(Complex value) {
  require_finite(value, "constant value");
  return Symbol(Symbol::Node{Symbol::Constant{value}});
}

Symbol make_mobius(Complex alpha) {
  require_finite(alpha, "Mobius parameter");
  if (std::abs(alpha) > 1.0 + 1e-12) {
    throw validation_error("Mobius parameter must lie in the closed disk");
  }
  return Symbol(Symbol::Node{Symbol::Mobius{alpha}});
}

Symbol make_blaschke(std::vector<Complex> zeros, Complex rotation) {
  if (zeros.empty()) {
    throw validation_error("Blaschke product needs at least one zero");
  }
  for (Complex a : zeros) {
    require_finite(a, "Blaschke zero");
    if (std::abs(a) >= 1.0) {
      throw validation_error("Blaschke zeros must lie strictly inside the disk");
    }
  }
  require_finite(rotation, "Blaschke rotation");
  if (std::abs(std::abs(rotation) - 1.0) > 1e-12) {
    throw validation_error("Blaschke rotation must be unimodular");
  }
  return Symbol(Symbol::Node{Symbol::Blaschke{std::move(zeros), rotation}});
}

Symbol make_polynomial(std::vector<Complex> coeffs) {
  if (coeffs.empty()) {
    throw validation_error("polynomial needs at least one coefficient");
  }
  for (Complex c : coeffs) require_finite(c, "polynomial coefficient");
  return Symbol(Symbol::Node{Symbol::Polynomial{std::move(coeffs)}});
}

Symbol compose(const Symbol& outer, const Symbol& inner) {
  return Symbol(Symbol::Node{Symbol::Compose{outer.node_ptr(), inner.node_ptr()}});
}

Symbol product(const Symbol& a, const Symbol& b) {
  return Symbol(Symbol::Node{Symbol::Product{a.node_ptr(), b.node_ptr()}});
}

Complex eval(const Symbol& s, Complex z) {
  require_finite(z, "evaluation point");
  const Complex v = eval_node(*s.node_ptr(), z);
  if (!is_finite(v)) throw eval_error("non-finite evaluation");
  return v;
}

Jet2 eval_jet(const Symbol& s, Complex z) {
  require_finite(z, "evaluation point");
  const Jet2 jet = eval_jet_node(*s.node_ptr(), z);
  if (!is_finite(jet.f) || !is_finite(jet.d1) || !is_finite(jet.d2)) {
    throw eval_error("non-finite jet evaluation");
  }
  return jet;
}

Complex comp_second_derivative(Complex alpha, const Symbol& psi, Complex z) {
  require_finite(alpha, "alpha");
  if (std::abs(alpha) >= 1.0) {
    throw validation_error("comp_second_derivative needs |alpha| < 1");
  }
  const Jet2 jet = eval_jet(psi, z);
  const Complex ac = std::conj(alpha);
  const Complex den = 1.0 - ac * jet.f;
  if (std::abs(den) < kDenominatorFloor) {
    throw eval_error("1 - conj(alpha) psi underflow");
  }
  const Complex den2 = den * den;
  const double a2m1 = std::norm(alpha) - 1.0;
  return a2m1 * (jet.d2 / den2 + 2.0 * ac * jet.d1 * jet.d1 / (den2 * den));
}

SelfMapReport validate_self_map(const Symbol& s, int samples, double tol) {
  if (samples < 64) {
    throw validation_error("self-map validation needs at least 64 samples");
  }
  if (!(tol > 0.0)) {
    throw validation_error("self-map validation tolerance must be positive");
  }
  SelfMapReport rep;
  rep.samples = samples;
  rep.tol = tol;
  const double r = 1.0 - 1e-6;
  for (int i = 0; i < samples; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / samples;
    try {
      const Complex v = eval(s, Complex(r * std::cos(t), r * std::sin(t)));
      rep.max_modulus = std::max(rep.max_modulus, std::abs(v));
    } catch (const eval_error&) {
      // A pole this close to the boundary means the map cannot be a
      // self-map of the disk; record and reject below.
      ++rep.eval_failures;
    }
  }
  rep.boundary_touching = rep.max_modulus >= 1.0 - tol;
  rep.accepted = rep.eval_failures == 0 && rep.max_modulus <= 1.0 + tol;
  return rep;
}

RationalPoly to_rational(const Symbol& s) {
  RationalPoly r = rational_node(*s.node_ptr());
  trim_leading(r.num);
  trim_leading(r.den);
  for (Complex c : r.num) {
    if (!is_finite(c)) throw eval_error("non-finite rational coefficient");
  }
  for (Complex c : r.den) {
    if (!is_finite(c)) throw eval_error("non-finite rational coefficient");
  }
  return r;
}

ValencySolver::ValencySolver(const Symbol& s, double cluster_tol,
                             double boundary_margin)
    : rp_(to_rational(s)),
      cluster_tol_(cluster_tol),
      boundary_margin_(boundary_margin) {
  if (!(cluster_tol > 0.0) || !(boundary_margin > 0.0)) {
    throw validation_error("valency tolerances must be positive");
  }
}

int ValencySolver::degree() const {
  return static_cast<int>(std::max(rp_.num.size(), rp_.den.size())) - 1;
}

ValencyReport ValencySolver::at(Complex w) const {
  require_finite(w, "valency target");

  // p(z) - w q(z), ascending.
  Poly poly = rp_.num;
  if (rp_.den.size() > poly.size()) poly.resize(rp_.den.size(), Complex(0.0, 0.0));
  for (size_t i = 0; i < rp_.den.size(); ++i) poly[i] -= w * rp_.den[i];
  trim_leading(poly);

  ValencyReport rep;
  rep.boundary_margin = boundary_margin_;

  const int deg = static_cast<int>(poly.size()) - 1;
  if (deg <= 0) {
    // Constant equation: either no solution or identically zero; the
    // latter cannot happen for a nonconstant rational map.
    return rep;
  }

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  const Complex lead = poly[deg];
  for (int i = 0; i < deg; ++i) {
    companion(i, deg - 1) = -poly[i] / lead;
    if (i + 1 < deg) companion(i + 1, i) = Complex(1.0, 0.0);
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw unsupported_symbol_error("companion eigenvalue solve failed");
  }

  std::vector<Complex> roots(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + deg);
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  double max_mod = 0.0;
  for (Complex r : roots) max_mod = std::max(max_mod, std::abs(r));
  // Relative tolerance with a unit floor: the roots of interest live in the
  // unit disk, and an all-roots-at-origin equation must still cluster.
  const double tol = cluster_tol_ * std::max(1.0, max_mod);

  // Single-linkage clustering on the sorted roots, O(k^2) on the handful of
  // roots a capped-degree symbol can have.
  std::vector<int> cluster(roots.size(), -1);
  int n_clusters = 0;
  for (size_t i = 0; i < roots.size(); ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = n_clusters;
    // Grow the cluster transitively.
    bool grew = true;
    while (grew) {
      grew = false;
      for (size_t j = 0; j < roots.size(); ++j) {
        if (cluster[j] >= 0) continue;
        for (size_t k = 0; k < roots.size(); ++k) {
          if (cluster[k] == n_clusters && std::abs(roots[j] - roots[k]) <= tol) {
            cluster[j] = n_clusters;
            grew = true;
            break;
          }
        }
      }
    }
    ++n_clusters;
  }

  for (int c = 0; c < n_clusters; ++c) {
    Complex centroid(0.0, 0.0);
    int mult = 0;
    for (size_t i = 0; i < roots.size(); ++i) {
      if (cluster[i] == c) {
        centroid += roots[i];
        ++mult;
      }
    }
    centroid /= static_cast<double>(mult);
    rep.roots.push_back(centroid);
    rep.clustered_multiplicity.push_back(mult);
    const double mod = std::abs(centroid);
    if (mod < 1.0 - boundary_margin_) {
      ++rep.count;
    } else if (mod <= 1.0 + boundary_margin_) {
      rep.boundary_flagged.push_back(centroid);
    }
  }
  return rep;
}

ValencyReport valency(const Symbol& s, Complex w, double cluster_tol,
                      double boundary_margin) {
  return ValencySolver(s, cluster_tol, boundary_margin).at(w);
}

}  // namespace minspace
