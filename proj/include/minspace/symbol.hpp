#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "minspace/types.hpp"

namespace minspace {

// Value, first and second derivative of an analytic map at one point.
struct Jet2 {
  Complex f;
  Complex d1;
  Complex d2;
};

// An analytic self-map candidate of the unit disk, represented as an
// expression tree over a small set of primitives. Immutable and cheap to
// copy (nodes are shared). Whether a symbol actually maps the disk into
// itself is checked separately by validate_self_map; construction only
// enforces local, node-level constraints.
class Symbol {
public:
  struct Node;

  struct Identity {};
  struct Constant {
    Complex value;
  };
  // z -> (alpha - z) / (1 - conj(alpha) z), the standard disk involution.
  struct Mobius {
    Complex alpha;
  };
  // rotation * prod_j (a_j - z) / (1 - conj(a_j) z). Zeros strictly inside
  // the open disk, |rotation| = 1.
  struct Blaschke {
    std::vector<Complex> zeros;
    Complex rotation;
  };
  // coeffs[k] multiplies z^k.
  struct Polynomial {
    std::vector<Complex> coeffs;
  };
  // outer(inner(z))
  struct Compose {
    std::shared_ptr<const Node> outer;
    std::shared_ptr<const Node> inner;
  };
  // left(z) * right(z)
  struct Product {
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  using NodeVariant = std::variant<Identity, Constant, Mobius, Blaschke,
                                   Polynomial, Compose, Product>;
  struct Node {
    NodeVariant v;
  };

  explicit Symbol(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
  explicit Symbol(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  const NodeVariant& node() const { return node_->v; }
  std::shared_ptr<const Node> node_ptr() const { return node_; }

private:
  std::shared_ptr<const Node> node_;
};

// Constructors. All reject non-finite data; see each for domain rules.
Symbol identity_symbol();
Symbol make_constant(Complex value);
Symbol make_mobius(Complex alpha);                // |alpha| <= 1
Symbol make_blaschke(std::vector<Complex> zeros,  // all |a_j| < 1, nonempty
                     Complex rotation);           // |rotation| = 1 (to 1e-12)
Symbol make_polynomial(std::vector<Complex> coeffs);
Symbol compose(const Symbol& outer, const Symbol& inner);
Symbol product(const Symbol& a, const Symbol& b);

// Value-only evaluation. Throws eval_error near poles / on overflow.
Complex eval(const Symbol& s, Complex z);

// Value and first two derivatives in one structural recursion. The jet of a
// composition/product is folded with the chain and Leibniz rules, so results
// are bit-identical to evaluating the same tree shape again.
Jet2 eval_jet(const Symbol& s, Complex z);

// Second derivative of z -> phi_alpha(psi(z)) where phi_alpha is the disk
// involution. Requires |alpha| < 1. Equals
//   (|alpha|^2 - 1) [ psi''/(1 - conj(alpha) psi)^2
//                     + 2 conj(alpha) psi'^2 / (1 - conj(alpha) psi)^3 ].
Complex comp_second_derivative(Complex alpha, const Symbol& psi, Complex z);

struct SelfMapReport {
  double max_modulus = 0.0;        // max |psi| over the sample circle
  bool accepted = false;           // max_modulus <= 1 + tol, no eval failures
  bool boundary_touching = false;  // max_modulus within tol of 1
  int samples = 0;
  int eval_failures = 0;
  double tol = 0.0;
};

// Samples |psi| on the circle of radius 1 - 1e-6. samples >= 64.
SelfMapReport validate_self_map(const Symbol& s, int samples = 512,
                                double tol = 1e-4);

// Rational form p(z)/q(z) of a symbol, coefficients in ascending order.
// Exists for every tree over the primitives above; compositions are
// homogenized, so degrees multiply.
struct RationalPoly {
  std::vector<Complex> num;
  std::vector<Complex> den;
};

// Throws unsupported_symbol_error when the reduced degree exceeds the cap.
RationalPoly to_rational(const Symbol& s);

struct ValencyReport {
  // Number of cluster representatives with |root| < 1 - boundary_margin.
  int count = 0;
  // One representative per cluster, interior or not, ordered by (re, im).
  std::vector<Complex> roots;
  // Companion-root count behind each representative (same indexing).
  std::vector<int> clustered_multiplicity;
  // Representatives whose modulus falls in [1 - margin, 1 + margin]: these
  // indicate numerical trouble and are never silently counted.
  std::vector<Complex> boundary_flagged;
  double boundary_margin = 0.0;
};

// Preimage counting: solves psi(z) = w via the companion matrix of
// p(z) - w q(z), clusters numerically coincident roots, and counts clusters
// with |root| < 1 - boundary_margin. Roots inside the margin band around the
// unit circle are flagged rather than counted.
class ValencySolver {
public:
  explicit ValencySolver(const Symbol& s, double cluster_tol = 1e-8,
                         double boundary_margin = 1e-10);

  ValencyReport at(Complex w) const;
  int degree() const;  // max(deg num, deg den)

private:
  RationalPoly rp_;
  double cluster_tol_;
  double boundary_margin_;
};

// One-shot convenience wrapper around ValencySolver.
ValencyReport valency(const Symbol& s, Complex w, double cluster_tol = 1e-8,
                      double boundary_margin = 1e-10);

}  // namespace minspace
