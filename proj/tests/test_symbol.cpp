#include <doctest.h>

#include <cmath>
#include <random>

#include "minspace/symbol.hpp"

using namespace minspace;

namespace {

double cdist(Complex a, Complex b) { return std::abs(a - b); }

// Deterministic points in |z| <= rmax.
std::vector<Complex> random_points(std::uint64_t seed, int n, double rmax) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(0.0, rmax), ut(0.0, 2.0 * kPi);
  std::vector<Complex> pts;
  for (int i = 0; i < n; ++i) {
    const double r = ur(rng), t = ut(rng);
    pts.emplace_back(r * std::cos(t), r * std::sin(t));
  }
  return pts;
}

Symbol monomial(int n) {
  std::vector<Complex> c(n + 1, Complex(0.0, 0.0));
  c[n] = Complex(1.0, 0.0);
  return make_polynomial(c);
}

}  // namespace

TEST_CASE("mobius basic values and involution") {
  CHECK(cdist(eval(make_mobius(Complex(0, 0)), Complex(0.3, 0)),
              Complex(-0.3, 0)) < 1e-15);
  CHECK(cdist(eval(make_mobius(Complex(0.5, 0)), Complex(0.5, 0)),
              Complex(0, 0)) < 1e-15);

  const Symbol phi = make_mobius(Complex(0.5, 0));
  for (Complex z : random_points(11, 20, 0.97)) {
    CHECK(cdist(eval(phi, eval(phi, z)), z) < 1e-12);
  }
  const Symbol phi_c = make_mobius(Complex(0.3, -0.45));
  for (Complex z : random_points(12, 20, 0.97)) {
    CHECK(cdist(eval(phi_c, eval(phi_c, z)), z) < 1e-12);
  }
}

TEST_CASE("mobius constructor domain") {
  CHECK_THROWS_AS(make_mobius(Complex(1.2, 0)), validation_error);
  CHECK_THROWS_AS(make_mobius(Complex(0.8, 0.7)), validation_error);
  CHECK_THROWS_AS(
      make_mobius(Complex(std::numeric_limits<double>::quiet_NaN(), 0)),
      validation_error);
  CHECK_NOTHROW(make_mobius(Complex(1.0, 0)));  // boundary parameter allowed

  // Unimodular parameter: evaluation near the denominator zero must fail
  // loudly instead of returning Inf.
  const Symbol phi1 = make_mobius(Complex(1.0, 0));
  CHECK_THROWS_AS(eval(phi1, Complex(1.0 - 5e-15, 0)), eval_error);
}

TEST_CASE("blaschke construction and zeros") {
  const Symbol b00 = make_blaschke({Complex(0, 0), Complex(0, 0)}, Complex(1, 0));
  const Symbol z2 = monomial(2);
  for (Complex z : random_points(13, 20, 0.999)) {
    CHECK(cdist(eval(b00, z), eval(z2, z)) < 1e-15);
  }

  const Symbol b = make_blaschke({Complex(0, 0), Complex(0.5, 0)}, Complex(1, 0));
  CHECK(std::abs(eval(b, Complex(0.5, 0))) < 1e-15);
  CHECK(std::abs(eval(b, Complex(0, 0))) < 1e-15);
}

TEST_CASE("blaschke boundary modulus") {
  const Symbol b =
      make_blaschke({Complex(0.3, 0.2), Complex(-0.5, 0)}, Complex(1, 0));
  double worst = 0.0;
  for (int k = 0; k < 720; ++k) {
    const double t = 2.0 * kPi * k / 720;
    const Complex z(std::cos(t), std::sin(t));
    worst = std::max(worst, std::abs(std::abs(eval(b, z)) - 1.0));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("blaschke constructor domain") {
  CHECK_THROWS_AS(make_blaschke({}, Complex(1, 0)), validation_error);
  CHECK_THROWS_AS(make_blaschke({Complex(1.0, 0)}, Complex(1, 0)),
                  validation_error);
  CHECK_THROWS_AS(make_blaschke({Complex(0.5, 0)}, Complex(0.5, 0)),
                  validation_error);
  CHECK_NOTHROW(make_blaschke({Complex(0.5, 0)}, Complex(std::cos(0.4),
                                                         std::sin(0.4))));
}

TEST_CASE("polynomial and constant constructor domain") {
  CHECK_THROWS_AS(make_polynomial({}), validation_error);
  CHECK_THROWS_AS(
      make_polynomial({Complex(std::numeric_limits<double>::infinity(), 0)}),
      validation_error);
  CHECK_THROWS_AS(
      make_constant(Complex(0, std::numeric_limits<double>::quiet_NaN())),
      validation_error);
}

TEST_CASE("jet closed forms") {
  // Mobius jet at the origin: (alpha, |alpha|^2 - 1, 2 conj(alpha)(|alpha|^2 - 1)).
  const Complex a(0.3, 0.4);
  const Jet2 jm = eval_jet(make_mobius(a), Complex(0, 0));
  const double q = std::norm(a);
  CHECK(cdist(jm.f, a) < 1e-15);
  CHECK(cdist(jm.d1, Complex(q - 1.0, 0)) < 1e-15);
  CHECK(cdist(jm.d2, 2.0 * std::conj(a) * (q - 1.0)) < 1e-15);

  // Identity and constant jets.
  const Jet2 ji = eval_jet(identity_symbol(), Complex(0.2, -0.1));
  CHECK(cdist(ji.f, Complex(0.2, -0.1)) < 1e-16);
  CHECK(cdist(ji.d1, Complex(1, 0)) < 1e-16);
  CHECK(std::abs(ji.d2) < 1e-16);
  const Jet2 jc = eval_jet(make_constant(Complex(0.4, 0.1)), Complex(0.5, 0.2));
  CHECK(cdist(jc.f, Complex(0.4, 0.1)) < 1e-16);
  CHECK(std::abs(jc.d1) < 1e-16);
  CHECK(std::abs(jc.d2) < 1e-16);

  // (z^2 o z^2) = z^4 with derivatives 4z^3 and 12z^2.
  const Symbol z2 = monomial(2);
  const Symbol z4 = compose(z2, z2);
  for (Complex z : random_points(14, 10, 0.95)) {
    const Jet2 j = eval_jet(z4, z);
    const Complex zz = z * z;
    CHECK(cdist(j.f, zz * zz) <= 1e-13 * (1.0 + std::abs(zz * zz)));
    CHECK(cdist(j.d1, 4.0 * zz * z) <= 1e-13 * (1.0 + 4.0 * std::abs(zz * z)));
    CHECK(cdist(j.d2, 12.0 * zz) <= 1e-13 * (1.0 + 12.0 * std::abs(zz)));
  }
}

TEST_CASE("jet matches finite differences on a blaschke product") {
  const Symbol b = make_blaschke(
      {Complex(0.35, 0.1), Complex(-0.2, 0.4), Complex(0.1, -0.55)},
      Complex(std::cos(1.1), std::sin(1.1)));
  for (Complex z : random_points(15, 50, 0.8)) {
    const Jet2 j = eval_jet(b, z);
    // First derivative: central difference, step 1e-5.
    {
      const double h = 1e-5;
      const Complex fd =
          (eval(b, z + Complex(h, 0)) - eval(b, z - Complex(h, 0))) / (2.0 * h);
      CHECK(cdist(j.d1, fd) <= 1e-6 * std::max(1.0, std::abs(j.d1)));
    }
    // Second derivative: step 1e-4 balances truncation against roundoff
    // amplified by 1/h^2.
    {
      const double h = 1e-4;
      const Complex fd = (eval(b, z + Complex(h, 0)) - 2.0 * eval(b, z) +
                          eval(b, z - Complex(h, 0))) /
                         (h * h);
      CHECK(cdist(j.d2, fd) <= 1e-5 * std::max(1.0, std::abs(j.d2)));
    }
  }
}

TEST_CASE("compose and product jets equal the manual combination exactly") {
  const Symbol f = make_blaschke({Complex(0.3, 0.2), Complex(-0.4, 0.1)},
                                 Complex(1, 0));
  const Symbol g = make_polynomial(
      {Complex(0.1, 0), Complex(0.25, -0.2), Complex(0, 0.3)});
  for (Complex z : random_points(16, 20, 0.9)) {
    const Jet2 gi = eval_jet(g, z);
    const Jet2 fo = eval_jet(f, gi.f);
    const Jet2 chained = eval_jet(compose(f, g), z);
    CHECK(chained.f == fo.f);
    CHECK(chained.d1 == fo.d1 * gi.d1);
    CHECK(chained.d2 == fo.d2 * gi.d1 * gi.d1 + fo.d1 * gi.d2);

    const Jet2 fz = eval_jet(f, z);
    const Jet2 prod = eval_jet(product(f, g), z);
    CHECK(prod.f == fz.f * gi.f);
    CHECK(prod.d1 == fz.d1 * gi.f + fz.f * gi.d1);
    CHECK(prod.d2 == fz.d2 * gi.f + 2.0 * fz.d1 * gi.d1 + fz.f * gi.d2);
  }
}

TEST_CASE("schwarz-pick quotient for self-maps") {
  const std::vector<Symbol> maps = {
      make_mobius(Complex(0.3, 0)),
      make_blaschke({Complex(0, 0), Complex(0.4, 0)},
                    Complex(std::cos(0.3), std::sin(0.3))),
      make_polynomial({Complex(0, 0), Complex(0.5, 0), Complex(0.5, 0)}),
  };
  for (const Symbol& psi : maps) {
    CHECK(validate_self_map(psi).accepted);
    for (Complex beta : random_points(17, 30, 0.95)) {
      const Jet2 j = eval_jet(psi, beta);
      const double lhs = std::abs(j.d1) / (1.0 - std::norm(j.f));
      const double rhs = 1.0 / (1.0 - std::norm(beta));
      CHECK(lhs <= rhs + 1e-9);
    }
  }
}

TEST_CASE("comp_second_derivative closed form and self-consistency") {
  // phi_0 o id is linear, so the second derivative vanishes.
  for (Complex z : random_points(18, 10, 0.9)) {
    CHECK(std::abs(comp_second_derivative(Complex(0, 0), identity_symbol(), z)) <
          1e-16);
  }
  // Identity at alpha = 0.5, z = 0: modulus 2 * 0.5 * (1 - 0.25).
  CHECK(std::abs(std::abs(comp_second_derivative(Complex(0.5, 0),
                                                 identity_symbol(),
                                                 Complex(0, 0))) -
                 0.75) < 1e-14);

  // Must agree with the jet of the explicitly composed tree.
  const Symbol b = make_blaschke({Complex(0.2, 0.3), Complex(-0.4, 0)},
                                 Complex(1, 0));
  const Complex alpha(0.45, -0.35);
  const Symbol composed = compose(make_mobius(alpha), b);
  for (Complex z : random_points(19, 20, 0.9)) {
    const Complex direct = comp_second_derivative(alpha, b, z);
    const Complex via_tree = eval_jet(composed, z).d2;
    CHECK(cdist(direct, via_tree) <= 1e-10 * std::max(1.0, std::abs(direct)));
  }

  CHECK_THROWS_AS(comp_second_derivative(Complex(1.0, 0), b, Complex(0, 0)),
                  validation_error);
}

TEST_CASE("self-map validation verdicts") {
  // 2z leaves the disk.
  const SelfMapReport r1 =
      validate_self_map(make_polynomial({Complex(0, 0), Complex(2, 0)}));
  CHECK_FALSE(r1.accepted);
  CHECK(r1.max_modulus > 1.5);

  // (1 + z)/2 is a self-map with radial limit 1 at z = 1.
  const SelfMapReport r2 =
      validate_self_map(make_polynomial({Complex(0.5, 0), Complex(0.5, 0)}));
  CHECK(r2.accepted);
  CHECK(r2.boundary_touching);

  // Any Blaschke product has unimodular boundary values.
  const SelfMapReport r3 = validate_self_map(
      make_blaschke({Complex(0.3, 0.2), Complex(-0.5, 0)}, Complex(1, 0)));
  CHECK(r3.accepted);
  CHECK(r3.boundary_touching);

  // A strict contraction stays away from the boundary.
  const SelfMapReport r4 = validate_self_map(make_constant(Complex(0.5, 0)));
  CHECK(r4.accepted);
  CHECK_FALSE(r4.boundary_touching);
  CHECK(r4.eval_failures == 0);

  CHECK_THROWS_AS(validate_self_map(identity_symbol(), 32), validation_error);
}

TEST_CASE("rational form of primitives") {
  const Complex a(0.3, -0.2);
  const RationalPoly rp = to_rational(make_mobius(a));
  REQUIRE(rp.num.size() == 2);
  REQUIRE(rp.den.size() == 2);
  CHECK(cdist(rp.num[0], a) < 1e-15);
  CHECK(cdist(rp.num[1], Complex(-1, 0)) < 1e-15);
  CHECK(cdist(rp.den[0], Complex(1, 0)) < 1e-15);
  CHECK(cdist(rp.den[1], -std::conj(a)) < 1e-15);

  // Rational form evaluates like the tree.
  const Symbol s = product(make_blaschke({Complex(0.2, 0.1)}, Complex(1, 0)),
                           make_polynomial({Complex(0, 0), Complex(0.5, 0)}));
  const RationalPoly rs = to_rational(s);
  for (Complex z : random_points(20, 10, 0.9)) {
    Complex num(0, 0), den(0, 0);
    for (auto it = rs.num.rbegin(); it != rs.num.rend(); ++it) num = num * z + *it;
    for (auto it = rs.den.rbegin(); it != rs.den.rend(); ++it) den = den * z + *it;
    CHECK(cdist(num / den, eval(s, z)) < 1e-12);
  }
}

TEST_CASE("valency on explicit maps") {
  // z^2 = 0.25 has roots +-0.5; representatives are ordered by (re, im).
  const ValencyReport r = valency(monomial(2), Complex(0.25, 0));
  CHECK(r.count == 2);
  REQUIRE(r.roots.size() == 2);
  CHECK(cdist(r.roots[0], Complex(-0.5, 0)) < 1e-7);
  CHECK(cdist(r.roots[1], Complex(0.5, 0)) < 1e-7);
  CHECK(r.clustered_multiplicity == std::vector<int>{1, 1});
  CHECK(r.boundary_flagged.empty());

  // An automorphism is a bijection; the preimage is phi_a(w) itself.
  const Symbol phi = make_mobius(Complex(0.3, 0));
  for (Complex w : random_points(21, 20, 0.9)) {
    const ValencyReport ra = valency(phi, w);
    CHECK(ra.count == 1);
    REQUIRE(ra.roots.size() == 1);
    CHECK(cdist(ra.roots[0], eval(phi, w)) < 1e-8);
  }
}

TEST_CASE("valency of a proper degree-3 map is 3 everywhere") {
  const Symbol b = make_blaschke(
      {Complex(0, 0), Complex(0.4, 0), Complex(-0.2, 0.3)}, Complex(1, 0));
  const ValencySolver solver(b);
  CHECK(solver.degree() == 3);
  for (Complex w : random_points(22, 100, 0.95)) {
    const ValencyReport r = solver.at(w);
    CHECK(r.count == 3);
    CHECK(r.boundary_flagged.empty());
  }
}

TEST_CASE("valency requires manageable rational degree") {
  Symbol s = monomial(2);
  for (int i = 0; i < 4; ++i) s = compose(s, s);  // degree 65536
  CHECK_THROWS_AS(to_rational(s), unsupported_symbol_error);
  CHECK_THROWS_AS(ValencySolver{s}, unsupported_symbol_error);
}

TEST_CASE("valency input validation") {
  CHECK_THROWS_AS(
      valency(monomial(2),
              Complex(std::numeric_limits<double>::quiet_NaN(), 0)),
      validation_error);
  CHECK_THROWS_AS(ValencySolver(monomial(2), 0.0), validation_error);
}
