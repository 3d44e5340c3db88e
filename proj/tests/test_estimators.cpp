#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "minspace/estimators.hpp"

using namespace minspace;

namespace {

QuadConfig cfg_rel(double rel) {
  QuadConfig cfg;
  cfg.rel_tol = rel;
  return cfg;
}

Symbol monomial(int n) {
  std::vector<Complex> c(n + 1, Complex(0.0, 0.0));
  c[n] = Complex(1.0, 0.0);
  return make_polynomial(c);
}

Symbol scaled_identity(double r) {
  return make_polynomial({Complex(0, 0), Complex(r, 0)});
}

// kappa(r z, alpha) = 2 |alpha| r^2 (1 - |alpha|^2) S_3(r |alpha|).
double kappa_dilation_exact(double r, Complex alpha) {
  const double a = std::abs(alpha);
  return 2.0 * a * r * r * (1.0 - a * a) *
         series_kernel_integral(Complex(r * a, 0), 3.0);
}

double hull_area(double s, double d) {
  const double L = std::sqrt(d * d - s * s);
  return L * s + 0.5 * s * s * (kPi + 2.0 * std::asin(s / d));
}

}  // namespace

TEST_CASE("boundedness profile on closed-form symbols") {
  const std::vector<double> radii = {0.3, 0.6, 0.9};
  const BoundednessProfile prof =
      boundedness_profile(scaled_identity(0.5), radii, 8, cfg_rel(1e-4));

  REQUIRE(prof.sweep.points.size() == 24);
  REQUIRE(prof.per_radius.size() == 3);
  for (const AlphaPoint& p : prof.sweep.points) {
    REQUIRE(p.converged);
    const double exact = kappa_dilation_exact(0.5, p.alpha);
    CHECK(std::abs(p.value - exact) <= 1e-3 * exact);
  }
  // Points are ordered by (|alpha|, arg alpha).
  for (size_t i = 1; i < prof.sweep.points.size(); ++i) {
    const double ra = std::abs(prof.sweep.points[i - 1].alpha);
    const double rb = std::abs(prof.sweep.points[i].alpha);
    CHECK(ra <= rb + 1e-12);
  }
  // The dilation kappa is radially symmetric: each circle sup matches the
  // closed form, and the monotone-in-r trend shows up in per_radius.
  for (const RadiusSup& rs : prof.per_radius) {
    const double exact = kappa_dilation_exact(0.5, Complex(rs.radius, 0));
    CHECK(std::abs(rs.sup - exact) <= 1e-3 * exact);
  }
  const double overall =
      std::max_element(prof.per_radius.begin(), prof.per_radius.end(),
                       [](const RadiusSup& a, const RadiusSup& b) {
                         return a.sup < b.sup;
                       })
          ->sup;
  CHECK(prof.overall_sup == overall);

  // Constant symbol: the functional vanishes identically.
  const BoundednessProfile zero =
      boundedness_profile(make_constant(Complex(0.4, 0.1)), {0.5}, 4,
                          cfg_rel(1e-4));
  for (const AlphaPoint& p : zero.sweep.points) CHECK(p.value == 0.0);
  CHECK(zero.overall_sup == 0.0);

  CHECK_THROWS_AS(boundedness_profile(identity_symbol(), {}, 8, cfg_rel(1e-4)),
                  validation_error);
  CHECK_THROWS_AS(
      boundedness_profile(identity_symbol(), {1.0}, 8, cfg_rel(1e-4)),
      validation_error);
  CHECK_THROWS_AS(
      boundedness_profile(identity_symbol(), {0.5}, 0, cfg_rel(1e-4)),
      validation_error);
}

TEST_CASE("radius schedule") {
  const std::vector<double> s = default_schedule(3, 6);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == 1.0 - std::ldexp(1.0, -3));
  CHECK(s[3] == 1.0 - std::ldexp(1.0, -6));
  CHECK_THROWS_AS(default_schedule(0, 5), validation_error);
  CHECK_THROWS_AS(default_schedule(5, 3), validation_error);
  CHECK_THROWS_AS(default_schedule(3, 49), validation_error);
}

TEST_CASE("essential norm proxy on a compact symbol") {
  // Constant symbol: every kappa vanishes, so every tail sup is zero.
  const EssNormEstimate est = essential_norm_proxy(
      make_constant(Complex(0.7, 0)), default_schedule(3, 6), 8,
      cfg_rel(1e-4));
  CHECK(est.converged);
  CHECK(est.proxy <= 1e-12);
  CHECK(est.diagnostics.find("lower prox") != std::string::npos);

  // Dilation by 1/2: closed form at every level, strictly decreasing.
  const EssNormEstimate dil = essential_norm_proxy(
      scaled_identity(0.5), default_schedule(3, 8), 16, cfg_rel(1e-4));
  REQUIRE(dil.tail_sups.size() == 6);
  for (size_t k = 0; k < dil.tail_sups.size(); ++k) {
    const double exact =
        kappa_dilation_exact(0.5, Complex(dil.schedule[k], 0));
    CHECK(std::abs(dil.tail_sups[k] - exact) <= 1e-3 * exact);
    if (k > 0) CHECK(dil.tail_sups[k] < dil.tail_sups[k - 1]);
  }
  CHECK(dil.proxy == dil.tail_sups.back());
}

TEST_CASE("essential norm proxy of the identity approaches 8/pi") {
  const EssNormEstimate est = essential_norm_proxy(
      identity_symbol(), default_schedule(3, 10), 64, cfg_rel(1e-4));
  const double target = 8.0 / kPi;
  CHECK(std::abs(est.proxy - target) <= 0.02 * target);
  // Monotone approach from below along the schedule tail.
  REQUIRE(est.tail_sups.size() >= 2);
  CHECK(est.tail_sups.back() >= est.tail_sups.front());
}

TEST_CASE("essential norm input validation") {
  const QuadConfig cfg = cfg_rel(1e-4);
  CHECK_THROWS_AS(essential_norm_proxy(identity_symbol(), {}, 16, cfg),
                  validation_error);
  CHECK_THROWS_AS(essential_norm_proxy(identity_symbol(), {0.5, 0.5}, 16, cfg),
                  validation_error);
  CHECK_THROWS_AS(essential_norm_proxy(identity_symbol(), {0.5, 1.0}, 16, cfg),
                  validation_error);
  CHECK_THROWS_AS(essential_norm_proxy(identity_symbol(), {0.5, 0.9}, 3, cfg),
                  validation_error);
  CHECK_THROWS_AS(
      essential_norm_proxy(identity_symbol(), {0.5, 0.9}, 16, cfg, 0.0),
      validation_error);
}

TEST_CASE("change-of-variables identity for blaschke products") {
  // Degree 1 with B(0) = 0 is a rotation: the identity is exact.
  const Symbol rot = make_blaschke({Complex(0, 0)}, Complex(-1, 0));
  CHECK(blaschke_cov_check(rot, Complex(0.5, 0), cfg_rel(1e-8)) <= 1e-6);

  // z^2 and a genuinely twisted product.
  const Symbol b2 = make_blaschke({Complex(0, 0), Complex(0, 0)},
                                  Complex(1, 0));
  CHECK(blaschke_cov_check(b2, Complex(0.5, 0), cfg_rel(1e-5)) <= 1e-3);

  const Symbol tw = make_blaschke({Complex(0, 0), Complex(0.4, 0)},
                                  Complex(std::cos(0.3), std::sin(0.3)));
  for (double theta : {0.0, kPi / 3, kPi}) {
    const Complex alpha = 0.9 * Complex(std::cos(theta), std::sin(theta));
    CHECK(blaschke_cov_check(tw, alpha, cfg_rel(1e-5)) <= 1e-3);
  }

  CHECK_THROWS_AS(blaschke_cov_check(monomial(2), Complex(0.5, 0),
                                     cfg_rel(1e-5)),
                  validation_error);
  CHECK_THROWS_AS(
      blaschke_cov_check(make_blaschke({Complex(0.4, 0)}, Complex(1, 0)),
                         Complex(0.5, 0), cfg_rel(1e-5)),
      validation_error);
}

TEST_CASE("norm bound for blaschke products") {
  // Monomial products: int |(z^n)''| = 2 (n - 1) and B(0) = B'(0) = 0 for
  // n >= 2, so m_norm is the mass alone.
  for (int n : {2, 3, 4}) {
    const Symbol b = make_blaschke(
        std::vector<Complex>(n, Complex(0, 0)), Complex(1, 0));
    const BlaschkeNormBound nb = blaschke_norm_bound(b, cfg_rel(1e-6));
    const double mass = 2.0 * (n - 1);
    CHECK(std::abs(nb.second_deriv_mass - mass) <= 1e-5 * mass);
    CHECK(std::abs(nb.m_norm - mass) <= 1e-5 * mass);
    CHECK(std::abs(nb.ratio_to_degree - mass / n) <= 1e-5);
    CHECK(nb.inequality_holds);
  }

  // Single-zero product: every term has a closed form through the series.
  const double a = 0.45;
  const BlaschkeNormBound nb =
      blaschke_norm_bound(make_blaschke({Complex(a, 0)}, Complex(1, 0)),
                          cfg_rel(1e-6));
  const double mass =
      2.0 * a * (1.0 - a * a) * series_kernel_integral(Complex(a, 0), 3.0);
  const double expect = a + (1.0 - a * a) + mass;
  CHECK(std::abs(nb.second_deriv_mass - mass) <= 1e-5 * mass);
  CHECK(std::abs(nb.m_norm - expect) <= 1e-5 * expect);

  // Seeded family: the bound holds and m_norm stays comparable to the
  // degree.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ur(0.0, 0.6), ut(0.0, 2.0 * kPi);
  for (int n = 1; n <= 5; ++n) {
    std::vector<Complex> zeros;
    for (int j = 0; j < n; ++j) {
      const double r = ur(rng), t = ut(rng);
      zeros.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    const BlaschkeNormBound fam =
        blaschke_norm_bound(make_blaschke(zeros, Complex(1, 0)),
                            cfg_rel(1e-4));
    CHECK(fam.check_performed);
    CHECK(fam.inequality_holds);
    CHECK(fam.ratio_to_degree > 0.2);
    CHECK(fam.ratio_to_degree < 4.0);
  }

  CHECK_THROWS_AS(blaschke_norm_bound(monomial(2), cfg_rel(1e-4)),
                  validation_error);
}

TEST_CASE("computable norm functional") {
  CHECK(std::abs(m_norm(monomial(2), cfg_rel(1e-6)) - 2.0) <= 1e-5);
  CHECK(std::abs(m_norm(make_constant(Complex(0.3, -0.4)), cfg_rel(1e-6)) -
                 0.5) <= 1e-12);
  // Affine part contributes |f(0)| + |f'(0)| only.
  const double v =
      m_norm(make_polynomial({Complex(0.2, 0), Complex(0.3, 0)}),
             cfg_rel(1e-6));
  CHECK(std::abs(v - 0.5) <= 1e-10);
}

TEST_CASE("normalized second-derivative mass near the boundary point") {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(0.05 * i);

  // z^2: mass over Omega_r is twice the normalized hull area.
  const std::vector<Lemma1Row> rows =
      lemma1_scan(monomial(2), grid, cfg_rel(1e-4));
  REQUIRE(rows.size() == grid.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].r == grid[i]);
    const double exact = 2.0 * hull_area(grid[i], 1.0) / kPi;
    CHECK(std::abs(rows[i].mass - exact) <= 2e-4 * exact);
    CHECK(std::abs(rows[i].ratio - rows[i].mass / rows[i].r) <= 1e-15);
  }

  // The normalized family from the compactness argument: every member keeps
  // the ratio bounded away from zero.
  const std::vector<Symbol> family = {
      monomial(2), monomial(3), monomial(4),
      make_blaschke({Complex(0, 0), Complex(0, 0), Complex(0.4, 0)},
                    Complex(-1, 0))};
  for (const Symbol& f : family) {
    const std::vector<Lemma1Row> fr = lemma1_scan(f, grid, cfg_rel(1e-4));
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const Lemma1Row& row : fr) min_ratio = std::min(min_ratio, row.ratio);
    CHECK(min_ratio > 0.5);
  }

  // Normalization preconditions.
  CHECK_THROWS_AS(
      lemma1_scan(make_polynomial({Complex(0.1, 0), Complex(0, 0),
                                   Complex(1, 0)}),
                  grid, cfg_rel(1e-4)),
      validation_error);  // f(0) != 0
  CHECK_THROWS_AS(lemma1_scan(identity_symbol(), grid, cfg_rel(1e-4)),
                  validation_error);  // f'(0) != 0
  CHECK_THROWS_AS(
      lemma1_scan(make_polynomial({Complex(0, 0), Complex(0, 0),
                                   Complex(0.5, 0)}),
                  grid, cfg_rel(1e-4)),
      validation_error);  // radial limit 1/2, not 1
  CHECK_THROWS_AS(lemma1_scan(monomial(2), {0.6}, cfg_rel(1e-4)),
                  validation_error);  // grid outside (0, 1/2]
}

TEST_CASE("noncompactness lower bound along the boundary fixed point") {
  // psi(z) = z (1 + z) / 2 fixes 0 and 1 and touches the boundary only at 1.
  const Symbol psi =
      make_polynomial({Complex(0, 0), Complex(0.5, 0), Complex(0.5, 0)});
  std::vector<double> betas;
  for (int k = 1; k <= 8; ++k) betas.push_back(1.0 - std::ldexp(1.0, -k));

  const NoncompactLowerBound nb =
      noncompact_lower_bound(psi, betas, cfg_rel(1e-4));
  REQUIRE(nb.rows.size() == betas.size());
  for (size_t i = 0; i < nb.rows.size(); ++i) {
    const LowerBoundRow& row = nb.rows[i];
    CHECK_FALSE(row.skipped);
    CHECK(std::abs(row.bound -
                   betas[i] / (1.0 + betas[i])) <= 1e-12);
    CHECK(row.kappa_value > 0.0);
  }
  // The bound tends to 1/2 and kappa stays comparable to it.
  CHECK(nb.rows.back().bound > 0.49);
  CHECK(nb.comparability > 0.0);

  // A Blaschke product fixing 1 works the same way.
  const Symbol b = make_blaschke({Complex(0, 0), Complex(0.4, 0)},
                                 Complex(1, 0));
  const NoncompactLowerBound nbb =
      noncompact_lower_bound(b, {0.5, 0.75, 0.875}, cfg_rel(1e-4));
  CHECK(nbb.comparability > 0.0);

  CHECK_THROWS_AS(
      noncompact_lower_bound(make_mobius(Complex(0.3, 0)), {0.5},
                             cfg_rel(1e-4)),
      validation_error);  // psi(0) != 0
  CHECK_THROWS_AS(
      noncompact_lower_bound(scaled_identity(0.5), {0.5}, cfg_rel(1e-4)),
      validation_error);  // psi(1) != 1
  CHECK_THROWS_AS(noncompact_lower_bound(psi, {}, cfg_rel(1e-4)),
                  validation_error);
  CHECK_THROWS_AS(noncompact_lower_bound(psi, {1.0}, cfg_rel(1e-4)),
                  validation_error);
}

TEST_CASE("preimage trajectories toward a boundary target") {
  const std::vector<long> ms = {10, 100, 1000, 10000};

  const NtProfile sq = nt_profile(monomial(2), Complex(1, 0), ms);
  CHECK(sq.matching_ok);
  CHECK(sq.n == 2);
  // The boundary projection of the final point makes its own ratio exactly 1.
  CHECK(std::abs(sq.t - 1.0) <= 1e-12);
  REQUIRE(sq.trajectories.size() == 2);
  for (const NtTrajectory& tr : sq.trajectories) {
    REQUIRE(tr.points.size() == ms.size());
    for (size_t i = 0; i < tr.points.size(); ++i) {
      CHECK(tr.points[i].m == ms[i]);
      CHECK(tr.points[i].ratio > 0.0);
      CHECK(tr.points[i].ratio <= 1.0 + 1e-12);
    }
    // Final preimages of (1 - 1e-4) are +-sqrt(1 - 1e-4).
    const double root = std::sqrt(1.0 - 1e-4);
    CHECK(std::abs(std::abs(tr.points.back().beta) - root) <= 1e-9);
  }

  const NtProfile mob = nt_profile(make_mobius(Complex(0.4, 0)),
                                   Complex(1, 0), ms);
  CHECK(mob.matching_ok);
  CHECK(mob.n == 1);

  const NtProfile cub = nt_profile(monomial(3), Complex(1, 0), ms);
  CHECK(cub.matching_ok);
  CHECK(cub.n == 3);

  CHECK_THROWS_AS(nt_profile(monomial(2), Complex(0.5, 0), ms),
                  validation_error);
  CHECK_THROWS_AS(nt_profile(monomial(2), Complex(1, 0), {}),
                  validation_error);
  CHECK_THROWS_AS(nt_profile(monomial(2), Complex(1, 0), {1, 10}),
                  validation_error);
  CHECK_THROWS_AS(nt_profile(monomial(2), Complex(1, 0), {100, 10}),
                  validation_error);
}

TEST_CASE("quadrature and monte carlo agree on the main functional") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ua(0.2, 0.8), ut(0.0, 2.0 * kPi);
  const std::vector<Symbol> symbols = {
      identity_symbol(), monomial(2),
      make_blaschke({Complex(0, 0), Complex(0.4, 0)}, Complex(1, 0)),
      make_polynomial({Complex(0, 0), Complex(0.5, 0), Complex(0.5, 0)}),
      make_mobius(Complex(0.3, 0))};
  for (size_t i = 0; i < symbols.size(); ++i) {
    const double r = ua(rng), t = ut(rng);
    const Complex alpha(r * std::cos(t), r * std::sin(t));
    const QuadResult q = kappa(symbols[i], alpha, cfg_rel(1e-6));
    REQUIRE(q.converged);
    const McResult mc = monte_carlo_disk(
        [&](Complex z) {
          return std::abs(comp_second_derivative(alpha, symbols[i], z));
        },
        200000, 1234 + i);
    CHECK(std::abs(q.value - mc.value) <=
          3.0 * mc.std_error + 2.0 * q.error_estimate + 1e-12);
  }
}

TEST_CASE("lower-bound chain ties the pieces together") {
  // For a degree-n inner function with full boundary contact, the proxy is
  // bounded below by c0 * n * t with c0 the empirical constant from the
  // normalized-mass scan.
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(0.05 * i);

  for (int n : {2, 3}) {
    const Symbol b = monomial(n);
    double c0 = std::numeric_limits<double>::infinity();
    for (const Lemma1Row& row : lemma1_scan(b, grid, cfg_rel(1e-4))) {
      c0 = std::min(c0, row.ratio);
    }
    const NtProfile prof =
        nt_profile(b, Complex(1, 0), {10, 100, 1000, 10000});
    REQUIRE(prof.matching_ok);
    const EssNormEstimate est = essential_norm_proxy(
        b, default_schedule(3, 8), 16, cfg_rel(1e-4));
    CHECK(est.proxy >= c0 * prof.n * prof.t);
  }
}
