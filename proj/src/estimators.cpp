#include "minspace/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace minspace {

namespace {

constexpr double kInvPhi = 0.6180339887498949;   // (sqrt 5 - 1)/2
constexpr double kInvPhi2 = 0.3819660112501051;  // kInvPhi^2

QuadConfig config_for_alpha(QuadConfig cfg, Complex alpha) {
  if (cfg.singular_refine_threshold == 0.0) {
    const double scale = 10.0 * (1.0 - std::abs(alpha));
    cfg.singular_refine_threshold = std::clamp(scale, 1e-7, 0.05);
  }
  return cfg;
}

const Symbol::Blaschke& require_blaschke(const Symbol& B, const char* who) {
  const auto* node = std::get_if<Symbol::Blaschke>(&B.node());
  if (node == nullptr) {
    throw validation_error(std::string(who) + " needs a Blaschke-product symbol");
  }
  return *node;
}

struct CircleSup {
  double sup = -std::numeric_limits<double>::infinity();
  double theta = 0.0;
  double error = 0.0;
  bool quad_ok = true;
};

// Sup of kappa over the circle |alpha| = s: equispaced samples, then
// golden-section refinement in the bracket around the sample argmax.
CircleSup circle_sup(const Symbol& psi, double s, int angles,
                     const QuadConfig& cfg) {
  CircleSup out;
  const auto probe = [&](double theta) {
    const QuadResult q =
        kappa(psi, Complex(s * std::cos(theta), s * std::sin(theta)), cfg);
    out.quad_ok = out.quad_ok && q.converged;
    if (q.value > out.sup) {
      out.sup = q.value;
      out.theta = theta;
      out.error = q.error_estimate;
    }
    return q.value;
  };

  int best_i = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < angles; ++i) {
    const double v = probe(2.0 * kPi * i / angles);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }

  double a = 2.0 * kPi * (best_i - 1.0) / angles;
  double b = 2.0 * kPi * (best_i + 1.0) / angles;
  double c = a + kInvPhi2 * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = probe(c);
  double fd = probe(d);
  for (int it = 0; it < 18; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = a + kInvPhi2 * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = probe(d);
    }
  }
  return out;
}

}  // namespace

BoundednessProfile boundedness_profile(const Symbol& psi,
                                       const std::vector<double>& radii,
                                       int angles_per_radius,
                                       const QuadConfig& cfg) {
  if (radii.empty()) throw validation_error("radii list must be nonempty");
  for (double r : radii) {
    if (!(r > 0.0 && r < 1.0)) {
      throw validation_error("sweep radii must lie in (0, 1)");
    }
  }
  if (angles_per_radius < 1) {
    throw validation_error("angles_per_radius must be positive");
  }
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());

  BoundednessProfile prof;
  for (double r : sorted) {
    RadiusSup rs{r, 0.0};
    for (int j = 0; j < angles_per_radius; ++j) {
      const double t = 2.0 * kPi * j / angles_per_radius;
      AlphaPoint pt;
      pt.alpha = Complex(r * std::cos(t), r * std::sin(t));
      try {
        const QuadResult q = kappa(psi, pt.alpha, cfg);
        pt.value = q.value;
        pt.error = q.error_estimate;
        pt.converged = q.converged;
      } catch (const error&) {
        pt.value = std::numeric_limits<double>::quiet_NaN();
        pt.error = std::numeric_limits<double>::infinity();
        pt.converged = false;
      }
      if (std::isfinite(pt.value)) {
        rs.sup = std::max(rs.sup, pt.value);
        prof.overall_sup = std::max(prof.overall_sup, pt.value);
      }
      prof.sweep.points.push_back(pt);
    }
    prof.per_radius.push_back(rs);
  }
  return prof;
}

std::vector<double> default_schedule(int k_min, int k_max) {
  if (k_min < 1 || k_max < k_min || k_max > 48) {
    throw validation_error("schedule exponents must satisfy 1 <= k_min <= k_max <= 48");
  }
  std::vector<double> s;
  for (int k = k_min; k <= k_max; ++k) {
    s.push_back(1.0 - std::pow(2.0, -k));
  }
  return s;
}

EssNormEstimate essential_norm_proxy(const Symbol& psi,
                                     const std::vector<double>& schedule,
                                     int angles, const QuadConfig& cfg,
                                     double conv_tol) {
  if (schedule.empty()) throw validation_error("schedule must be nonempty");
  for (size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0 && schedule[i] < 1.0)) {
      throw validation_error("schedule radii must lie in (0, 1)");
    }
    if (i > 0 && !(schedule[i] > schedule[i - 1])) {
      throw validation_error("schedule must be strictly increasing");
    }
  }
  if (angles < 4) throw validation_error("need at least 4 circle samples");
  if (!(conv_tol > 0.0)) throw validation_error("conv_tol must be positive");

  EssNormEstimate est;
  est.schedule = schedule;
  std::vector<bool> level_ok;
  for (double s : schedule) {
    const CircleSup cs = circle_sup(psi, s, angles, cfg);
    est.tail_sups.push_back(cs.sup);
    est.errors.push_back(cs.error);
    level_ok.push_back(cs.quad_ok);
  }
  est.proxy = est.tail_sups.back();

  const size_t n = est.tail_sups.size();
  bool gap_ok = false;
  if (n >= 2) {
    const double gap = std::abs(est.tail_sups[n - 1] - est.tail_sups[n - 2]);
    gap_ok = gap < conv_tol * std::max(1.0, std::abs(est.proxy));
  }
  // Non-convergent quadrature at the extreme levels makes the gap test
  // unreliable, so it degrades the flag (but never aborts the estimate).
  const bool tail_quad_ok =
      n >= 2 ? (level_ok[n - 1] && level_ok[n - 2]) : level_ok.back();
  est.converged = gap_ok && tail_quad_ok;

  std::ostringstream diag;
  diag << "circle sups are lower proxies for the annulus sups in the limsup; ";
  diag << "level gaps:";
  for (size_t i = 1; i < n; ++i) {
    diag << ' ' << (est.tail_sups[i] - est.tail_sups[i - 1]);
  }
  for (size_t i = 0; i < n; ++i) {
    if (!level_ok[i]) {
      diag << "; quadrature non-convergence at s=" << est.schedule[i];
    }
  }
  est.diagnostics = diag.str();
  return est;
}

double blaschke_cov_check(const Symbol& B, Complex alpha,
                          const QuadConfig& cfg) {
  const auto& node = require_blaschke(B, "blaschke_cov_check");
  if (!is_finite(alpha) || std::abs(alpha) >= 1.0) {
    throw validation_error("blaschke_cov_check needs |alpha| < 1");
  }
  if (std::abs(eval(B, Complex(0.0, 0.0))) > 1e-12) {
    throw validation_error(
        "the change-of-variables identity needs B(0) = 0; precompose with an "
        "automorphism first");
  }
  const double n = static_cast<double>(node.zeros.size());
  const Complex ac = std::conj(alpha);
  const double w = 1.0 - std::norm(alpha);
  const QuadConfig local = config_for_alpha(cfg, alpha);
  const QuadResult lhs_q = integrate_disk_directed(
      [&](Complex z) {
        const Jet2 jet = eval_jet(B, z);
        const double d = std::abs(1.0 - ac * jet.f);
        if (d < 1e-14) throw eval_error("1 - conj(alpha) B underflow");
        return std::norm(jet.d1) / (d * d * d);
      },
      local, singular_directions(B, alpha));
  const double lhs = w * lhs_q.value;
  const double rhs = w * series_kernel_integral(alpha, 3.0);
  return std::abs(lhs - n * rhs) / (n * rhs);
}

BlaschkeNormBound blaschke_norm_bound(const Symbol& B, const QuadConfig& cfg) {
  const auto& node = require_blaschke(B, "blaschke_norm_bound");
  const double n = static_cast<double>(node.zeros.size());

  BlaschkeNormBound out;
  const Jet2 at0 = eval_jet(B, Complex(0.0, 0.0));
  const QuadResult mass2 = integrate_disk(
      [&](Complex z) { return std::abs(eval_jet(B, z).d2); }, cfg);
  out.second_deriv_mass = mass2.value;
  out.m_norm = std::abs(at0.f) + std::abs(at0.d1) + mass2.value;
  out.ratio_to_degree = out.m_norm / n;

  // int |B'|^2 / |B|: integrable despite the interior zeros; the floor only
  // guards exact node collisions with a zero (measure-zero configuration).
  const QuadResult d1_q = integrate_disk(
      [&](Complex z) {
        const Jet2 jet = eval_jet(B, z);
        return std::norm(jet.d1) / std::max(std::abs(jet.f), 1e-30);
      },
      cfg);
  out.bound_logderiv = d1_q.value;

  // sum_j int |phi_{a_j}''| dA has the closed series form.
  for (Complex a : node.zeros) {
    const double m = std::abs(a);
    out.bound_factor_second +=
        2.0 * m * (1.0 - m * m) * series_kernel_integral(a, 3.0);
  }

  // sum_j int |phi_{a_j}'|^2 / |phi_{a_j}| dA, same masked-singularity
  // treatment per factor.
  double d3_err = 0.0;
  bool d3_ok = true;
  for (Complex a : node.zeros) {
    const double w = 1.0 - std::norm(a);
    const Complex ac = std::conj(a);
    const QuadResult q = integrate_disk(
        [&](Complex z) {
          const double den = std::abs(1.0 - ac * z);
          if (den < 1e-14) throw eval_error("Blaschke factor denominator underflow");
          return w * w /
                 (den * den * den * std::max(std::abs(a - z), 1e-30));
        },
        cfg);
    out.bound_factor_logderiv += q.value;
    d3_err += q.error_estimate;
    d3_ok = d3_ok && q.converged;
  }

  out.check_performed = mass2.converged && d1_q.converged && d3_ok;
  if (out.check_performed) {
    const double slack =
        3.0 * (mass2.error_estimate + d1_q.error_estimate + d3_err) + 1e-9;
    out.inequality_holds =
        out.second_deriv_mass <= out.bound_logderiv +
                                     out.bound_factor_second +
                                     out.bound_factor_logderiv + slack;
  }
  return out;
}

double m_norm(const Symbol& f, const QuadConfig& cfg) {
  const Jet2 at0 = eval_jet(f, Complex(0.0, 0.0));
  const QuadResult mass = integrate_disk(
      [&](Complex z) { return std::abs(eval_jet(f, z).d2); }, cfg);
  return std::abs(at0.f) + std::abs(at0.d1) + mass.value;
}

std::vector<Lemma1Row> lemma1_scan(const Symbol& f,
                                   const std::vector<double>& r_grid,
                                   const QuadConfig& cfg) {
  if (r_grid.empty()) throw validation_error("r grid must be nonempty");
  for (double r : r_grid) {
    if (!(r > 0.0 && r <= 0.5)) {
      throw validation_error("lemma1 radii must lie in (0, 1/2]");
    }
  }
  const Jet2 at0 = eval_jet(f, Complex(0.0, 0.0));
  if (std::abs(at0.f) > 1e-8 || std::abs(at0.d1) > 1e-8) {
    throw validation_error("lemma1_scan needs f(0) = f'(0) = 0");
  }
  const Complex near_one = eval(f, Complex(1.0 - 1e-6, 0.0));
  if (std::abs(near_one - Complex(1.0, 0.0)) > 1e-4) {
    throw validation_error("lemma1_scan needs f(1) = 1 (radial limit)");
  }

  std::vector<Lemma1Row> rows;
  for (double r : r_grid) {
    const QuadResult q = omega_mass(f, omega_region(r), cfg);
    rows.push_back(Lemma1Row{r, q.value, q.value / r});
  }
  return rows;
}

NoncompactLowerBound noncompact_lower_bound(
    const Symbol& psi, const std::vector<double>& beta_schedule,
    const QuadConfig& cfg) {
  if (beta_schedule.empty()) throw validation_error("beta schedule must be nonempty");
  for (double b : beta_schedule) {
    if (!(b > 0.0 && b < 1.0)) {
      throw validation_error("beta schedule must lie in (0, 1)");
    }
  }
  if (std::abs(eval(psi, Complex(0.0, 0.0))) > 1e-8) {
    throw validation_error("noncompact_lower_bound needs psi(0) = 0");
  }
  if (std::abs(eval(psi, Complex(1.0 - 1e-6, 0.0)) - Complex(1.0, 0.0)) > 1e-3) {
    throw validation_error("noncompact_lower_bound needs psi(1) = 1");
  }

  NoncompactLowerBound out;
  out.comparability = std::numeric_limits<double>::infinity();
  for (double b : beta_schedule) {
    LowerBoundRow row;
    row.beta = b;
    row.bound = 1.0 - (1.0 - b) / (1.0 - b * b);  // = b / (1 + b)
    row.alpha = eval(psi, Complex(b, 0.0));
    if (std::abs(row.alpha) >= 1.0 - 1e-12) {
      row.skipped = true;
    } else {
      row.kappa_value = kappa(psi, row.alpha, cfg).value;
      if (row.bound > 0.0) {
        out.comparability =
            std::min(out.comparability, row.kappa_value / row.bound);
      }
    }
    out.rows.push_back(row);
  }
  if (!std::isfinite(out.comparability)) out.comparability = 0.0;
  return out;
}

NtProfile nt_profile(const Symbol& B, Complex xi,
                     const std::vector<long>& m_schedule) {
  if (!is_finite(xi) || std::abs(std::abs(xi) - 1.0) > 1e-9) {
    throw validation_error("nt_profile needs |xi| = 1");
  }
  xi /= std::abs(xi);
  if (m_schedule.empty()) throw validation_error("m schedule must be nonempty");
  for (size_t i = 0; i < m_schedule.size(); ++i) {
    if (m_schedule[i] < 2) throw validation_error("m values must be >= 2");
    if (i > 0 && m_schedule[i] <= m_schedule[i - 1]) {
      throw validation_error("m schedule must be strictly increasing");
    }
  }

  const ValencySolver solver(B);
  NtProfile prof;
  prof.matching_ok = true;
  std::ostringstream diag;

  for (long m : m_schedule) {
    const Complex w = (1.0 - 1.0 / static_cast<double>(m)) * xi;
    const ValencyReport rep = solver.at(w);
    std::vector<Complex> roots;
    for (size_t i = 0; i < rep.roots.size(); ++i) {
      if (std::abs(rep.roots[i]) < 1.0 - rep.boundary_margin) {
        roots.push_back(rep.roots[i]);
      }
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });

    if (prof.trajectories.empty()) {
      if (roots.empty()) {
        prof.matching_ok = false;
        diag << "no interior preimages at m=" << m << "; ";
        break;
      }
      for (Complex r : roots) {
        NtTrajectory tr;
        tr.points.push_back(NtPoint{m, r, 0.0});
        prof.trajectories.push_back(tr);
      }
      continue;
    }

    if (roots.size() != prof.trajectories.size()) {
      prof.matching_ok = false;
      diag << "preimage count changed from " << prof.trajectories.size()
           << " to " << roots.size() << " at m=" << m << "; ";
      break;
    }

    // Rejection threshold: half the minimal distance between the new roots.
    double min_sep = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < roots.size(); ++i) {
      for (size_t j = i + 1; j < roots.size(); ++j) {
        min_sep = std::min(min_sep, std::abs(roots[i] - roots[j]));
      }
    }
    const double reject =
        roots.size() > 1 ? 0.5 * min_sep : std::numeric_limits<double>::infinity();

    std::vector<int> taken(roots.size(), 0);
    for (auto& tr : prof.trajectories) {
      const Complex prev = tr.points.back().beta;
      size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < roots.size(); ++i) {
        const double d = std::abs(roots[i] - prev);
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      if (best_d > reject || taken[best]) {
        prof.matching_ok = false;
        diag << "trajectory continuation "
             << (taken[best] ? "collided" : "jumped clusters") << " at m=" << m
             << "; ";
        break;
      }
      taken[best] = 1;
      tr.points.push_back(NtPoint{m, roots[best], 0.0});
    }
    if (!prof.matching_ok) break;
  }

  if (prof.matching_ok && !prof.trajectories.empty()) {
    prof.n = static_cast<int>(prof.trajectories.size());
    prof.t = std::numeric_limits<double>::infinity();
    for (auto& tr : prof.trajectories) {
      const Complex last = tr.points.back().beta;
      if (std::abs(last) == 0.0) {
        prof.matching_ok = false;
        diag << "final preimage at the origin, no boundary projection; ";
        break;
      }
      tr.zeta = last / std::abs(last);
      for (auto& pt : tr.points) {
        pt.ratio = (1.0 - std::abs(pt.beta)) / std::abs(tr.zeta - pt.beta);
      }
      prof.t = std::min(prof.t, tr.points.back().ratio);
    }
    if (!std::isfinite(prof.t)) prof.t = 0.0;
  }
  if (!prof.matching_ok) {
    prof.n = 0;
    prof.t = 0.0;
  }
  diag << "ratios use the boundary projection of each trajectory's final "
          "point as its limit";
  prof.diagnostics = diag.str();
  return prof;
}

}  // namespace minspace
