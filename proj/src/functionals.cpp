#include "minspace/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace minspace {

namespace {

void require_interior(Complex alpha, const char* who) {
  if (!is_finite(alpha) || std::abs(alpha) >= 1.0) {
    throw validation_error(std::string(who) + " needs |alpha| < 1");
  }
}

// Kernels peaking where psi approaches the boundary point alpha/|alpha| have
// radial scale 1 - |alpha|; unless the caller pinned a threshold, grade the
// outer band down to ten times that scale.
QuadConfig config_for_alpha(QuadConfig cfg, Complex alpha) {
  if (cfg.singular_refine_threshold == 0.0) {
    const double scale = 10.0 * (1.0 - std::abs(alpha));
    cfg.singular_refine_threshold = std::clamp(scale, 1e-7, 0.05);
  }
  return cfg;
}

void validate_arc(const ArcSpec& arc) {
  if (!std::isfinite(arc.center_angle) || !std::isfinite(arc.length) ||
      !(arc.length > 0.0) || arc.length > 2.0 * kPi + 1e-12) {
    throw validation_error("arc length must lie in (0, 2 pi]");
  }
}

}  // namespace

std::vector<double> singular_directions(const Symbol& psi, Complex alpha) {
  const double s = std::abs(alpha);
  if (s < 0.5) return {};
  std::vector<double> angles;
  try {
    ValencySolver solver(psi);
    // High-degree companion solves would dominate the integral itself.
    if (solver.degree() >= 1 && solver.degree() <= 64) {
      const ValencyReport rep = solver.at(alpha / s);
      for (Complex root : rep.roots) {
        if (std::abs(std::abs(root) - 1.0) < 0.2) {
          angles.push_back(std::arg(root));
        }
      }
    }
  } catch (const error&) {
    // Not rational (or rational machinery overflowed): fall through.
  }
  if (angles.empty()) angles.push_back(std::arg(alpha));
  return angles;
}

QuadResult kappa(const Symbol& psi, Complex alpha, const QuadConfig& cfg) {
  require_interior(alpha, "kappa");
  const QuadConfig local = config_for_alpha(cfg, alpha);
  const std::vector<double> dirs = singular_directions(psi, alpha);
  return integrate_disk_directed(
      [&](Complex z) { return std::abs(comp_second_derivative(alpha, psi, z)); },
      local, dirs);
}

SplitIntegrals split_integrals(const Symbol& psi, Complex alpha,
                               const QuadConfig& cfg) {
  require_interior(alpha, "split_integrals");
  const QuadConfig local = config_for_alpha(cfg, alpha);
  const std::vector<double> dirs = singular_directions(psi, alpha);
  const Complex ac = std::conj(alpha);
  const double w = 1.0 - std::norm(alpha);

  const auto den_abs = [&](const Jet2& jet) {
    const double d = std::abs(1.0 - ac * jet.f);
    if (d < 1e-14) throw eval_error("1 - conj(alpha) psi underflow");
    return d;
  };

  SplitIntegrals out;
  out.i2 = w * integrate_disk_directed(
                   [&](Complex z) {
                     const Jet2 jet = eval_jet(psi, z);
                     const double d = den_abs(jet);
                     return std::abs(jet.d2) / (d * d);
                   },
                   local, dirs)
                   .value;
  out.i3 = w * integrate_disk_directed(
                   [&](Complex z) {
                     const Jet2 jet = eval_jet(psi, z);
                     const double d = den_abs(jet);
                     return std::norm(jet.d1) / (d * d * d);
                   },
                   local, dirs)
                   .value;
  out.i4 = w * w *
           integrate_disk_directed(
               [&](Complex z) {
                 const Jet2 jet = eval_jet(psi, z);
                 const double d = den_abs(jet);
                 const double d2 = d * d;
                 return std::norm(jet.d1) / (d2 * d2);
               },
               local, dirs)
               .value;
  return out;
}

QuadResult bergman_kappa(const Symbol& psi, Complex alpha,
                         const QuadConfig& cfg) {
  require_interior(alpha, "bergman_kappa");
  const QuadConfig local = config_for_alpha(cfg, alpha);
  const std::vector<double> dirs = singular_directions(psi, alpha);
  const Complex ac = std::conj(alpha);
  const double w = 1.0 - std::norm(alpha);
  QuadResult res = integrate_disk_directed(
      [&](Complex z) {
        const double d = std::abs(1.0 - ac * eval(psi, z));
        if (d < 1e-14) throw eval_error("1 - conj(alpha) psi underflow");
        return 1.0 / (d * d * d);
      },
      local, dirs);
  res.value *= w;
  res.error_estimate *= w;
  return res;
}

double angular_ratio(const Symbol& psi, Complex alpha) {
  require_interior(alpha, "angular_ratio");
  const double m = std::abs(eval(psi, alpha));
  if (m >= 1.0) {
    throw eval_error("angular_ratio: |psi(alpha)| >= 1");
  }
  const double q = (1.0 - std::norm(alpha)) / (1.0 - m * m);
  return q * q;
}

ValencyCache::ValencyCache(const Symbol& psi, double cluster_tol,
                           double radial_step, int angular_bins)
    : solver_(psi, cluster_tol),
      radial_step_(radial_step),
      angular_bins_(angular_bins) {
  if (!(radial_step > 0.0) || angular_bins < 1) {
    throw validation_error("valency cache needs positive bin sizes");
  }
}

int ValencyCache::count_at(Complex z) {
  const double r = std::abs(z);
  double t = std::arg(z);
  if (t < 0.0) t += 2.0 * kPi;
  const long long ir = static_cast<long long>(std::floor(r / radial_step_));
  long long it = static_cast<long long>(
      std::floor(t / (2.0 * kPi) * angular_bins_));
  if (it >= angular_bins_) it = angular_bins_ - 1;
  const long long key = ir * angular_bins_ + it;

  std::lock_guard<std::mutex> lock(mutex_);
  ++lookups_;
  auto found = bins_.find(key);
  if (found != bins_.end()) return found->second;
  ++misses_;
  // Evaluate at the bin center so the cached value is independent of which
  // query hit the bin first.
  const double rc = std::min((ir + 0.5) * radial_step_, 1.0 - 1e-9);
  const double tc = (it + 0.5) * (2.0 * kPi) / angular_bins_;
  const int count =
      solver_.at(Complex(rc * std::cos(tc), rc * std::sin(tc))).count;
  bins_.emplace(key, count);
  return count;
}

double carleson_ratio(const ArcSpec& arc, ValencyCache& cache,
                      const QuadConfig& cfg) {
  validate_arc(arc);
  const double h = arc.length / (2.0 * kPi);
  const double r0 = 1.0 - h;
  const double t0 = arc.center_angle - 0.5 * arc.length;
  const double t1 = arc.center_angle + 0.5 * arc.length;
  const QuadResult box = integrate_polar_box(
      [&](Complex z) { return static_cast<double>(cache.count_at(z)); },
      r0, 1.0, t0, t1, cfg);
  return box.value / (arc.length * arc.length);
}

double carleson_ratio(const Symbol& psi, const ArcSpec& arc,
                      const QuadConfig& cfg) {
  ValencyCache cache(psi);
  return carleson_ratio(arc, cache, cfg);
}

CarlesonSup carleson_sup(const Symbol& psi, int dyadic_depth,
                         const QuadConfig& cfg,
                         std::vector<CarlesonArcRow>* rows) {
  if (dyadic_depth < 0 || dyadic_depth > 16) {
    throw validation_error("dyadic depth must lie in [0, 16]");
  }
  ValencyCache cache(psi);
  CarlesonSup best;
  bool first = true;
  for (int d = 0; d <= dyadic_depth; ++d) {
    const int arcs = 1 << d;
    const double len = 2.0 * kPi / arcs;
    for (int k = 0; k < arcs; ++k) {
      ArcSpec arc{(k + 0.5) * len, len};
      const double v = carleson_ratio(arc, cache, cfg);
      ++best.arcs_evaluated;
      if (rows != nullptr) {
        rows->push_back(CarlesonArcRow{d, k, arc.center_angle, arc.length, v});
      }
      if (first || v > best.sup) {
        first = false;
        best.sup = v;
        best.arg_arc = arc;
        best.depth = d;
        best.index = k;
      }
    }
  }
  return best;
}

QuadResult omega_mass(const Symbol& f, const Region& region,
                      const QuadConfig& cfg) {
  return integrate_region(
      [&](Complex z) { return std::abs(eval_jet(f, z).d2); }, region, cfg);
}

StolzBound stolz_bound(const Symbol& psi, Complex beta, Complex w) {
  require_interior(beta, "stolz_bound");
  if (!is_finite(w) || std::abs(w) > 1.0 + 1e-12) {
    throw validation_error("stolz_bound needs w in the closed disk");
  }
  const double s = 0.5 * (1.0 - std::abs(beta));
  if (std::abs(w - beta) < (1.0 - std::abs(beta)) * (1.0 - 1e-12)) {
    throw validation_error("stolz_bound needs |w - beta| >= 1 - |beta|");
  }
  const Jet2 at_beta = eval_jet(psi, beta);
  const Complex alpha = at_beta.f;
  if (std::abs(alpha) >= 1.0) {
    throw eval_error("stolz_bound: |psi(beta)| >= 1");
  }
  const Complex psi_w = eval(psi, w);
  const Complex den = (w - beta) * (1.0 - std::conj(alpha) * psi_w);
  if (std::abs(den) < 1e-14) {
    throw eval_error("stolz_bound: conj(alpha) psi(w) = 1");
  }
  StolzBound out{0.0, 0.0, alpha, Region(beta, s, w)};
  out.bracket = std::abs((alpha - psi_w) / den -
                         at_beta.d1 / (std::norm(alpha) - 1.0));
  out.bound = s * out.bracket;
  return out;
}

}  // namespace minspace
