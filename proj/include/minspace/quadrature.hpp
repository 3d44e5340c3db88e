#pragma once

#include <functional>
#include <vector>

#include "minspace/types.hpp"

namespace minspace {

// Controls for the adaptive disk integrator. All integrals are taken
// against normalized area measure dA(z) = dx dy / pi, so the unit disk has
// mass 1.
struct QuadConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-10;
  // Budget of leaf panels; must be at least the initial panel count.
  int max_panels = 60000;
  int base_radial_panels = 4;
  int base_angular_panels = 8;
  // Before adaptive refinement starts, the outermost radial band is split
  // dyadically toward r = 1 until its width is at most this threshold, so
  // kernels peaking at the boundary are seen at their own scale. 0 means
  // "auto": plain 0.05 for generic integrands; routines that know their
  // boundary scale (kappa at alpha) substitute min(0.05, 10 (1 - |alpha|)).
  double singular_refine_threshold = 0.0;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;  // sum of two-level panel error indicators
  int panels_used = 0;          // leaf panels at termination
  bool converged = false;       // error_estimate met the tolerance
};

// Convex hull of the disk {|z - center| <= radius} and the point apex:
// the disk plus the tangent cone from apex. Requires radius > 0,
// |apex - center| > radius, and (so the hull stays inside the closed unit
// disk where integrands live) |apex| <= 1 and |center| + radius <= 1.
class Region {
public:
  Region(Complex center, double radius, Complex apex);

  Complex center() const { return center_; }
  double radius() const { return radius_; }
  Complex apex() const { return apex_; }

  // Closed membership: disk part or tangent-cone part.
  bool contains(Complex z) const;

  double cone_length() const { return cone_length_; }  // sqrt(d^2 - s^2)

private:
  Complex center_;
  double radius_;
  Complex apex_;
  double dist_;         // |apex - center|
  double cone_length_;  // distance from apex to the tangency points
  Complex axis_;        // unit vector from apex toward center
};

// Omega_r: convex hull of the disk {|z| <= r} and the boundary point 1.
Region omega_region(double r);

using Integrand = std::function<double(Complex)>;

// Integral of g over the unit disk against normalized area measure, by
// globally adaptive polar-panel quadrature (Gauss-Legendre radially,
// midpoint trapezoid angularly, two-level error indicators, worst-panel
// refinement). Deterministic: identical inputs give bit-identical results.
QuadResult integrate_disk(const Integrand& g, const QuadConfig& cfg);

// integrate_disk with the initial angular panels additionally graded
// dyadically toward the given boundary directions, for integrands that
// concentrate at a few boundary points (kernels in |1 - conj(alpha) psi(z)|
// peak where psi hits alpha/|alpha|). The innermost angular width matches
// the radial refinement threshold. The value converges to the same integral
// as integrate_disk; only the initial panel layout differs. An empty angle
// list falls back to integrate_disk.
QuadResult integrate_disk_directed(const Integrand& g, const QuadConfig& cfg,
                                   const std::vector<double>& singular_angles);

// Same engine restricted to a polar box [r0,r1] x [t0,t1] (radii in [0,1],
// angles in radians, t0 < t1 <= t0 + 2 pi). Still normalized by 1/pi.
QuadResult integrate_polar_box(const Integrand& g, double r0, double r1,
                               double t0, double t1, const QuadConfig& cfg);

// Integral of g * indicator(region) against normalized area measure. Panels
// straddling the region boundary are pre-split down to a geometric floor
// (finer along the cone spine, which can be thinner than any sampling grid)
// and then handed to the usual adaptive loop.
QuadResult integrate_region(const Integrand& g, const Region& region,
                            const QuadConfig& cfg);

bool region_contains(const Region& region, Complex z);

struct McResult {
  double value = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

// Plain Monte Carlo over the disk with area-uniform sampling
// (theta uniform, r = sqrt(u)). Fixed seed gives reproducible output.
McResult monte_carlo_disk(const Integrand& g, long n_samples,
                          std::uint64_t seed);

// sum_{k>=0} c_k^2 |alpha|^{2k} / (k+1) with c_k the Taylor coefficients of
// (1 - w)^{-p/2}: the closed series form of int_D dA(z) / |1 - conj(alpha)
// z|^p. Requires |alpha| < 1, p > 0. Truncation controlled by a geometric
// tail bound at relative level 1e-12.
double series_kernel_integral(Complex alpha, double p);

}  // namespace minspace
