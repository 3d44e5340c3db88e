#pragma once

#include <string>

#include "minspace/functionals.hpp"

namespace minspace {

// Sampled values of a functional over parameter points alpha, with
// per-point error bars. Points are ordered by (|alpha|, arg alpha).
struct AlphaPoint {
  Complex alpha;
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

struct AlphaSweep {
  std::vector<AlphaPoint> points;
};

struct RadiusSup {
  double radius = 0.0;
  double sup = 0.0;
};

struct BoundednessProfile {
  AlphaSweep sweep;
  std::vector<RadiusSup> per_radius;
  double overall_sup = 0.0;
};

// kappa over the polar grid radii x angles. Per-point quadrature failures
// are recorded in the sweep (converged=false), never fatal.
BoundednessProfile boundedness_profile(const Symbol& psi,
                                       const std::vector<double>& radii,
                                       int angles_per_radius,
                                       const QuadConfig& cfg);

// Tail sups over the radius schedule, approximating
// limsup_{|alpha|->1} kappa(psi, alpha) = lim_s sup_{|alpha|>s}.
// tail_sups[k] is the sup of kappa over the circle |alpha| = s_k (a lower
// proxy for the annulus sup; diagnostics state this); proxy is the last
// tail sup, not an extrapolation.
struct EssNormEstimate {
  std::vector<double> schedule;
  std::vector<double> tail_sups;
  std::vector<double> errors;  // quadrature error at each level's argmax
  double proxy = 0.0;
  bool converged = false;
  std::string diagnostics;
};

// s_k = 1 - 2^{-k}, k = k_min..k_max.
std::vector<double> default_schedule(int k_min = 3, int k_max = 13);

// Circle sups via `angles` equispaced samples plus golden-section
// refinement around the running argmax. converged requires the last two
// tail sups to differ by less than conv_tol * max(1, proxy) and the
// quadrature at both levels to have converged.
EssNormEstimate essential_norm_proxy(const Symbol& psi,
                                     const std::vector<double>& schedule,
                                     int angles, const QuadConfig& cfg,
                                     double conv_tol = 0.02);

// Relative discrepancy |LHS - n RHS| / (n RHS) of the n-valent
// change-of-variables identity, LHS = (1-|alpha|^2) int |B'|^2 / |1 -
// conj(alpha) B|^3 dA, RHS = (1-|alpha|^2) series_kernel_integral(alpha, 3).
// Requires a Blaschke-node symbol with B(0) = 0.
double blaschke_cov_check(const Symbol& B, Complex alpha,
                          const QuadConfig& cfg);

// The pointwise bound |B''| <= |B'|^2/|B| + sum_j |phi_{a_j}''| +
// sum_j |phi_{a_j}'|^2 / |phi_{a_j}| integrated over the disk, plus the
// computable norm of B itself.
struct BlaschkeNormBound {
  double m_norm = 0.0;             // |B(0)| + |B'(0)| + int |B''|
  double second_deriv_mass = 0.0;  // int |B''|
  double bound_logderiv = 0.0;     // int |B'|^2 / |B|
  double bound_factor_second = 0.0;    // sum_j int |phi_{a_j}''|
  double bound_factor_logderiv = 0.0;  // sum_j int |phi_{a_j}'|^2/|phi_{a_j}|
  bool check_performed = false;  // quadrature near zeros of B converged
  bool inequality_holds = false;
  double ratio_to_degree = 0.0;  // m_norm / n
};

BlaschkeNormBound blaschke_norm_bound(const Symbol& B, const QuadConfig& cfg);

// |f(0)| + |f'(0)| + ||f''||_1: the computable norm equivalent (not equal)
// to the minimal Mobius-invariant norm.
double m_norm(const Symbol& f, const QuadConfig& cfg);

struct Lemma1Row {
  double r = 0.0;
  double mass = 0.0;   // int_{Omega_r} |f''| dA
  double ratio = 0.0;  // mass / r
};

// Requires f normalized: f(0) = f'(0) = 0 (checked to 1e-8 via the jet) and
// f -> 1 radially at z = 1 (checked by sampling at 1 - 1e-6, tolerance
// 1e-4). The minimum ratio over the grid is this f's empirical c0.
std::vector<Lemma1Row> lemma1_scan(const Symbol& f,
                                   const std::vector<double>& r_grid,
                                   const QuadConfig& cfg);

struct LowerBoundRow {
  double beta = 0.0;
  Complex alpha;             // psi(beta)
  double kappa_value = 0.0;  // kappa(psi, psi(beta))
  double bound = 0.0;  // 1 - (1-beta)/(1-beta^2)
  bool skipped = false;      // |psi(beta)| >= 1 at this schedule point
};

struct NoncompactLowerBound {
  std::vector<LowerBoundRow> rows;
  // min over non-skipped rows of kappa / bound: the empirical constant in
  // "bound <~ kappa".
  double comparability = 0.0;
};

// Requires psi(0) = 0 and psi(1) = 1 (the proof's normalization; verified
// numerically, boundary via sampling at 1 - 1e-6).
NoncompactLowerBound noncompact_lower_bound(
    const Symbol& psi, const std::vector<double>& beta_schedule,
    const QuadConfig& cfg);

// Preimage trajectories of alpha_m = (1 - 1/m) xi under a rational symbol,
// matched across the m-schedule by nearest-neighbor continuation.
struct NtPoint {
  long m = 0;
  Complex beta;        // preimage at this m
  double ratio = 0.0;  // (1 - |beta|) / |zeta - beta| with the final zeta
};

struct NtTrajectory {
  std::vector<NtPoint> points;
  Complex zeta;  // boundary projection of the last point
};

struct NtProfile {
  std::vector<NtTrajectory> trajectories;
  int n = 0;       // number of trajectories
  double t = 0.0;  // min over trajectories of the final Stolz ratio
  bool matching_ok = false;
  std::string diagnostics;
};

NtProfile nt_profile(const Symbol& B, Complex xi,
                     const std::vector<long>& m_schedule);

}  // namespace minspace
