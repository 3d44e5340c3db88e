#pragma once

#include <map>
#include <mutex>

#include "minspace/quadrature.hpp"
#include "minspace/symbol.hpp"

namespace minspace {

// Boundary directions where kernels in |1 - conj(alpha) psi| concentrate:
// the arguments of the near-unit-modulus solutions of psi(z) = alpha/|alpha|
// when psi is rational of modest degree (found through the valency solver),
// else just arg(alpha). Empty when |alpha| is too small for the kernel to
// concentrate at all. Used to pre-grade quadrature panels; harmless (merely
// suboptimal) if the directions are off.
std::vector<double> singular_directions(const Symbol& psi, Complex alpha);

// kappa(psi, alpha) = int_D |(phi_alpha o psi)''| dA, the quantity whose
// boundedness in alpha characterizes boundedness of the composition
// operator. Requires |alpha| < 1 and a (caller-)validated self-map psi.
QuadResult kappa(const Symbol& psi, Complex alpha, const QuadConfig& cfg);

// The three weighted integrals equivalent to boundedness, each with its
// displayed normalization: for den = 1 - conj(alpha) psi,
//   i2 = (1 - |alpha|^2)   int |psi''| / |den|^2
//   i3 = (1 - |alpha|^2)   int |psi'|^2 / |den|^3
//   i4 = (1 - |alpha|^2)^2 int |psi'|^2 / |den|^4
// The triangle inequality gives kappa <= i2 + 2 |alpha| i3.
struct SplitIntegrals {
  double i2 = 0.0;
  double i3 = 0.0;
  double i4 = 0.0;
};

SplitIntegrals split_integrals(const Symbol& psi, Complex alpha,
                               const QuadConfig& cfg);

// (1 - |alpha|^2) int_D dA / |1 - conj(alpha) psi|^3 alone.
QuadResult bergman_kappa(const Symbol& psi, Complex alpha,
                         const QuadConfig& cfg);

// ((1 - |alpha|^2) / (1 - |psi(alpha)|^2))^2, the squared pseudo-hyperbolic
// quotient that lower-bounds the essential norm along |alpha| -> 1.
// Requires |alpha| < 1 and |psi(alpha)| < 1.
double angular_ratio(const Symbol& psi, Complex alpha);

// Arc on the unit circle: center angle in radians, arc length in (0, 2 pi].
struct ArcSpec {
  double center_angle = 0.0;
  double length = 0.0;
};

// Counting-function mass of the Carleson square over the arc, normalized by
// |I|^2: (1/|I|^2) int_{S(I)} n_psi(w) dA(w), where n_psi counts preimages
// in the open disk and S(I) = { r e^{i t} : e^{i t} in I, 1 - |I|/(2 pi) <=
// r < 1 }. Valency evaluations are cached on a quantized polar grid.
class ValencyCache {
public:
  explicit ValencyCache(const Symbol& psi, double cluster_tol = 1e-8,
                        double radial_step = 5e-4, int angular_bins = 16384);

  // Counting value at the center of z's bin. Thread-safe.
  int count_at(Complex z);

  long lookups() const { return lookups_; }
  long misses() const { return misses_; }

private:
  ValencySolver solver_;
  double radial_step_;
  int angular_bins_;
  std::map<long long, int> bins_;
  std::mutex mutex_;
  long lookups_ = 0;
  long misses_ = 0;
};

double carleson_ratio(const Symbol& psi, const ArcSpec& arc,
                      const QuadConfig& cfg);
double carleson_ratio(const ArcSpec& arc, ValencyCache& cache,
                      const QuadConfig& cfg);

struct CarlesonSup {
  double sup = 0.0;
  ArcSpec arg_arc;  // first arc attaining the sup (depth-major, then index)
  int depth = 0;
  int index = 0;
  int arcs_evaluated = 0;
};

struct CarlesonArcRow {
  int depth = 0;
  int index = 0;
  double center_angle = 0.0;
  double length = 0.0;
  double ratio = 0.0;
};

// Sup of carleson_ratio over the dyadic arc family: depth d = 0..dyadic_depth,
// 2^d arcs of length 2 pi / 2^d each. One valency cache is shared across all
// arcs. Enumeration order is fixed, so the reported argmax is deterministic.
// When rows is non-null every evaluated arc is appended to it.
CarlesonSup carleson_sup(const Symbol& psi, int dyadic_depth,
                         const QuadConfig& cfg,
                         std::vector<CarlesonArcRow>* rows = nullptr);

// int_{region} |f''| dA for the boundedness-threshold regions.
QuadResult omega_mass(const Symbol& f, const Region& region,
                      const QuadConfig& cfg);

// The pointwise lower-bound bracket at beta toward the boundary point w:
//   bracket = | (alpha - psi(w)) / ((w - beta)(1 - conj(alpha) psi(w)))
//              - psi'(beta) / (|alpha|^2 - 1) |,  alpha = psi(beta),
// together with bound = (1 - |beta|)/2 * bracket and the region
// Omega(beta; w; (1-|beta|)/2) the estimate localizes to.
struct StolzBound {
  double bound = 0.0;
  double bracket = 0.0;
  Complex alpha;  // psi(beta)
  Region region;
};

StolzBound stolz_bound(const Symbol& psi, Complex beta, Complex w);

}  // namespace minspace
