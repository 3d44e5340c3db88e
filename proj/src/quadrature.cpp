#include "minspace/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <random>
#include <vector>

namespace minspace {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlNode = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeight = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

constexpr int kAngularNodes = 16;
// Panels thinner than this are frozen rather than refined further.
constexpr double kMinPanelWidth = 1e-9;

double resolve_threshold(const QuadConfig& cfg) {
  if (cfg.singular_refine_threshold < 0.0) {
    throw validation_error("singular_refine_threshold must be >= 0");
  }
  if (cfg.singular_refine_threshold == 0.0) return 0.05;
  return cfg.singular_refine_threshold;
}

void validate_config(const QuadConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) {
    throw validation_error("quadrature tolerances must be positive");
  }
  if (cfg.base_radial_panels < 1 || cfg.base_angular_panels < 1) {
    throw validation_error("base panel counts must be positive");
  }
  if (cfg.max_panels < cfg.base_radial_panels * cfg.base_angular_panels) {
    throw validation_error("max_panels below the base panel product");
  }
}

struct Bounds {
  double r0, r1, t0, t1;
};

// One evaluated panel: its own rule value, the four child rule values, the
// two-level error indicator, and a monotonically assigned id that makes the
// heap order (and hence the whole refinement path) deterministic.
struct Rec {
  Bounds b;
  double coarse = 0.0;
  std::array<double, 4> child_coarse{};
  std::array<Bounds, 4> child_bounds{};
  double fine = 0.0;
  double err = 0.0;
  long id = 0;
};

struct RecOrder {
  bool operator()(const Rec& a, const Rec& b) const {
    if (a.err != b.err) return a.err < b.err;
    return a.id > b.id;  // equal errors: oldest id pops first
  }
};

class Engine {
public:
  Engine(const Integrand& g, const QuadConfig& cfg)
      : g_(g), cfg_(cfg) {}

  double rule(const Bounds& b) const {
    const double rm = 0.5 * (b.r0 + b.r1);
    const double rh = 0.5 * (b.r1 - b.r0);
    const double dt = (b.t1 - b.t0) / kAngularNodes;
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double r = rm + rh * kGlNode[i];
      const double w = kGlWeight[i] * rh * r;
      double ang = 0.0;
      for (int j = 0; j < kAngularNodes; ++j) {
        const double t = b.t0 + (j + 0.5) * dt;
        ang += g_(Complex(r * std::cos(t), r * std::sin(t)));
      }
      sum += w * ang * dt;
    }
    return sum / kPi;
  }

  static std::array<Bounds, 4> split(const Bounds& b) {
    const double rm = 0.5 * (b.r0 + b.r1);
    const double tm = 0.5 * (b.t0 + b.t1);
    return {Bounds{b.r0, rm, b.t0, tm}, Bounds{b.r0, rm, tm, b.t1},
            Bounds{rm, b.r1, b.t0, tm}, Bounds{rm, b.r1, tm, b.t1}};
  }

  Rec make_rec(const Bounds& b, double coarse) {
    Rec rec;
    rec.b = b;
    rec.coarse = coarse;
    rec.child_bounds = split(b);
    rec.fine = 0.0;
    for (int c = 0; c < 4; ++c) {
      rec.child_coarse[c] = rule(rec.child_bounds[c]);
      rec.fine += rec.child_coarse[c];
    }
    rec.err = std::abs(rec.fine - rec.coarse);
    rec.id = next_id_++;
    return rec;
  }

  // Adaptive loop over an initial panel set. Panels too thin to split are
  // moved aside ("frozen") but keep contributing their value and error.
  QuadResult adapt(const std::vector<Bounds>& initial) {
    std::priority_queue<Rec, std::vector<Rec>, RecOrder> heap;
    std::vector<Rec> frozen;
    double value = 0.0;
    double errsum = 0.0;
    long leaves = 0;

    for (const Bounds& b : initial) {
      Rec rec = make_rec(b, rule(b));
      value += rec.fine;
      errsum += rec.err;
      ++leaves;
      heap.push(std::move(rec));
    }

    const auto tol = [&] { return std::max(cfg_.abs_tol, cfg_.rel_tol * std::abs(value)); };

    while (errsum > tol() && !heap.empty() && leaves + 3 <= cfg_.max_panels) {
      Rec top = heap.top();
      if (top.err <= 0.0) break;  // nothing left worth refining
      heap.pop();
      if (top.b.r1 - top.b.r0 < kMinPanelWidth ||
          top.b.t1 - top.b.t0 < kMinPanelWidth) {
        frozen.push_back(std::move(top));
        continue;
      }
      value -= top.fine;
      errsum -= top.err;
      for (int c = 0; c < 4; ++c) {
        Rec child = make_rec(top.child_bounds[c], top.child_coarse[c]);
        value += child.fine;
        errsum += child.err;
        heap.push(std::move(child));
      }
      leaves += 3;
    }

    // Re-sum the leaves in id order: the incremental totals above steer the
    // loop, but the reported value must not depend on accumulated shuffle.
    std::vector<Rec> all = std::move(frozen);
    while (!heap.empty()) {
      all.push_back(heap.top());
      heap.pop();
    }
    std::sort(all.begin(), all.end(),
              [](const Rec& a, const Rec& b) { return a.id < b.id; });
    QuadResult res;
    res.panels_used = static_cast<int>(all.size());
    double v = 0.0, e = 0.0;
    for (const Rec& rec : all) {
      v += rec.fine;
      e += rec.err;
    }
    res.value = v;
    res.error_estimate = e;
    res.converged =
        e <= std::max(cfg_.abs_tol, cfg_.rel_tol * std::abs(v));
    return res;
  }

private:
  const Integrand& g_;
  QuadConfig cfg_;
  long next_id_ = 0;
};

// Radial edges: uniform base bands, then the outermost band split
// dyadically toward r = 1 until its width reaches the threshold.
std::vector<double> radial_edges(const QuadConfig& cfg, double r_lo,
                                 double r_hi, double threshold) {
  std::vector<double> edges;
  for (int i = 0; i <= cfg.base_radial_panels; ++i) {
    edges.push_back(r_lo + (r_hi - r_lo) * i / cfg.base_radial_panels);
  }
  int guard = 0;
  while (r_hi - edges[edges.size() - 2] > threshold && guard++ < 60) {
    const double last_width = r_hi - edges[edges.size() - 2];
    edges.insert(edges.end() - 1, r_hi - 0.5 * last_width);
  }
  return edges;
}

std::vector<Bounds> tensor_panels(const std::vector<double>& redges,
                                  double t_lo, double t_hi, int n_ang) {
  std::vector<Bounds> panels;
  for (size_t i = 0; i + 1 < redges.size(); ++i) {
    for (int j = 0; j < n_ang; ++j) {
      panels.push_back(Bounds{redges[i], redges[i + 1],
                              t_lo + (t_hi - t_lo) * j / n_ang,
                              t_lo + (t_hi - t_lo) * (j + 1) / n_ang});
    }
  }
  return panels;
}

// Angular edges for the full circle, graded dyadically toward each given
// direction: every gap between consecutive directions is filled with panels
// whose widths double from w_min at both ends toward the gap midpoint.
std::vector<double> directed_angular_edges(std::vector<double> angles,
                                           double w_min) {
  for (double& a : angles) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
  }
  std::sort(angles.begin(), angles.end());
  std::vector<double> pts;
  for (double a : angles) {
    if (pts.empty() || a - pts.back() > w_min) pts.push_back(a);
  }
  if (pts.size() > 1 && pts.front() + 2.0 * kPi - pts.back() <= w_min) {
    pts.pop_back();
  }
  std::vector<double> edges;
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    const double a = pts[i];
    const double b = (i + 1 < n) ? pts[i + 1] : pts[0] + 2.0 * kPi;
    const double h = 0.5 * (b - a);
    const int levels =
        h <= w_min ? 0 : static_cast<int>(std::ceil(std::log2(h / w_min)));
    edges.push_back(a);
    for (int j = levels; j >= 1; --j) edges.push_back(a + h * std::ldexp(1.0, -j));
    edges.push_back(a + h);
    for (int j = 1; j <= levels; ++j) edges.push_back(b - h * std::ldexp(1.0, -j));
  }
  edges.push_back(pts[0] + 2.0 * kPi);
  return edges;
}

std::vector<Bounds> tensor_panels_edges(const std::vector<double>& redges,
                                        const std::vector<double>& tedges) {
  std::vector<Bounds> panels;
  for (size_t i = 0; i + 1 < redges.size(); ++i) {
    for (size_t j = 0; j + 1 < tedges.size(); ++j) {
      panels.push_back(
          Bounds{redges[i], redges[i + 1], tedges[j], tedges[j + 1]});
    }
  }
  return panels;
}

}  // namespace

QuadResult integrate_disk(const Integrand& g, const QuadConfig& cfg) {
  validate_config(cfg);
  const double threshold = resolve_threshold(cfg);
  std::vector<double> redges = radial_edges(cfg, 0.0, 1.0, threshold);
  Engine engine(g, cfg);
  return engine.adapt(
      tensor_panels(redges, 0.0, 2.0 * kPi, cfg.base_angular_panels));
}

QuadResult integrate_disk_directed(const Integrand& g, const QuadConfig& cfg,
                                   const std::vector<double>& singular_angles) {
  if (singular_angles.empty()) return integrate_disk(g, cfg);
  validate_config(cfg);
  for (double a : singular_angles) {
    if (!std::isfinite(a)) {
      throw validation_error("singular angles must be finite");
    }
  }
  const double threshold = resolve_threshold(cfg);
  std::vector<double> redges = radial_edges(cfg, 0.0, 1.0, threshold);
  // Match the angular resolution at the singular directions to the radial
  // one; panels far from them stay coarse and the adaptive loop polishes.
  const double w_min = std::clamp(threshold, kMinPanelWidth, 0.5 * kPi);
  Engine engine(g, cfg);
  return engine.adapt(tensor_panels_edges(
      redges, directed_angular_edges(singular_angles, w_min)));
}

QuadResult integrate_polar_box(const Integrand& g, double r0, double r1,
                               double t0, double t1, const QuadConfig& cfg) {
  validate_config(cfg);
  if (!(0.0 <= r0 && r0 < r1 && r1 <= 1.0)) {
    throw validation_error("polar box radii must satisfy 0 <= r0 < r1 <= 1");
  }
  if (!(t0 < t1 && t1 - t0 <= 2.0 * kPi + 1e-12)) {
    throw validation_error("polar box angles must satisfy t0 < t1 <= t0 + 2 pi");
  }
  Engine engine(g, cfg);
  std::vector<double> redges;
  for (int i = 0; i <= cfg.base_radial_panels; ++i) {
    redges.push_back(r0 + (r1 - r0) * i / cfg.base_radial_panels);
  }
  return engine.adapt(tensor_panels(redges, t0, t1, cfg.base_angular_panels));
}

Region::Region(Complex center, double radius, Complex apex)
    : center_(center), radius_(radius), apex_(apex) {
  if (!is_finite(center) || !is_finite(apex) || !std::isfinite(radius)) {
    throw validation_error("region data must be finite");
  }
  if (!(radius > 0.0)) {
    throw validation_error("region radius must be positive");
  }
  if (std::abs(center) + radius > 1.0 + 1e-12) {
    throw validation_error("region disk must lie in the closed unit disk");
  }
  if (std::abs(apex) > 1.0 + 1e-12) {
    throw validation_error("region apex must lie in the closed unit disk");
  }
  dist_ = std::abs(apex - center);
  if (radius > 0.5 * dist_ + 1e-12) {
    throw validation_error("region radius must be at most half the apex distance");
  }
  cone_length_ = std::sqrt(std::max(0.0, dist_ * dist_ - radius * radius));
  axis_ = (center - apex) / dist_;
}

bool Region::contains(Complex z) const {
  if (std::abs(z - center_) <= radius_) return true;
  // Tangent-cone test in apex-centered coordinates: x along the axis toward
  // the disk, y the transverse offset. Inside the cone iff the point is
  // within the tangency distance and under the tangent lines.
  const Complex v = std::conj(axis_) * (z - apex_);
  const double x = v.real();
  const double y = std::abs(v.imag());
  if (x < 0.0) return false;
  if (x * x + y * y > cone_length_ * cone_length_) return false;
  return y * cone_length_ <= x * radius_;
}

Region omega_region(double r) { return Region(Complex(0.0, 0.0), r, Complex(1.0, 0.0)); }

bool region_contains(const Region& region, Complex z) {
  return region.contains(z);
}

namespace {

enum class PanelSide { inside, outside, mixed };

PanelSide classify_panel(const Region& region, const Bounds& b) {
  int in = 0, total = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double r = b.r0 + 0.5 * i * (b.r1 - b.r0);
      const double t = b.t0 + 0.5 * j * (b.t1 - b.t0);
      ++total;
      if (region.contains(Complex(r * std::cos(t), r * std::sin(t)))) ++in;
    }
  }
  if (in == 0) return PanelSide::outside;
  if (in == total) return PanelSide::inside;
  return PanelSide::mixed;
}

bool box_contains(const Bounds& b, double r, double t) {
  if (r < b.r0 || r > b.r1) return false;
  // Angles live in [0, 2 pi); panels never wrap, so shift by 2 pi if needed.
  for (double shift : {0.0, 2.0 * kPi, -2.0 * kPi}) {
    if (t + shift >= b.t0 && t + shift <= b.t1) return true;
  }
  return false;
}

}  // namespace

QuadResult integrate_region(const Integrand& g, const Region& region,
                            const QuadConfig& cfg) {
  validate_config(cfg);
  const double threshold = resolve_threshold(cfg);

  const Integrand masked = [&](Complex z) {
    return region.contains(z) ? g(z) : 0.0;
  };

  // The cone sliver near the apex is thinner than any fixed sampling grid,
  // so panels are pre-split along the spine (the segment apex -> center)
  // and along the sampled region boundary, down to a geometric floor.
  constexpr double kPreSplitFloor = 1e-3;
  constexpr int kSpineSamples = 512;
  std::vector<std::pair<double, double>> spine;  // (r, theta) samples
  for (int i = 0; i <= kSpineSamples; ++i) {
    const Complex p =
        region.apex() + (region.center() - region.apex()) *
                            (static_cast<double>(i) / kSpineSamples);
    double t = std::arg(p);
    if (t < 0.0) t += 2.0 * kPi;
    spine.emplace_back(std::abs(p), t);
  }
  const auto crosses_spine = [&](const Bounds& b) {
    for (const auto& [r, t] : spine) {
      if (box_contains(b, r, t)) return true;
    }
    return false;
  };

  std::vector<double> redges = radial_edges(cfg, 0.0, 1.0, threshold);
  std::vector<Bounds> stack =
      tensor_panels(redges, 0.0, 2.0 * kPi, cfg.base_angular_panels);
  std::vector<Bounds> initial;
  const size_t presplit_cap = static_cast<size_t>(cfg.max_panels) / 2;
  while (!stack.empty()) {
    Bounds b = stack.back();
    stack.pop_back();
    const bool splittable = (b.r1 - b.r0 > kPreSplitFloor) &&
                            (b.t1 - b.t0 > kPreSplitFloor) &&
                            initial.size() + stack.size() < presplit_cap;
    const PanelSide side =
        splittable ? classify_panel(region, b) : PanelSide::inside;
    // Mixed panels hug the region boundary; outside-looking panels crossed
    // by the spine hide a sliver thinner than the sampling grid.
    if (splittable && (side == PanelSide::mixed ||
                       (side == PanelSide::outside && crosses_spine(b)))) {
      for (const Bounds& c : Engine::split(b)) stack.push_back(c);
    } else {
      initial.push_back(b);
    }
  }
  // Restore a deterministic panel order (stack traversal reverses chunks).
  std::sort(initial.begin(), initial.end(), [](const Bounds& a, const Bounds& b) {
    if (a.r0 != b.r0) return a.r0 < b.r0;
    if (a.t0 != b.t0) return a.t0 < b.t0;
    return a.r1 < b.r1;
  });

  Engine engine(masked, cfg);
  return engine.adapt(initial);
}

McResult monte_carlo_disk(const Integrand& g, long n_samples,
                          std::uint64_t seed) {
  if (n_samples < 1000) {
    throw validation_error("monte_carlo_disk needs at least 1000 samples");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double mean = 0.0;
  double m2 = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    const double t = 2.0 * kPi * unif(rng);
    const double r = std::sqrt(unif(rng));
    const double v = g(Complex(r * std::cos(t), r * std::sin(t)));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  McResult res;
  res.value = mean;
  res.samples = n_samples;
  res.std_error = n_samples > 1
                      ? std::sqrt(m2 / (static_cast<double>(n_samples) - 1.0) /
                                  static_cast<double>(n_samples))
                      : 0.0;
  return res;
}

double series_kernel_integral(Complex alpha, double p) {
  if (!is_finite(alpha) || std::abs(alpha) >= 1.0) {
    throw validation_error("series kernel needs |alpha| < 1");
  }
  if (!(p > 0.0)) {
    throw validation_error("series kernel needs p > 0");
  }
  const double q = std::norm(alpha);
  double c = 1.0;  // c_0
  double qk = 1.0;
  double sum = 0.0;
  for (long k = 0;; ++k) {
    const double term = c * c * qk / static_cast<double>(k + 1);
    sum += term;
    // Geometric tail majorant: beyond k the per-step ratio is at most
    // max(1, (k + p/2)/(k + 1))^2 * q.
    const double grow = std::max(1.0, (k + 0.5 * p) / (k + 1.0));
    const double rho = grow * grow * q;
    if (rho < 1.0) {
      const double tail = term * rho / (1.0 - rho);
      if (tail <= 1e-12 * sum) break;
    }
    if (k > 50000000) {
      throw eval_error("series kernel failed to converge");
    }
    c *= (k + 0.5 * p) / (k + 1.0);
    qk *= q;
  }
  return sum;
}

}  // namespace minspace
