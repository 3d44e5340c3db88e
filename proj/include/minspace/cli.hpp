#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "minspace/quadrature.hpp"
#include "minspace/table.hpp"

namespace minspace {

// One CLI invocation, already parsed. run() executes the named command,
// writes one output table to output_path, prints a one-line summary to
// `out`, and returns the process exit status:
//   0  success
//   2  validation failure (bad symbol file, bad arguments)
//   3  quadrature non-convergence (results still written, converged=false)
struct RunConfig {
  std::string command;  // kappa | sweep | essnorm | blaschke-check |
                        // valency-map | carleson | lemma1 | ntprofile |
                        // mc-check
  std::string symbol_path;  // unused by mc-check
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  QuadConfig quad;
  int schedule_depth = 13;  // essnorm K; ntprofile max m = 10^min(depth,4)
  int dyadic_depth = 5;     // carleson arc family depth
  int angles = 64;          // essnorm circle samples; sweep angles
  int grid = 50;            // valency-map grid size per axis
  Complex alpha{0.5, 0.0};  // kappa target point
  Complex xi{1.0, 0.0};     // ntprofile boundary direction
  std::uint64_t seed = 1;   // mc-check sampling seed
};

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace minspace
