#pragma once

// Command-line front end:
//
//   check --config <path> [--p <real>] [--L <real>]
//   solve --config <path> [--out <path>]
//   kernel-verify [--samples N] [--seed S]
//   reproduce <example1|example2>
//
// Exit codes: 0 success / certificates hold, 1 a certificate (or a
// reproduced constant) fails, 2 invalid input, 3 solver did not converge.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hexabvp/config.hpp"
#include "hexabvp/kernels.hpp"

namespace hexabvp {

enum ExitCode : int { kExitOk = 0, kExitCertificateFails = 1, kExitInvalidInput = 2, kExitNotConverged = 3 };

struct KernelSet {
  std::function<double(KernelPoint)> G = green_G;
  std::function<double(KernelPoint)> K = green_K;
  std::function<double(KernelPoint)> H = green_H;
};

struct PropertyOutcome {
  std::string name;
  long checked = 0;
  long failures = 0;
  double worst = 0.0;  // largest violation seen
  bool passed() const { return failures == 0; }
};

/// Nonnegativity, the t^5 / t^6 sandwiches, monotonicity in t, the
/// finite-difference derivative identities K_t = G and G_t = H away from
/// the seam, and exact continuity across t = s, on `samples` seeded points.
std::vector<PropertyOutcome> kernel_property_sweep(const KernelSet& kernels, long samples, std::uint64_t seed);

/// Built-in configs for the two worked examples (1 or 2).
ProblemConfig example_config(int which);

/// Certificates requested by the loaded problem: uniqueness when L is set,
/// existence and the spectral diagnostic when a factorization is given.
/// `all_hold` is false when any requested certificate fails.
Report run_certificates(const LoadedProblem& loaded, std::ostream& err, bool& all_hold);

/// Entry point; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hexabvp
