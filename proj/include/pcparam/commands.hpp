#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace pcparam {

enum ExitCode : int { kExitOk = 0, kExitNumeric = 1, kExitUsage = 2 };

/// Entry point of the command-line tool. `args` excludes the program name.
/// Logs go to `log`; data products only to files named by the arguments.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

struct AuditSummary {
  int trials = 0;
  int violations = 0;
  double worst_margin = 0.0;  // smallest lhs - rhs (or bound - error) seen
};

/// Error bound of the soft maximum/minimum on random vectors with planted
/// multiplicities, over alpha in {1, 2, 5, 10, 50}.
AuditSummary audit_boltzmann_random(int trials, std::uint64_t seed);

/// Angle-distortion bound on random Delaunay meshes of 3D height fields
/// under random near-identity maps and random inverse scales.
AuditSummary audit_theorem_random(int trials, std::uint64_t seed, int points = 50);

}  // namespace pcparam
