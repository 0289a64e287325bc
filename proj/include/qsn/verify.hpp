#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qsn {

/// Outcome of one verification suite. worst_slack is the smallest margin by
/// which any checked inequality held (tolerance minus error for equality
/// checks); a negative value is the size of the worst violation.
struct SuiteReport {
  std::string suite;
  long checks = 0;
  long failures = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::vector<std::string> lines;  // notable findings and all failures
  bool passed() const { return failures == 0 && checks > 0; }
};

/// Random positive definite matrices (dim <= 8) against dense inversion:
/// diagonal and block lower bounds on the inverse, plus exact equality in
/// the diagonal / block-diagonal cases.
SuiteReport verify_matrix_inequalities(long trials, std::uint64_t seed);

/// Random pure 2-3 sensor states: the separable surrogate preserves
/// per-sensor variances and mean particle number, kills covariances, and
/// never worsens the weighted scalar bound.
SuiteReport verify_surrogate(long trials, std::uint64_t seed);

/// Every probe-catalog state's pipeline bound against its closed form, the
/// closed-form inverse against dense inversion, and the cross-family
/// inequalities between the catalog bounds. Fully deterministic except for
/// seeded random admissible parameter draws.
SuiteReport verify_bounds_crosscheck(long trials, std::uint64_t seed);

/// Closed-form minimizer of the two-qubit non-orthogonal-pair bound against
/// a grid scan over an 11 x 11 lattice of admissible angle pairs.
SuiteReport verify_nonorthogonal_pair(double step);

/// Randomized scan for states beating the weighted two-branch catalog bound
/// on a small two-sensor instance. Finding none is reported as "consistent";
/// this is evidence, never proof.
SuiteReport verify_conjecture_scan(long samples, std::uint64_t seed);

/// CLI dispatcher: runs the named suite with the given overrides (each suite
/// has its own defaults). Unknown names throw SchemaError.
SuiteReport run_suite(const std::string& name, std::optional<long> trials,
                      std::optional<std::uint64_t> seed, std::optional<double> step);

/// Names accepted by run_suite, in display order.
std::vector<std::string> suite_names();

}  // namespace qsn
