#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "qsn/fisher.hpp"
#include "qsn/network.hpp"

namespace qsn {

/// A particle-count-constrained subspace of the network, with its basis
/// enumerated once at construction (every listed basis state satisfies the
/// constraint exactly).
class SubspaceSpec {
 public:
  /// States whose total particle number across all sensors is at most n_max.
  static SubspaceSpec total_at_most(NetworkLayout layout, int n_max);
  /// States with at most n_max particles in every individual sensor.
  static SubspaceSpec per_sensor_at_most(NetworkLayout layout, int n_max);
  /// States with exactly the given particle number in each sensor.
  static SubspaceSpec fixed_per_sensor(NetworkLayout layout, std::vector<int> per_sensor);

  const NetworkLayout& layout() const { return layout_; }
  /// Ascending full-space basis indices spanning the subspace.
  const std::vector<Index>& basis() const { return basis_; }
  Index dim() const { return Index(basis_.size()); }
  /// Largest total particle number over the basis.
  int max_total_particles() const { return max_total_; }

 private:
  SubspaceSpec(NetworkLayout layout, std::vector<Index> basis);
  NetworkLayout layout_;
  std::vector<Index> basis_;
  int max_total_ = 0;
};

/// Outcome of a search. The optimum is always reproducible: evaluating the
/// declared objective on best_state returns best_value to 1e-9, and
/// best_state lies in the declared subspace by construction.
struct SearchResult {
  double best_value;
  NetworkState best_state;
  long evaluations = 0;
  std::uint64_t seed = 0;
  /// Analytic envelope the optimum may never exceed (variance search only).
  std::optional<double> certificate;
  /// Catalog bound the search tried to beat, when one was supplied.
  std::optional<double> reference;
  /// True iff some sampled state beat the reference by more than 1e-6.
  /// A search that finds nothing better is evidence of consistency, never a
  /// proof of optimality.
  bool reference_beaten = false;
};

/// Minimize the weighted scalar bound over all parameters jointly.
struct EstimatePhi {
  Weighting weighting;
};
/// Minimize the variance bound of the single normalized function v . phi,
/// with the remaining directions kept as nuisance parameters.
struct SingleFunction {
  RVec v;
};
using SearchObjective = std::variant<EstimatePhi, SingleFunction>;

/// Deterministic simplex grid over squared amplitudes: every candidate has
/// nonnegative real amplitudes whose squares are multiples of step (valid
/// because the information matrix of commuting diagonal generators depends
/// only on the squared magnitudes). 1/step must be an integer.
struct ExhaustiveRealGrid {
  double step;
};
/// count states drawn from the unitarily invariant measure on the subspace
/// sphere via normalized complex Gaussian amplitudes; reproducible for a
/// fixed seed regardless of evaluation order.
struct RandomHaar {
  long count;
  std::uint64_t seed;
};
using SearchSampler = std::variant<ExhaustiveRealGrid, RandomHaar>;

/// Exact maximization of Var(psi, H_v), H_v = sum_k v_k H_k (v nonnegative),
/// over the subspace: for diagonal generators the optimum is the equal
/// superposition of the extremal-eigenvalue basis states, found by a scan.
/// The certificate field carries the analytic envelope
/// (max_k v_k)^2 Nmax^2 dlam^2 / 4.
SearchResult max_variance(const SubspaceSpec& subspace, const RVec& v);

/// Minimizes the reduced weighted scalar bound (at one repetition) over
/// sampled subspace states. Samples whose reduced information matrix is
/// singular are skipped. Ties break to the earliest candidate, so the result
/// is independent of evaluation order.
SearchResult min_crb_search(const SubspaceSpec& subspace, const SearchObjective& objective,
                            const SearchSampler& sampler,
                            std::optional<double> reference = std::nullopt);

/// Grid-minimizes the separable weighted-function bound over allocation
/// fractions on the simplex (step <= 1e-2, 1/step integral) and checks the
/// winner lies within one grid step of the analytic allocation
/// x_k proportional to v_k^(2/3). Returns the grid minimizer.
RVec allocation_search(const RVec& v, double n_max, double step);

/// Grid-minimizes the two-qubit non-orthogonal-pair bound E(x) over
/// x in (-1+step, 1-step); returns (x_star, E_star) at one repetition.
std::pair<double, double> nonorthogonal_scan(double alpha, double beta, double step);

}  // namespace qsn
