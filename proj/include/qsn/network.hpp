#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "qsn/types.hpp"

namespace qsn {

// ---------------------------------------------------------------------------
// SensorSpace
// ---------------------------------------------------------------------------

/// Hilbert space of one sensor, organised as a direct sum of particle-number
/// sectors: sector n holds the states with exactly n particles in the sensor.
/// sector_dims[n] may be zero (sector absent); sector 0, when present, is the
/// one-dimensional vacuum.
///
/// Basis ordering: sectors ascend by particle number; states within a sector
/// are ordered by a fixed lexicographic label (bosonic sectors are
/// one-dimensional; qubit-ensemble sectors order bitstrings with "up" first).
class SensorSpace {
 public:
  explicit SensorSpace(std::vector<Index> sector_dims);

  /// Truncated bosonic mode: one state per photon number 0..n_max.
  static SensorSpace bosonic_mode(int n_max);
  /// Ensemble of exactly n_atoms qubits: a single occupied sector of
  /// dimension 2^n (no vacuum component).
  static SensorSpace qubit_ensemble(int n_atoms);
  /// Qubit ensemble that may also be empty: vacuum plus the 2^n sector.
  static SensorSpace qubit_ensemble_with_vacuum(int n_atoms);

  Index dim() const { return dim_; }
  int n_max() const { return int(sector_dims_.size()) - 1; }
  Index sector_dim(int n) const { return sector_dims_.at(size_t(n)); }
  Index sector_offset(int n) const { return offsets_.at(size_t(n)); }

  /// Particle number of a basis state.
  int sector_of(Index basis_index) const;
  /// Position of a basis state within its sector.
  Index index_in_sector(Index basis_index) const;

  bool operator==(const SensorSpace& o) const { return sector_dims_ == o.sector_dims_; }

 private:
  std::vector<Index> sector_dims_;
  std::vector<Index> offsets_;
  Index dim_ = 0;
};

// ---------------------------------------------------------------------------
// GeneratorSpec
// ---------------------------------------------------------------------------

/// Linearly spaced spectrum: within sector n the eigenvalues are
/// lambda_l(n) = delta*n + l with l = -s*n .. s*n. Photon number: delta=1,
/// s=0. Collective spin J_z on n qubits: delta=0, s=1/2.
struct LinearSpectrum {
  double delta = 0.0;
  int twice_spin = 0;  // 2s, a nonnegative integer
  double spin() const { return 0.5 * twice_spin; }
};

/// Local parameter generator for one sensor: either a diagonal operator with
/// a linearly spaced spectrum, or an explicit Hermitian matrix over the
/// sensor's full space.
class GeneratorSpec {
 public:
  static GeneratorSpec linear(double delta, int twice_spin);
  static GeneratorSpec number_operator() { return linear(1.0, 0); }
  static GeneratorSpec spin_z() { return linear(0.0, 1); }
  static GeneratorSpec dense(Mat h);

  bool is_linear() const { return std::holds_alternative<LinearSpectrum>(kind_); }
  const LinearSpectrum& linear_spec() const;
  const Mat& dense_matrix() const;

  /// Per-particle extremes over "n particles or fewer": min(0, delta-s) and
  /// max(0, delta+s). The zero accounts for the vacuum.
  double lambda_min() const;
  double lambda_max() const;

  /// Eigenvalue of in-sector basis state j at particle number n.
  ///
  /// Sectors are filled by one of two templates: a simple multiplet
  /// (dimension 2sn+1, one state per level, descending so the top state comes
  /// first) or, for s=1/2 and sector dimension 2^n, the qubit product basis
  /// where state b has eigenvalue delta*n + n/2 - popcount(b). Any other
  /// sector dimension is rejected: use a dense generator for such spaces.
  double sector_eigenvalue(const SensorSpace& space, int n, Index j) const;

  /// Full diagonal of the generator on one sensor (linear kind only).
  RVec diagonal_on(const SensorSpace& space) const;

  /// Basis index (within the sensor) of the unique extremal eigenstate over
  /// all occupied sectors with particle number <= n. Throws SchemaError if
  /// the extremum is degenerate: an explicit eigenvector must be supplied.
  Index extremal_state_upto(const SensorSpace& space, int n, bool maximal) const;

  bool operator==(const GeneratorSpec& o) const;

 private:
  GeneratorSpec() = default;
  std::variant<LinearSpectrum, Mat> kind_;
};

// ---------------------------------------------------------------------------
// NetworkLayout
// ---------------------------------------------------------------------------

/// The sensing network: an ordered list of sensors (tensor factors, row-major
/// indexing) plus one (sensor, generator) pair per parameter phi_k. Several
/// parameters may share a sensor (vector-valued signals). Sensors carrying no
/// parameter are ancillas.
class NetworkLayout {
 public:
  NetworkLayout(std::vector<SensorSpace> sensors,
                std::vector<std::pair<int, GeneratorSpec>> params);

  Index dim() const { return dim_; }
  int num_sensors() const { return int(sensors_.size()); }
  int num_params() const { return int(params_.size()); }
  const SensorSpace& sensor(int s) const { return sensors_.at(size_t(s)); }
  int param_sensor(int k) const { return params_.at(size_t(k)).first; }
  const GeneratorSpec& param_generator(int k) const { return params_.at(size_t(k)).second; }

  std::vector<int> ancilla_indices() const;
  bool all_params_linear() const;
  /// Parameter indices attached to one sensor.
  std::vector<int> params_on_sensor(int s) const;

  /// Row-major stride of a sensor axis in the full index.
  Index stride(int s) const { return strides_.at(size_t(s)); }
  Index compose(const std::vector<Index>& per_sensor) const;
  void decompose(Index full, std::vector<Index>& per_sensor) const;

  bool operator==(const NetworkLayout& o) const;

 private:
  std::vector<SensorSpace> sensors_;
  std::vector<std::pair<int, GeneratorSpec>> params_;
  std::vector<Index> strides_;
  Index dim_ = 1;
};

// ---------------------------------------------------------------------------
// NetworkState
// ---------------------------------------------------------------------------

/// Pure state of the full network: a normalized complex amplitude vector over
/// the tensor-product basis of the layout.
class NetworkState {
 public:
  NetworkState(NetworkLayout layout, Vec amplitudes);

  const NetworkLayout& layout() const { return layout_; }
  const Vec& amplitudes() const { return amp_; }

 private:
  NetworkLayout layout_;
  Vec amp_;
};

// ---------------------------------------------------------------------------
// NetworkOperator
// ---------------------------------------------------------------------------

/// Operator on the full network space, stored structurally: either a real
/// diagonal, or a dense Hermitian block acting on a single sensor axis.
/// Keeps the 2^16-dimensional cap honest: no dense full-space matrices.
class NetworkOperator {
 public:
  static NetworkOperator diagonal(RVec d);
  static NetworkOperator local_dense(int sensor, Mat h);

  bool is_diagonal() const { return std::holds_alternative<RVec>(repr_); }
  const RVec& diag() const { return std::get<RVec>(repr_); }
  int local_sensor() const { return sensor_; }
  const Mat& local_matrix() const { return std::get<Mat>(repr_); }

  Vec apply(const NetworkLayout& layout, const Vec& x) const;
  double expectation(const NetworkState& psi) const;
  /// Dense matrix over the full space; guarded, for small problems only.
  Mat to_dense(const NetworkLayout& layout) const;

 private:
  NetworkOperator() = default;
  std::variant<RVec, Mat> repr_;
  int sensor_ = -1;
};

// ---------------------------------------------------------------------------
// ResourceOperator
// ---------------------------------------------------------------------------

/// Diagonal, nonnegative resource observable. The default counts the total
/// number of particles across all sensors (ancillas included), which
/// commutes with every linear-spectrum generator by construction.
struct ResourceOperator {
  RVec diag;  // over the full network basis

  static ResourceOperator total_particles(const NetworkLayout& layout);
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// H_k = 1 x ... x h x ... x 1 with h on the given sensor. Linear specs embed
/// as a full-space diagonal; dense specs stay matrix-free on their axis.
NetworkOperator embed_local(const NetworkLayout& layout, int sensor_index,
                            const GeneratorSpec& op);

/// U(phi) |psi> with U(phi) = exp(-i sum_k phi_k H_k). Sensors factorize, so
/// linear generators become elementwise phases and dense generators a local
/// matrix exponential of the summed per-sensor Hamiltonian.
NetworkState evolve(const NetworkState& state, const RVec& phi);

/// U(phi) x for a raw (not necessarily normalized) vector; evolve() composes
/// this with the normalization-checked NetworkState wrapper.
Vec evolve_vector(const NetworkLayout& layout, const RVec& phi, const Vec& x);

/// Local generator of parameter k at phi: G_k = -i (dU^dag/dphi_k) U.
/// Equals H_k whenever every parameter on the sensor is linear; otherwise the
/// derivative of the local matrix exponential is evaluated by the exact
/// spectral divided-difference formula in the eigenbasis of the summed local
/// Hamiltonian.
NetworkOperator generator_at(const NetworkLayout& layout, int k, const RVec& phi);

/// Mean total particle number <N_hat> of the state.
double resource_expectation(const NetworkState& state);

/// Largest total particle number carried by any basis state with amplitude
/// above the tolerance (the N_max of the state's support).
int max_particles_in_support(const NetworkState& state, double tol = 1e-12);

/// Probability marginal of one sensor: entry j is the probability that the
/// sensor is found in its basis state j.
RVec sensor_marginal(const NetworkState& state, int sensor);

}  // namespace qsn
