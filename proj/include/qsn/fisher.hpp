#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qsn/network.hpp"

namespace qsn {

// ---------------------------------------------------------------------------
// Qfim
// ---------------------------------------------------------------------------

/// Quantum Fisher information matrix: real, symmetric (to 1e-10, then
/// symmetrized exactly) and positive semidefinite (smallest eigenvalue
/// >= -1e-9). Carries per-parameter labels and the eigenvalue range.
class Qfim {
 public:
  explicit Qfim(RMat matrix, std::vector<std::string> labels = {});

  const RMat& matrix() const { return m_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int dim() const { return int(m_.rows()); }
  double eigen_floor() const { return eigen_floor_; }
  double eigen_ceil() const { return eigen_ceil_; }
  /// Relative invertibility test: smallest eigenvalue above 1e-10 x largest.
  bool invertible() const {
    return eigen_ceil_ > 0.0 && eigen_floor_ > kInvertTolRel * eigen_ceil_;
  }

 private:
  RMat m_;
  std::vector<std::string> labels_;
  double eigen_floor_ = 0.0;
  double eigen_ceil_ = 0.0;
};

// ---------------------------------------------------------------------------
// LinearReparam
// ---------------------------------------------------------------------------

/// Invertible linear change of parameters theta = M phi. When row_normalized
/// is set, every row must have unit 2-norm, so each theta_k is a normalized
/// linear function of the phases.
class LinearReparam {
 public:
  explicit LinearReparam(RMat m, bool row_normalized = false);

  const RMat& matrix() const { return m_; }
  bool row_normalized() const { return row_normalized_; }

 private:
  RMat m_;
  bool row_normalized_ = false;
};

/// Orthogonal completion of a direction vector: returns a symmetric
/// orthogonal matrix (a Householder reflection, or the identity) whose first
/// row is v normalized. Used to turn "estimate the single function v . phi"
/// into a full orthonormal reparameterization.
RMat orthonormal_from_first_row(const RVec& v);

// ---------------------------------------------------------------------------
// Weighting
// ---------------------------------------------------------------------------

/// Diagonal nonnegative weight matrix with unit trace, defining the scalar
/// figure of merit Tr(W Cov).
class Weighting {
 public:
  explicit Weighting(RVec diag);
  /// Equal weight 1/d on every parameter.
  static Weighting uniform(int d);
  /// All weight on parameter k.
  static Weighting single(int d, int k);

  const RVec& diag() const { return w_; }
  int dim() const { return int(w_.size()); }

 private:
  RVec w_;
};

// ---------------------------------------------------------------------------
// ReducedProblem
// ---------------------------------------------------------------------------

/// Result of dropping zero-weight parameters that are exactly decoupled from
/// every weighted one. Weights are copied, never renormalized; zero-weight
/// parameters that remain coupled stay in the problem as nuisance parameters.
struct ReducedProblem {
  std::vector<int> kept_indices;       // ascending original indices
  Qfim reduced_qfim;                   // principal block on kept_indices
  RVec reduced_weights;                // entries copied from the weighting
  std::vector<int> discarded_indices;  // ascending original indices
  bool estimation_failure = false;     // reduced block not invertible
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// QFIM of a pure probe for mutually commuting generators:
/// F_lm = 4(<H_l H_m> - <H_l><H_m>), independent of the phases. Rejects
/// layouts with a non-commuting generator pair on one sensor (commutator norm
/// > 1e-9); use qfim_pure_general for those.
Qfim qfim_pure_commuting(const NetworkState& state);

/// QFIM of a pure probe at a specific phase point, valid for non-commuting
/// generators: F_mn = 2<{G_m, G_n}> - 4<G_m><G_n> with the local generators
/// G_k = -i (dU^dag/dphi_k) U and expectations in the input probe state.
Qfim qfim_pure_general(const NetworkState& state, const RVec& phi);

/// Symmetric logarithmic derivative of the evolved pure state for parameter
/// k: L_k = 2(|d_k psi><psi| + |psi><d_k psi|), returned as a dense matrix
/// (network dimension capped at 2048). The defining relation
/// d_k rho = (rho L + L rho)/2 is verified internally to 1e-8.
Mat sld_pure(const NetworkState& state, const RVec& phi, int k);

/// Joint-saturability test: S_lm = |Tr(rho [L_l, L_m])|. The scalar bound for
/// every parameter is simultaneously attainable iff max_lm S_lm <= 1e-8.
/// Computed from SLD-vector overlaps, so no dense operators are built.
RMat saturation_check(const NetworkState& state, const RVec& phi);

/// Classical Fisher information matrix of the outcome distribution
/// p(m|phi) = <psi_phi| E_m |psi_phi> for a POVM (effects must sum to the
/// identity within 1e-9). Derivatives by central differences with step 1e-5;
/// outcomes with p < 1e-12 are skipped.
RMat classical_fim(const NetworkState& state, const RVec& phi, const std::vector<Mat>& povm);

/// QFIM under theta = M phi: F(theta) = (M^-1)^T F(phi) M^-1.
Qfim reparam(const Qfim& qfim, const LinearReparam& m);

/// Drops every zero-weight parameter whose support-graph component (edges
/// where |F_ij| > 1e-9) contains no positively weighted parameter. The
/// remaining block is exactly decoupled from the discarded one. A singular
/// reduced block is flagged, not thrown.
ReducedProblem reduce(const Qfim& qfim, const Weighting& weighting);

/// Scalar precision bound Tr(W_kept F_kept^-1) / mu for the reduced problem.
/// Throws EstimationError when the reduced QFIM is singular: the requested
/// functions cannot all be estimated.
double weighted_crb(const ReducedProblem& reduced, long mu);

/// Per-index lower bounds 1/A_kk for the diagonal of the inverse of a
/// positive definite matrix: [A^-1]_kk >= 1/A_kk, with equality iff row k's
/// off-diagonal entries vanish.
RVec inv_diag_lower_bound(const RMat& a);

/// Blockwise version: for a partition of a positive definite matrix into
/// diagonal blocks, returns [A_kk]^-1 per block; [A^-1]_kk - [A_kk]^-1 is
/// positive semidefinite, with equality iff the off-blocks touching k vanish.
std::vector<RMat> block_inv_lower_bound(const RMat& a, const std::vector<int>& partition);

/// Closed-form data for the exchange-symmetric QFIM
/// F = 4((v - c) I + c 1 1^T) in dimension d.
struct SymmetricQfimInverse {
  RMat inverse;  // closed-form F^-1
  double g;      // 4 v [F^-1]_kk = (1+(d-2)J) / ((1-J)(1+(d-1)J)), J = c/v
};

/// Inverts the exchange-symmetric QFIM in closed form and reports the
/// correlation penalty factor g. Requires v > 0 and J = c/v away from the
/// singular values 1 and -1/(d-1).
SymmetricQfimInverse symmetric_qfim_inverse(double v, double c, int d);

}  // namespace qsn
