#include "qsn/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qsn {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

Qfim::Qfim(RMat matrix, std::vector<std::string> labels) : m_(std::move(matrix)), labels_(std::move(labels)) {
  if (m_.rows() != m_.cols()) throw SchemaError("information matrix must be square");
  if (m_.size() == 0) throw SchemaError("information matrix must be nonempty");
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw SchemaError("information matrix is not symmetric");
  m_ = (0.5 * (m_ + m_.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<RMat> es(m_, Eigen::EigenvaluesOnly);
  eigen_floor_ = es.eigenvalues().minCoeff();
  eigen_ceil_ = es.eigenvalues().maxCoeff();
  if (eigen_floor_ < -1e-9)
    throw SchemaError("information matrix is not positive semidefinite");
  if (labels_.empty()) {
    for (int k = 1; k <= dim(); ++k) labels_.push_back("phi_" + std::to_string(k));
  }
  if (int(labels_.size()) != dim())
    throw SchemaError("one label per parameter expected");
}

LinearReparam::LinearReparam(RMat m, bool row_normalized)
    : m_(std::move(m)), row_normalized_(row_normalized) {
  if (m_.rows() != m_.cols() || m_.size() == 0)
    throw SchemaError("reparameterization matrix must be square");
  if (std::abs(m_.determinant()) <= 1e-12)
    throw SchemaError("reparameterization matrix is singular");
  if (row_normalized_) {
    for (Index r = 0; r < m_.rows(); ++r)
      if (std::abs(m_.row(r).norm() - 1.0) > 1e-10)
        throw SchemaError("row-normalized reparameterization has a row of non-unit norm");
  }
}

RMat orthonormal_from_first_row(const RVec& v) {
  if (v.size() < 1) throw SchemaError("empty direction vector");
  const double n = v.norm();
  if (n < 1e-12) throw SchemaError("zero direction vector");
  const RVec u = v / n;
  const Index d = v.size();
  RVec w = u;
  w[0] -= 1.0;
  const double ww = w.squaredNorm();
  if (ww < 1e-28) return RMat::Identity(d, d);
  return RMat::Identity(d, d) - (2.0 / ww) * (w * w.transpose());
}

Weighting::Weighting(RVec diag) : w_(std::move(diag)) {
  if (w_.size() == 0) throw SchemaError("empty weighting");
  if (w_.minCoeff() < 0.0) throw SchemaError("weights must be nonnegative");
  if (std::abs(w_.sum() - 1.0) > 1e-12) throw SchemaError("weights must sum to one");
}

Weighting Weighting::uniform(int d) {
  if (d < 1) throw SchemaError("weighting dimension must be positive");
  RVec w = RVec::Constant(d, 1.0 / double(d));
  // Compensate rounding so the trace is exactly one.
  w[0] += 1.0 - w.sum();
  return Weighting(std::move(w));
}

Weighting Weighting::single(int d, int k) {
  if (d < 1 || k < 0 || k >= d) throw SchemaError("weight index out of range");
  RVec w = RVec::Zero(d);
  w[k] = 1.0;
  return Weighting(std::move(w));
}

// ---------------------------------------------------------------------------
// QFIM computation
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> default_labels(int d, const char* stem) {
  std::vector<std::string> out;
  for (int k = 1; k <= d; ++k) out.push_back(stem + std::to_string(k));
  return out;
}

Mat local_matrix_of(const NetworkLayout& layout, int k) {
  const GeneratorSpec& g = layout.param_generator(k);
  if (g.is_linear())
    return RVec(g.diagonal_on(layout.sensor(layout.param_sensor(k)))).cast<cdouble>().asDiagonal();
  return g.dense_matrix();
}

/// Covariance-form QFIM from the generator-applied vectors u_k = A_k psi:
/// F_lm = 4(Re<u_l|u_m> - m_l m_m) with m_k = <psi|u_k> (real for Hermitian
/// A_k).
RMat covariance_qfim(const Vec& psi, const std::vector<Vec>& u) {
  const int d = int(u.size());
  RVec mean(d);
  for (int k = 0; k < d; ++k) mean[k] = psi.dot(u[size_t(k)]).real();
  RMat f(d, d);
  for (int l = 0; l < d; ++l)
    for (int m = l; m < d; ++m) {
      const double val = 4.0 * (u[size_t(l)].dot(u[size_t(m)]).real() - mean[l] * mean[m]);
      f(l, m) = val;
      f(m, l) = val;
    }
  return f;
}

}  // namespace

Qfim qfim_pure_commuting(const NetworkState& state) {
  const NetworkLayout& layout = state.layout();
  const int d = layout.num_params();
  if (d == 0) throw SchemaError("no parameters declared");

  // Parameters on distinct sensors always commute; within a sensor, pairs
  // commute unless a dense generator is involved.
  for (int s = 0; s < layout.num_sensors(); ++s) {
    const auto params = layout.params_on_sensor(s);
    bool any_dense = false;
    for (int k : params) any_dense |= !layout.param_generator(k).is_linear();
    if (!any_dense || params.size() < 2) continue;
    for (size_t a = 0; a < params.size(); ++a)
      for (size_t b = a + 1; b < params.size(); ++b) {
        const Mat ha = local_matrix_of(layout, params[a]);
        const Mat hb = local_matrix_of(layout, params[b]);
        if ((ha * hb - hb * ha).cwiseAbs().maxCoeff() > 1e-9)
          throw SchemaError(
              "generators on one sensor do not commute; use the phase-point form "
              "qfim_pure_general");
      }
  }

  std::vector<Vec> u;
  u.reserve(size_t(d));
  for (int k = 0; k < d; ++k)
    u.push_back(embed_local(layout, layout.param_sensor(k), layout.param_generator(k))
                    .apply(layout, state.amplitudes()));
  return Qfim(covariance_qfim(state.amplitudes(), u), default_labels(d, "phi_"));
}

Qfim qfim_pure_general(const NetworkState& state, const RVec& phi) {
  const NetworkLayout& layout = state.layout();
  const int d = layout.num_params();
  if (d == 0) throw SchemaError("no parameters declared");
  std::vector<Vec> u;
  u.reserve(size_t(d));
  for (int k = 0; k < d; ++k)
    u.push_back(generator_at(layout, k, phi).apply(layout, state.amplitudes()));
  return Qfim(covariance_qfim(state.amplitudes(), u), default_labels(d, "phi_"));
}

namespace {

/// Derivative of the evolved state: d_k |psi_phi> = -i U(phi) G_k |psi>.
Vec evolved_derivative(const NetworkState& state, const RVec& phi, int k) {
  const NetworkLayout& layout = state.layout();
  const Vec u = generator_at(layout, k, phi).apply(layout, state.amplitudes());
  return cdouble(0.0, -1.0) * evolve_vector(layout, phi, u);
}

}  // namespace

Mat sld_pure(const NetworkState& state, const RVec& phi, int k) {
  const NetworkLayout& layout = state.layout();
  if (layout.dim() > 2048)
    throw CapacityError("dense SLD materialization capped at dimension 2048");
  if (k < 0 || k >= layout.num_params()) throw SchemaError("parameter index out of range");

  const Vec psi = evolve_vector(layout, phi, state.amplitudes());
  const Vec a = evolved_derivative(state, phi, k);
  Mat sld = 2.0 * (a * psi.adjoint() + psi * a.adjoint());

  // Verify the defining relation d_k rho = (rho L + L rho)/2 on the evolved
  // projector.
  const Mat rho = psi * psi.adjoint();
  const Mat drho = a * psi.adjoint() + psi * a.adjoint();
  const double residual = (drho - 0.5 * (rho * sld + sld * rho)).cwiseAbs().maxCoeff();
  if (residual > 1e-8)
    throw EstimationError("symmetric logarithmic derivative failed its defining relation");
  return sld;
}

RMat saturation_check(const NetworkState& state, const RVec& phi) {
  const NetworkLayout& layout = state.layout();
  const int d = layout.num_params();
  const Vec psi = evolve_vector(layout, phi, state.amplitudes());
  std::vector<Vec> lpsi;
  lpsi.reserve(size_t(d));
  for (int k = 0; k < d; ++k) {
    const Vec a = evolved_derivative(state, phi, k);
    lpsi.push_back(2.0 * (a + psi.dot(a) * psi));
  }
  RMat s = RMat::Zero(d, d);
  for (int l = 0; l < d; ++l)
    for (int m = l + 1; m < d; ++m) {
      const double val = 2.0 * std::abs(lpsi[size_t(l)].dot(lpsi[size_t(m)]).imag());
      s(l, m) = val;
      s(m, l) = val;
    }
  return s;
}

RMat classical_fim(const NetworkState& state, const RVec& phi, const std::vector<Mat>& povm) {
  const NetworkLayout& layout = state.layout();
  const int d = layout.num_params();
  if (phi.size() != d) throw SchemaError("phi length does not match the parameter count");
  if (povm.empty()) throw SchemaError("empty measurement");
  Mat total = Mat::Zero(layout.dim(), layout.dim());
  for (const Mat& e : povm) {
    if (e.rows() != layout.dim() || e.cols() != layout.dim())
      throw SchemaError("measurement effect has the wrong dimension");
    total += e;
  }
  if ((total - Mat::Identity(layout.dim(), layout.dim())).cwiseAbs().maxCoeff() > 1e-9)
    throw SchemaError("measurement effects do not sum to the identity");

  const size_t n_out = povm.size();
  auto probabilities = [&](const RVec& at) {
    const Vec psi = evolve_vector(layout, at, state.amplitudes());
    RVec p = RVec::Zero(Index(n_out));
    for (size_t m = 0; m < n_out; ++m) p[Index(m)] = psi.dot(povm[m] * psi).real();
    return p;
  };

  const RVec p0 = probabilities(phi);
  RMat deriv(d, Index(n_out));
  for (int k = 0; k < d; ++k) {
    RVec plus = phi, minus = phi;
    plus[k] += kFdStep;
    minus[k] -= kFdStep;
    deriv.row(k) = ((probabilities(plus) - probabilities(minus)) / (2.0 * kFdStep)).transpose();
  }

  RMat f = RMat::Zero(d, d);
  for (size_t m = 0; m < n_out; ++m) {
    if (p0[Index(m)] < 1e-12) continue;
    f += deriv.col(Index(m)) * deriv.col(Index(m)).transpose() / p0[Index(m)];
  }
  return f;
}

// ---------------------------------------------------------------------------
// Reparameterization, reduction, scalar bound
// ---------------------------------------------------------------------------

Qfim reparam(const Qfim& qfim, const LinearReparam& m) {
  if (m.matrix().rows() != qfim.dim())
    throw SchemaError("reparameterization dimension mismatch");
  const RMat b = m.matrix().inverse();
  RMat out = b.transpose() * qfim.matrix() * b;
  out = (0.5 * (out + out.transpose())).eval();
  return Qfim(std::move(out), default_labels(qfim.dim(), "theta_"));
}

ReducedProblem reduce(const Qfim& qfim, const Weighting& weighting) {
  const int d = qfim.dim();
  if (weighting.dim() != d) throw SchemaError("weighting dimension mismatch");

  // Union-find over the support graph of the QFIM.
  std::vector<int> parent(static_cast<size_t>(d));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[size_t(x)] != x) {
      parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
      x = parent[size_t(x)];
    }
    return x;
  };
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(qfim.matrix()(i, j)) > kSupportTol) parent[size_t(find(i))] = find(j);

  std::vector<bool> keep_component(size_t(d), false);
  for (int i = 0; i < d; ++i)
    if (weighting.diag()[i] > 0.0) keep_component[size_t(find(i))] = true;

  std::vector<int> kept, discarded;
  for (int i = 0; i < d; ++i)
    (keep_component[size_t(find(i))] ? kept : discarded).push_back(i);

  const int r = int(kept.size());
  RMat block(r, r);
  RVec weights(r);
  std::vector<std::string> labels;
  for (int a = 0; a < r; ++a) {
    weights[a] = weighting.diag()[kept[size_t(a)]];
    labels.push_back(qfim.labels()[size_t(kept[size_t(a)])]);
    for (int b = 0; b < r; ++b) block(a, b) = qfim.matrix()(kept[size_t(a)], kept[size_t(b)]);
  }
  Qfim reduced(std::move(block), std::move(labels));
  const bool failure = !reduced.invertible();
  return ReducedProblem{std::move(kept), std::move(reduced), std::move(weights),
                        std::move(discarded), failure};
}

double weighted_crb(const ReducedProblem& reduced, long mu) {
  if (mu < 1) throw SchemaError("number of repetitions must be a positive integer");
  if (reduced.estimation_failure || !reduced.reduced_qfim.invertible())
    throw EstimationError(
        "reduced information matrix is singular: the weighted functions cannot be estimated");
  const RMat inv = reduced.reduced_qfim.matrix().inverse();
  double total = 0.0;
  for (int k = 0; k < reduced.reduced_qfim.dim(); ++k)
    total += reduced.reduced_weights[k] * inv(k, k);
  return total / double(mu);
}

// ---------------------------------------------------------------------------
// Matrix inequalities
// ---------------------------------------------------------------------------

namespace {

void require_positive_definite(const RMat& a, const char* what) {
  if (a.rows() != a.cols() || a.size() == 0) throw SchemaError("matrix must be square");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw SchemaError("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(a, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw SchemaError(std::string(what) + " requires a positive definite matrix");
}

}  // namespace

RVec inv_diag_lower_bound(const RMat& a) {
  require_positive_definite(a, "diagonal inverse bound");
  return a.diagonal().cwiseInverse();
}

std::vector<RMat> block_inv_lower_bound(const RMat& a, const std::vector<int>& partition) {
  require_positive_definite(a, "block inverse bound");
  Index total = 0;
  for (int b : partition) {
    if (b < 1) throw SchemaError("block sizes must be positive");
    total += b;
  }
  if (total != a.rows()) throw SchemaError("block sizes must sum to the matrix dimension");
  std::vector<RMat> out;
  Index off = 0;
  for (int b : partition) {
    out.push_back(a.block(off, off, b, b).inverse());
    off += b;
  }
  return out;
}

SymmetricQfimInverse symmetric_qfim_inverse(double v, double c, int d) {
  if (d < 1) throw SchemaError("dimension must be positive");
  if (!(v > 0.0)) throw SchemaError("variance must be positive");
  if (d == 1) {
    RMat inv(1, 1);
    inv(0, 0) = 1.0 / (4.0 * v);
    return SymmetricQfimInverse{std::move(inv), 1.0};
  }
  const double j = c / v;
  if (std::abs(1.0 - j) <= 1e-12 || std::abs(1.0 + double(d - 1) * j) <= 1e-12)
    throw EstimationError("exchange-symmetric information matrix is singular");
  const double scale = 1.0 / (4.0 * (v - c));
  const double shared = c / (v + double(d - 1) * c);
  RMat inv = scale * (RMat::Identity(d, d) - shared * RMat::Ones(d, d));
  const double g =
      (1.0 + double(d - 2) * j) / ((1.0 - j) * (1.0 + double(d - 1) * j));
  return SymmetricQfimInverse{std::move(inv), g};
}

}  // namespace qsn
