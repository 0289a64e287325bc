#include "qsn/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace qsn {

// ---------------------------------------------------------------------------
// SensorSpace
// ---------------------------------------------------------------------------

SensorSpace::SensorSpace(std::vector<Index> sector_dims)
    : sector_dims_(std::move(sector_dims)) {
  if (sector_dims_.empty()) throw SchemaError("sensor needs at least one sector");
  offsets_.resize(sector_dims_.size());
  Index off = 0;
  for (size_t n = 0; n < sector_dims_.size(); ++n) {
    if (sector_dims_[n] < 0) throw SchemaError("negative sector dimension");
    offsets_[n] = off;
    off += sector_dims_[n];
  }
  dim_ = off;
  if (dim_ < 1) throw SchemaError("sensor space is empty");
  if (sector_dims_[0] > 1)
    throw SchemaError("vacuum sector must have dimension 0 or 1");
}

SensorSpace SensorSpace::bosonic_mode(int n_max) {
  if (n_max < 0) throw SchemaError("bosonic mode needs n_max >= 0");
  return SensorSpace(std::vector<Index>(size_t(n_max) + 1, 1));
}

SensorSpace SensorSpace::qubit_ensemble(int n_atoms) {
  if (n_atoms < 1 || n_atoms > 16) throw SchemaError("qubit ensemble needs 1..16 atoms");
  std::vector<Index> dims(size_t(n_atoms) + 1, 0);
  dims.back() = Index(1) << n_atoms;
  return SensorSpace(std::move(dims));
}

SensorSpace SensorSpace::qubit_ensemble_with_vacuum(int n_atoms) {
  if (n_atoms < 1 || n_atoms > 16) throw SchemaError("qubit ensemble needs 1..16 atoms");
  std::vector<Index> dims(size_t(n_atoms) + 1, 0);
  dims.front() = 1;
  dims.back() = Index(1) << n_atoms;
  return SensorSpace(std::move(dims));
}

int SensorSpace::sector_of(Index basis_index) const {
  for (size_t n = 0; n < sector_dims_.size(); ++n) {
    if (basis_index < offsets_[n] + sector_dims_[n]) return int(n);
  }
  throw std::out_of_range("basis index outside sensor space");
}

Index SensorSpace::index_in_sector(Index basis_index) const {
  const int n = sector_of(basis_index);
  return basis_index - offsets_[size_t(n)];
}

// ---------------------------------------------------------------------------
// GeneratorSpec
// ---------------------------------------------------------------------------

GeneratorSpec GeneratorSpec::linear(double delta, int twice_spin) {
  if (twice_spin < 0) throw SchemaError("spin must be nonnegative");
  if (delta == 0.0 && twice_spin == 0)
    throw SchemaError("trivial generator: delta and spin both zero");
  GeneratorSpec g;
  g.kind_ = LinearSpectrum{delta, twice_spin};
  return g;
}

GeneratorSpec GeneratorSpec::dense(Mat h) {
  if (h.rows() != h.cols()) throw SchemaError("dense generator must be square");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw SchemaError("dense generator is not Hermitian");
  GeneratorSpec g;
  g.kind_ = std::move(h);
  return g;
}

const LinearSpectrum& GeneratorSpec::linear_spec() const {
  return std::get<LinearSpectrum>(kind_);
}

const Mat& GeneratorSpec::dense_matrix() const { return std::get<Mat>(kind_); }

double GeneratorSpec::lambda_min() const {
  const auto& s = linear_spec();
  return std::min(0.0, s.delta - s.spin());
}

double GeneratorSpec::lambda_max() const {
  const auto& s = linear_spec();
  return std::max(0.0, s.delta + s.spin());
}

double GeneratorSpec::sector_eigenvalue(const SensorSpace& space, int n, Index j) const {
  const auto& spec = linear_spec();
  const Index dn = space.sector_dim(n);
  if (j < 0 || j >= dn) throw std::out_of_range("in-sector index");
  if (n == 0) return 0.0;  // vacuum
  const Index multiplet = Index(spec.twice_spin) * n + 1;
  if (dn == multiplet) {
    // One state per level, top state first.
    return spec.delta * n + (0.5 * spec.twice_spin * n - double(j));
  }
  if (spec.twice_spin == 1 && dn == (Index(1) << n)) {
    // Qubit product basis: bit 0 of the label means "up" on that qubit.
    const int down = std::popcount(std::uint64_t(j));
    return spec.delta * n + 0.5 * n - double(down);
  }
  throw SchemaError("sector dimension incompatible with a linear spectrum; use a dense generator");
}

RVec GeneratorSpec::diagonal_on(const SensorSpace& space) const {
  RVec d(space.dim());
  for (int n = 0; n <= space.n_max(); ++n) {
    for (Index j = 0; j < space.sector_dim(n); ++j)
      d[space.sector_offset(n) + j] = sector_eigenvalue(space, n, j);
  }
  return d;
}

Index GeneratorSpec::extremal_state_upto(const SensorSpace& space, int n, bool maximal) const {
  if (n < 0 || n > space.n_max()) throw SchemaError("particle count exceeds sensor capacity");
  bool found = false;
  double best = 0.0;
  Index arg = -1;
  int ties = 0;
  for (int m = 0; m <= n; ++m) {
    for (Index j = 0; j < space.sector_dim(m); ++j) {
      const double lam = sector_eigenvalue(space, m, j);
      if (!found || (maximal ? lam > best + 1e-12 : lam < best - 1e-12)) {
        best = lam;
        arg = space.sector_offset(m) + j;
        ties = 1;
        found = true;
      } else if (std::abs(lam - best) <= 1e-12) {
        ++ties;
      }
    }
  }
  if (!found) throw SchemaError("no occupied sector at or below requested particle count");
  if (ties > 1)
    throw SchemaError("extremal eigenstate is degenerate; supply an explicit eigenvector");
  return arg;
}

bool GeneratorSpec::operator==(const GeneratorSpec& o) const {
  if (is_linear() != o.is_linear()) return false;
  if (is_linear()) {
    const auto &a = linear_spec(), &b = o.linear_spec();
    return a.delta == b.delta && a.twice_spin == b.twice_spin;
  }
  return dense_matrix().rows() == o.dense_matrix().rows() &&
         dense_matrix() == o.dense_matrix();
}

// ---------------------------------------------------------------------------
// NetworkLayout
// ---------------------------------------------------------------------------

NetworkLayout::NetworkLayout(std::vector<SensorSpace> sensors,
                             std::vector<std::pair<int, GeneratorSpec>> params)
    : sensors_(std::move(sensors)), params_(std::move(params)) {
  if (sensors_.empty()) throw SchemaError("layout needs at least one sensor");
  dim_ = 1;
  for (const auto& s : sensors_) {
    if (s.dim() > kDimCap / dim_)
      throw CapacityError("network dimension exceeds the 2^16 cap");
    dim_ *= s.dim();
  }
  strides_.assign(sensors_.size(), 1);
  for (int s = int(sensors_.size()) - 2; s >= 0; --s)
    strides_[size_t(s)] = strides_[size_t(s) + 1] * sensors_[size_t(s) + 1].dim();
  for (const auto& [sensor, gen] : params_) {
    if (sensor < 0 || sensor >= num_sensors())
      throw SchemaError("parameter refers to a sensor outside the layout");
    if (!gen.is_linear() && gen.dense_matrix().rows() != sensors_[size_t(sensor)].dim())
      throw SchemaError("dense generator dimension does not match its sensor");
  }
}

std::vector<int> NetworkLayout::ancilla_indices() const {
  std::vector<bool> used(sensors_.size(), false);
  for (const auto& [sensor, gen] : params_) used[size_t(sensor)] = true;
  std::vector<int> out;
  for (size_t s = 0; s < sensors_.size(); ++s)
    if (!used[s]) out.push_back(int(s));
  return out;
}

bool NetworkLayout::all_params_linear() const {
  return std::all_of(params_.begin(), params_.end(),
                     [](const auto& p) { return p.second.is_linear(); });
}

std::vector<int> NetworkLayout::params_on_sensor(int s) const {
  std::vector<int> out;
  for (int k = 0; k < num_params(); ++k)
    if (params_[size_t(k)].first == s) out.push_back(k);
  return out;
}

Index NetworkLayout::compose(const std::vector<Index>& per_sensor) const {
  Index full = 0;
  for (size_t s = 0; s < sensors_.size(); ++s) full += per_sensor[s] * strides_[s];
  return full;
}

void NetworkLayout::decompose(Index full, std::vector<Index>& per_sensor) const {
  per_sensor.resize(sensors_.size());
  for (size_t s = 0; s < sensors_.size(); ++s) {
    per_sensor[s] = full / strides_[s];
    full -= per_sensor[s] * strides_[s];
  }
}

bool NetworkLayout::operator==(const NetworkLayout& o) const {
  if (!(sensors_ == o.sensors_)) return false;
  if (params_.size() != o.params_.size()) return false;
  for (size_t k = 0; k < params_.size(); ++k) {
    if (params_[k].first != o.params_[k].first) return false;
    if (!(params_[k].second == o.params_[k].second)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// NetworkState
// ---------------------------------------------------------------------------

NetworkState::NetworkState(NetworkLayout layout, Vec amplitudes)
    : layout_(std::move(layout)), amp_(std::move(amplitudes)) {
  if (amp_.size() != layout_.dim())
    throw SchemaError("amplitude vector does not match the network dimension");
  if (std::abs(amp_.norm() - 1.0) > 1e-10)
    throw SchemaError("state is not normalized");
}

// ---------------------------------------------------------------------------
// NetworkOperator
// ---------------------------------------------------------------------------

NetworkOperator NetworkOperator::diagonal(RVec d) {
  NetworkOperator op;
  op.repr_ = std::move(d);
  return op;
}

NetworkOperator NetworkOperator::local_dense(int sensor, Mat h) {
  NetworkOperator op;
  op.repr_ = std::move(h);
  op.sensor_ = sensor;
  return op;
}

namespace {

/// Apply a dense matrix on one tensor axis: y[.., j, ..] = sum_l h[j,l] x[.., l, ..].
Vec apply_on_axis(const NetworkLayout& layout, int sensor, const Mat& h, const Vec& x) {
  const Index D = layout.sensor(sensor).dim();
  const Index stride = layout.stride(sensor);
  const Index block = D * stride;
  Vec y = Vec::Zero(x.size());
  Vec slice(D);
  for (Index base = 0; base < x.size(); base += block) {
    for (Index inner = 0; inner < stride; ++inner) {
      for (Index j = 0; j < D; ++j) slice[j] = x[base + inner + j * stride];
      Vec out = h * slice;
      for (Index j = 0; j < D; ++j) y[base + inner + j * stride] = out[j];
    }
  }
  return y;
}

}  // namespace

Vec NetworkOperator::apply(const NetworkLayout& layout, const Vec& x) const {
  if (x.size() != layout.dim()) throw SchemaError("operator/state dimension mismatch");
  if (is_diagonal()) return diag().cast<cdouble>().cwiseProduct(x);
  return apply_on_axis(layout, sensor_, local_matrix(), x);
}

double NetworkOperator::expectation(const NetworkState& psi) const {
  const Vec y = apply(psi.layout(), psi.amplitudes());
  return psi.amplitudes().dot(y).real();
}

Mat NetworkOperator::to_dense(const NetworkLayout& layout) const {
  const Index dim = layout.dim();
  if (dim > 4096) throw CapacityError("dense materialization capped at dimension 4096");
  if (is_diagonal()) return diag().cast<cdouble>().asDiagonal();
  Mat full = Mat::Zero(dim, dim);
  Vec e = Vec::Zero(dim);
  for (Index col = 0; col < dim; ++col) {
    e[col] = 1.0;
    full.col(col) = apply(layout, e);
    e[col] = 0.0;
  }
  return full;
}

// ---------------------------------------------------------------------------
// ResourceOperator
// ---------------------------------------------------------------------------

ResourceOperator ResourceOperator::total_particles(const NetworkLayout& layout) {
  RVec d(layout.dim());
  std::vector<Index> idx;
  for (Index i = 0; i < layout.dim(); ++i) {
    layout.decompose(i, idx);
    double total = 0.0;
    for (int s = 0; s < layout.num_sensors(); ++s)
      total += layout.sensor(s).sector_of(idx[size_t(s)]);
    d[i] = total;
  }
  return ResourceOperator{std::move(d)};
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

NetworkOperator embed_local(const NetworkLayout& layout, int sensor_index,
                            const GeneratorSpec& op) {
  if (sensor_index < 0 || sensor_index >= layout.num_sensors())
    throw SchemaError("sensor index outside the layout");
  const SensorSpace& space = layout.sensor(sensor_index);
  if (!op.is_linear()) {
    if (op.dense_matrix().rows() != space.dim())
      throw SchemaError("operator dimension does not match the sensor");
    return NetworkOperator::local_dense(sensor_index, op.dense_matrix());
  }
  const RVec local = op.diagonal_on(space);
  RVec d(layout.dim());
  const Index stride = layout.stride(sensor_index);
  const Index D = space.dim();
  const Index block = D * stride;
  for (Index base = 0; base < layout.dim(); base += block)
    for (Index j = 0; j < D; ++j)
      d.segment(base + j * stride, stride).setConstant(local[j]);
  return NetworkOperator::diagonal(d);
}

namespace {

/// Sensors that carry at least one dense-generator parameter.
std::vector<bool> dense_sensor_mask(const NetworkLayout& layout) {
  std::vector<bool> mask(size_t(layout.num_sensors()), false);
  for (int k = 0; k < layout.num_params(); ++k)
    if (!layout.param_generator(k).is_linear())
      mask[size_t(layout.param_sensor(k))] = true;
  return mask;
}

/// Local Hamiltonian of one sensor: sum over its parameters of phi_k * h_k.
Mat local_hamiltonian(const NetworkLayout& layout, int sensor, const RVec& phi) {
  const Index D = layout.sensor(sensor).dim();
  Mat h = Mat::Zero(D, D);
  for (int k : layout.params_on_sensor(sensor)) {
    const GeneratorSpec& g = layout.param_generator(k);
    if (g.is_linear())
      h += phi[k] * g.diagonal_on(layout.sensor(sensor)).cast<cdouble>().asDiagonal().toDenseMatrix();
    else
      h += phi[k] * g.dense_matrix();
  }
  return h;
}

}  // namespace

Vec evolve_vector(const NetworkLayout& layout, const RVec& phi, const Vec& x) {
  if (phi.size() != layout.num_params())
    throw SchemaError("phi length does not match the parameter count");
  if (x.size() != layout.dim()) throw SchemaError("vector does not match the network dimension");
  const std::vector<bool> dense = dense_sensor_mask(layout);

  // All linear parameters on purely-linear sensors collapse into one global
  // diagonal phase.
  RVec diag = RVec::Zero(layout.dim());
  bool any_linear = false;
  for (int k = 0; k < layout.num_params(); ++k) {
    if (dense[size_t(layout.param_sensor(k))]) continue;
    if (phi[k] == 0.0) continue;
    diag += phi[k] * embed_local(layout, layout.param_sensor(k), layout.param_generator(k)).diag();
    any_linear = true;
  }
  Vec amp = x;
  if (any_linear) {
    for (Index i = 0; i < amp.size(); ++i)
      amp[i] *= std::exp(cdouble(0.0, -diag[i]));
  }

  // Dense sensors evolve by a local matrix exponential.
  for (int s = 0; s < layout.num_sensors(); ++s) {
    if (!dense[size_t(s)]) continue;
    const Mat h = local_hamiltonian(layout, s, phi);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigendecomposition failed for a local Hamiltonian");
    Vec phase(es.eigenvalues().size());
    for (Index j = 0; j < phase.size(); ++j)
      phase[j] = std::exp(cdouble(0.0, -es.eigenvalues()[j]));
    const Mat u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    amp = NetworkOperator::local_dense(s, u).apply(layout, amp);
  }
  return amp;
}

NetworkState evolve(const NetworkState& state, const RVec& phi) {
  return NetworkState(state.layout(), evolve_vector(state.layout(), phi, state.amplitudes()));
}

NetworkOperator generator_at(const NetworkLayout& layout, int k, const RVec& phi) {
  if (k < 0 || k >= layout.num_params()) throw SchemaError("parameter index out of range");
  if (phi.size() != layout.num_params())
    throw SchemaError("phi length does not match the parameter count");
  const int sensor = layout.param_sensor(k);
  const std::vector<bool> dense = dense_sensor_mask(layout);
  if (!dense[size_t(sensor)])
    return embed_local(layout, sensor, layout.param_generator(k));

  // G_k = -i (dU^dag/dphi_k) U on the sensor, evaluated exactly in the
  // eigenbasis of the local Hamiltonian: with U^dag = exp(+i h) and
  // E[x, y] = (e^{ix} - e^{iy})/(x - y) (E[x, x] = i e^{ix}), the derivative
  // has entries (h_k)_{ab} E[lam_a, lam_b], and the trailing U contributes
  // the column phases e^{-i lam_b}.
  const Mat h = local_hamiltonian(layout, sensor, phi);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed for a local Hamiltonian");
  const RVec lam = es.eigenvalues();
  const Mat& v = es.eigenvectors();

  const GeneratorSpec& gk = layout.param_generator(k);
  Mat hk;
  if (gk.is_linear())
    hk = gk.diagonal_on(layout.sensor(sensor)).cast<cdouble>().asDiagonal();
  else
    hk = gk.dense_matrix();
  const Mat hk_eig = v.adjoint() * hk * v;

  const Index D = lam.size();
  Mat g(D, D);
  for (Index a = 0; a < D; ++a) {
    for (Index b = 0; b < D; ++b) {
      const double dl = lam[a] - lam[b];
      cdouble divided;
      if (std::abs(dl) < 1e-12) {
        divided = cdouble(0.0, 1.0) * std::exp(cdouble(0.0, lam[a]));
      } else {
        divided = (std::exp(cdouble(0.0, lam[a])) - std::exp(cdouble(0.0, lam[b]))) / dl;
      }
      g(a, b) = cdouble(0.0, -1.0) * hk_eig(a, b) * divided * std::exp(cdouble(0.0, -lam[b]));
    }
  }
  Mat local = v * g * v.adjoint();
  local = 0.5 * (local + local.adjoint()).eval();  // clean up rounding
  return NetworkOperator::local_dense(sensor, std::move(local));
}

double resource_expectation(const NetworkState& state) {
  const ResourceOperator r = ResourceOperator::total_particles(state.layout());
  double total = 0.0;
  for (Index i = 0; i < state.amplitudes().size(); ++i)
    total += std::norm(state.amplitudes()[i]) * r.diag[i];
  return total;
}

int max_particles_in_support(const NetworkState& state, double tol) {
  const ResourceOperator r = ResourceOperator::total_particles(state.layout());
  int best = 0;
  for (Index i = 0; i < state.amplitudes().size(); ++i)
    if (std::abs(state.amplitudes()[i]) > tol)
      best = std::max(best, int(std::lround(r.diag[i])));
  return best;
}

RVec sensor_marginal(const NetworkState& state, int sensor) {
  const NetworkLayout& layout = state.layout();
  if (sensor < 0 || sensor >= layout.num_sensors())
    throw SchemaError("sensor index outside the layout");
  RVec p = RVec::Zero(layout.sensor(sensor).dim());
  const Index stride = layout.stride(sensor);
  const Index D = layout.sensor(sensor).dim();
  const Index block = D * stride;
  for (Index base = 0; base < layout.dim(); base += block)
    for (Index j = 0; j < D; ++j)
      for (Index inner = 0; inner < stride; ++inner)
        p[j] += std::norm(state.amplitudes()[base + j * stride + inner]);
  return p;
}

}  // namespace qsn
