#include "qsn/probes.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace qsn {

namespace {

/// The one linear generator shared by every parameter of the layout; the
/// probe catalog resolves per-sensor extremal eigenstates through it.
const GeneratorSpec& shared_linear_generator(const NetworkLayout& layout) {
  if (layout.num_params() == 0)
    throw SchemaError("probe construction needs at least one parameter generator");
  const GeneratorSpec& g = layout.param_generator(0);
  if (!g.is_linear())
    throw SchemaError("probe catalog requires linear-spectrum generators");
  for (int k = 1; k < layout.num_params(); ++k) {
    if (!(layout.param_generator(k) == g))
      throw SchemaError("probe catalog requires one generator shared by all parameters");
  }
  return g;
}

/// Kronecker product of per-sensor vectors in row-major sensor order.
Vec tensor_product(const NetworkLayout& layout, const std::vector<Vec>& factors) {
  Vec amp = Vec::Ones(1);
  for (int s = 0; s < layout.num_sensors(); ++s) {
    Vec next(amp.size() * factors[size_t(s)].size());
    Index pos = 0;
    for (Index i = 0; i < amp.size(); ++i)
      for (Index j = 0; j < factors[size_t(s)].size(); ++j) next[pos++] = amp[i] * factors[size_t(s)][j];
    amp = std::move(next);
  }
  return amp;
}

/// Extremal-state basis indices (min, max) per sensor for per-sensor particle
/// budgets w.
std::vector<std::pair<Index, Index>> extremal_indices(const NetworkLayout& layout,
                                                      const GeneratorSpec& g,
                                                      const std::vector<int>& w) {
  if (int(w.size()) != layout.num_sensors())
    throw SchemaError("one particle budget per sensor expected");
  std::vector<std::pair<Index, Index>> out;
  out.reserve(w.size());
  for (int s = 0; s < layout.num_sensors(); ++s) {
    if (w[size_t(s)] < 0) throw SchemaError("negative particle budget");
    const SensorSpace& space = layout.sensor(s);
    out.emplace_back(g.extremal_state_upto(space, w[size_t(s)], false),
                     g.extremal_state_upto(space, w[size_t(s)], true));
  }
  return out;
}

}  // namespace

NetworkState weighted_ghz(const NetworkLayout& layout, const std::vector<int>& weights) {
  const GeneratorSpec& g = shared_linear_generator(layout);
  const auto extremes = extremal_indices(layout, g, weights);
  std::vector<Index> lo, hi;
  for (const auto& [mn, mx] : extremes) {
    lo.push_back(mn);
    hi.push_back(mx);
  }
  Vec amp = Vec::Zero(layout.dim());
  amp[layout.compose(hi)] += 1.0;
  amp[layout.compose(lo)] += 1.0;
  amp.normalize();
  return NetworkState(layout, std::move(amp));
}

NetworkState ghz(const NetworkLayout& layout, int n_per_sensor) {
  return weighted_ghz(layout, std::vector<int>(size_t(layout.num_sensors()), n_per_sensor));
}

NetworkState local_superposition(const NetworkLayout& layout, const std::vector<int>& weights) {
  const GeneratorSpec& g = shared_linear_generator(layout);
  const auto extremes = extremal_indices(layout, g, weights);
  std::vector<Vec> factors;
  for (int s = 0; s < layout.num_sensors(); ++s) {
    Vec f = Vec::Zero(layout.sensor(s).dim());
    f[extremes[size_t(s)].second] += 1.0;
    f[extremes[size_t(s)].first] += 1.0;
    f.normalize();
    factors.push_back(std::move(f));
  }
  return NetworkState(layout, tensor_product(layout, factors));
}

NetworkState gns(const NetworkLayout& layout, int n_particles, double gamma) {
  if (layout.num_sensors() < 2) throw SchemaError("a generalized NOON state needs at least two sensors");
  if (n_particles < 1) throw SchemaError("a generalized NOON state needs at least one particle");
  if (gamma < 0.0) throw SchemaError("balancing factor must be nonnegative");
  const GeneratorSpec& g = shared_linear_generator(layout);

  const int S = layout.num_sensors();
  std::vector<Index> occupied(static_cast<size_t>(S));
  for (int s = 0; s < S; ++s) {
    const SensorSpace& space = layout.sensor(s);
    if (space.sector_dim(0) != 1)
      throw SchemaError("every sensor needs a vacuum state for a generalized NOON state");
    // Scan the reachable spectrum for the eigenvalue of maximal modulus; the
    // maximal branch wins ties.
    double lam_max = 0.0, lam_min = 0.0;
    if (n_particles > space.n_max()) throw SchemaError("particle count exceeds sensor capacity");
    for (int m = 0; m <= n_particles; ++m)
      for (Index j = 0; j < space.sector_dim(m); ++j) {
        const double lam = g.sector_eigenvalue(space, m, j);
        lam_max = std::max(lam_max, lam);
        lam_min = std::min(lam_min, lam);
      }
    if (lam_max == 0.0 && lam_min == 0.0)
      throw SchemaError("generator has no nonzero eigenvalue within the particle budget");
    const bool maximal = std::abs(lam_max) >= std::abs(lam_min);
    occupied[size_t(s)] = g.extremal_state_upto(space, n_particles, maximal);
    if (occupied[size_t(s)] == 0)
      throw SchemaError("extremal state coincides with the vacuum; generalized NOON state undefined");
  }

  const double norm = 1.0 / std::sqrt(double(S - 1) + gamma * gamma);
  Vec amp = Vec::Zero(layout.dim());
  std::vector<Index> idx(size_t(S), 0);
  for (int k = 0; k < S; ++k) {
    std::fill(idx.begin(), idx.end(), Index(0));
    idx[size_t(k)] = occupied[size_t(k)];
    amp[layout.compose(idx)] += (k == S - 1 ? gamma : 1.0) * norm;
  }
  if (std::abs(amp.norm() - 1.0) > 1e-10)
    throw SchemaError("generalized NOON terms are not distinct basis states");
  return NetworkState(layout, std::move(amp));
}

NetworkState uns(const NetworkLayout& layout, int n_particles) {
  const int d = layout.num_sensors();
  if (d < 1) throw SchemaError("empty layout");
  if (n_particles < 1) throw SchemaError("unbalanced superposition needs at least one particle");
  std::vector<Vec> factors;
  for (int s = 0; s < d; ++s) {
    const SensorSpace& space = layout.sensor(s);
    if (n_particles > space.n_max()) throw SchemaError("particle count exceeds sensor capacity");
    if (space.sector_dim(0) != 1 || space.sector_dim(n_particles) != 1)
      throw SchemaError("unbalanced superposition needs one-dimensional vacuum and particle sectors");
    Vec f = Vec::Zero(space.dim());
    f[space.sector_offset(n_particles)] = 1.0 / std::sqrt(double(d));
    f[0] = std::sqrt(double(d - 1)) / std::sqrt(double(d));
    factors.push_back(std::move(f));
  }
  return NetworkState(layout, tensor_product(layout, factors));
}

NetworkState separable_surrogate(const NetworkState& state) {
  const NetworkLayout& layout = state.layout();
  std::vector<Vec> factors;
  for (int s = 0; s < layout.num_sensors(); ++s) {
    const auto params = layout.params_on_sensor(s);
    if (params.size() != 1)
      throw SchemaError("surrogate construction needs exactly one parameter per sensor");
    const GeneratorSpec& g = layout.param_generator(params[0]);
    if (!g.is_linear())
      throw SchemaError("surrogate construction needs linear-spectrum generators");

    const SensorSpace& space = layout.sensor(s);
    const RVec lam = g.diagonal_on(space);
    const RVec marg = sensor_marginal(state, s);

    // Group basis states by (particle number, eigenvalue); the first basis
    // state of each group receives the group's whole probability.
    std::map<std::pair<int, long long>, Index> representative;
    Vec f = Vec::Zero(space.dim());
    for (Index j = 0; j < space.dim(); ++j) {
      const auto key = std::make_pair(space.sector_of(j), std::llround(lam[j] * 1e12));
      auto [it, inserted] = representative.try_emplace(key, j);
      f[it->second] += marg[j];
    }
    for (Index j = 0; j < space.dim(); ++j) f[j] = std::sqrt(f[j].real());
    factors.push_back(std::move(f));
  }
  return NetworkState(layout, tensor_product(layout, factors));
}

}  // namespace qsn
