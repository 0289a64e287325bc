#include "qsn/search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "qsn/bounds.hpp"
#include "qsn/rng.hpp"

namespace qsn {

namespace {

// Number of compositions of r into b nonnegative parts, computed in logs so
// oversize grids are detected before any allocation.
double composition_count(long r, long b) {
  return std::exp(std::lgamma(double(r + b)) - std::lgamma(double(r + 1)) -
                  std::lgamma(double(b)));
}

long grid_resolution(double step) {
  if (!(step > 0.0)) throw SchemaError("grid step must be positive");
  const long r = std::lround(1.0 / step);
  if (r < 1 || std::abs(r * step - 1.0) > 1e-9)
    throw SchemaError("1/step must be an integer for an exhaustive amplitude grid");
  return r;
}

// Visits every composition of `total` into `parts` nonnegative integers in a
// fixed order (mass drains from low indices to high), so candidate indices
// are deterministic.
void for_each_composition(long total, int parts, std::vector<long>& m, int pos,
                          const std::function<void(const std::vector<long>&)>& visit) {
  if (pos == parts - 1) {
    m[size_t(pos)] = total;
    visit(m);
    return;
  }
  for (long take = total; take >= 0; --take) {
    m[size_t(pos)] = take;
    for_each_composition(total - take, parts, m, pos + 1, visit);
  }
}

// Eigenvalue table of the parameter generators restricted to the subspace
// basis: row k holds the diagonal of H_k at each basis state.
RMat lambda_table(const SubspaceSpec& sub) {
  const NetworkLayout& layout = sub.layout();
  if (!layout.all_params_linear())
    throw SchemaError("subspace searches require diagonal (linear-spectrum) generators");
  const auto& basis = sub.basis();
  RMat table(layout.num_params(), Index(basis.size()));
  std::vector<Index> parts(size_t(layout.num_sensors()));
  std::vector<RVec> diags;
  diags.reserve(size_t(layout.num_params()));
  for (int k = 0; k < layout.num_params(); ++k)
    diags.push_back(layout.param_generator(k).diagonal_on(layout.sensor(layout.param_sensor(k))));
  for (size_t b = 0; b < basis.size(); ++b) {
    layout.decompose(basis[b], parts);
    for (int k = 0; k < layout.num_params(); ++k)
      table(k, Index(b)) = diags[size_t(k)][parts[size_t(layout.param_sensor(k))]];
  }
  return table;
}

}  // namespace

// ---------------------------------------------------------------------------
// SubspaceSpec
// ---------------------------------------------------------------------------

SubspaceSpec::SubspaceSpec(NetworkLayout layout, std::vector<Index> basis)
    : layout_(std::move(layout)), basis_(std::move(basis)) {
  if (basis_.empty()) throw SchemaError("subspace contains no basis states");
  std::vector<Index> parts(size_t(layout_.num_sensors()));
  for (Index idx : basis_) {
    layout_.decompose(idx, parts);
    int total = 0;
    for (int s = 0; s < layout_.num_sensors(); ++s)
      total += layout_.sensor(s).sector_of(parts[size_t(s)]);
    max_total_ = std::max(max_total_, total);
  }
}

SubspaceSpec SubspaceSpec::total_at_most(NetworkLayout layout, int n_max) {
  if (n_max < 0) throw SchemaError("particle cap must be nonnegative");
  std::vector<Index> basis;
  std::vector<Index> parts(size_t(layout.num_sensors()));
  for (Index idx = 0; idx < layout.dim(); ++idx) {
    layout.decompose(idx, parts);
    long total = 0;
    for (int s = 0; s < layout.num_sensors(); ++s)
      total += layout.sensor(s).sector_of(parts[size_t(s)]);
    if (total <= n_max) basis.push_back(idx);
  }
  return SubspaceSpec(std::move(layout), std::move(basis));
}

SubspaceSpec SubspaceSpec::per_sensor_at_most(NetworkLayout layout, int n_max) {
  if (n_max < 0) throw SchemaError("particle cap must be nonnegative");
  std::vector<Index> basis;
  std::vector<Index> parts(size_t(layout.num_sensors()));
  for (Index idx = 0; idx < layout.dim(); ++idx) {
    layout.decompose(idx, parts);
    bool ok = true;
    for (int s = 0; ok && s < layout.num_sensors(); ++s)
      ok = layout.sensor(s).sector_of(parts[size_t(s)]) <= n_max;
    if (ok) basis.push_back(idx);
  }
  return SubspaceSpec(std::move(layout), std::move(basis));
}

SubspaceSpec SubspaceSpec::fixed_per_sensor(NetworkLayout layout, std::vector<int> per_sensor) {
  if (int(per_sensor.size()) != layout.num_sensors())
    throw SchemaError("fixed particle counts must list one entry per sensor");
  for (int n : per_sensor)
    if (n < 0) throw SchemaError("particle counts must be nonnegative");
  std::vector<Index> basis;
  std::vector<Index> parts(size_t(layout.num_sensors()));
  for (Index idx = 0; idx < layout.dim(); ++idx) {
    layout.decompose(idx, parts);
    bool ok = true;
    for (int s = 0; ok && s < layout.num_sensors(); ++s)
      ok = layout.sensor(s).sector_of(parts[size_t(s)]) == per_sensor[size_t(s)];
    if (ok) basis.push_back(idx);
  }
  return SubspaceSpec(std::move(layout), std::move(basis));
}

// ---------------------------------------------------------------------------
// max_variance
// ---------------------------------------------------------------------------

SearchResult max_variance(const SubspaceSpec& subspace, const RVec& v) {
  const NetworkLayout& layout = subspace.layout();
  if (v.size() != layout.num_params())
    throw SchemaError("direction vector must have one entry per parameter");
  if ((v.array() < 0.0).any() || !(v.cwiseAbs().sum() > 0.0))
    throw SchemaError("direction vector must be nonnegative and nonzero");

  const RMat table = lambda_table(subspace);
  const RVec energy = table.transpose() * v;

  Index imax = 0, imin = 0;
  for (Index i = 1; i < energy.size(); ++i) {
    if (energy[i] > energy[imax]) imax = i;
    if (energy[i] < energy[imin]) imin = i;
  }
  const double spread = energy[imax] - energy[imin];
  const double best = 0.25 * spread * spread;

  Vec amp = Vec::Zero(layout.dim());
  if (imax == imin) {
    amp[subspace.basis()[size_t(imax)]] = 1.0;
  } else {
    const double r = 1.0 / std::sqrt(2.0);
    amp[subspace.basis()[size_t(imax)]] = r;
    amp[subspace.basis()[size_t(imin)]] = r;
  }

  double lam_hi = -std::numeric_limits<double>::infinity();
  double lam_lo = std::numeric_limits<double>::infinity();
  for (int k = 0; k < layout.num_params(); ++k) {
    lam_hi = std::max(lam_hi, layout.param_generator(k).lambda_max());
    lam_lo = std::min(lam_lo, layout.param_generator(k).lambda_min());
  }
  const double vmax = v.maxCoeff();
  const double nmax = double(subspace.max_total_particles());
  const double dlam = lam_hi - lam_lo;
  const double certificate = 0.25 * vmax * vmax * nmax * nmax * dlam * dlam;
  if (best > certificate + 1e-12)
    throw EstimationError("scanned variance exceeded its analytic envelope");

  SearchResult result{best,
                      NetworkState(layout, std::move(amp)),
                      long(subspace.basis().size()),
                      0,
                      certificate,
                      std::nullopt,
                      false};
  return result;
}

// ---------------------------------------------------------------------------
// min_crb_search
// ---------------------------------------------------------------------------

SearchResult min_crb_search(const SubspaceSpec& subspace, const SearchObjective& objective,
                            const SearchSampler& sampler, std::optional<double> reference) {
  const NetworkLayout& layout = subspace.layout();
  const auto& basis = subspace.basis();
  const Index nb = Index(basis.size());
  if (nb > 4096) throw CapacityError("subspace dimension exceeds the search cap of 4096");

  const RMat table = lambda_table(subspace);
  const int d = layout.num_params();

  // Objective setup. For a single function the information matrix is rotated
  // so the function of interest becomes the first coordinate and the rest are
  // nuisance parameters.
  RMat rot;
  Weighting weights = Weighting::uniform(d);
  bool rotate = false;
  if (const auto* est = std::get_if<EstimatePhi>(&objective)) {
    weights = est->weighting;
    if (weights.dim() != d)
      throw SchemaError("weighting dimension must match the parameter count");
  } else {
    const auto& fn = std::get<SingleFunction>(objective);
    if (fn.v.size() != d) throw SchemaError("function vector must have one entry per parameter");
    rot = orthonormal_from_first_row(fn.v);
    rotate = true;
    weights = Weighting::single(d, 0);
  }

  // Evaluates the reduced weighted bound for occupation probabilities p over
  // the subspace basis; empty when the task is singular for this candidate.
  auto evaluate = [&](const RVec& p) -> std::optional<double> {
    const RVec means = table * p;
    RMat second = table * p.asDiagonal() * table.transpose();
    RMat fim = 4.0 * (second - means * means.transpose());
    if (rotate) fim = rot * fim * rot.transpose();
    Qfim q(fim);
    ReducedProblem red = reduce(q, weights);
    if (red.estimation_failure || !red.reduced_qfim.invertible()) return std::nullopt;
    try {
      return weighted_crb(red, 1);
    } catch (const EstimationError&) {
      return std::nullopt;
    }
  };

  double best = std::numeric_limits<double>::infinity();
  Vec best_amp;
  long evaluations = 0;
  std::uint64_t seed = 0;

  if (const auto* grid = std::get_if<ExhaustiveRealGrid>(&sampler)) {
    const long r = grid_resolution(grid->step);
    if (composition_count(r, nb) > 5e6)
      throw CapacityError("amplitude grid enumerates more than 5e6 candidates");
    std::vector<long> m(size_t(nb), 0);
    RVec p(nb);
    for_each_composition(r, int(nb), m, 0, [&](const std::vector<long>& occ) {
      for (Index i = 0; i < nb; ++i) p[i] = double(occ[size_t(i)]) / double(r);
      ++evaluations;
      if (auto value = evaluate(p); value && *value < best) {
        best = *value;
        best_amp = p.cwiseSqrt();
      }
    });
  } else {
    const auto& haar = std::get<RandomHaar>(sampler);
    if (haar.count < 1) throw SchemaError("sample count must be positive");
    seed = haar.seed;
    RVec p(nb);
    Vec c(nb);
    for (long t = 0; t < haar.count; ++t) {
      CounterRng rng(seed, std::uint64_t(t));
      for (Index i = 0; i < nb; ++i)
        c[i] = cdouble(rng.normal(std::uint64_t(2 * i)), rng.normal(std::uint64_t(2 * i + 1)));
      const double norm = c.norm();
      ++evaluations;
      if (norm < 1e-150) continue;
      c /= norm;
      p = c.cwiseAbs2();
      if (auto value = evaluate(p); value && *value < best) {
        best = *value;
        best_amp = c;
      }
    }
  }

  if (!std::isfinite(best))
    throw EstimationError("every sampled state was singular for the requested task");

  Vec amp = Vec::Zero(layout.dim());
  for (Index i = 0; i < nb; ++i) amp[basis[size_t(i)]] = best_amp[i];

  SearchResult result{best,
                      NetworkState(layout, std::move(amp)),
                      evaluations,
                      seed,
                      std::nullopt,
                      reference,
                      reference.has_value() && best < *reference - 1e-6};
  return result;
}

// ---------------------------------------------------------------------------
// allocation_search
// ---------------------------------------------------------------------------

RVec allocation_search(const RVec& v, double n_max, double step) {
  if (v.size() < 1) throw SchemaError("allocation needs at least one sensor weight");
  if ((v.array() < 0.0).any() || !(v.cwiseAbs().sum() > 0.0))
    throw SchemaError("sensor weights must be nonnegative and not all zero");
  if (!(n_max > 0.0)) throw SchemaError("particle budget must be positive");
  if (step > 1e-2 + 1e-15) throw SchemaError("allocation grid step must be at most 1e-2");
  const long r = grid_resolution(step);
  const int d = int(v.size());
  if (composition_count(r, d) > 2e7)
    throw CapacityError("allocation grid enumerates more than 2e7 candidates");

  double best = std::numeric_limits<double>::infinity();
  std::vector<long> best_m;
  std::vector<long> m(size_t(d), 0);
  for_each_composition(r, d, m, 0, [&](const std::vector<long>& occ) {
    double obj = 0.0;
    for (int k = 0; k < d; ++k) {
      if (v[k] == 0.0) continue;
      if (occ[size_t(k)] == 0) return;  // zero allocation on a weighted sensor
      const double x = double(occ[size_t(k)]) / double(r);
      obj += (v[k] / x) * (v[k] / x);
    }
    if (obj < best) {
      best = obj;
      best_m = occ;
    }
  });
  if (best_m.empty()) throw EstimationError("no grid allocation covers all weighted sensors");

  RVec x(d);
  for (int k = 0; k < d; ++k) x[k] = double(best_m[size_t(k)]) / double(r);

  // The objective is strictly convex on the support, so the grid winner must
  // sit next to the closed-form allocation x_k ~ v_k^(2/3).
  const RVec target = local_optimal_allocation(v);
  if ((x - target).cwiseAbs().maxCoeff() > step + 1e-12)
    throw EstimationError("grid allocation strayed from the closed-form optimum");
  return x;
}

// ---------------------------------------------------------------------------
// nonorthogonal_scan
// ---------------------------------------------------------------------------

std::pair<double, double> nonorthogonal_scan(double alpha, double beta, double step) {
  if (!(step > 0.0) || !(step < 1.0)) throw SchemaError("scan step must lie in (0, 1)");
  const long n = std::lround(2.0 / step);
  double best_x = 0.0;
  double best_e = std::numeric_limits<double>::infinity();
  for (long k = 1; k < n; ++k) {
    const double x = -1.0 + double(k) * step;
    if (x <= -1.0 || x >= 1.0) continue;
    const double e = two_qubit_nonorthogonal(alpha, beta, x, 1);
    if (e < best_e) {
      best_e = e;
      best_x = x;
    }
  }
  if (!std::isfinite(best_e)) throw EstimationError("scan grid is empty");
  return {best_x, best_e};
}

}  // namespace qsn
