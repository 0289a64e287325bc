#include "qsn/bounds.hpp"

#include <cmath>

#include "qsn/fisher.hpp"

namespace qsn {

namespace {

void require_mu(long mu) {
  if (mu < 1) throw SchemaError("number of repetitions must be a positive integer");
}

double spread_squared(double lam_max, double lam_min) {
  const double dlam = lam_max - lam_min;
  if (dlam == 0.0) throw SchemaError("generator spread is zero; no phase sensitivity");
  return dlam * dlam;
}

void require_unit_direction(const RVec& v) {
  if (v.size() == 0) throw SchemaError("empty function vector");
  if (v.minCoeff() < 0.0) throw SchemaError("function weights must be nonnegative");
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw SchemaError("function vector must have unit 2-norm");
}

}  // namespace

double ghz_sum(int d, int n, double lam_max, double lam_min, long mu) {
  require_mu(mu);
  if (d < 1) throw SchemaError("sensor count must be positive");
  if (n < 1) throw SchemaError("per-sensor particle count must be positive");
  const double n_max = double(n) * double(d);
  return double(d) / (double(mu) * n_max * n_max * spread_squared(lam_max, lam_min));
}

double local_sum(int d, double n_max, double lam_max, double lam_min, long mu) {
  require_mu(mu);
  if (d < 1) throw SchemaError("sensor count must be positive");
  if (!(n_max > 0.0)) throw SchemaError("total particle budget must be positive");
  return double(d) * double(d) /
         (double(mu) * n_max * n_max * spread_squared(lam_max, lam_min));
}

double weighted_ghz_bound(const RVec& v, double n_max, double lam_max, double lam_min, long mu) {
  require_mu(mu);
  require_unit_direction(v);
  if (!(n_max > 0.0)) throw SchemaError("total particle budget must be positive");
  const double one_norm = v.lpNorm<1>();
  for (Index k = 0; k < v.size(); ++k) {
    const double split = n_max * v[k] / one_norm;
    if (std::abs(split - std::round(split)) > 1e-9)
      throw SchemaError("particle split Nmax*v_k/|v|_1 must be integral for every sensor");
  }
  return one_norm * one_norm /
         (double(mu) * n_max * n_max * spread_squared(lam_max, lam_min));
}

double local_weighted(const RVec& v, const RVec& x, double n_max, double lam_max, double lam_min,
                      long mu) {
  require_mu(mu);
  if (v.size() == 0 || v.size() != x.size())
    throw SchemaError("function and allocation vectors must have equal nonzero length");
  if (!(n_max > 0.0)) throw SchemaError("total particle budget must be positive");
  double sum = 0.0;
  for (Index k = 0; k < v.size(); ++k) {
    if (v[k] == 0.0) continue;
    if (x[k] == 0.0)
      throw SchemaError("allocation is zero on a sensor with nonzero function weight");
    sum += (v[k] / x[k]) * (v[k] / x[k]);
  }
  const double one_norm = x.lpNorm<1>();
  return one_norm * one_norm * sum /
         (double(mu) * n_max * n_max * spread_squared(lam_max, lam_min));
}

RVec local_optimal_allocation(const RVec& v) {
  if (v.size() == 0) throw SchemaError("empty function vector");
  if (v.minCoeff() < 0.0) throw SchemaError("function weights must be nonnegative");
  RVec x(v.size());
  for (Index k = 0; k < v.size(); ++k) x[k] = std::cbrt(v[k] * v[k]);
  const double total = x.sum();
  if (total <= 0.0) throw SchemaError("function vector is zero");
  return x / total;
}

double local_optimal(const RVec& v, double n_max, double lam_max, double lam_min, long mu) {
  require_mu(mu);
  require_unit_direction(v);
  if (!(n_max > 0.0)) throw SchemaError("total particle budget must be positive");
  double sum = 0.0;
  for (Index k = 0; k < v.size(); ++k) sum += std::cbrt(v[k] * v[k]);
  return sum * sum * sum /
         (double(mu) * n_max * n_max * spread_squared(lam_max, lam_min));
}

double gns_bound(int d, double n_max, double lam_max, double lam_min, long mu) {
  require_mu(mu);
  if (d < 1) throw SchemaError("sensor count must be positive");
  if (!(n_max > 0.0)) throw SchemaError("total particle budget must be positive");
  const double lam2 = std::max(lam_max * lam_max, lam_min * lam_min);
  if (lam2 == 0.0) throw SchemaError("generator eigenvalues are all zero");
  return double(d + 1) / (double(mu) * n_max * n_max * lam2);
}

double noon_individual(int d_prime, long n_total, long mu) {
  require_mu(mu);
  if (d_prime < 1) throw SchemaError("sensor count must be positive");
  if (n_total < 1) throw SchemaError("total particle budget must be positive");
  if (n_total % d_prime != 0)
    throw SchemaError("total particle budget must split evenly across the experiments");
  return double(d_prime) * double(d_prime) / (double(mu) * double(n_total) * double(n_total));
}

double imaging_symmetric(double v, double j, int d_prime, long mu) {
  require_mu(mu);
  const SymmetricQfimInverse closed = symmetric_qfim_inverse(v, j * v, d_prime);
  return closed.g / (4.0 * double(mu) * v);
}

double imaging_unknown_reference(double v, double v_ref, double j, double j_ref, int d_prime,
                                 long mu) {
  require_mu(mu);
  if (d_prime < 1) throw SchemaError("signal sensor count must be positive");
  if (!(v > 0.0) || !(v_ref > 0.0)) throw SchemaError("variances must be positive");
  const auto delta = [j](double a, double b) { return 1.0 + j * (b - 1.0) - a * a * b; };
  const double alpha = delta(j_ref, double(d_prime));
  if (std::abs(alpha) <= 1e-12)
    throw EstimationError("reference-normalization factor vanishes; bound undefined");
  if (std::abs(1.0 - j) <= 1e-12)
    throw EstimationError("signal correlation saturates; bound undefined");
  const double beta = delta(j_ref, double(d_prime) - 1.0) / (1.0 - j);
  const double gamma_ = delta(0.0, double(d_prime));
  return (beta / (2.0 * v) + j_ref / std::sqrt(v * v_ref) + gamma_ / (2.0 * v_ref)) /
         (double(mu) * alpha);
}

double two_qubit_nonorthogonal(double alpha, double beta, double x, long mu) {
  require_mu(mu);
  if (std::abs(std::cos(alpha + beta)) <= 1e-9)
    throw SchemaError("degenerate angles: the two functions coincide");
  if (!(std::abs(x) < 1.0)) throw SchemaError("probe index x must lie strictly inside (-1, 1)");
  const double g = std::sin(2.0 * alpha) + std::sin(2.0 * beta);
  return (2.0 - g * x) / (double(mu) * (1.0 - x * x));
}

double two_qubit_x_min(double alpha, double beta) {
  if (std::abs(std::cos(alpha + beta)) <= 1e-9)
    throw SchemaError("degenerate angles: the two functions coincide");
  const double g = std::sin(2.0 * alpha) + std::sin(2.0 * beta);
  if (std::abs(g) < 1e-12) return 0.0;
  return (2.0 - std::sqrt(4.0 - g * g)) / g;
}

double propagate_variance(const RVec& coeffs, const RVec& variances) {
  if (coeffs.size() != variances.size())
    throw SchemaError("coefficient and variance vectors must have equal length");
  double total = 0.0;
  for (Index k = 0; k < coeffs.size(); ++k) total += coeffs[k] * coeffs[k] * variances[k];
  return total;
}

}  // namespace qsn
