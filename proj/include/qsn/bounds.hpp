#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qsn/types.hpp"

namespace qsn {

/// One evaluated closed-form bound, ready for report emission. `formula` is
/// the algebraic expression the value was computed from, and `inputs` echoes
/// every argument in a fixed order.
struct BoundReport {
  std::string name;
  double value = 0.0;
  std::string formula;
  std::vector<std::pair<std::string, double>> inputs;
};

/// All bounds below are variance (or summed-variance) lower bounds after mu
/// independent repetitions, for normalized function vectors (unit 2-norm
/// where a direction v enters). For an unnormalized function c*theta, rescale
/// with propagate_variance({c}, {value}) = c^2 * value.

/// Network-wide sum estimated with the two-branch entangled probe:
/// d/(mu * Nmax^2 * dlam^2) with Nmax = n*d particles in total.
double ghz_sum(int d, int n, double lam_max, double lam_min, long mu);

/// Same sum with the best separable probe: d^2/(mu * Nmax^2 * dlam^2).
/// Exactly d times ghz_sum at equal Nmax.
double local_sum(int d, double n_max, double lam_max, double lam_min, long mu);

/// Weighted-function bound for the per-sensor-weighted entangled probe:
/// |v|_1^2/(mu * Nmax^2 * dlam^2). Requires the particle split
/// Nmax*v_k/|v|_1 to be integral for every k.
double weighted_ghz_bound(const RVec& v, double n_max, double lam_max, double lam_min, long mu);

/// Weighted-function bound for a separable probe with particle allocation
/// fractions x: |x|_1^2 * sum_k (v_k/x_k)^2 / (mu * Nmax^2 * dlam^2), the sum
/// running over the sensors with v_k != 0.
double local_weighted(const RVec& v, const RVec& x, double n_max, double lam_max, double lam_min,
                      long mu);

/// local_weighted at its optimal allocation x_k proportional to v_k^(2/3):
/// (sum_k v_k^(2/3))^3 / (mu * Nmax^2 * dlam^2).
double local_optimal(const RVec& v, double n_max, double lam_max, double lam_min, long mu);

/// The allocation minimizing local_weighted: x_k = v_k^(2/3), normalized to
/// sum to one.
RVec local_optimal_allocation(const RVec& v);

/// Single-function bound for the generalized NOON probe over d signal sensors
/// plus a reference: (d+1)/(mu * Nmax^2 * max(lam_max^2, lam_min^2)).
double gns_bound(int d, double n_max, double lam_max, double lam_min, long mu);

/// Total uncertainty for d_prime independent two-mode NOON experiments
/// sharing N_total particles: d_prime^2/(mu * N_total^2). N_total must split
/// evenly across the experiments.
double noon_individual(int d_prime, long n_total, long mu);

/// Average-variance bound for a mode-symmetric probe with single-sensor
/// generator variance v and correlation J: g(J, d_prime)/(4 mu v).
double imaging_symmetric(double v, double j, int d_prime, long mu);

/// Average-variance bound for d_prime signal sensors referenced against an
/// unknown phase, from the displayed symmetric covariance pattern with
/// signal variance v / correlation j and reference variance v_ref /
/// cross-correlation j_ref. delta(a, b) = 1 + j(b-1) - a^2 b;
/// value = (beta/(2v) + j_ref/sqrt(v v_ref) + gamma_/(2 v_ref)) / (mu alpha)
/// with alpha = delta(j_ref, d'), beta = delta(j_ref, d'-1)/(1-j),
/// gamma_ = delta(0, d').
double imaging_unknown_reference(double v, double v_ref, double j, double j_ref, int d_prime,
                                 long mu);

/// Summed variance of the two natural non-orthogonal functions
/// theta_1 = cos(a) phi_1 + sin(a) phi_2, theta_2 = sin(b) phi_1 + cos(b) phi_2
/// over the one-parameter two-qubit probe family indexed by x in (-1, 1):
/// E(x) = (2 - g x)/(mu (1 - x^2)) with g = sin(2a) + sin(2b).
double two_qubit_nonorthogonal(double alpha, double beta, double x, long mu);

/// Minimizer of two_qubit_nonorthogonal over x: (2 - sqrt(4 - g^2))/g, and 0
/// in the g -> 0 limit.
double two_qubit_x_min(double alpha, double beta);

/// Plain propagation of uncertainty: Var(sum_k c_k X_k) = sum_k c_k^2 Var_k
/// for uncorrelated X_k.
double propagate_variance(const RVec& coeffs, const RVec& variances);

}  // namespace qsn
