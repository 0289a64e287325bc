// Acceptance gate: twelve numbered end-to-end checks covering the probe
// catalog's closed-form bounds, the estimation pipeline, the matrix and
// measurement inequalities, the reduction procedure, and the randomized
// scans. Each criterion prints exactly one PASS/FAIL line; the process exits
// nonzero if any criterion fails.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsn/bounds.hpp"
#include "qsn/fisher.hpp"
#include "qsn/network.hpp"
#include "qsn/probes.hpp"
#include "qsn/rng.hpp"
#include "qsn/search.hpp"
#include "qsn/verify.hpp"

using namespace qsn;

namespace {

int g_failures = 0;

void criterion(int number, const char* label, const std::function<void()>& body) {
  try {
    body();
    std::printf("CRITERION %02d (%s): PASS\n", number, label);
  } catch (const std::exception& e) {
    ++g_failures;
    std::printf("CRITERION %02d (%s): FAIL (%s)\n", number, label, e.what());
  }
}

void req(bool ok, const std::string& why) {
  if (!ok) throw std::runtime_error(why);
}

void req_close(double got, double want, double tol, const std::string& what) {
  if (!(std::abs(got - want) <= tol))
    throw std::runtime_error(what + ": got " + std::to_string(got) + ", want " +
                             std::to_string(want) + " within " + std::to_string(tol));
}

NetworkLayout homogeneous_layout(int d_sensors, const SensorSpace& space,
                                 const GeneratorSpec& gen, int d_params) {
  std::vector<SensorSpace> spaces(size_t(d_sensors), space);
  std::vector<std::pair<int, GeneratorSpec>> params;
  for (int k = 0; k < d_params; ++k) params.emplace_back(k, gen);
  return NetworkLayout(std::move(spaces), std::move(params));
}

/// Bound on Var(v . phi) through the full pipeline, the orthogonal directions
/// kept as nuisance parameters.
double pipeline_single_function(const NetworkState& probe, const RVec& v, long mu) {
  const Qfim f = qfim_pure_commuting(probe);
  const Qfim ft = reparam(f, LinearReparam(orthonormal_from_first_row(v), true));
  const ReducedProblem red = reduce(ft, Weighting::single(ft.dim(), 0));
  return weighted_crb(red, mu);
}

/// Bound on the uniformly weighted average variance through the pipeline.
double pipeline_uniform(const NetworkState& probe, long mu) {
  const Qfim f = qfim_pure_commuting(probe);
  const ReducedProblem red = reduce(f, Weighting::uniform(f.dim()));
  return weighted_crb(red, mu);
}

/// Two-branch entangled probe vs the closed-form bound on the phase sum, over
/// spin and photon-number generators.
void criterion_ghz_sum() {
  for (const bool optical : {false, true}) {
    for (const int d : {2, 3, 4}) {
      for (const int n : {1, 2}) {
        for (const long mu : {1L, 3L}) {
          const SensorSpace space =
              optical ? SensorSpace::bosonic_mode(n) : SensorSpace::qubit_ensemble(n);
          const GeneratorSpec gen =
              optical ? GeneratorSpec::number_operator() : GeneratorSpec::spin_z();
          const NetworkLayout layout = homogeneous_layout(d, space, gen, d);
          const RVec v = RVec::Constant(d, 1.0 / std::sqrt(double(d)));
          const double pipe = pipeline_single_function(ghz(layout, n), v, mu);
          const double closed = ghz_sum(d, n, gen.lambda_max(), gen.lambda_min(), mu);
          req_close(pipe, closed, 1e-9,
                    "entangled sum bound, d=" + std::to_string(d) + " n=" + std::to_string(n) +
                        (optical ? " optical" : " qubit") + " mu=" + std::to_string(mu));
        }
      }
    }
  }
}

/// The separable probe of equal resources pays exactly a factor d on the
/// phase-sum bound.
void criterion_local_ratio() {
  for (const bool optical : {false, true}) {
    for (const int d : {2, 3, 4}) {
      for (const int n : {1, 2}) {
        const SensorSpace space =
            optical ? SensorSpace::bosonic_mode(n) : SensorSpace::qubit_ensemble(n);
        const GeneratorSpec gen =
            optical ? GeneratorSpec::number_operator() : GeneratorSpec::spin_z();
        const NetworkLayout layout = homogeneous_layout(d, space, gen, d);
        const RVec v = RVec::Constant(d, 1.0 / std::sqrt(double(d)));
        const double e_ghz = pipeline_single_function(ghz(layout, n), v, 1);
        const double e_loc =
            pipeline_single_function(local_superposition(layout, std::vector<int>(size_t(d), n)), v, 1);
        req_close(e_loc / e_ghz, double(d), 1e-9,
                  "separable/entangled ratio, d=" + std::to_string(d) + " n=" + std::to_string(n) +
                      (optical ? " optical" : " qubit"));
      }
    }
  }
}

/// Weighted two-branch probes vs |v|_1^2/(mu Nmax^2 dlam^2) for uneven
/// weights, photonic and atomic.
void criterion_weighted_ghz() {
  const std::vector<std::vector<int>> weight_sets = {{2, 1}, {3, 1}, {1, 1, 2}};
  for (const auto& w : weight_sets) {
    const int d = int(w.size());
    int n_max = 0, w_max = 0;
    for (int wk : w) {
      n_max += wk;
      w_max = std::max(w_max, wk);
    }
    RVec v(d);
    for (int k = 0; k < d; ++k) v[k] = double(w[size_t(k)]);
    v.normalize();

    for (const bool optical : {true, false}) {
      // Photonic sensors share one truncation; atomic sensor k holds exactly
      // its w_k atoms.
      const GeneratorSpec gen =
          optical ? GeneratorSpec::number_operator() : GeneratorSpec::spin_z();
      std::vector<SensorSpace> spaces;
      std::vector<std::pair<int, GeneratorSpec>> params;
      for (int k = 0; k < d; ++k) {
        spaces.push_back(optical ? SensorSpace::bosonic_mode(w_max)
                                 : SensorSpace::qubit_ensemble(w[size_t(k)]));
        params.emplace_back(k, gen);
      }
      const NetworkLayout layout(std::move(spaces), std::move(params));
      const NetworkState probe = weighted_ghz(layout, w);
      for (const long mu : {1L, 2L}) {
        const double pipe = pipeline_single_function(probe, v, mu);
        const double closed =
            weighted_ghz_bound(v, double(n_max), gen.lambda_max(), gen.lambda_min(), mu);
        req_close(pipe, closed, 1e-9,
                  "weighted two-branch bound, d=" + std::to_string(d) +
                      " Nmax=" + std::to_string(n_max) + (optical ? " optical" : " atomic") +
                      " mu=" + std::to_string(mu));
      }
    }
  }
}

/// Balanced generalized NOON probes: the correlation penalty factor equals
/// 2d'/(d'+1) and the pipeline's average variance matches the
/// exchange-symmetric closed form.
void criterion_gns_penalty() {
  const int n = 2;
  for (int dp = 1; dp <= 8; ++dp) {
    const NetworkLayout layout = homogeneous_layout(
        dp + 1, SensorSpace::bosonic_mode(n), GeneratorSpec::number_operator(), dp);
    const NetworkState probe = gns(layout, n, 1.0);
    const RMat f = qfim_pure_commuting(probe).matrix();
    const double var = f(0, 0) / 4.0;
    const double cov = dp > 1 ? f(0, 1) / 4.0 : 0.0;

    const SymmetricQfimInverse closed = symmetric_qfim_inverse(var, cov, dp);
    req_close(closed.g, 2.0 * dp / double(dp + 1), 1e-10,
              "correlation penalty factor, d'=" + std::to_string(dp));

    const double pipe = pipeline_uniform(probe, 1);
    req_close(pipe, imaging_symmetric(var, cov / var, dp, 1), 1e-9,
              "balanced probe average variance, d'=" + std::to_string(dp));
  }
}

/// Separable product probes with a passive reference mode: average variance
/// equals (d'+1)^2/(4 mu d' N^2).
void criterion_uns_imaging() {
  for (const int dp : {1, 2, 3}) {
    for (const int n : {1, 2, 3}) {
      for (const long mu : {1L, 2L}) {
        const NetworkLayout layout = homogeneous_layout(
            dp + 1, SensorSpace::bosonic_mode(n), GeneratorSpec::number_operator(), dp);
        const double pipe = pipeline_uniform(uns(layout, n), mu);
        const double closed = double((dp + 1) * (dp + 1)) / (4.0 * double(mu) * dp * n * n);
        req_close(pipe, closed, 1e-9,
                  "product probe average variance, d'=" + std::to_string(dp) +
                      " N=" + std::to_string(n) + " mu=" + std::to_string(mu));
      }
    }
  }
}

/// Diagonal and block lower bounds on inverse matrix elements, randomized
/// plus exact equality cases.
void criterion_matrix_inequalities() {
  const SuiteReport rep = verify_matrix_inequalities(1000, 7);
  req(rep.passed(), "suite reported " + std::to_string(rep.failures) + " of " +
                        std::to_string(rep.checks) + " checks failed, worst slack " +
                        std::to_string(rep.worst_slack));
}

/// The separable surrogate preserves local statistics and never worsens the
/// weighted scalar bound.
void criterion_surrogate_dominance() {
  const SuiteReport rep = verify_surrogate(500, 7);
  req(rep.passed(), "suite reported " + std::to_string(rep.failures) + " of " +
                        std::to_string(rep.checks) + " checks failed, worst slack " +
                        std::to_string(rep.worst_slack));
}

/// Every measurement's classical information matrix is dominated by the
/// quantum one, and the optimal single-parameter measurement attains it.
void criterion_measurement_ordering() {
  // Two commuting spin generators; random states against random projective
  // measurements.
  const NetworkLayout pair = homogeneous_layout(
      2, SensorSpace::qubit_ensemble(1), GeneratorSpec::spin_z(), 2);
  RVec phi(2);
  phi << 0.3, -0.2;
  for (long t = 0; t < 200; ++t) {
    const CounterRng rng(2024, std::uint64_t(t));
    std::uint64_t c = 0;

    Vec amp(4);
    for (Index i = 0; i < 4; ++i) {
      const double re = rng.normal(c++);
      const double im = rng.normal(c++);
      amp[i] = cdouble(re, im);
    }
    amp /= amp.norm();
    const NetworkState state(pair, std::move(amp));

    Mat g(4, 4);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j) {
        const double re = rng.normal(c++);
        const double im = rng.normal(c++);
        g(i, j) = cdouble(re, im);
      }
    const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
    std::vector<Mat> povm;
    for (Index i = 0; i < 4; ++i) povm.push_back(q.col(i) * q.col(i).adjoint());

    const RMat quantum = qfim_pure_commuting(state).matrix();
    const RMat classical = classical_fim(state, phi, povm);
    RMat gap = quantum - classical;
    gap = 0.5 * (gap + gap.transpose()).eval();
    const double floor = Eigen::SelfAdjointEigenSolver<RMat>(gap).eigenvalues().minCoeff();
    req(floor >= -1e-6, "measurement beat the quantum information matrix by " +
                            std::to_string(-floor) + " at trial " + std::to_string(t));
  }

  // Single parameter: measuring in the eigenbasis of the symmetric
  // logarithmic derivative recovers the full quantum information.
  const NetworkLayout mode = homogeneous_layout(
      1, SensorSpace::bosonic_mode(3), GeneratorSpec::number_operator(), 1);
  RVec phi1(1);
  phi1 << 0.45;
  for (long t = 0; t < 20; ++t) {
    const CounterRng rng(4096, std::uint64_t(t));
    Vec amp(4);
    for (Index i = 0; i < 4; ++i) amp[i] = cdouble(rng.normal(2 * std::uint64_t(i)),
                                                   rng.normal(2 * std::uint64_t(i) + 1));
    amp /= amp.norm();
    const NetworkState state(mode, std::move(amp));

    const Mat sld = sld_pure(state, phi1, 0);
    const Eigen::SelfAdjointEigenSolver<Mat> es(sld);
    std::vector<Mat> povm;
    for (Index i = 0; i < 4; ++i)
      povm.push_back(es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint());

    const double quantum = qfim_pure_commuting(state).matrix()(0, 0);
    const double classical = classical_fim(state, phi1, povm)(0, 0);
    req(classical >= 0.999 * quantum,
        "optimal measurement reached only " + std::to_string(classical) + " of " +
            std::to_string(quantum) + " at trial " + std::to_string(t));
  }
}

/// Two-qubit probes for a non-orthogonal pair of phase functions: grid scan
/// vs closed-form minimizer, the exact zero crossing, and the pipeline value
/// of the explicit probe family.
void criterion_nonorthogonal_pair() {
  // Closed-form minimizer vs a fine grid over an 11 x 11 lattice of
  // admissible angle pairs.
  const double step = 1e-4;
  for (int ia = 0; ia <= 10; ++ia) {
    for (int ib = 0; ib <= 10; ++ib) {
      const double alpha = -0.6 + 0.12 * ia;
      const double beta = -0.6 + 0.12 * ib;
      const double xm = two_qubit_x_min(alpha, beta);
      const auto [xs, es] = nonorthogonal_scan(alpha, beta, step);
      req(std::abs(xs - xm) <= 2.0 * step,
          "grid minimizer " + std::to_string(xs) + " vs closed form " + std::to_string(xm) +
              " at alpha=" + std::to_string(alpha) + " beta=" + std::to_string(beta));
      req(es >= two_qubit_nonorthogonal(alpha, beta, xm, 1) - 1e-12,
          "grid beat the closed-form minimum at alpha=" + std::to_string(alpha));
    }
  }

  // Anti-aligned angles cancel the cross term; the minimizer is exactly zero.
  for (const double a : {0.1, 0.25, 0.4, M_PI / 8}) {
    const double xm = two_qubit_x_min(a, -a);
    req(xm == 0.0, "minimizer not exactly zero at a=" + std::to_string(a));
  }

  // The explicit two-qubit probe family reproduces E(x) = (2-gx)/(1-x^2).
  const NetworkLayout layout = homogeneous_layout(
      2, SensorSpace::qubit_ensemble(1), GeneratorSpec::spin_z(), 2);
  const std::vector<std::pair<double, double>> angles = {
      {M_PI / 8, 0.0}, {M_PI / 6, M_PI / 6}, {0.3, -0.1}};
  for (const auto& [alpha, beta] : angles) {
    for (const double x : {-0.5, 0.0, 0.3}) {
      const double gx = std::sqrt((1.0 - x) / (1.0 + x));
      Vec amp(4);
      amp << 1.0, gx, gx, 1.0;
      amp /= amp.norm();
      const NetworkState probe(layout, std::move(amp));

      RMat m(2, 2);
      m << std::cos(alpha), std::sin(alpha), std::sin(beta), std::cos(beta);
      const Qfim ft = reparam(qfim_pure_commuting(probe), LinearReparam(m, true));
      const double pipe = 2.0 * weighted_crb(reduce(ft, Weighting::uniform(2)), 1);
      req_close(pipe, two_qubit_nonorthogonal(alpha, beta, x, 1), 1e-9,
                "two-qubit pipeline at alpha=" + std::to_string(alpha) +
                    " beta=" + std::to_string(beta) + " x=" + std::to_string(x));
    }
  }
}

/// Zero-weight parameters decoupled from the weighted block are discarded;
/// entangled singular directions are reported as estimation failures.
void criterion_reduction() {
  for (const double f33 : {0.0, 1.0, 7.0}) {
    RMat f(4, 4);
    f << 2.0, 0.5, 0.0, 0.3,  //
        0.5, 1.5, 0.0, 0.2,   //
        0.0, 0.0, f33, 0.0,   //
        0.3, 0.2, 0.0, 1.0;
    RVec w(4);
    w << 0.6, 0.4, 0.0, 0.0;
    const ReducedProblem red = reduce(Qfim(f), Weighting(w));
    req(red.kept_indices == std::vector<int>({0, 1, 3}),
        "kept set wrong at f33=" + std::to_string(f33));
    req(red.discarded_indices == std::vector<int>({2}),
        "discarded set wrong at f33=" + std::to_string(f33));
    req(!red.estimation_failure, "spurious failure at f33=" + std::to_string(f33));

    RMat kept(3, 3);
    kept << 2.0, 0.5, 0.3, 0.5, 1.5, 0.2, 0.3, 0.2, 1.0;
    const RMat inv = kept.inverse();
    const double expect = 0.6 * inv(0, 0) + 0.4 * inv(1, 1);
    req_close(weighted_crb(red, 1), expect, 1e-12, "reduced bound vs dense inversion");
  }

  // All weights positive on a rank-one information matrix: nothing can be
  // discarded and the scalar bound must refuse.
  const ReducedProblem stuck = reduce(Qfim(RMat::Ones(3, 3)), Weighting::uniform(3));
  req(stuck.estimation_failure, "singular coupled block not flagged");
  req(stuck.kept_indices.size() == 3, "singular coupled block was trimmed");
  bool threw = false;
  try {
    (void)weighted_crb(stuck, 1);
  } catch (const EstimationError&) {
    threw = true;
  }
  req(threw, "scalar bound did not refuse a singular reduced matrix");
}

/// Randomized search for probes beating the weighted two-branch bound; no
/// sampled state may beat it beyond tolerance, and the scan must finish
/// within its time budget.
void criterion_conjecture_scan() {
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteReport rep = verify_conjecture_scan(20000, 7);
  const double secs =
      std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() - t0)
          .count();
  req(rep.passed(), "scan reported " + std::to_string(rep.failures) + " of " +
                        std::to_string(rep.checks) + " checks failed");
  bool consistent = false;
  for (const std::string& line : rep.lines)
    if (line.find("consistent") != std::string::npos) consistent = true;
  req(consistent, "scan did not log a \"consistent\" line");
  req(secs < 300.0, "scan took " + std::to_string(secs) + " s");
}

/// Imaging against an unknown reference: the closed form matches dense
/// inversion of the structured covariance pattern, and its uncorrelated
/// limit is exact.
void criterion_unknown_reference() {
  for (long t = 0; t < 200; ++t) {
    const CounterRng rng(33, 60000 + std::uint64_t(t));
    const int dp = 1 + int(rng.uniform(0) * 4.0);
    const double v = 0.2 + rng.uniform(1);
    const double vr = 0.2 + rng.uniform(2);
    const double jlo = dp > 1 ? -1.0 / double(dp - 1) : -0.9;
    const double j = jlo + (0.05 + 0.9 * rng.uniform(3)) * (1.0 - jlo);
    const double jp_cap = std::sqrt((1.0 + double(dp - 1) * j) / double(dp));
    const double jp = (2.0 * rng.uniform(4) - 1.0) * 0.95 * jp_cap;

    RMat cmat(dp + 1, dp + 1);
    cmat.setZero();
    for (int a = 0; a < dp; ++a)
      for (int b = 0; b < dp; ++b) cmat(a, b) = a == b ? v : j * v;
    for (int a = 0; a < dp; ++a) cmat(a, dp) = cmat(dp, a) = jp * std::sqrt(v * vr);
    cmat(dp, dp) = vr;

    const RMat cinv = cmat.inverse();
    double acc = 0.0;
    for (int a = 0; a < dp; ++a) acc += cinv(a, a) - 2.0 * cinv(a, dp) + cinv(dp, dp);
    const double oracle = acc / (2.0 * double(dp));
    req_close(imaging_unknown_reference(v, vr, j, jp, dp, 1), oracle, 1e-9,
              "closed form vs dense inversion at trial " + std::to_string(t));
  }

  for (const auto& [v, vr] :
       std::vector<std::pair<double, double>>{{0.25, 0.5}, {1.0, 1.0}, {0.7, 0.3}}) {
    const double sep = imaging_unknown_reference(v, vr, 0.0, 0.0, 3, 1);
    const double expect = 0.5 / v + 0.5 / vr;
    req(std::abs(sep - expect) <= 1e-14 * expect,
        "uncorrelated limit not exact at v=" + std::to_string(v));
  }
}

}  // namespace

int main() {
  criterion(1, "ghz-sum-bound", criterion_ghz_sum);
  criterion(2, "local-vs-entangled-ratio", criterion_local_ratio);
  criterion(3, "weighted-ghz-bound", criterion_weighted_ghz);
  criterion(4, "gns-correlation-penalty", criterion_gns_penalty);
  criterion(5, "product-probe-imaging", criterion_uns_imaging);
  criterion(6, "matrix-inequalities", criterion_matrix_inequalities);
  criterion(7, "surrogate-dominance", criterion_surrogate_dominance);
  criterion(8, "measurement-ordering", criterion_measurement_ordering);
  criterion(9, "nonorthogonal-pair", criterion_nonorthogonal_pair);
  criterion(10, "parameter-reduction", criterion_reduction);
  criterion(11, "conjecture-scan", criterion_conjecture_scan);
  criterion(12, "unknown-reference", criterion_unknown_reference);

  std::printf("acceptance: %d/12 criteria passed\n", 12 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
