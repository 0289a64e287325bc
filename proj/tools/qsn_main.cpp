#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsn/bounds.hpp"
#include "qsn/fisher.hpp"
#include "qsn/scenario.hpp"
#include "qsn/verify.hpp"

namespace {

using qsn::format_double;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qsn::SchemaError("cannot write " + path.string());
  out << content;
}

// "key=lo:hi:step" -> inclusive sweep values; the key must match the family's
// sweep variable.
std::vector<double> parse_sweep(const std::string& spec, const std::string& expected_key,
                                double lo, double hi, double step) {
  if (!spec.empty()) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw qsn::SchemaError("sweep must look like key=lo:hi:step");
    const std::string key = spec.substr(0, eq);
    if (key != expected_key)
      throw qsn::SchemaError("this family sweeps over \"" + expected_key + "\", not \"" + key +
                             "\"");
    const std::string range = spec.substr(eq + 1);
    const auto c1 = range.find(':');
    const auto c2 = range.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw qsn::SchemaError("sweep must look like key=lo:hi:step");
    try {
      lo = std::stod(range.substr(0, c1));
      hi = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
      step = std::stod(range.substr(c2 + 1));
    } catch (const std::exception&) {
      throw qsn::SchemaError("sweep bounds must be numbers");
    }
  }
  if (!(step > 0.0)) throw qsn::SchemaError("sweep step must be positive");
  if (hi < lo) throw qsn::SchemaError("sweep range is empty");
  std::vector<double> values;
  const long count = long(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) throw qsn::SchemaError("sweep has more than 1e6 rows");
  for (long i = 0; i < count; ++i) values.push_back(lo + double(i) * step);
  return values;
}

int as_int(double x, const char* what) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 || r < -2e9 || r > 2e9)
    throw qsn::SchemaError(std::string(what) + " must be an integer");
  return int(r);
}

std::string csv_row(const std::vector<double>& fields) {
  std::string row;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) row += ',';
    row += format_double(fields[i]);
  }
  row += '\n';
  return row;
}

std::string table_csv(const std::string& family, const std::string& sweep) {
  std::string csv;
  if (family == "sum-bounds") {
    // Sum of one phase per sensor: entangled vs separable probes of equal
    // particle number (n = 1 per sensor, spin-half generators).
    csv = "d,entangled_sum,separable_sum,ratio\n";
    for (double dv : parse_sweep(sweep, "d", 1, 8, 1)) {
      const int d = as_int(dv, "d");
      const double e = qsn::ghz_sum(d, 1, 0.5, -0.5, 1);
      const double s = qsn::local_sum(d, double(d), 0.5, -0.5, 1);
      csv += csv_row({double(d), e, s, s / e});
    }
  } else if (family == "imaging") {
    // Average variance of d' phases against a known reference: correlated
    // probe (penalty g -> 2) vs product probe (g = 1) vs split two-mode
    // experiments, at N = 2 photons per mode.
    csv = "d_prime,penalty_correlated,penalty_product,correlated,product,split\n";
    const double n = 2.0;
    for (double dv : parse_sweep(sweep, "d_prime", 1, 10, 1)) {
      const int dp = as_int(dv, "d_prime");
      const double denom = double(dp + 1) * double(dp + 1);
      const double var = double(dp) * n * n / denom;
      const double cov = dp > 1 ? -n * n / denom : 0.0;
      const double g = qsn::symmetric_qfim_inverse(var, cov, dp).g;
      const double e_corr = qsn::imaging_symmetric(var, dp > 1 ? cov / var : 0.0, dp, 1);
      const double e_prod = qsn::imaging_symmetric(var, 0.0, dp, 1);
      const double e_split = qsn::noon_individual(dp, long(dp) * long(n), 1);
      csv += csv_row({double(dp), g, 1.0, e_corr, e_prod, e_split});
    }
  } else if (family == "nonorthogonal") {
    // Two-qubit non-orthogonal function pair at alpha = pi/8, beta = 0:
    // summed variance E(x) over the probe family, with the closed-form
    // minimizer for reference.
    const double alpha = M_PI / 8, beta = 0.0;
    const double g = std::sin(2 * alpha) + std::sin(2 * beta);
    const double xmin = qsn::two_qubit_x_min(alpha, beta);
    csv = "x,value,g,x_min\n";
    for (double x : parse_sweep(sweep, "x", -0.9, 0.9, 0.05))
      csv += csv_row({x, qsn::two_qubit_nonorthogonal(alpha, beta, x, 1), g, xmin});
  } else if (family == "enhancement") {
    // Weighted function v = (a, 1)/|.|: entangled vs optimally allocated
    // separable bound; the gain shrinks as the weights grow uneven.
    csv = "a,l1_norm,entangled,separable_optimal,enhancement\n";
    for (double av : parse_sweep(sweep, "a", 1, 8, 1)) {
      const int a = as_int(av, "a");
      qsn::RVec v(2);
      v << double(a), 1.0;
      v.normalize();
      const double nmax = double(a) + 1.0;
      const double e = qsn::weighted_ghz_bound(v, nmax, 1.0, 0.0, 1);
      const double s = qsn::local_optimal(v, nmax, 1.0, 0.0, 1);
      csv += csv_row({double(a), v.lpNorm<1>(), e, s, s / e});
    }
  } else {
    throw qsn::SchemaError("unknown table family \"" + family +
                           "\" (families: sum-bounds, imaging, nonorthogonal, enhancement)");
  }
  return csv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Precision bounds and probe-state catalog for networks of quantum sensors"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  app.add_option("--out", out_dir, "Directory for emitted files")->capture_default_str();

  auto* run = app.add_subcommand("run", "Evaluate a scenario file and emit its reports");
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  std::string suite;
  verify->add_option("suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(qsn::suite_names()));
  std::optional<long> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> step;
  verify->add_option("--trials", trials, "Randomized trial count (suite-specific default)");
  verify->add_option("--seed", seed, "Random seed (default 7)");
  verify->add_option("--step", step, "Grid step for scan suites (default 1e-4)");

  auto* table = app.add_subcommand("table", "Emit a parameter-sweep table");
  std::string family;
  std::string sweep;
  table->add_option("family", family, "sum-bounds | imaging | nonorthogonal | enhancement")
      ->required();
  table->add_option("--sweep", sweep, "key=lo:hi:step (family-specific key and defaults)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::filesystem::create_directories(out_dir);
    if (*run) {
      const qsn::Scenario s = qsn::load_scenario(scenario_path);
      const qsn::ScenarioOutcome o = qsn::run_scenario(s);
      const auto json_path = std::filesystem::path(out_dir) / (s.output + ".report.json");
      const auto csv_path = std::filesystem::path(out_dir) / (s.output + ".table.csv");
      write_file(json_path, qsn::outcome_json(s, o));
      write_file(csv_path, qsn::outcome_csv(o));
      std::cout << "bound: " << format_double(o.crb) << " (kept "
                << o.reduced.kept_indices.size() << " of " << o.qfim.dim() << " parameters)\n"
                << "mean particles: " << format_double(o.mean_particles)
                << ", max particles: " << o.max_particles << "\n"
                << "wrote " << json_path.string() << "\n"
                << "wrote " << csv_path.string() << "\n";
      return 0;
    }
    if (*verify) {
      const qsn::SuiteReport rep = qsn::run_suite(suite, trials, seed, step);
      for (const std::string& line : rep.lines) std::cout << line << "\n";
      std::cout << rep.suite << ": " << (rep.checks - rep.failures) << "/" << rep.checks
                << " checks passed, worst slack " << format_double(rep.worst_slack) << "\n"
                << (rep.passed() ? "PASS" : "FAIL") << "\n";
      return rep.passed() ? 0 : 1;
    }
    const std::string csv = table_csv(family, sweep);
    const auto path = std::filesystem::path(out_dir) / (family + ".csv");
    write_file(path, csv);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
  } catch (const qsn::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const qsn::EstimationError& e) {
    std::cerr << "estimation failure: " << e.what() << "\n";
    return 3;
  } catch (const qsn::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
