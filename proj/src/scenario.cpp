#include "qsn/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qsn/probes.hpp"

namespace qsn {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw SchemaError(msg); }

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) fail(std::string("unknown key \"") + item.key() + "\" in " + where);
  }
}

const json& require(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string(where) + " is missing required key \"" + key + "\"");
  return *it;
}

long get_integer(const json& j, const char* what) {
  if (!j.is_number_integer()) fail(std::string(what) + " must be an integer");
  return j.get<long>();
}

double get_number(const json& j, const char* what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  return j.get<double>();
}

std::string get_string(const json& j, const char* what) {
  if (!j.is_string()) fail(std::string(what) + " must be a string");
  return j.get<std::string>();
}

RVec get_rvec(const json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + " must be an array of numbers");
  RVec v(Index(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[Index(i)] = get_number(j[i], what);
  return v;
}

std::vector<int> get_int_list(const json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + " must be an array of integers");
  std::vector<int> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(int(get_integer(e, what)));
  return v;
}

SensorDesc parse_sensor(const json& j, size_t index) {
  const std::string where = "network.sensors[" + std::to_string(index) + "]";
  SensorDesc d;
  d.type = get_string(require(j, "type", where.c_str()), "sensor type");
  if (d.type == "bosonic") {
    check_keys(j, where.c_str(), {"type", "n_max"});
    d.n_max = int(get_integer(require(j, "n_max", where.c_str()), "n_max"));
  } else if (d.type == "qubits") {
    check_keys(j, where.c_str(), {"type", "atoms", "vacuum"});
    d.atoms = int(get_integer(require(j, "atoms", where.c_str()), "atoms"));
    if (j.contains("vacuum")) {
      if (!j["vacuum"].is_boolean()) fail("vacuum must be a boolean");
      d.vacuum = j["vacuum"].get<bool>();
    }
  } else if (d.type == "sectors") {
    check_keys(j, where.c_str(), {"type", "dims"});
    for (int n : get_int_list(require(j, "dims", where.c_str()), "dims")) {
      if (n < 0) fail("sector dimensions must be nonnegative");
      d.dims.push_back(Index(n));
    }
  } else {
    fail("sensor type must be \"bosonic\", \"qubits\" or \"sectors\"");
  }
  return d;
}

ParamDesc parse_param(const json& j, size_t index) {
  const std::string where = "network.parameters[" + std::to_string(index) + "]";
  check_keys(j, where.c_str(), {"sensor", "generator"});
  ParamDesc d;
  d.sensor = int(get_integer(require(j, "sensor", where.c_str()), "sensor index"));
  const json& g = require(j, "generator", where.c_str());
  if (g.is_string()) {
    d.kind = g.get<std::string>();
    if (d.kind != "number" && d.kind != "spin_z")
      fail("named generator must be \"number\" or \"spin_z\"");
  } else if (g.is_object()) {
    check_keys(g, "generator", {"delta", "twice_spin"});
    d.kind = "linear";
    d.delta = get_number(require(g, "delta", "generator"), "delta");
    d.twice_spin = int(get_integer(require(g, "twice_spin", "generator"), "twice_spin"));
  } else {
    fail("generator must be a name or a {delta, twice_spin} object");
  }
  return d;
}

ProbeDesc parse_probe(const json& j) {
  ProbeDesc d;
  d.family = get_string(require(j, "family", "probe"), "probe family");
  if (d.family == "ghz" || d.family == "uns") {
    check_keys(j, "probe", {"family", "n"});
    d.n = int(get_integer(require(j, "n", "probe"), "probe n"));
  } else if (d.family == "gns") {
    check_keys(j, "probe", {"family", "n", "gamma"});
    d.n = int(get_integer(require(j, "n", "probe"), "probe n"));
    d.gamma = j.contains("gamma") ? get_number(j["gamma"], "gamma") : 1.0;
  } else if (d.family == "weighted_ghz" || d.family == "local_superposition") {
    check_keys(j, "probe", {"family", "weights"});
    d.weights = get_int_list(require(j, "weights", "probe"), "probe weights");
  } else if (d.family == "custom") {
    check_keys(j, "probe", {"family", "amplitudes"});
    const json& amps = require(j, "amplitudes", "probe");
    if (!amps.is_array()) fail("amplitudes must be an array of [re, im] pairs");
    for (const auto& e : amps) {
      if (!e.is_array() || e.size() != 2) fail("each amplitude must be an [re, im] pair");
      d.amplitudes.emplace_back(get_number(e[0], "amplitude"), get_number(e[1], "amplitude"));
    }
  } else {
    fail("unknown probe family \"" + d.family + "\"");
  }
  return d;
}

TaskDesc parse_task(const json& j) {
  TaskDesc d;
  d.kind = get_string(require(j, "kind", "task"), "task kind");
  if (d.kind == "estimate_phi") {
    check_keys(j, "task", {"kind", "weights"});
    if (j.contains("weights")) d.weights = get_rvec(j["weights"], "task weights");
  } else if (d.kind == "single_function") {
    check_keys(j, "task", {"kind", "v"});
    d.v = get_rvec(require(j, "v", "task"), "task v");
  } else if (d.kind == "linear_functions") {
    check_keys(j, "task", {"kind", "matrix", "weights"});
    const json& m = require(j, "matrix", "task");
    if (!m.is_array() || m.empty()) fail("task matrix must be a nonempty array of rows");
    const size_t cols = m[0].is_array() ? m[0].size() : 0;
    if (cols == 0) fail("task matrix rows must be nonempty arrays");
    d.matrix.resize(Index(m.size()), Index(cols));
    for (size_t r = 0; r < m.size(); ++r) {
      if (!m[r].is_array() || m[r].size() != cols) fail("task matrix rows must have equal length");
      for (size_t c = 0; c < cols; ++c) d.matrix(Index(r), Index(c)) = get_number(m[r][c], "matrix entry");
    }
    if (j.contains("weights")) d.weights = get_rvec(j["weights"], "task weights");
  } else {
    fail("task kind must be \"estimate_phi\", \"single_function\" or \"linear_functions\"");
  }
  return d;
}

json sensor_json(const SensorDesc& d) {
  json j;
  j["type"] = d.type;
  if (d.type == "bosonic") j["n_max"] = d.n_max;
  if (d.type == "qubits") {
    j["atoms"] = d.atoms;
    j["vacuum"] = d.vacuum;
  }
  if (d.type == "sectors") {
    json dims = json::array();
    for (Index n : d.dims) dims.push_back(long(n));
    j["dims"] = dims;
  }
  return j;
}

json param_json(const ParamDesc& d) {
  json j;
  j["sensor"] = d.sensor;
  if (d.kind == "linear")
    j["generator"] = json{{"delta", d.delta}, {"twice_spin", d.twice_spin}};
  else
    j["generator"] = d.kind;
  return j;
}

json rvec_json(const RVec& v) {
  json j = json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json probe_json(const ProbeDesc& d) {
  json j;
  j["family"] = d.family;
  if (d.family == "ghz" || d.family == "uns" || d.family == "gns") j["n"] = d.n;
  if (d.family == "gns") j["gamma"] = d.gamma;
  if (d.family == "weighted_ghz" || d.family == "local_superposition") j["weights"] = d.weights;
  if (d.family == "custom") {
    json amps = json::array();
    for (const cdouble& a : d.amplitudes) amps.push_back(json::array({a.real(), a.imag()}));
    j["amplitudes"] = amps;
  }
  return j;
}

json task_json(const TaskDesc& d) {
  json j;
  j["kind"] = d.kind;
  if (d.kind == "estimate_phi" && d.weights.size() > 0) j["weights"] = rvec_json(d.weights);
  if (d.kind == "single_function") j["v"] = rvec_json(d.v);
  if (d.kind == "linear_functions") {
    json m = json::array();
    for (Index r = 0; r < d.matrix.rows(); ++r) {
      json row = json::array();
      for (Index c = 0; c < d.matrix.cols(); ++c) row.push_back(d.matrix(r, c));
      m.push_back(row);
    }
    j["matrix"] = m;
    if (d.weights.size() > 0) j["weights"] = rvec_json(d.weights);
  }
  return j;
}

json scenario_json(const Scenario& s) {
  json sensors = json::array();
  for (size_t i = 0; i < s.sensors.size(); ++i) sensors.push_back(sensor_json(s.sensors[i]));
  json params = json::array();
  for (size_t i = 0; i < s.parameters.size(); ++i) params.push_back(param_json(s.parameters[i]));
  json j;
  j["mu"] = s.mu;
  j["network"] = json{{"parameters", params}, {"sensors", sensors}};
  j["output"] = s.output;
  if (s.phi) j["phi"] = rvec_json(*s.phi);
  j["probe"] = probe_json(s.probe);
  j["task"] = task_json(s.task);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsing / emission
// ---------------------------------------------------------------------------

Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("scenario is not valid JSON: ") + e.what());
  }
  check_keys(j, "scenario", {"mu", "network", "output", "phi", "probe", "task"});

  Scenario s;
  if (j.contains("mu")) {
    s.mu = get_integer(j["mu"], "mu");
    if (s.mu < 1) fail("mu must be a positive integer");
  }
  const json& net = require(j, "network", "scenario");
  check_keys(net, "network", {"parameters", "sensors"});
  const json& sensors = require(net, "sensors", "network");
  if (!sensors.is_array() || sensors.empty()) fail("network.sensors must be a nonempty array");
  for (size_t i = 0; i < sensors.size(); ++i) s.sensors.push_back(parse_sensor(sensors[i], i));
  const json& params = require(net, "parameters", "network");
  if (!params.is_array() || params.empty()) fail("network.parameters must be a nonempty array");
  for (size_t i = 0; i < params.size(); ++i) s.parameters.push_back(parse_param(params[i], i));

  s.probe = parse_probe(require(j, "probe", "scenario"));
  s.task = parse_task(require(j, "task", "scenario"));
  if (j.contains("phi")) s.phi = get_rvec(j["phi"], "phi");
  if (j.contains("output")) {
    s.output = get_string(j["output"], "output");
    if (s.output.empty() || s.output.find('/') != std::string::npos)
      fail("output must be a plain file base name");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string emit_scenario(const Scenario& s) { return scenario_json(s).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

NetworkLayout build_layout(const Scenario& s) {
  std::vector<SensorSpace> spaces;
  spaces.reserve(s.sensors.size());
  for (const SensorDesc& d : s.sensors) {
    if (d.type == "bosonic") {
      spaces.push_back(SensorSpace::bosonic_mode(d.n_max));
    } else if (d.type == "qubits") {
      spaces.push_back(d.vacuum ? SensorSpace::qubit_ensemble_with_vacuum(d.atoms)
                                : SensorSpace::qubit_ensemble(d.atoms));
    } else {
      spaces.push_back(SensorSpace(d.dims));
    }
  }
  std::vector<std::pair<int, GeneratorSpec>> params;
  params.reserve(s.parameters.size());
  for (const ParamDesc& d : s.parameters) {
    if (d.sensor < 0 || d.sensor >= int(spaces.size()))
      fail("parameter refers to sensor " + std::to_string(d.sensor) + " which does not exist");
    GeneratorSpec g = d.kind == "number" ? GeneratorSpec::number_operator()
                      : d.kind == "spin_z" ? GeneratorSpec::spin_z()
                                           : GeneratorSpec::linear(d.delta, d.twice_spin);
    params.emplace_back(d.sensor, g);
  }
  return NetworkLayout(std::move(spaces), std::move(params));
}

NetworkState build_probe(const Scenario& s, const NetworkLayout& layout) {
  const ProbeDesc& p = s.probe;
  if (p.family == "ghz") return ghz(layout, p.n);
  if (p.family == "weighted_ghz") return weighted_ghz(layout, p.weights);
  if (p.family == "gns") return gns(layout, p.n, p.gamma);
  if (p.family == "uns") return uns(layout, p.n);
  if (p.family == "local_superposition") return local_superposition(layout, p.weights);
  if (p.family == "custom") {
    if (Index(p.amplitudes.size()) != layout.dim())
      fail("custom probe needs exactly one amplitude per basis state (" +
           std::to_string(layout.dim()) + ")");
    Vec amp(layout.dim());
    for (size_t i = 0; i < p.amplitudes.size(); ++i) amp[Index(i)] = p.amplitudes[i];
    return NetworkState(layout, std::move(amp));
  }
  fail("unknown probe family \"" + p.family + "\"");
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

namespace {

// Spectrum extremes across all parameter generators.
void spectrum_range(const NetworkLayout& layout, double& lam_lo, double& lam_hi) {
  lam_hi = layout.param_generator(0).lambda_max();
  lam_lo = layout.param_generator(0).lambda_min();
  for (int k = 1; k < layout.num_params(); ++k) {
    lam_hi = std::max(lam_hi, layout.param_generator(k).lambda_max());
    lam_lo = std::min(lam_lo, layout.param_generator(k).lambda_min());
  }
}

// True when the QFIM has equal diagonals and equal off-diagonals (the
// exchange-symmetric pattern the imaging bounds assume).
bool symmetric_pattern(const RMat& f, double& var, double& cov) {
  const int d = int(f.rows());
  var = f(0, 0) / 4.0;
  cov = d > 1 ? f(0, 1) / 4.0 : 0.0;
  const double tol = 1e-9 * std::max(1.0, std::abs(f(0, 0)));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double want = a == b ? f(0, 0) : (d > 1 ? f(0, 1) : 0.0);
      if (std::abs(f(a, b) - want) > tol) return false;
    }
  return true;
}

void append_catalog_bounds(const Scenario& s, const NetworkLayout& layout, const Qfim& qfim,
                           std::vector<BoundReport>& out) {
  const int d = layout.num_params();
  double lam_lo = 0.0, lam_hi = 0.0;
  spectrum_range(layout, lam_lo, lam_hi);
  const double mu = double(s.mu);

  auto add = [&out](const char* name, double value, const char* formula,
                    std::vector<std::pair<std::string, double>> inputs) {
    out.push_back(BoundReport{name, value, formula, std::move(inputs)});
  };

  try {
    if (s.probe.family == "ghz" && d == layout.num_sensors()) {
      const double n = double(s.probe.n);
      const double nmax = n * d;
      add("ghz_sum", ghz_sum(d, s.probe.n, lam_hi, lam_lo, s.mu), "d/(mu Nmax^2 dlam^2)",
          {{"d", double(d)}, {"n", n}, {"lam_max", lam_hi}, {"lam_min", lam_lo}, {"mu", mu}});
      add("local_sum", local_sum(d, nmax, lam_hi, lam_lo, s.mu), "d^2/(mu Nmax^2 dlam^2)",
          {{"d", double(d)}, {"n_max", nmax}, {"lam_max", lam_hi}, {"lam_min", lam_lo}, {"mu", mu}});
    } else if (s.probe.family == "weighted_ghz") {
      RVec v(Index(s.probe.weights.size()));
      double nmax = 0.0;
      for (size_t k = 0; k < s.probe.weights.size(); ++k) {
        v[Index(k)] = double(s.probe.weights[k]);
        nmax += double(s.probe.weights[k]);
      }
      v.normalize();
      add("weighted_ghz_bound", weighted_ghz_bound(v, nmax, lam_hi, lam_lo, s.mu),
          "|v|_1^2/(mu Nmax^2 dlam^2)",
          {{"n_max", nmax}, {"lam_max", lam_hi}, {"lam_min", lam_lo}, {"mu", mu}});
      add("local_optimal", local_optimal(v, nmax, lam_hi, lam_lo, s.mu),
          "(sum_k v_k^(2/3))^3/(mu Nmax^2 dlam^2)",
          {{"n_max", nmax}, {"lam_max", lam_hi}, {"lam_min", lam_lo}, {"mu", mu}});
    } else if (s.probe.family == "gns" || s.probe.family == "uns") {
      double var = 0.0, cov = 0.0;
      if (symmetric_pattern(qfim.matrix(), var, cov) && var > 0.0) {
        const double jj = cov / var;
        const SymmetricQfimInverse closed = symmetric_qfim_inverse(var, cov, d);
        add("correlation_penalty_g", closed.g, "(1+(d-2)J)/((1-J)(1+(d-1)J))",
            {{"v", var}, {"J", jj}, {"d", double(d)}});
        add("imaging_symmetric", imaging_symmetric(var, jj, d, s.mu), "g/(4 mu v)",
            {{"v", var}, {"J", jj}, {"d", double(d)}, {"mu", mu}});
      }
      if (s.probe.family == "gns") {
        add("gns_bound", gns_bound(d, double(s.probe.n), lam_hi, lam_lo, s.mu),
            "(d+1)/(mu Nmax^2 max(lam_max^2 lam_min^2))",
            {{"d", double(d)},
             {"n_max", double(s.probe.n)},
             {"lam_max", lam_hi},
             {"lam_min", lam_lo},
             {"mu", mu}});
      }
    } else if (s.probe.family == "local_superposition" && !s.probe.weights.empty()) {
      double nmax = 0.0;
      for (int w : s.probe.weights) nmax += double(w);
      if (s.task.kind == "single_function" && Index(s.probe.weights.size()) == s.task.v.size()) {
        RVec x(Index(s.probe.weights.size()));
        for (size_t k = 0; k < s.probe.weights.size(); ++k)
          x[Index(k)] = double(s.probe.weights[k]) / nmax;
        add("local_weighted", local_weighted(s.task.v, x, nmax, lam_hi, lam_lo, s.mu),
            "|x|_1^2 sum_k (v_k/x_k)^2/(mu Nmax^2 dlam^2)",
            {{"n_max", nmax}, {"lam_max", lam_hi}, {"lam_min", lam_lo}, {"mu", mu}});
      }
      bool equal = true;
      for (int w : s.probe.weights) equal = equal && w == s.probe.weights.front();
      if (equal)
        add("local_sum", local_sum(d, nmax, lam_hi, lam_lo, s.mu), "d^2/(mu Nmax^2 dlam^2)",
            {{"d", double(d)}, {"n_max", nmax}, {"lam_max", lam_hi}, {"lam_min", lam_lo}, {"mu", mu}});
    }
  } catch (const SchemaError&) {
    // A catalog formula that does not apply to this instance is not an error;
    // the pipeline row above is always present.
  } catch (const EstimationError&) {
  }
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& s) {
  const NetworkLayout layout = build_layout(s);
  const NetworkState probe = build_probe(s, layout);
  const int d = layout.num_params();

  if (s.phi && s.phi->size() != d) fail("phi must list one phase per parameter");
  Qfim qfim = s.phi ? qfim_pure_general(probe, *s.phi) : qfim_pure_commuting(probe);

  Qfim task_qfim = qfim;
  Weighting weights = Weighting::uniform(d);
  if (s.task.kind == "estimate_phi") {
    if (s.task.weights.size() > 0) weights = Weighting(s.task.weights);
  } else if (s.task.kind == "single_function") {
    if (s.task.v.size() != d) fail("task v must have one entry per parameter");
    if (std::abs(s.task.v.norm() - 1.0) > 1e-9)
      fail("task v must be normalized (unit 2-norm)");
    task_qfim = reparam(qfim, LinearReparam(orthonormal_from_first_row(s.task.v), true));
    weights = Weighting::single(d, 0);
  } else if (s.task.kind == "linear_functions") {
    if (s.task.matrix.rows() != d || s.task.matrix.cols() != d)
      fail("task matrix must be square with one row per parameter");
    task_qfim = reparam(qfim, LinearReparam(s.task.matrix));
    if (s.task.weights.size() > 0) weights = Weighting(s.task.weights);
  } else {
    fail("unknown task kind \"" + s.task.kind + "\"");
  }
  if (weights.dim() != d) fail("task weights must have one entry per parameter");

  ReducedProblem reduced = reduce(task_qfim, weights);
  const double crb = weighted_crb(reduced, s.mu);

  ScenarioOutcome o{qfim,
                    task_qfim,
                    reduced,
                    crb,
                    resource_expectation(probe),
                    max_particles_in_support(probe),
                    {}};
  o.bounds.push_back(BoundReport{"pipeline_crb",
                                 crb,
                                 "tr(W F^-1)/mu",
                                 {{"mu", double(s.mu)},
                                  {"parameters", double(d)},
                                  {"kept", double(reduced.kept_indices.size())}}});
  append_catalog_bounds(s, layout, qfim, o.bounds);
  return o;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json rmat_json(const RMat& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string outcome_json(const Scenario& s, const ScenarioOutcome& o) {
  json bounds = json::array();
  for (const BoundReport& b : o.bounds) {
    json inputs;
    for (const auto& [key, value] : b.inputs) inputs[key] = value;
    bounds.push_back(json{
        {"formula", b.formula}, {"inputs", inputs}, {"name", b.name}, {"value", b.value}});
  }
  json results{{"bounds", bounds},
               {"crb", o.crb},
               {"discarded", o.reduced.discarded_indices},
               {"estimation_failure", o.reduced.estimation_failure},
               {"kept", o.reduced.kept_indices},
               {"max_particles", o.max_particles},
               {"mean_particles", o.mean_particles},
               {"qfim", rmat_json(o.qfim.matrix())},
               {"task_qfim", rmat_json(o.task_qfim.matrix())}};
  json j{{"results", results}, {"scenario", scenario_json(s)}};
  return j.dump(2) + "\n";
}

std::string outcome_csv(const ScenarioOutcome& o) {
  std::string out = "name,value,formula,inputs\n";
  for (const BoundReport& b : o.bounds) {
    std::string inputs;
    for (const auto& [key, value] : b.inputs) {
      if (!inputs.empty()) inputs += ';';
      inputs += key + '=' + format_double(value);
    }
    out += b.name + ',' + format_double(b.value) + ',' + b.formula + ',' + inputs + '\n';
  }
  return out;
}

}  // namespace qsn
