#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsn/bounds.hpp"
#include "qsn/fisher.hpp"
#include "qsn/network.hpp"

namespace qsn {

/// One sensor in a scenario file: "bosonic" (n_max), "qubits" (atoms,
/// optional vacuum flag) or "sectors" (explicit sector dimensions).
struct SensorDesc {
  std::string type;
  int n_max = 0;
  int atoms = 0;
  bool vacuum = false;
  std::vector<Index> dims;
};

/// One estimated phase: the sensor it acts on and its generator, either a
/// named one ("number", "spin_z") or a general linear spectrum
/// {delta, twice_spin}.
struct ParamDesc {
  int sensor = 0;
  std::string kind;  // "number" | "spin_z" | "linear"
  double delta = 0.0;
  int twice_spin = 0;
};

/// Probe selection: a catalog family with its parameters, or explicit
/// amplitudes over the full network basis ("custom").
struct ProbeDesc {
  std::string family;  // ghz | weighted_ghz | gns | uns | local_superposition | custom
  int n = 0;                     // ghz, gns, uns
  double gamma = 1.0;            // gns
  std::vector<int> weights;      // weighted_ghz, local_superposition
  std::vector<cdouble> amplitudes;  // custom
};

/// Estimation task: all phases under a diagonal weighting, a single
/// normalized linear function of the phases, or a general invertible set of
/// linear functions with weights.
struct TaskDesc {
  std::string kind;  // estimate_phi | single_function | linear_functions
  RVec weights;      // estimate_phi, linear_functions
  RVec v;            // single_function
  RMat matrix;       // linear_functions (rows = functions)
};

/// Parsed scenario file. emit_scenario(parse_scenario_text(s)) is the
/// canonical form of s, and canonical forms round-trip byte-identically.
struct Scenario {
  std::vector<SensorDesc> sensors;
  std::vector<ParamDesc> parameters;
  ProbeDesc probe;
  TaskDesc task;
  long mu = 1;
  std::optional<RVec> phi;   // evaluation point; required for dense generators
  std::string output = "scenario";  // base name of the emitted report files
};

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);
/// Canonical serialization: sorted keys, two-space indent, trailing newline.
std::string emit_scenario(const Scenario& s);

NetworkLayout build_layout(const Scenario& s);
NetworkState build_probe(const Scenario& s, const NetworkLayout& layout);

/// Everything run_scenario computes; the CLI serializes this.
struct ScenarioOutcome {
  Qfim qfim;            // in the phase basis
  Qfim task_qfim;       // after the task's reparameterization
  ReducedProblem reduced;
  double crb = 0.0;     // Tr(W F^-1)/mu on the reduced problem
  double mean_particles = 0.0;
  int max_particles = 0;
  std::vector<BoundReport> bounds;  // applicable closed forms, pipeline row first
};

ScenarioOutcome run_scenario(const Scenario& s);

/// Structured report (JSON object: scenario echo + numeric results).
std::string outcome_json(const Scenario& s, const ScenarioOutcome& o);
/// Tabular report: header "name,value,formula,inputs", one row per bound,
/// doubles at 17 significant digits, LF line endings.
std::string outcome_csv(const ScenarioOutcome& o);

/// Shortest exact decimal form used everywhere numbers are printed.
std::string format_double(double x);

}  // namespace qsn
