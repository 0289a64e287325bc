// End-to-end checks of the command-line tool: scenario runs with their JSON
// and CSV reports, verification suites, sweep tables, exit-code mapping, and
// byte-identical reruns. The binary under test is supplied through the
// QSN_CLI environment variable; scenario parsing and emission are also
// checked at the library level for round-trip stability.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsn/scenario.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return std::getenv("QSN_CLI"); }

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qsn_cli_tests_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = work_dir() / ("log_" + std::to_string(counter++) + ".txt");
  const std::string cmd =
      std::string("\"") + cli_path() + "\" " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  if (status != -1 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = work_dir() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

/// Value of the named report row in a name,value,... CSV.
double csv_value(const std::string& csv, const std::string& name) {
  for (const std::string& line : split_lines(csv)) {
    const auto fields = split_csv_row(line);
    if (!fields.empty() && fields[0] == name) return std::stod(fields[1]);
  }
  FAIL("row \"" << name << "\" not found");
  return 0.0;
}

const char* kGhzPairScenario = R"({
  "mu": 1,
  "network": {
    "parameters": [
      {"generator": "spin_z", "sensor": 0},
      {"generator": "spin_z", "sensor": 1}
    ],
    "sensors": [
      {"atoms": 1, "type": "qubits", "vacuum": false},
      {"atoms": 1, "type": "qubits", "vacuum": false}
    ]
  },
  "output": "ghz_pair",
  "probe": {"family": "ghz", "n": 1},
  "task": {"kind": "single_function", "v": [0.7071067811865476, 0.7071067811865476]}
})";

const char* kUnsImagingScenario = R"({
  "mu": 1,
  "network": {
    "parameters": [
      {"generator": "number", "sensor": 0},
      {"generator": "number", "sensor": 1}
    ],
    "sensors": [
      {"n_max": 2, "type": "bosonic"},
      {"n_max": 2, "type": "bosonic"},
      {"n_max": 2, "type": "bosonic"}
    ]
  },
  "output": "uns_imaging",
  "probe": {"family": "uns", "n": 2},
  "task": {"kind": "estimate_phi", "weights": [0.5, 0.5]}
})";

}  // namespace

TEST_CASE("scenario run emits the scalar bound and both report files") {
  REQUIRE(cli_path() != nullptr);
  const fs::path scenario = write_file("ghz_pair.json", kGhzPairScenario);
  const fs::path out = work_dir() / "run_ghz";
  const CliResult r = run_cli("--out " + out.string() + " run " + scenario.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("bound: 0.5") != std::string::npos);
  CHECK(fs::exists(out / "ghz_pair.report.json"));
  CHECK(fs::exists(out / "ghz_pair.table.csv"));

  const std::string csv = read_file(out / "ghz_pair.table.csv");
  CHECK(csv_value(csv, "pipeline_crb") == doctest::Approx(0.5).epsilon(1e-12));
  // The catalog rows for this probe family ride along.
  CHECK(csv_value(csv, "ghz_sum") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(csv_value(csv, "local_sum") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(split_lines(csv)[0] == "name,value,formula,inputs");

  const nlohmann::json report = nlohmann::json::parse(read_file(out / "ghz_pair.report.json"));
  CHECK(report["results"]["crb"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report["results"]["kept"] == nlohmann::json::array({0}));
  CHECK(report["results"]["discarded"] == nlohmann::json::array({1}));
  CHECK(report["results"]["estimation_failure"] == false);
  CHECK(report["results"]["max_particles"].get<int>() == 2);
  CHECK(report["scenario"]["probe"]["family"] == "ghz");
  CHECK(report["results"]["qfim"][0][1].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("repetition count scales the reported bound") {
  std::string text = kGhzPairScenario;
  const auto pos = text.find("\"mu\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 7, "\"mu\": 5");
  const fs::path scenario = write_file("ghz_pair_mu5.json", text);
  const fs::path out = work_dir() / "run_mu5";
  const CliResult r = run_cli("--out " + out.string() + " run " + scenario.string());
  CHECK(r.code == 0);
  const std::string csv = read_file(out / "ghz_pair.table.csv");
  CHECK(csv_value(csv, "pipeline_crb") == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("reruns are byte-identical") {
  const fs::path scenario = write_file("ghz_pair_det.json", kGhzPairScenario);
  const fs::path out1 = work_dir() / "det_a";
  const fs::path out2 = work_dir() / "det_b";
  CHECK(run_cli("--out " + out1.string() + " run " + scenario.string()).code == 0);
  CHECK(run_cli("--out " + out2.string() + " run " + scenario.string()).code == 0);
  CHECK(read_file(out1 / "ghz_pair.report.json") == read_file(out2 / "ghz_pair.report.json"));
  CHECK(read_file(out1 / "ghz_pair.table.csv") == read_file(out2 / "ghz_pair.table.csv"));
}

TEST_CASE("product probe with a passive reference mode hits its closed form") {
  const fs::path scenario = write_file("uns_imaging.json", kUnsImagingScenario);
  const fs::path out = work_dir() / "run_uns";
  const CliResult r = run_cli("--out " + out.string() + " run " + scenario.string());
  CHECK(r.code == 0);
  const std::string csv = read_file(out / "uns_imaging.table.csv");
  // (d'+1)^2 / (4 d' N^2) with d' = 2, N = 2.
  CHECK(csv_value(csv, "pipeline_crb") == doctest::Approx(9.0 / 32.0).epsilon(1e-9));
  CHECK(csv_value(csv, "imaging_symmetric") == doctest::Approx(9.0 / 32.0).epsilon(1e-9));
  CHECK(csv_value(csv, "correlation_penalty_g") == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scenario parsing errors exit with the schema code") {
  // Unknown top-level key.
  std::string text = kGhzPairScenario;
  text.insert(text.find("\"mu\""), "\"extra\": 1,\n  ");
  const fs::path bad = write_file("bad_key.json", text);
  CHECK(run_cli("run " + bad.string()).code == 2);
  // Unreadable path.
  CHECK(run_cli("run " + (work_dir() / "missing.json").string()).code == 2);
  // Invalid JSON.
  const fs::path garbled = write_file("garbled.json", "{not json");
  CHECK(run_cli("run " + garbled.string()).code == 2);
}

TEST_CASE("estimation failures exit with the estimation code") {
  const char* text = R"({
    "mu": 1,
    "network": {
      "parameters": [
        {"generator": "spin_z", "sensor": 0},
        {"generator": "spin_z", "sensor": 1}
      ],
      "sensors": [
        {"atoms": 1, "type": "qubits", "vacuum": false},
        {"atoms": 1, "type": "qubits", "vacuum": false}
      ]
    },
    "output": "stuck",
    "probe": {"family": "custom", "amplitudes": [[1, 0], [0, 0], [0, 0], [0, 0]]},
    "task": {"kind": "estimate_phi"}
  })";
  const fs::path scenario = write_file("singular.json", text);
  const CliResult r = run_cli("--out " + (work_dir() / "stuck").string() + " run " +
                              scenario.string());
  CHECK(r.code == 3);
}

TEST_CASE("capacity violations exit with the capacity code") {
  const char* text = R"({
    "mu": 1,
    "network": {
      "parameters": [{"generator": "spin_z", "sensor": 0}],
      "sensors": [
        {"atoms": 9, "type": "qubits", "vacuum": false},
        {"atoms": 9, "type": "qubits", "vacuum": false}
      ]
    },
    "output": "too_big",
    "probe": {"family": "ghz", "n": 9},
    "task": {"kind": "estimate_phi"}
  })";
  const fs::path scenario = write_file("too_big.json", text);
  CHECK(run_cli("run " + scenario.string()).code == 4);
}

TEST_CASE("verification suites run from the command line") {
  const CliResult fast = run_cli("verify matrix-inequalities --trials 25 --seed 3");
  CHECK(fast.code == 0);
  CHECK(fast.out.find("PASS") != std::string::npos);
  CHECK(fast.out.find("matrix-inequalities:") != std::string::npos);
  CHECK(fast.out.find("checks passed") != std::string::npos);

  const CliResult sur = run_cli("verify surrogate --trials 40 --seed 5");
  CHECK(sur.code == 0);
  CHECK(sur.out.find("PASS") != std::string::npos);

  const CliResult cross = run_cli("verify bounds-crosscheck --trials 30 --seed 9");
  CHECK(cross.code == 0);
  CHECK(cross.out.find("PASS") != std::string::npos);

  const CliResult pair = run_cli("verify nonorthogonal-pair --step 0.005");
  CHECK(pair.code == 0);
  CHECK(pair.out.find("PASS") != std::string::npos);

  const CliResult scan = run_cli("verify conjecture-scan --trials 300 --seed 11");
  CHECK(scan.code == 0);
  CHECK(scan.out.find("consistent") != std::string::npos);

  CHECK(run_cli("verify bogus-suite").code == 2);
}

TEST_CASE("sweep tables") {
  const fs::path out = work_dir() / "tables";
  const CliResult r = run_cli("--out " + out.string() + " table sum-bounds");
  CHECK(r.code == 0);
  const std::string csv = read_file(out / "sum-bounds.csv");
  const auto lines = split_lines(csv);
  REQUIRE(lines.size() == 9);  // header + d = 1..8
  CHECK(lines[0] == "d,entangled_sum,separable_sum,ratio");
  const auto row4 = split_csv_row(lines[4]);
  CHECK(std::stod(row4[0]) == doctest::Approx(4.0));
  CHECK(std::stod(row4[3]) == doctest::Approx(4.0).epsilon(1e-12));  // ratio = d

  const CliResult im = run_cli("--out " + out.string() + " table imaging --sweep d_prime=1:4:1");
  CHECK(im.code == 0);
  const auto ilines = split_lines(read_file(out / "imaging.csv"));
  REQUIRE(ilines.size() == 5);
  const auto irow = split_csv_row(ilines[4]);  // d' = 4
  CHECK(std::stod(irow[1]) == doctest::Approx(8.0 / 5.0).epsilon(1e-9));  // 2d'/(d'+1)
  CHECK(std::stod(irow[2]) == doctest::Approx(1.0));

  const CliResult non = run_cli("--out " + out.string() +
                                " table nonorthogonal --sweep x=-0.5:0.5:0.25");
  CHECK(non.code == 0);
  CHECK(split_lines(read_file(out / "nonorthogonal.csv")).size() == 6);

  const CliResult enh = run_cli("--out " + out.string() + " table enhancement");
  CHECK(enh.code == 0);
  const auto elines = split_lines(read_file(out / "enhancement.csv"));
  REQUIRE(elines.size() == 9);
  // Uniform weights (a = 1): separable costs exactly twice the entangled sum.
  const auto erow = split_csv_row(elines[1]);
  CHECK(std::stod(erow[4]) == doctest::Approx(2.0).epsilon(1e-9));

  CHECK(run_cli("--out " + out.string() + " table sum-bounds --sweep x=1:8:1").code == 2);
  CHECK(run_cli("--out " + out.string() + " table bogus-family").code == 2);
}

TEST_CASE("command-line parse errors and help") {
  CHECK(run_cli("").code == 2);               // a subcommand is required
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("--help").out.find("run") != std::string::npos);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("run").code == 2);            // missing scenario argument
}

TEST_CASE("scenario text representation is canonical and round-trips") {
  const qsn::Scenario s = qsn::parse_scenario_text(kGhzPairScenario);
  const std::string emitted = qsn::emit_scenario(s);
  const qsn::Scenario s2 = qsn::parse_scenario_text(emitted);
  CHECK(qsn::emit_scenario(s2) == emitted);
  CHECK(s2.mu == 1);
  CHECK(s2.output == "ghz_pair");
  CHECK(s2.probe.family == "ghz");
  CHECK(s2.sensors.size() == 2);
  CHECK(s2.task.kind == "single_function");

  // Unknown keys are rejected everywhere, not just at the top level.
  CHECK_THROWS_AS(qsn::parse_scenario_text(R"({
    "mu": 1,
    "network": {"parameters": [], "sensors": [{"type": "bosonic", "n_max": 1, "bogus": 2}]},
    "output": "x",
    "probe": {"family": "ghz", "n": 1},
    "task": {"kind": "estimate_phi"}
  })"),
                  qsn::SchemaError);
}
