#include "qjd/experiment.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace qjd;
namespace fs = std::filesystem;

namespace {

const fs::path kData = QJD_TEST_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qjd-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::vector<std::string>> csv_cells(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

// Same shape and text, numbers equal to within tol (backends differ in the last bits).
void expect_csv_close(const std::string& got, const std::string& want, double tol, const std::string& what) {
  const auto a = csv_cells(got);
  const auto b = csv_cells(want);
  ASSERT_EQ(a.size(), b.size()) << what;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].size(), b[i].size()) << what << " row " << i;
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      if (a[i][j] == b[i][j]) continue;
      char* end_a = nullptr;
      char* end_b = nullptr;
      const double x = std::strtod(a[i][j].c_str(), &end_a);
      const double y = std::strtod(b[i][j].c_str(), &end_b);
      ASSERT_TRUE(*end_a == '\0' && *end_b == '\0' && !a[i][j].empty())
          << what << " row " << i << " col " << j << ": " << a[i][j] << " vs " << b[i][j];
      EXPECT_NEAR(x, y, tol * std::max(1.0, std::abs(y))) << what << " row " << i << " col " << j;
    }
  }
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QJD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig tiny(const fs::path& out) {
  ExperimentConfig c = load_experiment_config(kData / "tiny.conf");
  c.output_dir = out;
  return c;
}

}  // namespace

TEST(FlatConfig, ParsingRules) {
  const FlatConfig f = FlatConfig::parse_string(
      "# comment\n"
      "\n"
      "a.b = 1.5   # trailing\n"
      "list = x, y ,z\n"
      "flag = true\n"
      "n = -3\n");
  EXPECT_EQ(f.get_double("a.b"), 1.5);
  EXPECT_EQ(f.get_list("list"), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(f.get_bool("flag"), true);
  EXPECT_EQ(f.get_int("n"), -3);
  EXPECT_FALSE(f.get_string("missing"));
  EXPECT_THROW(FlatConfig::parse_string("a = 1\na = 2\n"), ParseError);
  EXPECT_THROW(FlatConfig::parse_string("no equals sign\n"), ParseError);
  EXPECT_THROW(FlatConfig::parse_string("x = abc\n").get_double("x"), ParseError);
  EXPECT_THROW(FlatConfig::parse_string("x = 1.5\n").get_int("x"), ParseError);
  EXPECT_THROW(FlatConfig::parse_string("x = -1\n").get_u64("x"), ParseError);
  EXPECT_THROW(FlatConfig::parse_string("x = yes please\n").get_bool("x"), ParseError);
  EXPECT_THROW(FlatConfig::load("/nonexistent/qjd.conf"), Error);
  try {
    (void)FlatConfig::parse_string("a = 1\nbroken\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(ExperimentConfig, UnknownKeyIsRejected) {
  EXPECT_THROW(parse_experiment_config(FlatConfig::parse_string("solver.max_iter = 4\n")), ParseError);
  EXPECT_THROW(parse_experiment_config(FlatConfig::parse_string("methods = QJD, QJD\n")), ValidationError);
  EXPECT_THROW(parse_experiment_config(FlatConfig::parse_string("methods = QJX\n")), ValidationError);
  EXPECT_THROW(parse_experiment_config(FlatConfig::parse_string("hamiltonian.kind = heisenberg\n")), ValidationError);
  EXPECT_THROW(parse_experiment_config(FlatConfig::parse_string("reference.sigma = 0\n")), ValidationError);
}

TEST(ExperimentConfig, RoundTripsThroughFlatForm) {
  std::vector<ExperimentConfig> configs;
  for (const auto& name : scenario_names()) configs.push_back(scenario_config(name));
  ExperimentConfig custom = tiny("somewhere");
  custom.sqdiag.shots = ShotSampling{5000, 9};
  custom.solver.use_quantum_kernels = KernelMode::Off;
  custom.reference.kind = ReferenceKind::Basis;
  custom.reference.index = 3;
  configs.push_back(custom);
  for (const auto& c : configs) {
    const FlatConfig flat = to_flat_config(c);
    const FlatConfig again = to_flat_config(parse_experiment_config(FlatConfig::parse_string(flat.to_text())));
    EXPECT_EQ(flat.to_text(), again.to_text()) << c.name;
  }
}

TEST(ExperimentConfig, OverridesApply) {
  ExperimentConfig c = scenario_config("dd-1min");
  Overrides o;
  o.seed = 5;
  o.sigma = 3.0;
  o.delta = 1e-6;
  o.max_iterations = 7;
  o.shots = 1000;
  o.output_dir = "elsewhere";
  apply_overrides(c, o);
  EXPECT_EQ(c.dd.seed, 5u);
  EXPECT_EQ(c.reference.sigma, 3.0);
  EXPECT_EQ(c.solver.delta, 1e-6);
  EXPECT_EQ(c.solver.max_iterations, 7);
  ASSERT_TRUE(c.sqdiag.shots);
  EXPECT_EQ(c.sqdiag.shots->count, 1000u);
  EXPECT_EQ(c.solver_for("SBQJD").sqdiag_first_iteration->shots->count, 1000u);
  EXPECT_EQ(c.output_dir, fs::path("elsewhere"));
  o = Overrides{};
  o.shots = 0;
  apply_overrides(c, o);
  EXPECT_FALSE(c.sqdiag.shots);
  o = Overrides{};
  o.max_iterations = 0;
  EXPECT_THROW(apply_overrides(c, o), ValidationError);
}

TEST(Scenarios, PinnedSettings) {
  const ExperimentConfig a = scenario_config("dd-4min-4peak");
  EXPECT_EQ(a.dd.n_qubits, 8);
  EXPECT_EQ(a.dd.minima_positions, (std::vector<Index>{1, 85, 170, 256}));
  EXPECT_EQ(a.reference.centers, (std::vector<Index>{0, 84, 169, 255}));
  EXPECT_EQ(a.dd.seed, kDefaultDdSeed);
  EXPECT_EQ(a.solver.delta, 1e-8);
  EXPECT_EQ(a.sqdiag.n, 3);
  const ExperimentConfig i = scenario_config("ising-nondd");
  EXPECT_EQ(i.ising.n_sites, 12);
  EXPECT_EQ(i.ising.g, 1.0);
  EXPECT_TRUE(i.reference.centers_at_diagonal_minimum);
  EXPECT_THROW(scenario_config("dd-9min"), ValidationError);
}

TEST(Scenarios, WaterNeedsItsDataFile) {
  ::unsetenv(kWaterFileEnv);
  const ExperimentConfig w = scenario_config("water");
  EXPECT_TRUE(w.pauli_path.empty());
  EXPECT_THROW(build_instance(w), DataRequiredError);
  Overrides o;
  o.pauli_file = "/nonexistent/water.pauli";
  EXPECT_THROW(cmd_reproduce("water", o), DataRequiredError);
}

TEST(Instance, ArgminCenterAndBitstringChecks) {
  ExperimentConfig c = scenario_config("ising-dd");
  c.ising.n_sites = 4;
  const Instance inst = build_instance(c);
  // Diag(H) is minimized by the all-up state (index 0) when J, h > 0.
  EXPECT_EQ(inst.reference_center, 0);
  ASSERT_TRUE(inst.ground);

  ExperimentConfig bad = tiny("unused");
  bad.reference.kind = ReferenceKind::HfSpread;
  bad.reference.bitstring = "0101";
  EXPECT_THROW(build_instance(bad), ValidationError);
}

TEST(Outputs, TraceCsvLayout) {
  ConvergenceTrace t;
  IterationRecord r;
  r.iteration = 1;
  r.ritz_value = 0.5;
  r.residual_norm = 0.25;
  r.subspace_dim = 1;
  r.cumulative_pauli_terms = 12;
  t.records.push_back(r);
  r.iteration = 2;
  r.energy_error = 1e-3;
  r.rejected = true;
  t.records.push_back(r);
  EXPECT_EQ(trace_csv(t),
            "iter,ritz_value,energy_error,residual_norm,subspace_dim,cumulative_pauli_terms,rejected\n"
            "1,0.5,,0.25,1,12,0\n"
            "2,0.5,0.001,0.25,1,12,1\n");
}

TEST(Outputs, CompareMatchesGoldenFiles) {
  const fs::path out = scratch_dir("golden");
  const auto runs = cmd_compare(tiny(out));
  ASSERT_EQ(runs.size(), 6u);
  for (const char* file : {"summary.csv", "energy_error.csv", "pauli_terms.csv", "convergence_rate.csv"}) {
    expect_csv_close(slurp(out / file), slurp(kData / "golden" / file), 1e-8, file);
  }
  expect_csv_close(slurp(out / "QJD" / "trace.csv"), slurp(kData / "golden" / "QJD_trace.csv"), 1e-8, "QJD trace");
}

TEST(Outputs, CompareIsDeterministic) {
  const fs::path a = scratch_dir("det-a");
  const fs::path b = scratch_dir("det-b");
  ExperimentConfig ca = tiny(a);
  ExperimentConfig cb = tiny(b);
  ca.sqdiag.shots = cb.sqdiag.shots = ShotSampling{2000, 3};
  (void)cmd_compare(ca);
  (void)cmd_compare(cb);
  for (const char* file : {"summary.csv", "energy_error.csv", "pauli_terms.csv", "convergence_rate.csv",
                           "SBQJD/trace.csv", "QD_residue/trace.csv"}) {
    EXPECT_EQ(slurp(a / file), slurp(b / file)) << file;
  }
}

TEST(Outputs, ManifestAndSummaryContents) {
  const fs::path out = scratch_dir("manifest");
  (void)cmd_compare(tiny(out));
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  for (const char* key : {"name", "command", "config", "hamiltonian", "reference", "oracle_energy", "tolerances",
                          "dense_eigensolver", "methods"}) {
    EXPECT_TRUE(m.contains(key)) << key;
  }
  EXPECT_EQ(m["command"], "compare");
  EXPECT_EQ(m["hamiltonian"]["n_qubits"], 3);
  EXPECT_EQ(m["hamiltonian"]["seed"], 7);
  EXPECT_EQ(m["methods"].size(), 6u);
  EXPECT_EQ(m["config"]["dd.minima"], "1, 6");
  for (const auto& method : m["methods"]) EXPECT_TRUE(method.contains("accounting_rule"));

  const auto s = nlohmann::json::parse(slurp(out / "SBQJD" / "summary.json"));
  EXPECT_EQ(s["label"], "SBQJD");
  EXPECT_TRUE(s["converged"].get<bool>());
  EXPECT_EQ(s["sqdiag"]["n"], 2);
  EXPECT_EQ(s["sqdiag_event"]["selected_indices"].size(), 2u);
  const auto jd = nlohmann::json::parse(slurp(out / "JD" / "summary.json"));
  EXPECT_FALSE(jd["pauli_accounting"].get<bool>());
}

TEST(Outputs, GenerateWritesHamiltonian) {
  const fs::path out = scratch_dir("generate");
  const fs::path file = cmd_generate(tiny(out));
  EXPECT_EQ(file.filename(), "hamiltonian.qjdm");
  const DenseHermitian m = read_dense_matrix(file);
  DdMatrixSpec spec{3, {1, 6}, 0.125, 7};
  EXPECT_EQ(m, build_dd_matrix(spec));
  ExperimentConfig ising = scenario_config("ising-dd");
  ising.output_dir = out / "ising";
  ising.ising.n_sites = 3;
  EXPECT_EQ(load_pauli_hamiltonian(cmd_generate(ising)).size(), 9u);
}

TEST(Outputs, RunWritesOneMethod) {
  const fs::path out = scratch_dir("run");
  const MethodOutcome r = cmd_run(tiny(out), "QJD_D");
  EXPECT_TRUE(is_converged(r.result.trace.status));
  EXPECT_TRUE(fs::exists(out / "QJD_D" / "trace.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_FALSE(fs::exists(out / "QJD"));
}

TEST(Cli, ExitCodes) {
  const fs::path out = scratch_dir("cli");
  const std::string conf = (kData / "tiny.conf").string();
  EXPECT_EQ(run_cli("compare --config " + conf + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "summary.csv"));
  EXPECT_EQ(run_cli("run --config " + conf + " --method SBQJD_D --out " + (out / "one").string()), 0);
  EXPECT_EQ(run_cli("generate --config " + conf + " --out " + (out / "gen").string()), 0);
  EXPECT_EQ(run_cli("run --config " + conf + " --method NOPE --out " + out.string()), 2);
  EXPECT_EQ(run_cli("compare --config " + conf + " --max-iter 0 --out " + out.string()), 2);
  EXPECT_EQ(run_cli("compare --config /nonexistent.conf"), 2);
  EXPECT_EQ(run_cli("reproduce not-a-scenario"), 2);
  EXPECT_EQ(run_cli("bogus"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("reproduce water --pauli-file /nonexistent/water.pauli --out " + out.string()), 3);
}

TEST(Scenarios, WaterPipelineRunsOnASuppliedFile) {
  // Any 10-qubit Pauli file exercises the file-driven path end to end.
  const fs::path dir = scratch_dir("water");
  const fs::path file = dir / "stand-in.pauli";
  save_pauli_hamiltonian(file, build_ising({10, 1.0, 0.4, 0.2}));
  Overrides o;
  o.pauli_file = file;
  o.output_dir = dir / "out";
  o.max_iterations = 8;
  const auto runs = cmd_reproduce("water", o);
  ASSERT_EQ(runs.size(), 6u);
  for (const auto& r : runs) EXPECT_NE(r.result.trace.status, TerminalStatus::Failed) << r.label << r.result.trace.message;
  const auto m = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  EXPECT_EQ(m["hamiltonian"]["n_qubits"], 10);
  EXPECT_EQ(m["reference"]["bitstring"], "0011110011");
  EXPECT_TRUE(fs::exists(dir / "out" / "config.conf"));
}
