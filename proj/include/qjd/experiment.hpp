#pragma once

// Experiment harness: config files, pinned scenarios, and the generate / run /
// compare / reproduce commands with their CSV and JSON outputs.

#include "qjd/config.hpp"
#include "qjd/models.hpp"
#include "qjd/solvers.hpp"
#include "qjd/state_prep.hpp"
#include "qjd/sqdiag.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qjd {

enum class HamiltonianKind { Dd, Ising, PauliFile };
enum class ReferenceKind { Gaussian, HfSpread, Basis };

struct ReferenceConfig {
  ReferenceKind kind = ReferenceKind::Gaussian;
  std::vector<Index> centers{0};
  bool centers_at_diagonal_minimum = false;  // `reference.centers = argmin`
  double sigma = kDefaultGaussianSigma;
  std::string bitstring;
  double spread_fraction = 0.1;
  Index index = 0;
};

struct ExperimentConfig {
  std::string name = "custom";
  HamiltonianKind hamiltonian = HamiltonianKind::Dd;
  DdMatrixSpec dd;
  IsingSpec ising;
  std::filesystem::path pauli_path;
  ReferenceConfig reference;
  std::vector<std::string> methods{"QJD", "SBQJD", "QD_residue"};
  SolverConfig solver;    // method and preconditioner come from each label
  SqdiagSettings sqdiag;  // used by SB-prefixed labels
  bool oracle = true;
  std::filesystem::path output_dir = "qjd-out";

  /// Labels unique and parseable, solver fields valid.
  void validate() const;
  /// Solver configuration for one label, with the shared settings applied.
  SolverConfig solver_for(const std::string& label) const;
};

/// Every recognized key, for documentation and strict parsing.
const std::vector<std::string>& experiment_config_keys();

ExperimentConfig parse_experiment_config(const FlatConfig& flat);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Canonical flat form; parse_experiment_config(to_flat_config(c)) == c.
FlatConfig to_flat_config(const ExperimentConfig& c);

struct Overrides {
  std::optional<std::uint64_t> seed;  // dd.seed
  std::optional<double> sigma;
  std::optional<double> delta;
  std::optional<int> max_iterations;
  std::optional<std::uint64_t> shots;  // 0 selects exact SQDiag ranking
  std::optional<std::filesystem::path> pauli_file;
  std::optional<std::filesystem::path> output_dir;
};
void apply_overrides(ExperimentConfig& c, const Overrides& o);

/// Environment variable naming the 10-qubit water Pauli file.
inline constexpr const char* kWaterFileEnv = "QJD_WATER_FILE";

std::vector<std::string> scenario_names();
/// Pinned configuration; the water scenario takes its file from
/// QJD_WATER_FILE when set.
ExperimentConfig scenario_config(const std::string& name);

struct Instance {
  HermitianOperator h;
  StateVector reference;
  std::optional<GroundPair> ground;
  Index reference_center = -1;  // resolved argmin center, when used
};

/// Throws DataRequiredError when a Pauli file is needed and missing.
Instance build_instance(const ExperimentConfig& c);

struct MethodOutcome {
  std::string label;
  SolverConfig config;
  SolverResult result;
};

/// Writes the Hamiltonian (dense binary for dd, Pauli text otherwise) and a
/// manifest; returns the Hamiltonian file path.
std::filesystem::path cmd_generate(const ExperimentConfig& c);
MethodOutcome cmd_run(const ExperimentConfig& c, const std::string& label);
std::vector<MethodOutcome> cmd_compare(const ExperimentConfig& c);
std::vector<MethodOutcome> cmd_reproduce(const std::string& scenario, const Overrides& o);

/// Runs every configured method on one instance; up to `threads` at once.
std::vector<MethodOutcome> run_methods(const ExperimentConfig& c, const Instance& inst, unsigned threads);

/// QJD_NUM_THREADS when set (>= 1), otherwise the hardware concurrency.
unsigned worker_threads();

// Output writers, exposed for tests.
std::string trace_csv(const ConvergenceTrace& trace);
std::string energy_error_csv(const std::vector<MethodOutcome>& runs);
std::string pauli_terms_csv(const std::vector<MethodOutcome>& runs);
std::string convergence_rate_csv(const std::vector<MethodOutcome>& runs, double oracle_energy);
std::string summary_csv(const std::vector<MethodOutcome>& runs);

}  // namespace qjd
