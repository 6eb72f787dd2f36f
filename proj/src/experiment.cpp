#include "qjd/experiment.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

namespace qjd {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Fixed 17-significant-digit form for CSV output.
std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string_view to_string(HamiltonianKind k) {
  switch (k) {
    case HamiltonianKind::Dd: return "dd";
    case HamiltonianKind::Ising: return "ising";
    case HamiltonianKind::PauliFile: return "pauli-file";
  }
  return "?";
}

HamiltonianKind parse_hamiltonian_kind(const std::string& s) {
  if (s == "dd") return HamiltonianKind::Dd;
  if (s == "ising") return HamiltonianKind::Ising;
  if (s == "pauli-file") return HamiltonianKind::PauliFile;
  throw ValidationError("hamiltonian.kind must be dd|ising|pauli-file, got \"" + s + "\"");
}

std::string_view to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::Gaussian: return "gaussian";
    case ReferenceKind::HfSpread: return "hf_spread";
    case ReferenceKind::Basis: return "basis";
  }
  return "?";
}

ReferenceKind parse_reference_kind(const std::string& s) {
  if (s == "gaussian") return ReferenceKind::Gaussian;
  if (s == "hf_spread") return ReferenceKind::HfSpread;
  if (s == "basis") return ReferenceKind::Basis;
  throw ValidationError("reference.kind must be gaussian|hf_spread|basis, got \"" + s + "\"");
}

Index parse_index(const std::string& s, const char* key) {
  Index v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(std::string(key) + " expects integers, got \"" + s + "\"");
  }
  return v;
}

std::vector<std::string> index_strings(const std::vector<Index>& v) {
  std::vector<std::string> out;
  for (Index i : v) out.push_back(std::to_string(i));
  return out;
}

int to_int(std::int64_t v, const char* key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ValidationError(std::string(key) + " is out of range");
  }
  return static_cast<int>(v);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
}

ordered_json solver_json(const MethodOutcome& run) {
  ordered_json j;
  j["label"] = run.label;
  j["method"] = to_string(run.config.method);
  j["preconditioner"] = to_string(run.config.preconditioner);
  j["quantum_kernels"] = run.result.trace.used_quantum_kernels;
  j["pauli_accounting"] = run.result.trace.pauli_accounting;
  j["accounting_rule"] = run.result.trace.accounting_rule;
  if (run.config.sqdiag_first_iteration) {
    const auto& sq = *run.config.sqdiag_first_iteration;
    j["sqdiag"] = {{"n", sq.n}, {"mode", sq.shots ? "shots" : "exact"}};
    if (sq.shots) {
      j["sqdiag"]["shots"] = sq.shots->count;
      j["sqdiag"]["seed"] = sq.shots->seed;
    }
  }
  return j;
}

ordered_json summary_json(const MethodOutcome& run, const ExperimentConfig& c) {
  const ConvergenceTrace& tr = run.result.trace;
  ordered_json j = solver_json(run);
  j["status"] = to_string(tr.status);
  j["converged"] = is_converged(tr.status);
  j["iterations"] = tr.records.size();
  if (const auto it = tr.iterations_to_convergence()) {
    j["iterations_to_convergence"] = *it;
  } else {
    j["iterations_to_convergence"] = nullptr;
  }
  if (!tr.records.empty()) {
    const IterationRecord& last = tr.records.back();
    j["final_energy"] = run.result.best.value;
    j["last_ritz_value"] = last.ritz_value;
    j["last_residual_norm"] = last.residual_norm;
    if (last.energy_error) j["last_energy_error"] = *last.energy_error;
    j["cumulative_pauli_terms"] = last.cumulative_pauli_terms;
    j["subspace_dim"] = last.subspace_dim;
  }
  int fallbacks = 0;
  for (const auto& r : tr.records) fallbacks += r.epsilon_fallback ? 1 : 0;
  j["epsilon_fallbacks"] = fallbacks;
  if (tr.sqdiag) {
    j["sqdiag_event"] = {{"selected_indices", tr.sqdiag->selected_indices},
                         {"energy", tr.sqdiag->energy},
                         {"shortfall", tr.sqdiag->shortfall}};
  }
  j["message"] = tr.message;
  j["config"] = to_flat_config(c).values();
  return j;
}

ordered_json manifest_json(const ExperimentConfig& c, const Instance* inst, const std::string& command,
                           const std::vector<MethodOutcome>& runs) {
  ordered_json j;
  j["name"] = c.name;
  j["command"] = command;
  j["config"] = to_flat_config(c).values();
  ordered_json h;
  h["kind"] = to_string(c.hamiltonian);
  if (inst) {
    h["n_qubits"] = inst->h.n_qubits();
    h["dim"] = inst->h.dim();
  }
  if (c.hamiltonian == HamiltonianKind::Dd) h["seed"] = c.dd.seed;
  if (c.hamiltonian == HamiltonianKind::PauliFile) h["path"] = c.pauli_path.string();
  j["hamiltonian"] = h;
  ordered_json ref;
  ref["kind"] = to_string(c.reference.kind);
  if (c.reference.kind == ReferenceKind::Gaussian) {
    ref["sigma"] = c.reference.sigma;
    if (c.reference.centers_at_diagonal_minimum) {
      ref["centers"] = "argmin of Diag(H)";
      if (inst) ref["resolved_center"] = inst->reference_center;
    } else {
      ref["centers"] = c.reference.centers;
    }
  } else if (c.reference.kind == ReferenceKind::HfSpread) {
    ref["bitstring"] = c.reference.bitstring;
    ref["spread_fraction"] = c.reference.spread_fraction;
  } else {
    ref["index"] = c.reference.index;
  }
  j["reference"] = ref;
  if (inst && inst->ground) j["oracle_energy"] = inst->ground->energy;
  j["tolerances"] = {{"residual_tol", c.solver.convergence.residual_tol},
                     {"energy_tol", c.solver.convergence.energy_tol},
                     {"gate", to_string(c.solver.convergence.gate)},
                     {"reject_tol", c.solver.reject_tol},
                     {"delta", c.solver.delta},
                     {"max_iterations", c.solver.max_iterations}};
  j["dense_eigensolver"] = dense_eigensolver_backend();
  ordered_json methods = ordered_json::array();
  for (const auto& run : runs) methods.push_back(solver_json(run));
  j["methods"] = methods;
  return j;
}

void write_run_outputs(const MethodOutcome& run, const ExperimentConfig& c) {
  const fs::path dir = c.output_dir / run.label;
  ensure_dir(dir);
  write_text(dir / "trace.csv", trace_csv(run.result.trace));
  write_json(dir / "summary.json", summary_json(run, c));
}

void add_scenario_common(std::string& text) {
  text +=
      "solver.max_iterations = 300\n"
      "solver.residual_tol = 1e-10\n"
      "solver.energy_tol = 1e-10\n"
      "solver.convergence = either\n"
      "solver.delta = 1e-8\n"
      "sqdiag.n = 3\n"
      "oracle = true\n";
}

}  // namespace

const std::vector<std::string>& experiment_config_keys() {
  static const std::vector<std::string> keys = {
      "name",
      "hamiltonian.kind",
      "dd.n_qubits",
      "dd.minima",
      "dd.off_diag_scale",
      "dd.seed",
      "ising.n_sites",
      "ising.J",
      "ising.h",
      "ising.g",
      "pauli.path",
      "reference.kind",
      "reference.centers",
      "reference.sigma",
      "reference.bitstring",
      "reference.spread_fraction",
      "reference.index",
      "methods",
      "solver.max_iterations",
      "solver.residual_tol",
      "solver.energy_tol",
      "solver.convergence",
      "solver.delta",
      "solver.reject_tol",
      "solver.use_quantum_kernels",
      "solver.pauli_accounting",
      "sqdiag.n",
      "sqdiag.shots",
      "sqdiag.seed",
      "oracle",
      "output.dir",
  };
  return keys;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ValidationError("config lists no methods");
  std::set<std::string> seen;
  for (const auto& label : methods) {
    if (!seen.insert(label).second) throw ValidationError("duplicate method label \"" + label + "\"");
    solver_for(label).validate();
  }
  if (sqdiag.n < 1) throw ValidationError("sqdiag.n must be >= 1");
  if (reference.kind == ReferenceKind::Gaussian && !(reference.sigma > 0.0)) {
    throw ValidationError("reference.sigma must be positive");
  }
  if (reference.kind == ReferenceKind::HfSpread && reference.bitstring.empty()) {
    throw ValidationError("reference.kind = hf_spread needs reference.bitstring");
  }
}

SolverConfig ExperimentConfig::solver_for(const std::string& label) const {
  const SolverConfig from_label = config_from_label(label);
  SolverConfig s = solver;
  s.method = from_label.method;
  s.preconditioner = from_label.preconditioner;
  s.sqdiag_first_iteration.reset();
  if (from_label.sqdiag_first_iteration) s.sqdiag_first_iteration = sqdiag;
  return s;
}

ExperimentConfig parse_experiment_config(const FlatConfig& f) {
  f.require_known(experiment_config_keys());
  ExperimentConfig c;
  if (auto v = f.get_string("name")) c.name = *v;
  if (auto v = f.get_string("hamiltonian.kind")) c.hamiltonian = parse_hamiltonian_kind(*v);

  if (auto v = f.get_int("dd.n_qubits")) c.dd.n_qubits = to_int(*v, "dd.n_qubits");
  if (auto v = f.get_list("dd.minima")) {
    c.dd.minima_positions.clear();
    for (const auto& s : *v) c.dd.minima_positions.push_back(parse_index(s, "dd.minima"));
  }
  if (auto v = f.get_double("dd.off_diag_scale")) c.dd.off_diag_scale = *v;
  if (auto v = f.get_u64("dd.seed")) c.dd.seed = *v;

  if (auto v = f.get_int("ising.n_sites")) c.ising.n_sites = to_int(*v, "ising.n_sites");
  if (auto v = f.get_double("ising.J")) c.ising.J = *v;
  if (auto v = f.get_double("ising.h")) c.ising.h = *v;
  if (auto v = f.get_double("ising.g")) c.ising.g = *v;
  if (auto v = f.get_string("pauli.path")) c.pauli_path = *v;

  if (auto v = f.get_string("reference.kind")) c.reference.kind = parse_reference_kind(*v);
  if (auto v = f.get_list("reference.centers")) {
    c.reference.centers.clear();
    if (v->size() == 1 && (*v)[0] == "argmin") {
      c.reference.centers_at_diagonal_minimum = true;
    } else {
      for (const auto& s : *v) c.reference.centers.push_back(parse_index(s, "reference.centers"));
    }
  }
  if (auto v = f.get_double("reference.sigma")) c.reference.sigma = *v;
  if (auto v = f.get_string("reference.bitstring")) c.reference.bitstring = *v;
  if (auto v = f.get_double("reference.spread_fraction")) c.reference.spread_fraction = *v;
  if (auto v = f.get_int("reference.index")) c.reference.index = *v;

  if (auto v = f.get_list("methods")) c.methods = *v;

  if (auto v = f.get_int("solver.max_iterations")) c.solver.max_iterations = to_int(*v, "solver.max_iterations");
  if (auto v = f.get_double("solver.residual_tol")) c.solver.convergence.residual_tol = *v;
  if (auto v = f.get_double("solver.energy_tol")) c.solver.convergence.energy_tol = *v;
  if (auto v = f.get_string("solver.convergence")) c.solver.convergence.gate = parse_convergence_gate(*v);
  if (auto v = f.get_double("solver.delta")) c.solver.delta = *v;
  if (auto v = f.get_double("solver.reject_tol")) c.solver.reject_tol = *v;
  if (auto v = f.get_string("solver.use_quantum_kernels")) c.solver.use_quantum_kernels = parse_kernel_mode(*v);
  if (auto v = f.get_string("solver.pauli_accounting")) c.solver.pauli_accounting = parse_kernel_mode(*v);

  if (auto v = f.get_int("sqdiag.n")) c.sqdiag.n = to_int(*v, "sqdiag.n");
  const auto shots = f.get_u64("sqdiag.shots");
  const auto seed = f.get_u64("sqdiag.seed");
  if (shots && *shots > 0) c.sqdiag.shots = ShotSampling{*shots, seed.value_or(ShotSampling{}.seed)};

  if (auto v = f.get_bool("oracle")) c.oracle = *v;
  if (auto v = f.get_string("output.dir")) c.output_dir = *v;
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  const ExperimentConfig c = parse_experiment_config(FlatConfig::load(path));
  if (c.hamiltonian == HamiltonianKind::PauliFile && c.pauli_path.is_relative() && !c.pauli_path.empty()) {
    ExperimentConfig resolved = c;
    resolved.pauli_path = path.parent_path() / c.pauli_path;
    return resolved;
  }
  return c;
}

FlatConfig to_flat_config(const ExperimentConfig& c) {
  FlatConfig f;
  f.set("name", c.name);
  f.set("hamiltonian.kind", std::string(to_string(c.hamiltonian)));
  switch (c.hamiltonian) {
    case HamiltonianKind::Dd:
      f.set("dd.n_qubits", std::to_string(c.dd.n_qubits));
      f.set("dd.minima", join(index_strings(c.dd.minima_positions)));
      f.set("dd.off_diag_scale", fmt_double(c.dd.off_diag_scale));
      f.set("dd.seed", std::to_string(c.dd.seed));
      break;
    case HamiltonianKind::Ising:
      f.set("ising.n_sites", std::to_string(c.ising.n_sites));
      f.set("ising.J", fmt_double(c.ising.J));
      f.set("ising.h", fmt_double(c.ising.h));
      f.set("ising.g", fmt_double(c.ising.g));
      break;
    case HamiltonianKind::PauliFile: f.set("pauli.path", c.pauli_path.string()); break;
  }
  f.set("reference.kind", std::string(to_string(c.reference.kind)));
  switch (c.reference.kind) {
    case ReferenceKind::Gaussian:
      f.set("reference.centers",
            c.reference.centers_at_diagonal_minimum ? "argmin" : join(index_strings(c.reference.centers)));
      f.set("reference.sigma", fmt_double(c.reference.sigma));
      break;
    case ReferenceKind::HfSpread:
      f.set("reference.bitstring", c.reference.bitstring);
      f.set("reference.spread_fraction", fmt_double(c.reference.spread_fraction));
      break;
    case ReferenceKind::Basis: f.set("reference.index", std::to_string(c.reference.index)); break;
  }
  f.set("methods", join(c.methods));
  f.set("solver.max_iterations", std::to_string(c.solver.max_iterations));
  f.set("solver.residual_tol", fmt_double(c.solver.convergence.residual_tol));
  f.set("solver.energy_tol", fmt_double(c.solver.convergence.energy_tol));
  f.set("solver.convergence", std::string(to_string(c.solver.convergence.gate)));
  f.set("solver.delta", fmt_double(c.solver.delta));
  f.set("solver.reject_tol", fmt_double(c.solver.reject_tol));
  f.set("solver.use_quantum_kernels", std::string(to_string(c.solver.use_quantum_kernels)));
  f.set("solver.pauli_accounting", std::string(to_string(c.solver.pauli_accounting)));
  f.set("sqdiag.n", std::to_string(c.sqdiag.n));
  f.set("sqdiag.shots", std::to_string(c.sqdiag.shots ? c.sqdiag.shots->count : 0));
  if (c.sqdiag.shots) f.set("sqdiag.seed", std::to_string(c.sqdiag.shots->seed));
  f.set("oracle", c.oracle ? "true" : "false");
  f.set("output.dir", c.output_dir.string());
  return f;
}

void apply_overrides(ExperimentConfig& c, const Overrides& o) {
  if (o.seed) c.dd.seed = *o.seed;
  if (o.sigma) c.reference.sigma = *o.sigma;
  if (o.delta) c.solver.delta = *o.delta;
  if (o.max_iterations) c.solver.max_iterations = *o.max_iterations;
  if (o.shots) {
    if (*o.shots == 0) {
      c.sqdiag.shots.reset();
    } else {
      const std::uint64_t seed = c.sqdiag.shots ? c.sqdiag.shots->seed : ShotSampling{}.seed;
      c.sqdiag.shots = ShotSampling{*o.shots, seed};
    }
  }
  if (o.pauli_file) c.pauli_path = *o.pauli_file;
  if (o.output_dir) c.output_dir = *o.output_dir;
  c.validate();
}

std::vector<std::string> scenario_names() {
  return {"dd-1min", "dd-2min", "dd-3min", "dd-2min-2peak", "dd-3min-3peak", "dd-4min-4peak", "ising-dd", "ising-nondd", "water"};
}

ExperimentConfig scenario_config(const std::string& name) {
  struct DdScenario {
    const char* name;
    const char* minima;   // 1-based diagonal positions set to 1
    const char* centers;  // 0-based Gaussian peaks
  };
  static const DdScenario dd[] = {
      {"dd-1min", "1", "0"},
      {"dd-2min", "1, 256", "0"},
      {"dd-3min", "1, 128, 256", "0"},
      {"dd-2min-2peak", "1, 256", "0, 255"},
      {"dd-3min-3peak", "1, 128, 256", "0, 127, 255"},
      {"dd-4min-4peak", "1, 85, 170, 256", "0, 84, 169, 255"},
  };
  std::string text = "name = " + name + "\n";
  bool found = false;
  for (const auto& s : dd) {
    if (name != s.name) continue;
    found = true;
    text += "hamiltonian.kind = dd\n"
            "dd.n_qubits = 8\n"
            "dd.minima = " + std::string(s.minima) + "\n"
            "dd.off_diag_scale = 0.00390625\n"
            "dd.seed = " + std::to_string(kDefaultDdSeed) + "\n"
            "reference.kind = gaussian\n"
            "reference.centers = " + std::string(s.centers) + "\n"
            "reference.sigma = 2\n"
            "methods = QJD, QJD_D, SBQJD, SBQJD_D, QD_residue, QD_D\n";
  }
  if (name == "ising-dd" || name == "ising-nondd") {
    found = true;
    text += "hamiltonian.kind = ising\n"
            "ising.n_sites = 12\n"
            "ising.J = 1.1\n"
            "ising.h = 0.9\n";
    text += name == "ising-dd" ? "ising.g = 0.01\n" : "ising.g = 1\n";
    text += "reference.kind = gaussian\n"
            "reference.centers = argmin\n"
            "reference.sigma = 2\n"
            "methods = QJD, QJD_D, SBQJD, SBQJD_D, QD_residue, SBQD\n";
  }
  if (name == "water") {
    found = true;
    text += "hamiltonian.kind = pauli-file\n"
            "reference.kind = hf_spread\n"
            "reference.bitstring = 0011110011\n"
            "reference.spread_fraction = 0.1\n"
            "methods = QJD, QJD_D, SBQJD, SBQJD_D, QD_residue, SBQD\n";
    if (const char* env = std::getenv(kWaterFileEnv); env && *env) text += "pauli.path = " + std::string(env) + "\n";
  }
  if (!found) {
    throw ValidationError("unknown scenario \"" + name + "\"; known: " + join(scenario_names()));
  }
  add_scenario_common(text);
  text += "output.dir = qjd-out/" + name + "\n";
  return parse_experiment_config(FlatConfig::parse_string(text));
}

Instance build_instance(const ExperimentConfig& c) {
  c.validate();
  std::optional<HermitianOperator> h;
  switch (c.hamiltonian) {
    case HamiltonianKind::Dd: h = HermitianOperator::from_dense(build_dd_matrix(c.dd)); break;
    case HamiltonianKind::Ising: h = HermitianOperator::from_pauli(build_ising(c.ising)); break;
    case HamiltonianKind::PauliFile:
      if (c.pauli_path.empty() || !fs::exists(c.pauli_path)) {
        throw DataRequiredError(
            "a Pauli Hamiltonian file is required" +
            (c.pauli_path.empty() ? std::string() : " (not found: " + c.pauli_path.string() + ")") +
            "; pass --pauli-file or set " + kWaterFileEnv +
            ". The water Hamiltonian is not bundled: data/README.md describes how to produce the 10-qubit file "
            "(PySCF, STO-3G, Jordan-Wigner, qubit tapering).");
      }
      h = HermitianOperator::from_pauli(load_pauli_hamiltonian(c.pauli_path));
      break;
  }
  const int n = h->n_qubits();
  Instance inst{*h, StateVector(), std::nullopt, -1};
  switch (c.reference.kind) {
    case ReferenceKind::Gaussian: {
      GaussianRefSpec spec;
      spec.n_qubits = n;
      spec.sigma = c.reference.sigma;
      if (c.reference.centers_at_diagonal_minimum) {
        Index at = 0;
        h->diagonal().minCoeff(&at);  // first minimum on ties
        inst.reference_center = at;
        spec.centers = {at};
      } else {
        spec.centers = c.reference.centers;
      }
      inst.reference = gaussian_reference(spec);
      break;
    }
    case ReferenceKind::HfSpread:
      if (static_cast<int>(c.reference.bitstring.size()) != n) {
        throw ValidationError("reference.bitstring has " + std::to_string(c.reference.bitstring.size()) +
                              " bits but the Hamiltonian acts on " + std::to_string(n) + " qubits");
      }
      inst.reference = hf_spread_reference(c.reference.bitstring, c.reference.spread_fraction);
      break;
    case ReferenceKind::Basis: inst.reference = basis_state(c.reference.index, n); break;
  }
  if (c.oracle) inst.ground = exact_ground_pair(inst.h);
  return inst;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("QJD_NUM_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<MethodOutcome> run_methods(const ExperimentConfig& c, const Instance& inst, unsigned threads) {
  std::vector<MethodOutcome> runs(c.methods.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    runs[i].label = c.methods[i];
    runs[i].config = c.solver_for(c.methods[i]);
  }
  const std::optional<double> oracle = inst.ground ? std::optional<double>(inst.ground->energy) : std::nullopt;
  auto work = [&](std::size_t i) {
    try {
      runs[i].result = run_solver(inst.h, inst.reference, runs[i].config, oracle);
    } catch (const std::exception& e) {
      runs[i].result.trace.status = TerminalStatus::Failed;
      runs[i].result.trace.message = e.what();
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(runs.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < runs.size(); ++i) work(i);
    return runs;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < runs.size(); i = next++) work(i);
    });
  }
  pool.clear();
  return runs;
}

fs::path cmd_generate(const ExperimentConfig& c) {
  ensure_dir(c.output_dir);
  fs::path file;
  std::optional<Instance> inst;
  switch (c.hamiltonian) {
    case HamiltonianKind::Dd:
      file = c.output_dir / "hamiltonian.qjdm";
      write_dense_matrix(file, build_dd_matrix(c.dd));
      break;
    case HamiltonianKind::Ising:
      file = c.output_dir / "hamiltonian.pauli";
      save_pauli_hamiltonian(file, build_ising(c.ising));
      break;
    case HamiltonianKind::PauliFile: {
      if (c.pauli_path.empty() || !fs::exists(c.pauli_path)) (void)build_instance(c);  // raises DataRequiredError
      file = c.output_dir / "hamiltonian.pauli";
      save_pauli_hamiltonian(file, load_pauli_hamiltonian(c.pauli_path));
      break;
    }
  }
  ordered_json m = manifest_json(c, nullptr, "generate", {});
  m["hamiltonian"]["file"] = file.filename().string();
  write_json(c.output_dir / "manifest.json", m);
  return file;
}

MethodOutcome cmd_run(const ExperimentConfig& c, const std::string& label) {
  ExperimentConfig single = c;
  single.methods = {label};
  single.validate();
  const Instance inst = build_instance(single);
  std::vector<MethodOutcome> runs = run_methods(single, inst, 1);
  ensure_dir(single.output_dir);
  write_run_outputs(runs.front(), single);
  write_json(single.output_dir / "manifest.json", manifest_json(single, &inst, "run", runs));
  return runs.front();
}

std::vector<MethodOutcome> cmd_compare(const ExperimentConfig& c) {
  c.validate();
  const Instance inst = build_instance(c);
  (void)inst.h.eigensystem();  // shared by all runs; computed once before fan-out
  std::vector<MethodOutcome> runs = run_methods(c, inst, worker_threads());
  ensure_dir(c.output_dir);
  for (const auto& run : runs) write_run_outputs(run, c);
  write_text(c.output_dir / "energy_error.csv", energy_error_csv(runs));
  write_text(c.output_dir / "pauli_terms.csv", pauli_terms_csv(runs));
  if (inst.ground) write_text(c.output_dir / "convergence_rate.csv", convergence_rate_csv(runs, inst.ground->energy));
  write_text(c.output_dir / "summary.csv", summary_csv(runs));
  write_json(c.output_dir / "manifest.json", manifest_json(c, &inst, "compare", runs));
  return runs;
}

std::vector<MethodOutcome> cmd_reproduce(const std::string& scenario, const Overrides& o) {
  ExperimentConfig c = scenario_config(scenario);
  apply_overrides(c, o);
  std::vector<MethodOutcome> runs = cmd_compare(c);
  write_text(c.output_dir / "config.conf", to_flat_config(c).to_text());
  return runs;
}

std::string trace_csv(const ConvergenceTrace& trace) {
  std::string out = "iter,ritz_value,energy_error,residual_norm,subspace_dim,cumulative_pauli_terms,rejected\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.iteration) + ',' + csv_double(r.ritz_value) + ',' +
           (r.energy_error ? csv_double(*r.energy_error) : std::string()) + ',' + csv_double(r.residual_norm) + ',' +
           std::to_string(r.subspace_dim) + ',' + std::to_string(r.cumulative_pauli_terms) + ',' +
           (r.rejected ? "1" : "0") + '\n';
  }
  return out;
}

namespace {

template <typename Cell>
std::string wide_csv(const std::vector<MethodOutcome>& runs, std::size_t first_row, Cell cell) {
  std::string out = "iter";
  std::size_t rows = 0;
  for (const auto& run : runs) {
    out += ',' + run.label;
    rows = std::max(rows, run.result.trace.records.size());
  }
  out += '\n';
  for (std::size_t i = first_row; i < rows; ++i) {
    out += std::to_string(i + 1);
    for (const auto& run : runs) out += ',' + cell(run, i);
    out += '\n';
  }
  return out;
}

}  // namespace

std::string energy_error_csv(const std::vector<MethodOutcome>& runs) {
  return wide_csv(runs, 0, [](const MethodOutcome& run, std::size_t i) -> std::string {
    const auto& recs = run.result.trace.records;
    if (i >= recs.size() || !recs[i].energy_error) return {};
    return csv_double(*recs[i].energy_error);
  });
}

std::string pauli_terms_csv(const std::vector<MethodOutcome>& runs) {
  return wide_csv(runs, 0, [](const MethodOutcome& run, std::size_t i) -> std::string {
    const auto& recs = run.result.trace.records;
    if (i >= recs.size()) return {};
    return std::to_string(recs[i].cumulative_pauli_terms);
  });
}

std::string convergence_rate_csv(const std::vector<MethodOutcome>& runs, double oracle_energy) {
  std::vector<std::vector<double>> rates;
  for (const auto& run : runs) rates.push_back(convergence_rate(run.result.trace, oracle_energy));
  return wide_csv(runs, 1, [&](const MethodOutcome& run, std::size_t i) -> std::string {
    const auto k = static_cast<std::size_t>(&run - runs.data());
    if (i - 1 >= rates[k].size()) return {};
    return csv_double(rates[k][i - 1]);
  });
}

std::string summary_csv(const std::vector<MethodOutcome>& runs) {
  std::string out = "method,status,iterations,iterations_to_convergence,final_energy,energy_error,cumulative_pauli_terms\n";
  for (const auto& run : runs) {
    const ConvergenceTrace& tr = run.result.trace;
    out += run.label + ',' + std::string(to_string(tr.status)) + ',' + std::to_string(tr.records.size()) + ',';
    if (const auto it = tr.iterations_to_convergence()) out += std::to_string(*it);
    out += ',';
    if (!tr.records.empty()) {
      const IterationRecord& last = tr.records.back();
      out += csv_double(run.result.best.value) + ',';
      if (last.energy_error) out += csv_double(*last.energy_error);
      out += ',' + std::to_string(last.cumulative_pauli_terms);
    } else {
      out += ",,";
    }
    out += '\n';
  }
  return out;
}

}  // namespace qjd
