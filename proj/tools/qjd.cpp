// qjd: generate Hamiltonians, run solvers, compare methods, reproduce the
// pinned scenarios. Exit codes: 0 when every requested run reached a terminal
// status, 2 for invalid input, 3 when a required data file is missing, 1 for
// other I/O failures.

#include "qjd/experiment.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma;
  std::optional<double> delta;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> shots;
  std::string pauli_file;

  qjd::Overrides overrides() const {
    qjd::Overrides o;
    o.seed = seed;
    o.sigma = sigma;
    o.delta = delta;
    o.max_iterations = max_iter;
    o.shots = shots;
    if (!pauli_file.empty()) o.pauli_file = pauli_file;
    if (!out.empty()) o.output_dir = out;
    return o;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config) {
  if (needs_config) {
    cmd->add_option("--config", f.config, "Experiment config file (flat dotted keys)")
        ->required()
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--seed", f.seed, "Seed for the dd off-diagonal stream");
  cmd->add_option("--sigma", f.sigma, "Gaussian reference width");
  cmd->add_option("--delta", f.delta, "Shifted-inverse regularization floor");
  cmd->add_option("--max-iter", f.max_iter, "Iteration cap per method");
  cmd->add_option("--shots", f.shots, "SQDiag shot count (0 ranks by exact probabilities)");
  cmd->add_option("--pauli-file", f.pauli_file, "Pauli Hamiltonian file for pauli-file configs");
}

void print_summary(const std::vector<qjd::MethodOutcome>& runs) {
  std::printf("%-12s %-22s %6s %24s %12s\n", "method", "status", "iters", "final_energy", "pauli_terms");
  for (const auto& run : runs) {
    const auto& tr = run.result.trace;
    const std::size_t pauli = tr.records.empty() ? 0 : tr.records.back().cumulative_pauli_terms;
    std::printf("%-12s %-22s %6zu %24.15f %12zu\n", run.label.c_str(), std::string(qjd::to_string(tr.status)).c_str(),
                tr.records.size(), run.result.best.value, pauli);
    if (!tr.message.empty()) std::printf("  note: %s\n", tr.message.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobi-Davidson family ground-state solvers with statevector quantum kernels"};
  app.require_subcommand(1);

  CommonFlags gen_flags, run_flags, cmp_flags, rep_flags;
  auto* gen = app.add_subcommand("generate", "Write the configured Hamiltonian and a manifest");
  add_common(gen, gen_flags, true);

  auto* run = app.add_subcommand("run", "Run one method and write its trace");
  add_common(run, run_flags, true);
  std::string method;
  run->add_option("--method", method, "Method label, e.g. QJD, SBQJD_D, QD_residue")->required();

  auto* cmp = app.add_subcommand("compare", "Run every configured method on one instance");
  add_common(cmp, cmp_flags, true);

  auto* rep = app.add_subcommand("reproduce", "Run a pinned scenario end to end");
  add_common(rep, rep_flags, false);
  std::string scenario;
  rep->add_option("scenario", scenario, "Scenario name")->required()->check(CLI::IsMember(qjd::scenario_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return 2;
  }

  try {
    if (*rep) {
      const auto runs = qjd::cmd_reproduce(scenario, rep_flags.overrides());
      print_summary(runs);
      return 0;
    }
    CommonFlags& flags = *gen ? gen_flags : (*run ? run_flags : cmp_flags);
    qjd::ExperimentConfig config = qjd::load_experiment_config(flags.config);
    qjd::apply_overrides(config, flags.overrides());
    if (*gen) {
      const auto file = qjd::cmd_generate(config);
      std::printf("wrote %s\n", file.string().c_str());
    } else if (*run) {
      print_summary({qjd::cmd_run(config, method)});
    } else {
      print_summary(qjd::cmd_compare(config));
    }
    return 0;
  } catch (const qjd::DataRequiredError& e) {
    std::fprintf(stderr, "qjd: data file required: %s\n", e.what());
    return 3;
  } catch (const qjd::ValidationError& e) {
    std::fprintf(stderr, "qjd: invalid input: %s\n", e.what());
    return 2;
  } catch (const qjd::ParseError& e) {
    std::fprintf(stderr, "qjd: invalid input: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qjd: %s\n", e.what());
    return 1;
  }
}
