#pragma once

// Davidson-type ground-state solvers. JD and QJD share the Jacobi-Davidson
// correction t = eps * P^-1 rv - P^-1 r with P^-1 either the regularized
// shifted inverse (H - E')^-1 or the diagonal surrogate M^-1; QJD evaluates
// eps and t through the statevector kernels. QD expands with r, M^-1 r or
// (H - E')^-1 r and has no eps term.

#include "qjd/core.hpp"
#include "qjd/operator.hpp"
#include "qjd/sqdiag.hpp"
#include "qjd/subspace.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qjd {

inline constexpr double kDefaultRegularization = 1e-8;
inline constexpr double kEpsilonDenominatorTol = 1e-14;
/// Largest register on which kernel mode is used when left on auto; kernel
/// mode works with dense Pauli decompositions of inverse operators.
inline constexpr int kAutoKernelQubitLimit = 6;
/// Largest register on which the Pauli-term accounting decomposes dense
/// inverse operators every iteration.
inline constexpr int kPauliAccountingQubitLimit = 10;

enum class SolverMethod { JD, QJD, QD };
enum class PreconditionerKind { FullShiftedInverse, DiagonalShiftedInverse, ResidueIdentity };
enum class KernelMode { Auto, On, Off };

std::string_view to_string(SolverMethod m);
std::string_view to_string(PreconditionerKind k);
std::string_view to_string(KernelMode k);
KernelMode parse_kernel_mode(std::string_view s);

struct SolverConfig {
  SolverMethod method = SolverMethod::QJD;
  PreconditionerKind preconditioner = PreconditionerKind::FullShiftedInverse;
  KernelMode use_quantum_kernels = KernelMode::Auto;  // QJD only; JD is always direct
  std::optional<SqdiagSettings> sqdiag_first_iteration;
  int max_iterations = 300;
  ConvergenceCriteria convergence;
  double delta = kDefaultRegularization;
  double reject_tol = kDefaultRejectTol;
  KernelMode pauli_accounting = KernelMode::Auto;  // auto: on up to kPauliAccountingQubitLimit

  /// Throws ValidationError on out-of-range fields.
  void validate() const;
};

/// Method label as used in output files, e.g. "SBQJD_D" or "QD_residue".
std::string method_label(const SolverConfig& c);
/// Inverse of method_label over {JD, QJD, QD} x {"", _D, _residue} with an
/// optional SB prefix; the residue suffix is reserved for QD. "SBQD" is the
/// sample-boosted residue variant.
SolverConfig config_from_label(std::string_view label);

/// 1 / (lambda - shift), with gaps smaller than delta replaced by sign * delta
/// (a zero gap counts as positive).
double regularized_reciprocal(double gap, double delta);

/// (H - shift)^-1 x through the cached eigensystem of H.
StateVector shifted_inverse_apply(const HermitianOperator& h, double shift, const StateVector& x, double delta);

/// Diagonal of M^-1 with M = Diag(H) - shift, floored at delta.
RealVector diagonal_inverse(const HermitianOperator& h, double shift, double delta);

class IllConditionedEpsilonError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct Correction {
  StateVector t;
  double epsilon = 0.0;  // 0 for corrections without an eps term
};

/// Throws IllConditionedEpsilonError when |<rv|P^-1|rv>| < 1e-14.
Correction jd_correction_full(const HermitianOperator& h, const RitzPair& pair, const StateVector& r, double delta,
                              bool use_kernels = false);
Correction jd_correction_diag(const HermitianOperator& h, const RitzPair& pair, const StateVector& r, double delta,
                              bool use_kernels = false);
Correction qd_correction(const HermitianOperator& h, const RitzPair& pair, const StateVector& r, PreconditionerKind kind,
                         double delta);

struct ProjectedCorrection {
  StateVector t;
  bool rank_deficient = false;
  double equation_residual = 0.0;  // |(I - P)(H - E')(I - P) t + r|
};

/// Least-squares solution of the correction equation on the orthogonal
/// complement of rv (dimension <= 1024).
ProjectedCorrection solve_correction_projected(const HermitianOperator& h, const RitzPair& pair, const StateVector& r);

/// 2 Re<x'|H|x>.
double gateaux_rayleigh_differential(const HermitianOperator& h, const StateVector& x, const StateVector& x_prime);

enum class TerminalStatus { ConvergedByResidual, ConvergedByEnergy, Stagnated, MaxIterations, Failed };
std::string_view to_string(TerminalStatus s);
inline bool is_converged(TerminalStatus s) {
  return s == TerminalStatus::ConvergedByResidual || s == TerminalStatus::ConvergedByEnergy;
}

struct IterationRecord {
  int iteration = 0;
  double ritz_value = 0.0;
  std::optional<double> energy_error;
  double residual_norm = 0.0;
  Index subspace_dim = 0;
  std::size_t cumulative_pauli_terms = 0;
  bool rejected = false;
  bool epsilon_fallback = false;  // ill-conditioned eps, t = r used instead
};

struct SqdiagEvent {
  std::vector<Index> selected_indices;
  double energy = 0.0;
  bool shortfall = false;
};

struct ConvergenceTrace {
  std::vector<IterationRecord> records;
  TerminalStatus status = TerminalStatus::MaxIterations;
  std::string message;              // failure or fallback details
  std::optional<SqdiagEvent> sqdiag;  // pre-iteration reference refinement
  bool used_quantum_kernels = false;
  bool pauli_accounting = false;
  std::string accounting_rule;

  /// Number of Rayleigh-Ritz iterations when converged.
  std::optional<int> iterations_to_convergence() const;
};

struct SolverResult {
  RitzPair best;  // lowest Ritz value seen
  ConvergenceTrace trace;
};

/// Human-readable statement of what the cumulative Pauli-term column counts.
std::string accounting_rule(const SolverConfig& config);

/// Never throws for numerical failures; they end the trace with status Failed.
/// Throws ValidationError/ShapeError for inconsistent inputs.
SolverResult run_solver(const HermitianOperator& h, const StateVector& reference, const SolverConfig& config,
                        std::optional<double> oracle_energy = std::nullopt);

/// rate_i = e_i / e_{i-1} for i >= 2, with 0 where e_{i-1} < 1e-15.
std::vector<double> convergence_rate(const std::vector<double>& energy_errors);
std::vector<double> convergence_rate(const ConvergenceTrace& trace, double oracle_energy);

}  // namespace qjd
