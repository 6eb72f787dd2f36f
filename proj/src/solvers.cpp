#include "qjd/solvers.hpp"

#include "qjd/kernels.hpp"
#include "qjd/pauli.hpp"

#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace qjd {

namespace {

void require_pair_shapes(const HermitianOperator& h, const RitzPair& pair, const StateVector& r) {
  if (pair.vector.size() != h.dim() || r.size() != h.dim()) {
    throw ShapeError("correction: Ritz vector, residual and operator dimensions differ");
  }
}

void require_epsilon_denominator(double den) {
  if (!(std::abs(den) >= kEpsilonDenominatorTol)) {
    std::ostringstream msg;
    msg << "ill-conditioned eps: <rv|P^-1|rv> = " << den;
    throw IllConditionedEpsilonError(msg.str());
  }
}

// B x via the LCU circuit on x/|x|, rescaled by s sqrt(p) |x|.
StateVector lcu_times(const PauliSum& b, const StateVector& x) {
  const double xn = x.norm();
  if (xn == 0.0) return StateVector::Zero(x.size());
  const LcuOutcome out = lcu_apply(b, x / xn);
  return out.state * (out.s * std::sqrt(out.success_probability) * xn);
}

DenseHermitian regularized_inverse_matrix(const HermitianOperator& h, double shift, double delta) {
  const DenseHermitian m =
      h.eigensystem().function_matrix([&](double lambda) { return regularized_reciprocal(lambda - shift, delta); });
  // Entries reach 1/delta near an eigenvalue; V f V^H is Hermitian only up to
  // rounding at that scale.
  return 0.5 * (m + m.adjoint());
}

PauliSum diagonal_decomposition(const RealVector& d) {
  const DenseHermitian m = d.cast<Scalar>().asDiagonal();
  return decompose_hermitian(m);
}

}  // namespace

std::string_view to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::JD: return "JD";
    case SolverMethod::QJD: return "QJD";
    case SolverMethod::QD: return "QD";
  }
  return "?";
}

std::string_view to_string(PreconditionerKind k) {
  switch (k) {
    case PreconditionerKind::FullShiftedInverse: return "full-shifted-inverse";
    case PreconditionerKind::DiagonalShiftedInverse: return "diagonal-shifted-inverse";
    case PreconditionerKind::ResidueIdentity: return "residue-identity";
  }
  return "?";
}

std::string_view to_string(KernelMode k) {
  switch (k) {
    case KernelMode::Auto: return "auto";
    case KernelMode::On: return "on";
    case KernelMode::Off: return "off";
  }
  return "?";
}

KernelMode parse_kernel_mode(std::string_view s) {
  if (s == "auto") return KernelMode::Auto;
  if (s == "on" || s == "true") return KernelMode::On;
  if (s == "off" || s == "false") return KernelMode::Off;
  throw ValidationError("unknown kernel mode \"" + std::string(s) + "\" (expected auto|on|off)");
}

std::string_view to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::ConvergedByResidual: return "converged-by-residual";
    case TerminalStatus::ConvergedByEnergy: return "converged-by-energy";
    case TerminalStatus::Stagnated: return "stagnated";
    case TerminalStatus::MaxIterations: return "max-iterations";
    case TerminalStatus::Failed: return "failed";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(convergence.residual_tol > 0.0) || !(convergence.energy_tol > 0.0)) {
    throw ValidationError("convergence tolerances must be positive");
  }
  if (!(delta > 0.0)) throw ValidationError("regularization delta must be positive");
  if (!(reject_tol > 0.0) || !(reject_tol < 1.0)) throw ValidationError("reject_tol must lie in (0, 1)");
  if (method != SolverMethod::QD && preconditioner == PreconditionerKind::ResidueIdentity) {
    throw ValidationError("the residue preconditioner belongs to the QD method");
  }
  if (sqdiag_first_iteration) {
    if (sqdiag_first_iteration->n < 1) throw ValidationError("SQDiag n must be >= 1");
    if (sqdiag_first_iteration->shots && sqdiag_first_iteration->shots->count == 0) {
      throw ValidationError("SQDiag shot count must be positive");
    }
  }
}

std::string method_label(const SolverConfig& c) {
  std::string label = c.sqdiag_first_iteration ? "SB" : "";
  label += to_string(c.method);
  switch (c.preconditioner) {
    case PreconditionerKind::FullShiftedInverse:
      if (c.method == SolverMethod::QD && c.sqdiag_first_iteration) label += "_full";
      break;
    case PreconditionerKind::DiagonalShiftedInverse: label += "_D"; break;
    case PreconditionerKind::ResidueIdentity:
      if (!c.sqdiag_first_iteration) label += "_residue";
      break;
  }
  return label;
}

SolverConfig config_from_label(std::string_view label) {
  SolverConfig c;
  std::string_view rest = label;
  if (rest.starts_with("SB")) {
    c.sqdiag_first_iteration = SqdiagSettings{};
    rest.remove_prefix(2);
  }
  std::string_view suffix;
  if (const auto pos = rest.find('_'); pos != std::string_view::npos) {
    suffix = rest.substr(pos);
    rest = rest.substr(0, pos);
  }
  if (rest == "JD") {
    c.method = SolverMethod::JD;
  } else if (rest == "QJD") {
    c.method = SolverMethod::QJD;
  } else if (rest == "QD") {
    c.method = SolverMethod::QD;
  } else {
    throw ValidationError("unknown method label \"" + std::string(label) + "\"");
  }
  const bool sb_qd = c.method == SolverMethod::QD && c.sqdiag_first_iteration;
  if (suffix.empty()) {
    c.preconditioner = sb_qd ? PreconditionerKind::ResidueIdentity : PreconditionerKind::FullShiftedInverse;
  } else if (suffix == "_D") {
    c.preconditioner = PreconditionerKind::DiagonalShiftedInverse;
  } else if (suffix == "_residue" && c.method == SolverMethod::QD) {
    c.preconditioner = PreconditionerKind::ResidueIdentity;
  } else if (suffix == "_full" && sb_qd) {
    c.preconditioner = PreconditionerKind::FullShiftedInverse;
  } else {
    throw ValidationError("unknown method label \"" + std::string(label) + "\"");
  }
  return c;
}

double regularized_reciprocal(double gap, double delta) {
  if (std::abs(gap) < delta) gap = gap < 0.0 ? -delta : delta;
  return 1.0 / gap;
}

StateVector shifted_inverse_apply(const HermitianOperator& h, double shift, const StateVector& x, double delta) {
  if (x.size() != h.dim()) throw ShapeError("shifted_inverse_apply: vector length mismatch");
  return h.eigensystem().apply_function([&](double lambda) { return regularized_reciprocal(lambda - shift, delta); },
                                        x);
}

RealVector diagonal_inverse(const HermitianOperator& h, double shift, double delta) {
  return h.diagonal().unaryExpr([&](double d) { return regularized_reciprocal(d - shift, delta); });
}

Correction jd_correction_full(const HermitianOperator& h, const RitzPair& pair, const StateVector& r, double delta,
                              bool use_kernels) {
  require_pair_shapes(h, pair, r);
  const StateVector& rv = pair.vector;
  Correction c;
  if (use_kernels) {
    const PauliSum b = decompose_hermitian(regularized_inverse_matrix(h, pair.value, delta));
    const double den = expectation_sum(b, rv);
    require_epsilon_denominator(den);
    c.epsilon = 1.0 / den;
    c.t = c.epsilon * lcu_times(b, rv) - lcu_times(b, r);
    return c;
  }
  const StateVector b_rv = shifted_inverse_apply(h, pair.value, rv, delta);
  const StateVector b_r = shifted_inverse_apply(h, pair.value, r, delta);
  const double den = rv.dot(b_rv).real();
  require_epsilon_denominator(den);
  c.epsilon = rv.dot(b_r).real() / den;
  c.t = c.epsilon * b_rv - b_r;
  return c;
}

Correction jd_correction_diag(const HermitianOperator& h, const RitzPair& pair, const StateVector& r, double delta,
                              bool use_kernels) {
  require_pair_shapes(h, pair, r);
  const StateVector& rv = pair.vector;
  const RealVector m_inv = diagonal_inverse(h, pair.value, delta);
  Correction c;
  if (use_kernels) {
    const PauliSum m = diagonal_decomposition(m_inv);
    const double den = expectation_sum(m, rv);
    require_epsilon_denominator(den);
    c.epsilon = overlap_sum(m, rv, r) / den;
    c.t = c.epsilon * lcu_times(m, rv) - lcu_times(m, r);
    return c;
  }
  const StateVector m_rv = m_inv.cast<Scalar>().cwiseProduct(rv);
  const StateVector m_r = m_inv.cast<Scalar>().cwiseProduct(r);
  const double den = rv.dot(m_rv).real();
  require_epsilon_denominator(den);
  c.epsilon = rv.dot(m_r).real() / den;
  c.t = c.epsilon * m_rv - m_r;
  return c;
}

Correction qd_correction(const HermitianOperator& h, const RitzPair& pair, const StateVector& r, PreconditionerKind kind,
                         double delta) {
  require_pair_shapes(h, pair, r);
  Correction c;
  switch (kind) {
    case PreconditionerKind::ResidueIdentity: c.t = r; break;
    case PreconditionerKind::DiagonalShiftedInverse:
      c.t = diagonal_inverse(h, pair.value, delta).cast<Scalar>().cwiseProduct(r);
      break;
    case PreconditionerKind::FullShiftedInverse: c.t = shifted_inverse_apply(h, pair.value, r, delta); break;
  }
  return c;
}

ProjectedCorrection solve_correction_projected(const HermitianOperator& h, const RitzPair& pair, const StateVector& r) {
  require_pair_shapes(h, pair, r);
  const Index dim = h.dim();
  if (dim > 1024) throw CapacityError("solve_correction_projected is limited to dimension 1024");
  if (dim < 2) throw ValidationError("solve_correction_projected needs dimension >= 2");
  // Columns 1..dim-1 of a unitary whose first column is rv span the complement.
  const HouseholderPreparation u(pair.vector);
  Matrix<Scalar> q(dim, dim - 1);
  for (Index j = 1; j < dim; ++j) {
    StateVector e = StateVector::Zero(dim);
    e[j] = 1.0;
    q.col(j - 1) = u.apply(e);
  }
  Matrix<Scalar> shifted = h.dense();
  shifted.diagonal().array() -= pair.value;
  const Matrix<Scalar> a = q.adjoint() * shifted * q;
  const StateVector rhs = -(q.adjoint() * r);
  const Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod(a);
  ProjectedCorrection out;
  out.rank_deficient = cod.rank() < a.rows();
  out.t = q * cod.solve(rhs);
  const StateVector rv = pair.vector;
  auto project = [&](const StateVector& x) -> StateVector { return x - rv * rv.dot(x); };
  out.equation_residual = (project(shifted * project(out.t)) + r).norm();
  return out;
}

double gateaux_rayleigh_differential(const HermitianOperator& h, const StateVector& x, const StateVector& x_prime) {
  if (x.size() != h.dim() || x_prime.size() != h.dim()) throw ShapeError("gateaux: dimension mismatch");
  if (std::abs(x.norm() - 1.0) > 1e-8) throw ValidationError("gateaux: x must be normalized");
  return 2.0 * x_prime.dot(h.apply(x)).real();
}

std::optional<int> ConvergenceTrace::iterations_to_convergence() const {
  if (!is_converged(status) || records.empty()) return std::nullopt;
  return records.back().iteration;
}

std::string accounting_rule(const SolverConfig& c) {
  const bool qd = c.method == SolverMethod::QD;
  if (c.method == SolverMethod::JD) return "none: JD evaluates everything with classical linear algebra";
  std::string rule = "per iteration: ";
  if (qd) rule += "terms of H (Ritz energy) every iteration";
  switch (c.preconditioner) {
    case PreconditionerKind::FullShiftedInverse:
      rule += qd ? " + terms of the regularized (H - E')^-1 when a correction is computed"
                 : "terms of the regularized (H - E')^-1 when a correction is computed (eps denominator)";
      break;
    case PreconditionerKind::DiagonalShiftedInverse:
      rule += qd ? " + terms of M^-1 when a correction is computed"
                 : "2 x terms of M^-1 when a correction is computed (eps numerator and denominator)";
      break;
    case PreconditionerKind::ResidueIdentity: break;
  }
  rule += "; coefficients with |c| <= 1e-12 are not counted";
  return rule;
}

namespace {

class PauliAccounting {
 public:
  PauliAccounting(const HermitianOperator& h, const SolverConfig& c, bool enabled)
      : h_(h), config_(c), enabled_(enabled && c.method != SolverMethod::JD) {}

  std::size_t measurement_cost() {
    if (!enabled_ || config_.method != SolverMethod::QD) return 0;
    if (!h_terms_known_) {
      h_terms_ = pauli_term_count(h_.pauli());
      h_terms_known_ = true;
    }
    return h_terms_;
  }

  std::size_t correction_cost(double shift) const {
    if (!enabled_) return 0;
    const std::size_t per_eval = [&]() -> std::size_t {
      switch (config_.preconditioner) {
        case PreconditionerKind::FullShiftedInverse:
          return pauli_term_count(regularized_inverse_matrix(h_, shift, config_.delta));
        case PreconditionerKind::DiagonalShiftedInverse:
          return diagonal_pauli_term_count(diagonal_inverse(h_, shift, config_.delta));
        case PreconditionerKind::ResidueIdentity: return 0;
      }
      return 0;
    }();
    const bool two_evals =
        config_.method == SolverMethod::QJD && config_.preconditioner == PreconditionerKind::DiagonalShiftedInverse;
    return two_evals ? 2 * per_eval : per_eval;
  }

 private:
  const HermitianOperator& h_;
  const SolverConfig& config_;
  bool enabled_;
  std::size_t h_terms_ = 0;
  bool h_terms_known_ = false;
};

Correction compute_correction(const HermitianOperator& h, const RitzPair& pair, const StateVector& r,
                              const SolverConfig& c, bool use_kernels) {
  if (c.method == SolverMethod::QD) return qd_correction(h, pair, r, c.preconditioner, c.delta);
  if (c.preconditioner == PreconditionerKind::DiagonalShiftedInverse) {
    return jd_correction_diag(h, pair, r, c.delta, use_kernels);
  }
  return jd_correction_full(h, pair, r, c.delta, use_kernels);
}

}  // namespace

SolverResult run_solver(const HermitianOperator& h, const StateVector& reference, const SolverConfig& config,
                        std::optional<double> oracle_energy) {
  config.validate();
  if (reference.size() != h.dim()) {
    throw ShapeError("reference state has length " + std::to_string(reference.size()) + " but H has dimension " +
                     std::to_string(h.dim()));
  }
  if (!reference.allFinite() || reference.norm() == 0.0) {
    throw ValidationError("reference state must be finite and nonzero");
  }

  SolverResult result;
  ConvergenceTrace& trace = result.trace;
  const int n = h.n_qubits();
  trace.used_quantum_kernels =
      config.method == SolverMethod::QJD &&
      (config.use_quantum_kernels == KernelMode::On ||
       (config.use_quantum_kernels == KernelMode::Auto && n <= kAutoKernelQubitLimit));
  trace.pauli_accounting = config.method != SolverMethod::JD &&
                           (config.pauli_accounting == KernelMode::On ||
                            (config.pauli_accounting == KernelMode::Auto && n <= kPauliAccountingQubitLimit));
  trace.accounting_rule = trace.pauli_accounting ? accounting_rule(config) : "disabled";
  PauliAccounting accounting(h, config, trace.pauli_accounting);

  ProjectedProblem problem(h);
  bool have_best = false;
  try {
    StateVector start = reference.normalized();
    if (config.sqdiag_first_iteration) {
      const SqdiagResult sq = sqdiag_refine(h, start, *config.sqdiag_first_iteration);
      trace.sqdiag = SqdiagEvent{sq.selected_indices, sq.energy, sq.shortfall};
      start = sq.refined_state;
    }
    if (!problem.append(start, config.reject_tol)) throw NumericError("reference state rejected");

    std::size_t cumulative = 0;
    for (int it = 1;; ++it) {
      const RitzPair pair = problem.lowest_ritz_pair();
      const StateVector r = problem.apply_to_ritz(pair) - pair.value * pair.vector;
      IterationRecord rec;
      rec.iteration = it;
      rec.ritz_value = pair.value;
      rec.residual_norm = r.norm();
      rec.subspace_dim = problem.subspace().size();
      if (oracle_energy) rec.energy_error = std::abs(pair.value - *oracle_energy);
      if (!have_best || pair.value < result.best.value) {
        result.best = pair;
        have_best = true;
      }
      cumulative += accounting.measurement_cost();

      const ConvergenceCheck check = check_convergence(rec.residual_norm, pair, oracle_energy, config.convergence);
      if (check.converged || it == config.max_iterations) {
        rec.cumulative_pauli_terms = cumulative;
        trace.records.push_back(rec);
        if (check.converged) {
          trace.status = check.criterion == ConvergenceCriterion::Residual ? TerminalStatus::ConvergedByResidual
                                                                            : TerminalStatus::ConvergedByEnergy;
        } else {
          trace.status = TerminalStatus::MaxIterations;
        }
        break;
      }

      cumulative += accounting.correction_cost(pair.value);
      rec.cumulative_pauli_terms = cumulative;
      Correction corr;
      try {
        corr = compute_correction(h, pair, r, config, trace.used_quantum_kernels);
      } catch (const IllConditionedEpsilonError& e) {
        corr.t = r;
        rec.epsilon_fallback = true;
        if (!trace.message.empty()) trace.message += "; ";
        trace.message += "iteration " + std::to_string(it) + ": " + e.what() + ", residual step used";
      }
      rec.rejected = !problem.append(corr.t, config.reject_tol);
      trace.records.push_back(rec);
      if (rec.rejected) {
        trace.status = TerminalStatus::Stagnated;
        break;
      }
    }
  } catch (const std::exception& e) {
    trace.status = TerminalStatus::Failed;
    if (!trace.message.empty()) trace.message += "; ";
    trace.message += e.what();
  }
  if (!have_best) {
    result.best.value = std::nan("");
  }
  return result;
}

std::vector<double> convergence_rate(const std::vector<double>& energy_errors) {
  std::vector<double> rates;
  for (std::size_t i = 1; i < energy_errors.size(); ++i) {
    const double prev = energy_errors[i - 1];
    rates.push_back(prev < 1e-15 ? 0.0 : energy_errors[i] / prev);
  }
  return rates;
}

std::vector<double> convergence_rate(const ConvergenceTrace& trace, double oracle_energy) {
  std::vector<double> errors;
  errors.reserve(trace.records.size());
  for (const auto& rec : trace.records) errors.push_back(std::abs(rec.ritz_value - oracle_energy));
  return convergence_rate(errors);
}

}  // namespace qjd
