#pragma once

// Exact statevector realizations of the circuits used by the quantum
// solvers: LCU application with ancilla postselection, Pauli expectation by
// basis-change measurement, and the Hadamard test for Re<u|P|w>.

#include "qjd/core.hpp"
#include "qjd/pauli.hpp"

#include <concepts>

namespace qjd {

class DegenerateOutcomeError : public Error {
 public:
  DegenerateOutcomeError(const std::string& what, double success_probability)
      : Error(what), success_probability_(success_probability) {}
  double success_probability() const noexcept { return success_probability_; }

 private:
  double success_probability_;
};

/// A unitary U on the data register together with the state U|0>.
template <typename T>
concept StatePreparation = requires(const T& u, const StateVector& v) {
  { u.apply(v) } -> std::convertible_to<StateVector>;
  { u.apply_adjoint(v) } -> std::convertible_to<StateVector>;
  { u.dim() } -> std::convertible_to<Index>;
};

/// U = e^{i phi} (I - 2 q q^H) with U|0> = target; the Hadamard test only
/// depends on the first column, so any completion would do.
class HouseholderPreparation {
 public:
  explicit HouseholderPreparation(const StateVector& target);

  StateVector apply(const StateVector& v) const;
  StateVector apply_adjoint(const StateVector& v) const;
  Index dim() const noexcept { return dim_; }

 private:
  StateVector reflector_;  // unit vector q, empty when U is a global phase
  Scalar phase_{1.0, 0.0};
  Index dim_ = 0;
};

struct LcuOutcome {
  StateVector state;  // normalized post-selected data state, parallel to A v
  double success_probability = 0.0;
  double s = 0.0;
  int ancilla_qubits = 0;
  double composite_norm = 0.0;  // norm of the full register before projection
};

/// Sum_i c_i P_i v, matrix-free.
StateVector apply_pauli_sum(const PauliSum& a, const StateVector& v);

/// PR on ceil(log2 m) ancillas, SELECT, PR^H, then projection of the ancilla
/// register onto |0...0>. Throws DegenerateOutcomeError when A v vanishes.
LcuOutcome lcu_apply(const PauliSum& a, const StateVector& v);

/// <v|P|v> from the measurement distribution after per-qubit basis changes
/// (H for X, H S^dagger for Y, nothing for Z and I).
double expectation_pauli(const PauliString& p, const StateVector& v);

/// sum_i c_i <v|P_i|v>; requires real coefficients.
double expectation_sum(const PauliSum& b, const StateVector& v);

/// 2 P(ancilla = 0) - 1 of the Hadamard-test circuit built from the given
/// preparations; equals Re<u|P|w> with u = prep_u|0>, w = prep_w|0>.
template <StatePreparation PrepU, StatePreparation PrepW>
double hadamard_test_re(const PrepU& prep_u, const PauliString& p, const PrepW& prep_w) {
  const Index dim = prep_w.dim();
  if (prep_u.dim() != dim || (Index{1} << p.n_qubits()) != dim) {
    throw ShapeError("hadamard_test_re: register sizes differ");
  }
  StateVector zero = StateVector::Zero(dim);
  zero[0] = 1.0;
  // Ancilla |1> branch: U_u^H P U_w |0>; ancilla |0> branch leaves |0> alone.
  const StateVector controlled = prep_u.apply_adjoint(apply_pauli(p, prep_w.apply(zero)));
  const double p0 = (zero + controlled).squaredNorm() / 4.0;
  return 2.0 * p0 - 1.0;
}

double hadamard_test_re(const StateVector& u, const PauliString& p, const StateVector& w);

/// Re<u|B|w> for unnormalized w by Hadamard tests on w/|w|, rescaled by |w|.
/// A zero w gives 0.
double overlap_sum(const PauliSum& b, const StateVector& u, const StateVector& w);

}  // namespace qjd
