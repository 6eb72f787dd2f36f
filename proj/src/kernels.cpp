#include "qjd/kernels.hpp"

#include <bit>
#include <cmath>

namespace qjd {

namespace {

constexpr double kNormTol = 1e-8;
constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_normalized(const StateVector& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > kNormTol) {
    throw ValidationError(std::string(what) + ": input state is not normalized");
  }
}

void require_register(int n_qubits, Index size, const char* what) {
  if ((Index{1} << n_qubits) != size) {
    throw ShapeError(std::string(what) + ": operator acts on " + std::to_string(n_qubits) +
                     " qubits but the state has length " + std::to_string(size));
  }
}

// Neumaier-compensated sum; the result does not depend on term magnitudes
// cancelling in a particular order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Applies the 2x2 gate g on the qubit at label position k.
void apply_single_qubit(StateVector& v, int n_qubits, int k, const Eigen::Matrix2cd& g) {
  const Index bit = Index{1} << (n_qubits - 1 - k);
  for (Index b = 0; b < v.size(); ++b) {
    if (b & bit) continue;
    const Scalar a0 = v[b];
    const Scalar a1 = v[b | bit];
    v[b] = g(0, 0) * a0 + g(0, 1) * a1;
    v[b | bit] = g(1, 0) * a0 + g(1, 1) * a1;
  }
}

const Eigen::Matrix2cd& hadamard_gate() {
  static const Eigen::Matrix2cd h = [] {
    Eigen::Matrix2cd m;
    m << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
    return m;
  }();
  return h;
}

// S^dagger first, then H.
const Eigen::Matrix2cd& y_basis_gate() {
  static const Eigen::Matrix2cd g = [] {
    Eigen::Matrix2cd s_dag;
    s_dag << 1.0, 0.0, 0.0, Scalar(0.0, -1.0);
    return Eigen::Matrix2cd(hadamard_gate() * s_dag);
  }();
  return g;
}

}  // namespace

HouseholderPreparation::HouseholderPreparation(const StateVector& target) : dim_(target.size()) {
  if (dim_ == 0) throw ShapeError("state preparation of an empty register");
  require_normalized(target, "state preparation");
  const double mag0 = std::abs(target[0]);
  phase_ = mag0 > 0.0 ? target[0] / mag0 : Scalar(1.0, 0.0);
  // Reflect e0 onto y = conj(phase) * target, whose first entry is real.
  StateVector q = -std::conj(phase_) * target;
  q[0] += 1.0;
  const double qn = q.norm();
  if (qn > 1e-15) reflector_ = q / qn;
}

StateVector HouseholderPreparation::apply(const StateVector& v) const {
  if (reflector_.size() == 0) return phase_ * v;
  return phase_ * (v - 2.0 * reflector_ * reflector_.dot(v));
}

StateVector HouseholderPreparation::apply_adjoint(const StateVector& v) const {
  if (reflector_.size() == 0) return std::conj(phase_) * v;
  return std::conj(phase_) * (v - 2.0 * reflector_ * reflector_.dot(v));
}

StateVector apply_pauli_sum(const PauliSum& a, const StateVector& v) {
  require_register(a.n_qubits(), v.size(), "apply_pauli_sum");
  StateVector out = StateVector::Zero(v.size());
  for (const auto& t : a.terms()) accumulate_pauli_action(t.string, t.coefficient, v, out);
  return out;
}

LcuOutcome lcu_apply(const PauliSum& a, const StateVector& v) {
  require_register(a.n_qubits(), v.size(), "lcu_apply");
  require_normalized(v, "lcu_apply");
  const UnitaryCombination uc = to_unitary_combination(a);
  const auto m = static_cast<Index>(uc.size());
  int k = 0;
  while ((Index{1} << k) < m) ++k;
  const Index anc_dim = Index{1} << k;
  const Index dim = v.size();

  StateVector pr_column = StateVector::Zero(anc_dim);
  for (Index i = 0; i < m; ++i) pr_column[i] = std::sqrt(uc.weights[static_cast<std::size_t>(i)] / uc.s);
  pr_column.normalize();
  const HouseholderPreparation prepare(pr_column);

  // Composite register, row = ancilla basis index, column = data index.
  Matrix<Scalar> reg(anc_dim, dim);
  for (Index i = 0; i < anc_dim; ++i) {
    const Scalar amp = pr_column[i];
    if (i < m && amp != Scalar(0)) {
      const auto ui = static_cast<std::size_t>(i);
      StateVector row = StateVector::Zero(dim);
      accumulate_pauli_action(uc.unitaries[ui], uc.phases[ui] * amp, v, row);
      reg.row(i) = row.transpose();
    } else {
      reg.row(i) = (amp * v).transpose();
    }
  }
  for (Index col = 0; col < dim; ++col) reg.col(col) = prepare.apply_adjoint(reg.col(col));

  LcuOutcome out;
  out.s = uc.s;
  out.ancilla_qubits = k;
  out.composite_norm = reg.norm();
  StateVector projected = reg.row(0).transpose();
  out.success_probability = projected.squaredNorm();
  if (out.success_probability <= 1e-30) {
    throw DegenerateOutcomeError("lcu_apply: A annihilates the input state", out.success_probability);
  }
  out.state = projected / std::sqrt(out.success_probability);
  return out;
}

double expectation_pauli(const PauliString& p, const StateVector& v) {
  require_register(p.n_qubits(), v.size(), "expectation_pauli");
  require_normalized(v, "expectation_pauli");
  const int n = p.n_qubits();
  StateVector rotated = v;
  for (int k = 0; k < n; ++k) {
    switch (p.label()[static_cast<std::size_t>(k)]) {
      case 'X': apply_single_qubit(rotated, n, k, hadamard_gate()); break;
      case 'Y': apply_single_qubit(rotated, n, k, y_basis_gate()); break;
      default: break;
    }
  }
  const std::uint64_t support = p.x_mask() | p.z_mask();
  CompensatedSum acc;
  for (Index b = 0; b < rotated.size(); ++b) {
    const double prob = std::norm(rotated[b]);
    const bool odd = (std::popcount(support & static_cast<std::uint64_t>(b)) & 1) != 0;
    acc.add(odd ? -prob : prob);
  }
  return acc.value();
}

double expectation_sum(const PauliSum& b, const StateVector& v) {
  if (!b.is_hermitian(kHermitianTol)) throw ValidationError("expectation_sum: operator is not Hermitian");
  CompensatedSum acc;
  for (const auto& t : b.terms()) acc.add(t.coefficient.real() * expectation_pauli(t.string, v));
  return acc.value();
}

double hadamard_test_re(const StateVector& u, const PauliString& p, const StateVector& w) {
  if (u.size() != w.size()) throw ShapeError("hadamard_test_re: state lengths differ");
  return hadamard_test_re(HouseholderPreparation(u), p, HouseholderPreparation(w));
}

double overlap_sum(const PauliSum& b, const StateVector& u, const StateVector& w) {
  if (!b.is_hermitian(kHermitianTol)) throw ValidationError("overlap_sum: operator is not Hermitian");
  require_register(b.n_qubits(), u.size(), "overlap_sum");
  require_register(b.n_qubits(), w.size(), "overlap_sum");
  const double wn = w.norm();
  if (wn == 0.0) return 0.0;
  const HouseholderPreparation prep_u(u);
  const HouseholderPreparation prep_w(w / wn);
  CompensatedSum acc;
  for (const auto& t : b.terms()) acc.add(t.coefficient.real() * hadamard_test_re(prep_u, t.string, prep_w));
  return acc.value() * wn;
}

}  // namespace qjd
