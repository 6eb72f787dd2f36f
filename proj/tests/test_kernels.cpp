#include "oracles.hpp"
#include "qjd/kernels.hpp"
#include "qjd/models.hpp"
#include "qjd/state_prep.hpp"

#include <gtest/gtest.h>

using namespace qjd;

namespace {

PauliSum make_sum(int n, const oracle::Terms& terms) {
  std::vector<PauliTerm> t;
  for (const auto& [c, label] : terms) t.push_back({c, PauliString(label)});
  return PauliSum(n, std::move(t));
}

StateVector ket(std::initializer_list<Scalar> amps) {
  StateVector v(static_cast<Index>(amps.size()));
  Index i = 0;
  for (Scalar a : amps) v[i++] = a;
  return v;
}

}  // namespace

TEST(ApplyPauliSum, HandExamples) {
  oracle::Random rng(1);
  const StateVector v = rng.state(8);
  EXPECT_LT((apply_pauli_sum(make_sum(3, {{1.0, "III"}}), v) - v).norm(), 1e-15);
  EXPECT_EQ(apply_pauli_sum(make_sum(1, {{1.0, "X"}}), ket({1, 0})), ket({0, 1}));
  EXPECT_LT((apply_pauli_sum(make_sum(1, {{0.5, "Z"}, {0.5, "X"}}), ket({1, 0})) - ket({0.5, 0.5})).norm(), 1e-15);
  EXPECT_THROW(apply_pauli_sum(make_sum(2, {{1.0, "XX"}}), v), ShapeError);
}

TEST(Householder, PreparesTargetAndIsUnitary) {
  oracle::Random rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Index dim = Index{1} << rng.integer(1, 5);
    StateVector target = rng.state(dim);
    if (trial == 0) target = basis_state(0, 2);
    if (trial == 1) target = -basis_state(0, 2);
    const HouseholderPreparation u(target);
    StateVector e0 = StateVector::Zero(target.size());
    e0[0] = 1.0;
    EXPECT_LT((u.apply(e0) - target).norm(), 1e-14);
    Matrix<Scalar> full(target.size(), target.size());
    for (Index j = 0; j < target.size(); ++j) {
      StateVector e = StateVector::Zero(target.size());
      e[j] = 1.0;
      full.col(j) = u.apply(e);
      EXPECT_LT((u.apply_adjoint(full.col(j)) - e).norm(), 1e-14);
    }
    EXPECT_LT((full.adjoint() * full - Matrix<Scalar>::Identity(target.size(), target.size())).norm(), 1e-13);
  }
}

TEST(Lcu, HandExamples) {
  oracle::Random rng(3);
  const StateVector v = rng.state(4);
  LcuOutcome out = lcu_apply(make_sum(2, {{1.0, "II"}}), v);
  EXPECT_LT((out.state - v).norm(), 1e-14);
  EXPECT_NEAR(out.success_probability, 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(out.s, 1.0);
  EXPECT_EQ(out.ancilla_qubits, 0);

  out = lcu_apply(make_sum(1, {{0.5, "Z"}, {0.5, "X"}}), ket({1, 0}));
  EXPECT_DOUBLE_EQ(out.s, 1.0);
  EXPECT_NEAR(out.success_probability, 0.5, 1e-15);
  EXPECT_LT((out.state - ket({M_SQRT1_2, M_SQRT1_2})).norm(), 1e-15);
  EXPECT_EQ(out.ancilla_qubits, 1);
}

TEST(Lcu, DegenerateOutcome) {
  // (I - Z)/2 annihilates |0>.
  try {
    (void)lcu_apply(make_sum(1, {{0.5, "I"}, {-0.5, "Z"}}), ket({1, 0}));
    FAIL() << "expected DegenerateOutcomeError";
  } catch (const DegenerateOutcomeError& e) {
    EXPECT_LE(e.success_probability(), 1e-30);
  }
  EXPECT_THROW(lcu_apply(make_sum(1, {{1.0, "X"}}), ket({2, 0})), ValidationError);
}

TEST(Lcu, MatchesDirectApplicationOnRandomOperators) {
  oracle::Random rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 6);
    const int m = rng.integer(1, 16);
    const PauliSum a = make_sum(n, rng.complex_terms(n, m));
    const StateVector v = rng.state(Index{1} << n);
    const StateVector direct = to_dense(a) * v;
    const UnitaryCombination uc = to_unitary_combination(a);
    const LcuOutcome out = lcu_apply(a, v);
    EXPECT_GE(std::abs(out.state.dot(direct.normalized())), 1.0 - 1e-10);
    EXPECT_LT((out.state - direct.normalized()).norm(), 1e-10);  // phase is preserved, not just direction
    EXPECT_NEAR(out.success_probability, direct.squaredNorm() / (uc.s * uc.s), 1e-12);
    EXPECT_NEAR(out.composite_norm, 1.0, 1e-12);
    int k = 0;
    while ((1 << k) < static_cast<int>(uc.size())) ++k;
    EXPECT_EQ(out.ancilla_qubits, k);
  }
}

TEST(Expectation, HandExamples) {
  EXPECT_NEAR(expectation_pauli(PauliString("Z"), ket({1, 0})), 1.0, 1e-15);
  EXPECT_NEAR(expectation_pauli(PauliString("X"), ket({M_SQRT1_2, M_SQRT1_2})), 1.0, 1e-15);
  EXPECT_NEAR(expectation_pauli(PauliString("Y"), ket({1, 0})), 0.0, 1e-15);
  EXPECT_NEAR(expectation_pauli(PauliString("Y"), ket({M_SQRT1_2, Scalar(0, M_SQRT1_2)})), 1.0, 1e-15);
}

TEST(Expectation, AllStringsMatchDenseOracle) {
  oracle::Random rng(5);
  for (int n = 1; n <= 3; ++n) {
    const StateVector v = rng.state(Index{1} << n);
    const Index count = Index{1} << (2 * n);
    for (Index code = 0; code < count; ++code) {
      std::string label;
      for (int k = 0; k < n; ++k) label += "IXYZ"[(code >> (2 * k)) & 3];
      const double dense = v.dot(oracle::pauli_matrix(label) * v).real();
      EXPECT_NEAR(expectation_pauli(PauliString(label), v), dense, 1e-12) << label;
    }
  }
}

TEST(ExpectationSum, HandExamplesAndOracle) {
  oracle::Random rng(6);
  EXPECT_NEAR(expectation_sum(make_sum(2, {{2.0, "II"}}), rng.state(4)), 2.0, 1e-14);
  EXPECT_NEAR(expectation_sum(build_ising({2, 1.1, 0.9, 0.0}), basis_state(0, 2)), -4.0, 1e-14);
  EXPECT_NEAR(expectation_sum(make_sum(1, {{1.0, "Z"}}), ket({M_SQRT1_2, M_SQRT1_2})), 0.0, 1e-15);
  EXPECT_THROW(expectation_sum(make_sum(1, {{Scalar(1.0, 1.0), "Z"}}), ket({1, 0})), ValidationError);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 6);
    const oracle::Terms terms = rng.real_terms(n, rng.integer(1, 20));
    const StateVector v = rng.state(Index{1} << n);
    const double dense = v.dot(oracle::dense(terms, n) * v).real();
    EXPECT_NEAR(expectation_sum(make_sum(n, terms), v), dense, 1e-10);
  }
}

TEST(HadamardTest, HandExamples) {
  EXPECT_NEAR(hadamard_test_re(ket({1, 0}), PauliString("Z"), ket({1, 0})), 1.0, 1e-15);
  EXPECT_NEAR(hadamard_test_re(ket({1, 0}), PauliString("Z"), ket({0, 1})), 0.0, 1e-15);
}

TEST(HadamardTest, MatchesInnerProductAndIsSymmetric) {
  oracle::Random rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 5);
    const StateVector u = rng.state(Index{1} << n);
    const StateVector w = rng.state(Index{1} << n);
    const std::string label = rng.label(n);
    const double direct = u.dot(oracle::pauli_matrix(label) * w).real();
    const double circuit = hadamard_test_re(u, PauliString(label), w);
    EXPECT_NEAR(circuit, direct, 1e-10);
    EXPECT_NEAR(circuit, hadamard_test_re(w, PauliString(label), u), 1e-12);
  }
}

TEST(HadamardTest, IndependentOfPreparationCompletion) {
  // Any unitary whose first column is the target gives the same statistic.
  struct DenseUnitary {
    Matrix<Scalar> u;
    StateVector apply(const StateVector& v) const { return u * v; }
    StateVector apply_adjoint(const StateVector& v) const { return u.adjoint() * v; }
    Index dim() const { return u.rows(); }
  };
  oracle::Random rng(8);
  const StateVector u = rng.state(8);
  const StateVector w = rng.state(8);
  Matrix<Scalar> basis(8, 8);
  basis.col(0) = w;
  for (Index j = 1; j < 8; ++j) basis.col(j) = rng.state(8);
  const Eigen::HouseholderQR<Matrix<Scalar>> qr(basis);
  Matrix<Scalar> q = qr.householderQ();
  q.col(0) *= w[0] / q(0, 0);  // align the phase of the first column with w
  ASSERT_LT((q.col(0) - w).norm(), 1e-12);
  const DenseUnitary prep_w{q};
  const HouseholderPreparation prep_u(u);
  const PauliString p("XYZ");
  EXPECT_NEAR(hadamard_test_re(prep_u, p, prep_w), hadamard_test_re(u, p, w), 1e-12);
}

TEST(OverlapSum, ConventionsAndOracle) {
  oracle::Random rng(9);
  const StateVector u = rng.state(4);
  EXPECT_EQ(overlap_sum(make_sum(2, {{1.0, "XZ"}}), u, StateVector::Zero(4)), 0.0);
  EXPECT_NEAR(overlap_sum(make_sum(2, {{1.0, "II"}}), u, u), 1.0, 1e-14);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(1, 5);
    const oracle::Terms terms = rng.real_terms(n, rng.integer(1, 12));
    const StateVector a = rng.state(Index{1} << n);
    const StateVector w = 3.7 * rng.state(Index{1} << n);  // unnormalized
    const double direct = a.dot(oracle::dense(terms, n) * w).real();
    EXPECT_NEAR(overlap_sum(make_sum(n, terms), a, w), direct, 1e-10);
  }
}
