#include "qjd/operator.hpp"

#include <Eigen/Eigenvalues>

#include <mutex>
#include <optional>
#include <sstream>

#ifdef QJD_USE_LAPACKE
#include <lapacke.h>
#endif

namespace qjd {

namespace {

#ifdef QJD_USE_LAPACKE
void lapack_check(lapack_int info, const char* routine) {
  if (info != 0) {
    throw NumericError(std::string(routine) + " failed with info = " + std::to_string(info));
  }
}
#endif

RealMatrix real_dense(const PauliSum& ps) {
  require_dense_capacity(ps.n_qubits());
  const Index dim = ps.dim();
  RealMatrix m = RealMatrix::Zero(dim, dim);
  for (const auto& term : ps.terms()) {
    const double base = (term.coefficient * term.string.phase()).real();
    const std::uint64_t x = term.string.x_mask();
    const std::uint64_t z = term.string.z_mask();
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
      const bool odd = (std::popcount(z & b) & 1) != 0;
      m(static_cast<Index>(b ^ x), static_cast<Index>(b)) += odd ? -base : base;
    }
  }
  return m;
}

}  // namespace

std::string_view dense_eigensolver_backend() noexcept {
#ifdef QJD_USE_LAPACKE
  return "lapacke";
#else
  return "eigen";
#endif
}

Eigensystem Eigensystem::compute(const RealMatrix& m) {
  Eigensystem es;
#ifdef QJD_USE_LAPACKE
  RealMatrix a = m;
  es.values_.resize(a.rows());
  lapack_check(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(a.rows()), a.data(),
                              static_cast<lapack_int>(a.rows()), es.values_.data()),
               "dsyevd");
  es.vectors_ = std::move(a);
#else
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericError("SelfAdjointEigenSolver did not converge");
  es.values_ = solver.eigenvalues();
  es.vectors_ = solver.eigenvectors();
#endif
  return es;
}

Eigensystem Eigensystem::compute(const DenseHermitian& m) {
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) return compute(RealMatrix(m.real()));
  Eigensystem es;
#ifdef QJD_USE_LAPACKE
  Matrix<Scalar> a = m;
  es.values_.resize(a.rows());
  lapack_check(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(a.rows()),
                              reinterpret_cast<lapack_complex_double*>(a.data()),
                              static_cast<lapack_int>(a.rows()), es.values_.data()),
               "zheevd");
  es.vectors_ = std::move(a);
#else
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m);
  if (solver.info() != Eigen::Success) throw NumericError("SelfAdjointEigenSolver did not converge");
  es.values_ = solver.eigenvalues();
  es.vectors_ = solver.eigenvectors();
#endif
  return es;
}

StateVector Eigensystem::eigenvector(Index k) const {
  return std::visit([k](const auto& v) -> StateVector { return v.col(k).template cast<Scalar>(); },
                    vectors_);
}

struct HermitianOperator::State {
  int n_qubits = 0;
  bool real = false;
  std::optional<DenseHermitian> dense;
  std::optional<PauliSum> pauli;
  RealVector diag;

  std::once_flag dense_once;
  std::once_flag pauli_once;
  std::once_flag eigen_once;
  std::optional<DenseHermitian> dense_cache;
  std::optional<PauliSum> pauli_cache;
  std::optional<Eigensystem> eigen_cache;
};

HermitianOperator HermitianOperator::from_dense(DenseHermitian m) {
  if (m.rows() != m.cols()) throw ShapeError("operator matrix is not square");
  const int n = qubits_for_dim(m.rows());
  require_dense_capacity(n);
  if (const double err = hermiticity_error(m); err > kHermitianTol) {
    std::ostringstream msg;
    msg << "operator matrix is not Hermitian (max |M - M^H| = " << err << ")";
    throw ValidationError(msg.str());
  }
  if (!m.allFinite()) throw NumericError("operator matrix has non-finite entries");
  auto s = std::make_shared<State>();
  s->n_qubits = n;
  s->real = m.imag().cwiseAbs().maxCoeff() == 0.0;
  s->diag = m.diagonal().real();
  s->dense = std::move(m);
  return HermitianOperator(std::move(s));
}

HermitianOperator HermitianOperator::from_pauli(const PauliSum& ps) {
  if (!ps.is_hermitian(kHermitianTol)) {
    throw ValidationError("Pauli operator has complex coefficients; it is not Hermitian");
  }
  std::vector<PauliTerm> terms;
  terms.reserve(ps.size());
  for (const auto& t : ps.terms()) terms.push_back({Scalar(t.coefficient.real(), 0.0), t.string});
  auto s = std::make_shared<State>();
  s->n_qubits = ps.n_qubits();
  s->pauli.emplace(ps.n_qubits(), std::move(terms));
  s->real = s->pauli->has_real_matrix();
  const Index dim = ps.dim();
  s->diag = RealVector::Zero(dim);
  for (const auto& t : s->pauli->terms()) {
    if (!t.string.is_diagonal()) continue;
    const double c = t.coefficient.real();
    const std::uint64_t z = t.string.z_mask();
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
      s->diag[static_cast<Index>(b)] += (std::popcount(z & b) & 1) ? -c : c;
    }
  }
  return HermitianOperator(std::move(s));
}

int HermitianOperator::n_qubits() const noexcept { return state_->n_qubits; }
Index HermitianOperator::dim() const noexcept { return Index{1} << state_->n_qubits; }
bool HermitianOperator::is_real() const noexcept { return state_->real; }
bool HermitianOperator::has_dense() const noexcept { return state_->dense.has_value(); }

StateVector HermitianOperator::apply(const StateVector& v) const {
  if (v.size() != dim()) {
    throw ShapeError("operator on " + std::to_string(n_qubits()) + " qubits applied to vector of length " +
                     std::to_string(v.size()));
  }
  if (state_->dense) return (*state_->dense) * v;
  StateVector out = StateVector::Zero(v.size());
  for (const auto& t : state_->pauli->terms()) accumulate_pauli_action(t.string, t.coefficient, v, out);
  return out;
}

RealVector HermitianOperator::diagonal() const { return state_->diag; }

Scalar HermitianOperator::element(Index row, Index col) const {
  if (row < 0 || col < 0 || row >= dim() || col >= dim()) throw ShapeError("element index out of range");
  if (state_->dense) return (*state_->dense)(row, col);
  Scalar acc(0);
  for (const auto& t : state_->pauli->terms()) {
    acc += t.coefficient *
           t.string.element(static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(col));
  }
  return acc;
}

const DenseHermitian& HermitianOperator::dense() const {
  if (state_->dense) return *state_->dense;
  std::call_once(state_->dense_once, [this] { state_->dense_cache = to_dense(*state_->pauli); });
  return *state_->dense_cache;
}

const PauliSum& HermitianOperator::pauli() const {
  if (state_->pauli) return *state_->pauli;
  std::call_once(state_->pauli_once,
                 [this] { state_->pauli_cache = decompose_hermitian(*state_->dense); });
  return *state_->pauli_cache;
}

const Eigensystem& HermitianOperator::eigensystem() const {
  std::call_once(state_->eigen_once, [this] {
    if (state_->dense) {
      state_->eigen_cache = Eigensystem::compute(*state_->dense);
    } else if (state_->real) {
      state_->eigen_cache = Eigensystem::compute(real_dense(*state_->pauli));
    } else {
      state_->eigen_cache = Eigensystem::compute(dense());
    }
  });
  return *state_->eigen_cache;
}

}  // namespace qjd
