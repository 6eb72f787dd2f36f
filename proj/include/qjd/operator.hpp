#pragma once

#include "qjd/core.hpp"
#include "qjd/pauli.hpp"

#include <memory>
#include <string_view>
#include <variant>

namespace qjd {

/// "lapacke" or "eigen", whichever backs Eigensystem::compute.
std::string_view dense_eigensolver_backend() noexcept;

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Eigenvectors are stored real when the matrix is real symmetric.
class Eigensystem {
 public:
  static Eigensystem compute(const RealMatrix& m);
  static Eigensystem compute(const DenseHermitian& m);

  Index dim() const noexcept { return values_.size(); }
  const RealVector& eigenvalues() const noexcept { return values_; }
  bool is_real() const noexcept { return std::holds_alternative<RealMatrix>(vectors_); }
  StateVector eigenvector(Index k) const;

  /// f(H) x = V diag(f(lambda)) V^H x.
  template <typename F>
  StateVector apply_function(F&& f, const StateVector& x) const {
    const RealVector fv = values_.unaryExpr(f);
    return std::visit(
        [&](const auto& v) -> StateVector {
          StateVector y = v.adjoint() * x;
          y.array() *= fv.array().template cast<Scalar>();
          return v * y;
        },
        vectors_);
  }

  /// Dense f(H).
  template <typename F>
  DenseHermitian function_matrix(F&& f) const {
    const RealVector fv = values_.unaryExpr(f);
    return std::visit(
        [&](const auto& v) -> DenseHermitian {
          using Mat = std::decay_t<decltype(v)>;
          Mat scaled = v * fv.asDiagonal();
          Mat out = scaled * v.adjoint();
          return out.template cast<Scalar>();
        },
        vectors_);
  }

 private:
  RealVector values_;
  std::variant<RealMatrix, Matrix<Scalar>> vectors_;
};

/// A Hermitian operator held either as a dense matrix or as a Pauli sum.
///
/// Copies share one immutable state; the Pauli decomposition, the dense
/// form and the eigensystem are computed on first use, once, thread-safely.
class HermitianOperator {
 public:
  /// Validates squareness, power-of-two dimension and Hermiticity.
  static HermitianOperator from_dense(DenseHermitian m);
  /// Validates real coefficients (within kHermitianTol; imaginary parts dropped).
  static HermitianOperator from_pauli(const PauliSum& ps);

  int n_qubits() const noexcept;
  Index dim() const noexcept;
  bool is_real() const noexcept;
  bool has_dense() const noexcept;

  StateVector apply(const StateVector& v) const;
  RealVector diagonal() const;
  Scalar element(Index row, Index col) const;

  /// Dense form; materialized from the Pauli sum when needed (n <= 12).
  const DenseHermitian& dense() const;
  /// Pauli form; decomposed from the dense matrix when needed.
  const PauliSum& pauli() const;
  const Eigensystem& eigensystem() const;

 private:
  struct State;
  explicit HermitianOperator(std::shared_ptr<State> s) : state_(std::move(s)) {}
  std::shared_ptr<State> state_;
};

}  // namespace qjd
