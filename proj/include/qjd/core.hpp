#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qjd {

using Scalar = std::complex<double>;
using Index = Eigen::Index;

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

/// Amplitudes over the computational basis, index bit (n-1-k) is qubit k.
using StateVector = Vector<Scalar>;
/// Dense 2^n x 2^n operator; Hermiticity is checked by the functions that require it.
using DenseHermitian = Matrix<Scalar>;
using RealVector = Vector<double>;
using RealMatrix = Matrix<double>;

/// Largest qubit count for which dense 2^n x 2^n matrices are materialized.
inline constexpr int kDenseQubitLimit = 12;
/// Hermiticity tolerance used at every validation boundary.
inline constexpr double kHermitianTol = 1e-10;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DegenerateOperatorError : public Error {
 public:
  using Error::Error;
};

class DataRequiredError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

constexpr bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

/// log2 of a power-of-two dimension; throws ShapeError otherwise.
int qubits_for_dim(Index dim);

template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Rotates the global phase so the largest-magnitude entry (first on ties)
/// is real positive.
void fix_global_phase(Vector<Scalar>& v);

/// Throws CapacityError when a dense 2^n operator would be too large.
void require_dense_capacity(int n_qubits, int limit = kDenseQubitLimit);

}  // namespace qjd
