#pragma once

#include "qjd/core.hpp"

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qjd {

/// Tensor product of single-qubit Paulis. The leftmost letter acts on the
/// most significant bit of the basis index.
///
/// Internally the string is stored in symplectic form: a letter is X if only
/// its x bit is set, Z if only its z bit is set and Y if both are, so that
/// P = i^{#Y} X^x Z^z.
class PauliString {
 public:
  /// Parses a label over {I, X, Y, Z}; throws ParseError on other letters.
  explicit PauliString(std::string_view label);

  static PauliString from_masks(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask);
  static PauliString identity(int n_qubits);

  int n_qubits() const noexcept { return static_cast<int>(label_.size()); }
  const std::string& label() const noexcept { return label_; }
  std::uint64_t x_mask() const noexcept { return x_; }
  std::uint64_t z_mask() const noexcept { return z_; }
  int y_count() const noexcept { return std::popcount(x_ & z_); }
  bool is_diagonal() const noexcept { return x_ == 0; }
  bool is_identity() const noexcept { return x_ == 0 && z_ == 0; }

  /// i^{#Y}, the phase relating P to X^x Z^z.
  Scalar phase() const noexcept;

  /// <row|P|col>.
  Scalar element(std::uint64_t row, std::uint64_t col) const noexcept;

  friend bool operator==(const PauliString& a, const PauliString& b) noexcept {
    return a.x_ == b.x_ && a.z_ == b.z_ && a.label_.size() == b.label_.size();
  }

 private:
  PauliString(std::string label, std::uint64_t x, std::uint64_t z)
      : label_(std::move(label)), x_(x), z_(z) {}

  std::string label_;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

inline constexpr int kMaxPauliQubits = 62;

/// coeff * P v accumulated into out (out += coeff * P v), matrix-free.
template <typename InDerived, typename OutDerived>
void accumulate_pauli_action(const PauliString& p, Scalar coeff, const Eigen::MatrixBase<InDerived>& v,
                             Eigen::MatrixBase<OutDerived>& out) {
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  const Scalar base = coeff * p.phase();
  const auto dim = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t b = 0; b < dim; ++b) {
    const Scalar amp = v.coeff(static_cast<Index>(b));
    if (amp == Scalar(0)) continue;
    const bool odd = (std::popcount(z & b) & 1) != 0;
    out.coeffRef(static_cast<Index>(b ^ x)) += odd ? -base * amp : base * amp;
  }
}

/// P v.
template <typename Derived>
StateVector apply_pauli(const PauliString& p, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != (Index{1} << p.n_qubits())) {
    throw ShapeError("apply_pauli: vector length does not match " + std::to_string(p.n_qubits()) +
                     " qubits");
  }
  StateVector out = StateVector::Zero(v.size());
  accumulate_pauli_action(p, Scalar(1), v, out);
  return out;
}

struct PauliTerm {
  Scalar coefficient;
  PauliString string;
};

/// Weighted sum of Pauli strings over a common register. Duplicate strings
/// are merged (coefficients summed) on construction; the order of first
/// appearance is kept.
class PauliSum {
 public:
  explicit PauliSum(int n_qubits);
  PauliSum(int n_qubits, std::vector<PauliTerm> terms);

  int n_qubits() const noexcept { return n_qubits_; }
  Index dim() const noexcept { return Index{1} << n_qubits_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  std::span<const PauliTerm> terms() const noexcept { return terms_; }

  /// True iff every coefficient is real within tol.
  bool is_hermitian(double tol = kHermitianTol) const;
  /// True iff every term has a real matrix (coefficient times i^{#Y} real).
  bool has_real_matrix(double tol = 0.0) const;

  PauliSum scaled(Scalar factor) const;

 private:
  int n_qubits_;
  std::vector<PauliTerm> terms_;
};

/// Weights alpha_i >= 0, unitaries phase_i * P_i, s = sum alpha_i.
struct UnitaryCombination {
  std::vector<double> weights;
  std::vector<Scalar> phases;
  std::vector<PauliString> unitaries;
  double s = 0.0;

  std::size_t size() const noexcept { return weights.size(); }
};

inline constexpr double kDefaultPauliDropTol = 1e-12;

/// Dense matrix of a Pauli string via Kronecker products (n <= 12).
DenseHermitian pauli_matrix(const PauliString& p);

/// Dense matrix of a Pauli sum, O(m 2^n) (n <= 12).
DenseHermitian to_dense(const PauliSum& ps);

/// All 4^n coefficients Tr(P M)/2^n arranged as C(x_mask, z_mask), computed
/// with one Walsh-Hadamard transform per x mask in O(n 4^n).
Matrix<Scalar> pauli_coefficients(const DenseHermitian& m);

/// Pauli decomposition of a Hermitian matrix; terms with |c| <= tol dropped.
PauliSum decompose_hermitian(const DenseHermitian& m, double tol = kDefaultPauliDropTol);

/// Number of terms with |c| > tol.
std::size_t pauli_term_count(const PauliSum& ps, double tol = kDefaultPauliDropTol);
/// Same count without building the PauliSum.
std::size_t pauli_term_count(const DenseHermitian& m, double tol = kDefaultPauliDropTol);
/// Count for a diagonal matrix given by its diagonal (only I/Z strings occur).
std::size_t diagonal_pauli_term_count(const RealVector& diag, double tol = kDefaultPauliDropTol);

UnitaryCombination to_unitary_combination(const PauliSum& ps);

/// Reads `<re> <im> <label>` lines; '#' comments and blank lines ignored.
PauliSum read_pauli_sum(std::istream& in);
void write_pauli_sum(std::ostream& out, const PauliSum& ps);

}  // namespace qjd
