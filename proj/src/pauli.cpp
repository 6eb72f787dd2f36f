#include "qjd/pauli.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

namespace qjd {

namespace {

constexpr Scalar kI{0.0, 1.0};

Scalar i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::uint64_t bit_of_letter(int n_qubits, int position) {
  return std::uint64_t{1} << (n_qubits - 1 - position);
}

Matrix<Scalar> single_qubit(char letter) {
  Matrix<Scalar> m(2, 2);
  switch (letter) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -kI, kI, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw ParseError(std::string("invalid Pauli letter '") + letter + "'", 0);
  }
  return m;
}

// In-place Walsh-Hadamard transform: f(z) <- sum_b (-1)^{z.b} f(b).
void walsh_hadamard(Vector<Scalar>& f) {
  const Index n = f.size();
  for (Index h = 1; h < n; h <<= 1) {
    for (Index i = 0; i < n; i += 2 * h) {
      for (Index j = i; j < i + h; ++j) {
        const Scalar a = f[j];
        const Scalar b = f[j + h];
        f[j] = a + b;
        f[j + h] = a - b;
      }
    }
  }
}

}  // namespace

PauliString::PauliString(std::string_view label) : label_(label) {
  const int n = static_cast<int>(label.size());
  if (n == 0) throw ValidationError("Pauli string must act on at least one qubit");
  if (n > kMaxPauliQubits) throw CapacityError("Pauli string longer than supported register");
  for (int k = 0; k < n; ++k) {
    const std::uint64_t bit = bit_of_letter(n, k);
    switch (label[static_cast<std::size_t>(k)]) {
      case 'I': break;
      case 'X': x_ |= bit; break;
      case 'Y': x_ |= bit; z_ |= bit; break;
      case 'Z': z_ |= bit; break;
      default:
        throw ParseError(std::string("invalid Pauli letter '") + label[static_cast<std::size_t>(k)] +
                             "' in \"" + std::string(label) + "\"",
                         0);
    }
  }
}

PauliString PauliString::from_masks(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask) {
  if (n_qubits <= 0) throw ValidationError("Pauli string must act on at least one qubit");
  if (n_qubits > kMaxPauliQubits) throw CapacityError("Pauli string longer than supported register");
  const std::uint64_t full = (std::uint64_t{1} << n_qubits) - 1;
  if ((x_mask | z_mask) & ~full) throw ValidationError("Pauli mask has bits outside the register");
  std::string label(static_cast<std::size_t>(n_qubits), 'I');
  for (int k = 0; k < n_qubits; ++k) {
    const std::uint64_t bit = bit_of_letter(n_qubits, k);
    const bool xb = (x_mask & bit) != 0;
    const bool zb = (z_mask & bit) != 0;
    label[static_cast<std::size_t>(k)] = xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
  }
  return PauliString(std::move(label), x_mask, z_mask);
}

PauliString PauliString::identity(int n_qubits) { return from_masks(n_qubits, 0, 0); }

Scalar PauliString::phase() const noexcept { return i_power(y_count()); }

Scalar PauliString::element(std::uint64_t row, std::uint64_t col) const noexcept {
  if ((col ^ x_) != row) return Scalar(0);
  const bool odd = (std::popcount(z_ & col) & 1) != 0;
  return odd ? -phase() : phase();
}

PauliSum::PauliSum(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits <= 0) throw ValidationError("PauliSum needs at least one qubit");
}

PauliSum::PauliSum(int n_qubits, std::vector<PauliTerm> terms) : PauliSum(n_qubits) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> seen;
  terms_.reserve(terms.size());
  for (auto& term : terms) {
    if (term.string.n_qubits() != n_qubits) {
      throw ShapeError("Pauli term \"" + term.string.label() + "\" does not act on " +
                       std::to_string(n_qubits) + " qubits");
    }
    const auto key = std::make_pair(term.string.x_mask(), term.string.z_mask());
    if (auto it = seen.find(key); it != seen.end()) {
      terms_[it->second].coefficient += term.coefficient;
    } else {
      seen.emplace(key, terms_.size());
      terms_.push_back(std::move(term));
    }
  }
}

bool PauliSum::is_hermitian(double tol) const {
  for (const auto& t : terms_) {
    if (std::abs(t.coefficient.imag()) > tol) return false;
  }
  return true;
}

bool PauliSum::has_real_matrix(double tol) const {
  for (const auto& t : terms_) {
    if (std::abs((t.coefficient * t.string.phase()).imag()) > tol) return false;
  }
  return true;
}

PauliSum PauliSum::scaled(Scalar factor) const {
  std::vector<PauliTerm> out(terms_.begin(), terms_.end());
  for (auto& t : out) t.coefficient *= factor;
  return PauliSum(n_qubits_, std::move(out));
}

DenseHermitian pauli_matrix(const PauliString& p) {
  require_dense_capacity(p.n_qubits());
  Matrix<Scalar> out = single_qubit(p.label()[0]);
  for (std::size_t k = 1; k < p.label().size(); ++k) {
    Matrix<Scalar> next = Eigen::kroneckerProduct(out, single_qubit(p.label()[k])).eval();
    out = std::move(next);
  }
  return out;
}

DenseHermitian to_dense(const PauliSum& ps) {
  require_dense_capacity(ps.n_qubits());
  const Index dim = ps.dim();
  DenseHermitian m = DenseHermitian::Zero(dim, dim);
  for (const auto& term : ps.terms()) {
    const Scalar base = term.coefficient * term.string.phase();
    const std::uint64_t x = term.string.x_mask();
    const std::uint64_t z = term.string.z_mask();
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
      const bool odd = (std::popcount(z & b) & 1) != 0;
      m(static_cast<Index>(b ^ x), static_cast<Index>(b)) += odd ? -base : base;
    }
  }
  return m;
}

Matrix<Scalar> pauli_coefficients(const DenseHermitian& m) {
  if (m.rows() != m.cols()) throw ShapeError("pauli_coefficients: matrix is not square");
  const int n = qubits_for_dim(m.rows());
  require_dense_capacity(n);
  const Index dim = m.rows();
  const double scale = 1.0 / static_cast<double>(dim);
  Matrix<Scalar> coeffs(dim, dim);
  Vector<Scalar> f(dim);
  for (Index x = 0; x < dim; ++x) {
    for (Index b = 0; b < dim; ++b) f[b] = m(b, b ^ x);
    walsh_hadamard(f);
    for (Index z = 0; z < dim; ++z) {
      const int y = std::popcount(static_cast<std::uint64_t>(x & z));
      coeffs(x, z) = i_power(y) * f[z] * scale;
    }
  }
  return coeffs;
}

PauliSum decompose_hermitian(const DenseHermitian& m, double tol) {
  if (m.rows() != m.cols()) throw ShapeError("decompose_hermitian: matrix is not square");
  const int n = qubits_for_dim(m.rows());
  if (const double err = hermiticity_error(m); err > kHermitianTol) {
    std::ostringstream msg;
    msg << "decompose_hermitian: matrix is not Hermitian (max |M - M^H| = " << err << ")";
    throw ValidationError(msg.str());
  }
  const Matrix<Scalar> coeffs = pauli_coefficients(m);
  std::vector<PauliTerm> terms;
  for (Index x = 0; x < coeffs.rows(); ++x) {
    for (Index z = 0; z < coeffs.cols(); ++z) {
      const Scalar c = coeffs(x, z);
      if (std::abs(c) <= tol) continue;
      terms.push_back({Scalar(c.real(), 0.0),
                       PauliString::from_masks(n, static_cast<std::uint64_t>(x),
                                               static_cast<std::uint64_t>(z))});
    }
  }
  return PauliSum(n, std::move(terms));
}

std::size_t pauli_term_count(const PauliSum& ps, double tol) {
  std::size_t count = 0;
  for (const auto& t : ps.terms()) {
    if (std::abs(t.coefficient) > tol) ++count;
  }
  return count;
}

std::size_t pauli_term_count(const DenseHermitian& m, double tol) {
  const Matrix<Scalar> coeffs = pauli_coefficients(m);
  return static_cast<std::size_t>((coeffs.array().abs() > tol).count());
}

std::size_t diagonal_pauli_term_count(const RealVector& diag, double tol) {
  if (!is_power_of_two(static_cast<std::uint64_t>(diag.size()))) throw ShapeError("diagonal length is not a power of two");
  Vector<Scalar> f = diag.cast<Scalar>();
  walsh_hadamard(f);
  f /= static_cast<double>(diag.size());
  return static_cast<std::size_t>((f.array().abs() > tol).count());
}

UnitaryCombination to_unitary_combination(const PauliSum& ps) {
  UnitaryCombination uc;
  for (const auto& t : ps.terms()) {
    const double alpha = std::abs(t.coefficient);
    if (alpha == 0.0) continue;
    uc.weights.push_back(alpha);
    uc.phases.push_back(t.coefficient / alpha);
    uc.unitaries.push_back(t.string);
    uc.s += alpha;
  }
  if (uc.weights.empty()) {
    throw DegenerateOperatorError("to_unitary_combination: operator has no nonzero terms");
  }
  return uc;
}

PauliSum read_pauli_sum(std::istream& in) {
  std::vector<PauliTerm> terms;
  int n_qubits = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double re = 0.0;
    double im = 0.0;
    std::string label;
    if (!(fields >> re >> im >> label)) {
      throw ParseError("expected `<real> <imag> <label>`, got \"" + line + "\"", line_no);
    }
    std::string extra;
    if (fields >> extra) throw ParseError("trailing token \"" + extra + "\"", line_no);
    if (!std::isfinite(re) || !std::isfinite(im)) throw ParseError("non-finite coefficient", line_no);
    std::optional<PauliString> p;
    try {
      p.emplace(label);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (n_qubits == 0) {
      n_qubits = p->n_qubits();
    } else if (p->n_qubits() != n_qubits) {
      throw ShapeError("line " + std::to_string(line_no) + ": label \"" + label + "\" has length " +
                       std::to_string(p->n_qubits()) + ", expected " + std::to_string(n_qubits));
    }
    terms.push_back({Scalar(re, im), std::move(*p)});
  }
  if (n_qubits == 0) throw ParseError("no Pauli terms found", line_no);
  return PauliSum(n_qubits, std::move(terms));
}

void write_pauli_sum(std::ostream& out, const PauliSum& ps) {
  char buf[96];
  for (const auto& t : ps.terms()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g ", t.coefficient.real(), t.coefficient.imag());
    out << buf << t.string.label() << '\n';
  }
}

}  // namespace qjd
