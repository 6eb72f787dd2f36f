#include "qjd/models.hpp"

#include "qjd/random.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qjd {

namespace {

constexpr std::array<char, 4> kDenseMagic{'Q', 'J', 'D', 'M'};

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::ostream& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::istream& in, int bytes, const std::filesystem::path& path) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), bytes)) {
    throw ParseError("truncated dense matrix file " + path.string(), 0);
  }
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

}  // namespace

DenseHermitian build_dd_matrix(const DdMatrixSpec& spec) {
  if (spec.n_qubits <= 0) throw ValidationError("dd matrix needs at least one qubit");
  require_dense_capacity(spec.n_qubits);
  if (spec.off_diag_scale < 0.0 || !std::isfinite(spec.off_diag_scale)) {
    throw ValidationError("dd off-diagonal scale must be finite and nonnegative");
  }
  const Index dim = Index{1} << spec.n_qubits;
  std::vector<bool> used(static_cast<std::size_t>(dim), false);
  for (Index pos : spec.minima_positions) {
    if (pos < 1 || pos > dim) {
      throw ValidationError("minimum position " + std::to_string(pos) + " outside [1, " +
                            std::to_string(dim) + "]");
    }
    if (used[static_cast<std::size_t>(pos - 1)]) {
      throw ValidationError("minimum position " + std::to_string(pos) + " listed twice");
    }
    used[static_cast<std::size_t>(pos - 1)] = true;
  }
  if (spec.minima_positions.empty()) throw ValidationError("dd matrix needs at least one minimum");

  DenseHermitian m = DenseHermitian::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) m(i, i) = static_cast<double>(i + 1);
  for (Index pos : spec.minima_positions) m(pos - 1, pos - 1) = 1.0;

  SplitMix64 rng(spec.seed);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = i + 1; j < dim; ++j) {
      const double v = rng.uniform() * spec.off_diag_scale;
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

PauliSum build_ising(const IsingSpec& spec) {
  const int n = spec.n_sites;
  if (n < 2) throw ValidationError("Ising ring needs at least two sites");
  if (n > kMaxPauliQubits) throw CapacityError("Ising ring too long");
  std::vector<PauliTerm> terms;
  auto single = [n](int site, char letter) {
    std::string label(static_cast<std::size_t>(n), 'I');
    label[static_cast<std::size_t>(site)] = letter;
    return PauliString(label);
  };
  if (spec.J != 0.0) {
    for (int i = 0; i < n; ++i) {
      std::string label(static_cast<std::size_t>(n), 'I');
      label[static_cast<std::size_t>(i)] = 'Z';
      label[static_cast<std::size_t>((i + 1) % n)] = 'Z';
      terms.push_back({Scalar(-spec.J), PauliString(label)});
    }
  }
  if (spec.h != 0.0) {
    for (int i = 0; i < n; ++i) terms.push_back({Scalar(-spec.h), single(i, 'Z')});
  }
  if (spec.g != 0.0) {
    for (int i = 0; i < n; ++i) terms.push_back({Scalar(-spec.g), single(i, 'X')});
  }
  return PauliSum(n, std::move(terms));
}

PauliSum load_pauli_hamiltonian(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open Pauli Hamiltonian file " + path.string());
  PauliSum ps = read_pauli_sum(in);
  for (const auto& t : ps.terms()) {
    if (std::abs(t.coefficient.imag()) > kHermitianTol) {
      throw ValidationError(path.string() + ": term " + t.string.label() +
                            " has a non-real coefficient; the Hamiltonian is not Hermitian");
    }
  }
  return ps;
}

void save_pauli_hamiltonian(const std::filesystem::path& path, const PauliSum& ps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "# " << ps.n_qubits() << "-qubit Pauli sum, " << ps.size() << " terms: <re> <im> <label>\n";
  write_pauli_sum(out, ps);
  if (!out) throw Error("write failed for " + path.string());
}

bool is_diagonally_dominant(const DenseHermitian& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    const double off = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    if (std::abs(m(i, i)) < off) return false;
  }
  return true;
}

GroundPair exact_ground_pair(const HermitianOperator& h) {
  if (h.n_qubits() > kDenseQubitLimit) {
    throw CapacityError("exact diagonalization limited to 2^12 dimensions");
  }
  const Eigensystem& es = h.eigensystem();
  GroundPair gp{es.eigenvalues()[0], es.eigenvector(0)};
  fix_global_phase(gp.vector);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const double res = (h.apply(gp.vector) - gp.energy * gp.vector).norm();
  if (res > 1e-9 * scale) {
    throw NumericError("ground eigenpair residual " + std::to_string(res) + " above tolerance");
  }
  return gp;
}

GroundPair exact_ground_pair(const DenseHermitian& h) {
  return exact_ground_pair(HermitianOperator::from_dense(h));
}

GroundPair exact_ground_pair(const PauliSum& h) { return exact_ground_pair(HermitianOperator::from_pauli(h)); }

void write_dense_matrix(const std::filesystem::path& path, const DenseHermitian& m) {
  if (m.rows() != m.cols()) throw ShapeError("dense matrix file requires a square matrix");
  if (m.rows() > 0 && m.imag().cwiseAbs().maxCoeff() != 0.0) {
    throw ValidationError("dense matrix file stores real matrices only");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kDenseMagic.data(), kDenseMagic.size());
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) put_f64(out, m(i, j).real());
  }
  if (!out) throw Error("write failed for " + path.string());
}

DenseHermitian read_dense_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dense matrix file " + path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kDenseMagic) {
    throw ParseError(path.string() + " is not a QJDM dense matrix file", 0);
  }
  const auto dim = static_cast<Index>(get_le(in, 4, path));
  qubits_for_dim(dim);
  DenseHermitian m(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) m(i, j) = std::bit_cast<double>(get_le(in, 8, path));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError(path.string() + " has trailing bytes after the matrix payload", 0);
  }
  return m;
}

}  // namespace qjd
