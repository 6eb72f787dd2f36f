#pragma once

#include "qjd/core.hpp"
#include "qjd/operator.hpp"
#include "qjd/pauli.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace qjd {

inline constexpr std::uint64_t kDefaultDdSeed = 20240101;

/// Diagonally dominant test matrix: H_ii = i (1-based), H_ii = 1 at every
/// listed minimum, off-diagonals uniform in [0, off_diag_scale].
struct DdMatrixSpec {
  int n_qubits = 8;
  std::vector<Index> minima_positions{1};  // 1-based
  double off_diag_scale = 1.0 / 256.0;
  std::uint64_t seed = kDefaultDdSeed;

  Index ns() const noexcept { return static_cast<Index>(minima_positions.size()); }
};

/// -J sum Z_i Z_{i+1} - h sum Z_i - g sum X_i on a periodic ring.
struct IsingSpec {
  int n_sites = 12;
  double J = 1.1;
  double h = 0.9;
  double g = 0.01;
};

struct GroundPair {
  double energy = 0.0;
  StateVector vector;
};

/// Strict upper triangle is filled row-major from a SplitMix64 stream and
/// mirrored; identical specs give bit-identical matrices.
DenseHermitian build_dd_matrix(const DdMatrixSpec& spec);

/// Site i maps to label position i (leftmost letter = site 1). Zero-valued
/// parameters contribute no terms; for n = 2 the two ring bonds merge.
PauliSum build_ising(const IsingSpec& spec);

/// Loads the `<re> <im> <label>` text format; rejects non-real coefficients.
PauliSum load_pauli_hamiltonian(const std::filesystem::path& path);
void save_pauli_hamiltonian(const std::filesystem::path& path, const PauliSum& ps);

/// |H_ii| >= sum_{j != i} |H_ij| for every row.
bool is_diagonally_dominant(const DenseHermitian& m);

/// Lowest eigenpair from the dense eigensystem (dim <= 4096). The eigenvector
/// phase is fixed so its largest-magnitude entry is real positive.
GroundPair exact_ground_pair(const HermitianOperator& h);
GroundPair exact_ground_pair(const DenseHermitian& h);
GroundPair exact_ground_pair(const PauliSum& h);

/// `QJDM` magic, u32 dim, then dim*dim row-major little-endian doubles.
/// Only real matrices can be written.
void write_dense_matrix(const std::filesystem::path& path, const DenseHermitian& m);
DenseHermitian read_dense_matrix(const std::filesystem::path& path);

}  // namespace qjd
