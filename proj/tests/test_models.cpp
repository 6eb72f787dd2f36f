#include "oracles.hpp"
#include "qjd/models.hpp"
#include "qjd/random.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace qjd;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("qjd_test_" + name); }

DenseHermitian ising_oracle(int n, double J, double h, double g) {
  oracle::Terms terms;
  auto label_with = [n](std::initializer_list<std::pair<int, char>> letters) {
    std::string s(static_cast<std::size_t>(n), 'I');
    for (auto [site, c] : letters) s[static_cast<std::size_t>(site)] = c;
    return s;
  };
  for (int i = 0; i < n; ++i) {
    terms.emplace_back(-J, label_with({{i, 'Z'}, {(i + 1) % n, 'Z'}}));
    terms.emplace_back(-h, label_with({{i, 'Z'}}));
    terms.emplace_back(-g, label_with({{i, 'X'}}));
  }
  return oracle::dense(terms, n);
}

}  // namespace

TEST(SplitMix64, KnownStream) {
  // Reference values of the published SplitMix64 generator for seed 0.
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
  SplitMix64 u(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(DdMatrix, DiagonalLayout) {
  DdMatrixSpec spec;
  const DenseHermitian h = build_dd_matrix(spec);
  ASSERT_EQ(h.rows(), 256);
  for (Index i = 0; i < 256; ++i) EXPECT_EQ(h(i, i).real(), static_cast<double>(i + 1));

  spec.minima_positions = {1, 256};
  const DenseHermitian h2 = build_dd_matrix(spec);
  EXPECT_EQ(h2(0, 0).real(), 1.0);
  EXPECT_EQ(h2(255, 255).real(), 1.0);
  EXPECT_EQ(h2(1, 1).real(), 2.0);
}

TEST(DdMatrix, OffDiagonalsFollowSeededRowMajorStream) {
  DdMatrixSpec spec;
  spec.n_qubits = 3;
  spec.seed = 99;
  const DenseHermitian h = build_dd_matrix(spec);
  SplitMix64 rng(99);
  for (Index i = 0; i < 8; ++i) {
    for (Index j = i + 1; j < 8; ++j) {
      const double expected = rng.uniform() * spec.off_diag_scale;
      EXPECT_EQ(h(i, j).real(), expected);
      EXPECT_EQ(h(j, i), h(i, j));
      EXPECT_EQ(h(i, j).imag(), 0.0);
    }
  }
}

TEST(DdMatrix, DeterministicAndDominant) {
  DdMatrixSpec spec;
  spec.minima_positions = {1, 128, 256};
  const DenseHermitian a = build_dd_matrix(spec);
  const DenseHermitian b = build_dd_matrix(spec);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(is_diagonally_dominant(a));
  EXPECT_LE(a.imag().cwiseAbs().maxCoeff(), 0.0);
  spec.seed += 1;
  EXPECT_FALSE(build_dd_matrix(spec) == a);
}

TEST(DdMatrix, ZeroScaleIsDiagonalWithGroundEnergyOne) {
  DdMatrixSpec spec;
  spec.n_qubits = 4;
  spec.off_diag_scale = 0.0;
  const DenseHermitian h = build_dd_matrix(spec);
  EXPECT_TRUE(h.isDiagonal());
  EXPECT_DOUBLE_EQ(exact_ground_pair(h).energy, 1.0);
}

TEST(DdMatrix, ValidatesMinima) {
  DdMatrixSpec spec;
  spec.minima_positions = {0};
  EXPECT_THROW(build_dd_matrix(spec), ValidationError);
  spec.minima_positions = {257};
  EXPECT_THROW(build_dd_matrix(spec), ValidationError);
  spec.minima_positions = {3, 3};
  EXPECT_THROW(build_dd_matrix(spec), ValidationError);
}

TEST(Ising, MatchesOracleAndTermCount) {
  for (int n = 3; n <= 5; ++n) {
    const PauliSum s = build_ising({n, 1.1, 0.9, 0.3});
    EXPECT_EQ(s.size(), static_cast<std::size_t>(3 * n));
    EXPECT_LT((to_dense(s) - ising_oracle(n, 1.1, 0.9, 0.3)).cwiseAbs().maxCoeff(), 1e-14);
    // Decomposing the dense form recovers the same 3n-term structure.
    EXPECT_EQ(pauli_term_count(decompose_hermitian(to_dense(s))), static_cast<std::size_t>(3 * n));
  }
  EXPECT_EQ(build_ising({12, 1.1, 0.9, 0.01}).size(), 36u);
}

TEST(Ising, TwoSiteRingKeepsBothBonds) {
  const PauliSum s = build_ising({2, 1.1, 0.9, 0.0});
  const DenseHermitian h = to_dense(s);
  // |00>: two ZZ bonds and two Z fields.
  EXPECT_NEAR(h(0, 0).real(), -2 * 1.1 - 2 * 0.9, 1e-14);
  EXPECT_TRUE(h.isDiagonal());
  const GroundPair g = exact_ground_pair(s);
  EXPECT_NEAR(g.energy, -4.0, 1e-12);
  EXPECT_NEAR(std::abs(g.vector[0]), 1.0, 1e-12);
  EXPECT_LT((h - ising_oracle(2, 1.1, 0.9, 0.0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Ising, DominanceDependsOnTransverseField) {
  // Every row carries n off-diagonal entries of size g.
  EXPECT_TRUE(is_diagonally_dominant(to_dense(build_ising({3, 1.1, 0.9, 0.01}))));
  EXPECT_FALSE(is_diagonally_dominant(to_dense(build_ising({3, 1.1, 0.9, 1.0}))));
  // With an even ring, rows with balanced magnetization and four domain walls
  // have a zero diagonal, so weak coupling is not enough for strict row dominance.
  const DenseHermitian even = to_dense(build_ising({8, 1.1, 0.9, 0.01}));
  EXPECT_FALSE(is_diagonally_dominant(even));
  EXPECT_NEAR(even.diagonal().cwiseAbs().minCoeff(), 0.0, 1e-14);
  for (Index r = 0; r < even.rows(); ++r) {
    EXPECT_NEAR(even.row(r).cwiseAbs().sum() - std::abs(even(r, r)), 8 * 0.01, 1e-12);
  }
}

TEST(Dominance, HandExamples) {
  DenseHermitian a(2, 2);
  a << 1, 0, 0, 2;
  EXPECT_TRUE(is_diagonally_dominant(a));
  a << 1, 2, 2, 1;
  EXPECT_FALSE(is_diagonally_dominant(a));
}

TEST(GroundPair, HandExamples) {
  DenseHermitian d = DenseHermitian::Zero(4, 4);
  d.diagonal() << 3, 1, 2, 5;
  GroundPair g = exact_ground_pair(d);
  EXPECT_DOUBLE_EQ(g.energy, 1.0);
  EXPECT_NEAR(g.vector[1].real(), 1.0, 1e-15);

  DenseHermitian m(2, 2);
  m << 1, 0.1, 0.1, 2;
  g = exact_ground_pair(m);
  EXPECT_NEAR(g.energy, (3.0 - std::sqrt(1.04)) / 2.0, 1e-14);
  EXPECT_NEAR(g.energy, 0.990098, 1e-6);
}

TEST(GroundPair, ResidualAndPhaseConvention) {
  oracle::Random rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseHermitian h = rng.hermitian(16);
    const GroundPair g = exact_ground_pair(h);
    const double scale = h.cwiseAbs().maxCoeff();
    EXPECT_LE((h * g.vector - g.energy * g.vector).norm(), 1e-9 * scale);
    EXPECT_NEAR(g.energy, oracle::ground(h).first, 1e-11);
    Index at = 0;
    g.vector.cwiseAbs().maxCoeff(&at);
    EXPECT_GT(g.vector[at].real(), 0.0);
    EXPECT_EQ(g.vector[at].imag(), 0.0);
  }
}

TEST(GroundPair, CapacityGuard) {
  EXPECT_THROW(exact_ground_pair(build_ising({13, 1.0, 1.0, 1.0})), CapacityError);
}

TEST(PauliFile, LoadSaveAndValidation) {
  const fs::path p = temp_path("ham.pauli");
  save_pauli_hamiltonian(p, build_ising({4, 1.1, 0.9, 0.5}));
  const PauliSum back = load_pauli_hamiltonian(p);
  EXPECT_EQ(back.size(), 12u);
  EXPECT_LT((to_dense(back) - ising_oracle(4, 1.1, 0.9, 0.5)).cwiseAbs().maxCoeff(), 1e-14);

  {
    std::ofstream f(p);
    f << "0.5 0.0 X\n0.5 0.0 X\n";
  }
  const PauliSum merged = load_pauli_hamiltonian(p);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_DOUBLE_EQ(merged.terms()[0].coefficient.real(), 1.0);

  {
    std::ofstream f(p);
    f << "1.0 0.5 X\n";
  }
  EXPECT_THROW(load_pauli_hamiltonian(p), ValidationError);
  EXPECT_THROW(load_pauli_hamiltonian(temp_path("does_not_exist.pauli")), Error);
  fs::remove(p);
}

TEST(DenseFile, RoundTripIsBitExact) {
  const fs::path p = temp_path("dd.qjdm");
  DdMatrixSpec spec;
  spec.n_qubits = 5;
  const DenseHermitian h = build_dd_matrix(spec);
  write_dense_matrix(p, h);
  EXPECT_EQ(fs::file_size(p), 4u + 4u + 32u * 32u * 8u);
  EXPECT_TRUE(read_dense_matrix(p) == h);

  std::ifstream in(p, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "QJDM");
  unsigned char dim_bytes[4];
  in.read(reinterpret_cast<char*>(dim_bytes), 4);
  EXPECT_EQ(dim_bytes[0], 32);
  EXPECT_EQ(dim_bytes[1] | dim_bytes[2] | dim_bytes[3], 0);
  in.close();

  {
    std::ofstream f(p, std::ios::binary | std::ios::app);
    f << 'x';
  }
  EXPECT_THROW(read_dense_matrix(p), Error);
  fs::remove(p);
}
