#pragma once

// Sample-based diagonalization: keep the n most probable computational-basis
// states of a vector, diagonalize H on their span, and return the lowest
// eigenvector lifted back to the full register.

#include "qjd/core.hpp"
#include "qjd/operator.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qjd {

struct ShotSampling {
  std::uint64_t count = 100000;
  std::uint64_t seed = 1;
};

struct SqdiagSettings {
  int n = 3;
  std::optional<ShotSampling> shots;  // empty: rank by exact probabilities
};

struct BasisSelection {
  std::vector<Index> indices;  // descending probability (or frequency), ties ascending index
  bool shortfall = false;      // shots mode observed fewer than n distinct outcomes
};

BasisSelection top_n_bases(const StateVector& v, int n, const std::optional<ShotSampling>& shots = std::nullopt);

/// (k, l) -> <e_{i_k}|H|e_{i_l}>.
DenseHermitian project_hamiltonian(const HermitianOperator& h, std::span<const Index> indices);

struct SqdiagResult {
  std::vector<Index> selected_indices;
  DenseHermitian reduced_matrix;
  double energy = 0.0;
  StateVector coefficients;   // lowest reduced eigenvector, largest entry real positive
  StateVector refined_state;  // coefficients placed on selected_indices
  bool shortfall = false;
};

SqdiagResult sqdiag_refine(const HermitianOperator& h, const StateVector& v, const SqdiagSettings& settings);

}  // namespace qjd
