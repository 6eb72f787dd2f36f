#pragma once

#include "qjd/core.hpp"

#include <string_view>
#include <vector>

namespace qjd {

inline constexpr double kDefaultGaussianSigma = 2.0;

struct GaussianRefSpec {
  int n_qubits = 8;
  std::vector<Index> centers{0};  // 0-based basis indices, one per peak
  double sigma = kDefaultGaussianSigma;
};

/// Real nonnegative profile sum_c exp(-(j - c)^2 / (2 sigma^2)), normalized.
/// Peaks do not wrap around the index range.
StateVector gaussian_reference(const GaussianRefSpec& spec);

/// MSB-first bitstring to basis index ("0011110011" -> 243).
Index index_from_bitstring(std::string_view bitstring);

/// Probability 1 - f on the bitstring's index and f/2 on each adjacent index;
/// a missing neighbour at either end of the range is dropped and the weights
/// renormalized. Amplitudes are the nonnegative square roots.
StateVector hf_spread_reference(std::string_view bitstring, double spread_fraction);

StateVector basis_state(Index index, int n_qubits);

}  // namespace qjd
