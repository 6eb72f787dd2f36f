#include "qjd/core.hpp"

namespace qjd {

int qubits_for_dim(Index dim) {
  if (dim <= 0 || !is_power_of_two(static_cast<std::uint64_t>(dim))) {
    throw ShapeError("dimension " + std::to_string(dim) + " is not a power of two");
  }
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  return n;
}

void require_dense_capacity(int n_qubits, int limit) {
  if (n_qubits > limit) {
    throw CapacityError("dense operator on " + std::to_string(n_qubits) + " qubits exceeds the " +
                        std::to_string(limit) + "-qubit limit");
  }
}

void fix_global_phase(Vector<Scalar>& v) {
  if (v.size() == 0) return;
  Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const double mag = std::abs(v[k]);
  if (mag == 0.0) return;
  v *= std::conj(v[k]) / mag;
  v[k] = Scalar(mag, 0.0);
}

}  // namespace qjd
