#include "qjd/state_prep.hpp"

#include <cmath>

namespace qjd {

namespace {

void check_qubits(int n_qubits) {
  if (n_qubits <= 0) throw ValidationError("state needs at least one qubit");
  if (n_qubits > 30) throw CapacityError("statevector register too large");
}

}  // namespace

StateVector gaussian_reference(const GaussianRefSpec& spec) {
  check_qubits(spec.n_qubits);
  if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) {
    throw ValidationError("Gaussian width must be positive");
  }
  if (spec.centers.empty()) throw ValidationError("Gaussian reference needs at least one center");
  const Index dim = Index{1} << spec.n_qubits;
  for (Index c : spec.centers) {
    if (c < 0 || c >= dim) throw ValidationError("Gaussian center " + std::to_string(c) + " out of range");
  }
  const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
  StateVector v = StateVector::Zero(dim);
  for (Index j = 0; j < dim; ++j) {
    double a = 0.0;
    for (Index c : spec.centers) {
      const double d = static_cast<double>(j - c);
      a += std::exp(-d * d * inv);
    }
    v[j] = a;
  }
  const double norm = v.norm();
  if (norm == 0.0) throw NumericError("Gaussian reference underflowed to zero");
  return v / norm;
}

Index index_from_bitstring(std::string_view bitstring) {
  if (bitstring.empty()) throw ValidationError("empty bitstring");
  if (bitstring.size() > 30) throw CapacityError("bitstring longer than supported register");
  Index idx = 0;
  for (char ch : bitstring) {
    if (ch != '0' && ch != '1') {
      throw ValidationError("bitstring \"" + std::string(bitstring) + "\" has a non-binary character");
    }
    idx = (idx << 1) | (ch == '1' ? 1 : 0);
  }
  return idx;
}

StateVector hf_spread_reference(std::string_view bitstring, double spread_fraction) {
  if (!(spread_fraction >= 0.0 && spread_fraction < 1.0)) {
    throw ValidationError("spread fraction must lie in [0, 1)");
  }
  const Index center = index_from_bitstring(bitstring);
  const int n = static_cast<int>(bitstring.size());
  const Index dim = Index{1} << n;
  RealVector weights = RealVector::Zero(dim);
  weights[center] = 1.0 - spread_fraction;
  if (center > 0) weights[center - 1] = spread_fraction / 2.0;
  if (center + 1 < dim) weights[center + 1] = spread_fraction / 2.0;
  weights /= weights.sum();
  return weights.cwiseSqrt().cast<Scalar>();
}

StateVector basis_state(Index index, int n_qubits) {
  check_qubits(n_qubits);
  const Index dim = Index{1} << n_qubits;
  if (index < 0 || index >= dim) {
    throw ValidationError("basis index " + std::to_string(index) + " outside [0, " + std::to_string(dim) + ")");
  }
  StateVector v = StateVector::Zero(dim);
  v[index] = 1.0;
  return v;
}

}  // namespace qjd
