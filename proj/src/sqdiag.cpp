#include "qjd/sqdiag.hpp"

#include "qjd/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <numeric>

namespace qjd {

namespace {

std::vector<Index> rank_by_weight(const std::vector<std::pair<Index, double>>& weighted, int n) {
  std::vector<std::pair<Index, double>> sorted = weighted;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<Index> out;
  const auto take = std::min<std::size_t>(sorted.size(), static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < take; ++i) out.push_back(sorted[i].first);
  return out;
}

}  // namespace

BasisSelection top_n_bases(const StateVector& v, int n, const std::optional<ShotSampling>& shots) {
  if (n <= 0) throw ValidationError("SQDiag needs n >= 1 basis states");
  if (static_cast<Index>(n) > v.size()) {
    throw ValidationError("SQDiag n = " + std::to_string(n) + " exceeds the register dimension " +
                          std::to_string(v.size()));
  }
  const RealVector prob = v.cwiseAbs2();
  BasisSelection sel;
  if (!shots) {
    std::vector<std::pair<Index, double>> weighted(static_cast<std::size_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) weighted[static_cast<std::size_t>(i)] = {i, prob[i]};
    sel.indices = rank_by_weight(weighted, n);
    return sel;
  }
  if (shots->count == 0) throw ValidationError("SQDiag shot count must be positive");
  std::vector<double> cdf(static_cast<std::size_t>(prob.size()));
  std::partial_sum(prob.begin(), prob.end(), cdf.begin());
  const double total = cdf.back();
  if (!(total > 0.0)) throw ValidationError("SQDiag input state is zero");
  SplitMix64 rng(shots->seed);
  std::map<Index, double> counts;
  for (std::uint64_t s = 0; s < shots->count; ++s) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // Skip zero-probability plateaus so they can never be drawn.
    auto idx = static_cast<Index>(it - cdf.begin());
    while (prob[idx] == 0.0 && idx + 1 < prob.size()) ++idx;
    counts[idx] += 1.0;
  }
  std::vector<std::pair<Index, double>> weighted(counts.begin(), counts.end());
  sel.indices = rank_by_weight(weighted, n);
  sel.shortfall = sel.indices.size() < static_cast<std::size_t>(n);
  return sel;
}

DenseHermitian project_hamiltonian(const HermitianOperator& h, std::span<const Index> indices) {
  const auto k = static_cast<Index>(indices.size());
  for (Index i : indices) {
    if (i < 0 || i >= h.dim()) throw ValidationError("basis index " + std::to_string(i) + " out of range");
  }
  std::vector<Index> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("project_hamiltonian: indices are not distinct");
  }
  DenseHermitian m(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      m(a, b) = h.element(indices[static_cast<std::size_t>(a)], indices[static_cast<std::size_t>(b)]);
    }
  }
  return m;
}

SqdiagResult sqdiag_refine(const HermitianOperator& h, const StateVector& v, const SqdiagSettings& settings) {
  if (v.size() != h.dim()) throw ShapeError("SQDiag: state and Hamiltonian dimensions differ");
  const BasisSelection sel = top_n_bases(v, settings.n, settings.shots);
  SqdiagResult out;
  out.selected_indices = sel.indices;
  out.shortfall = sel.shortfall;
  out.reduced_matrix = project_hamiltonian(h, out.selected_indices);
  const DenseHermitian sym = 0.5 * (out.reduced_matrix + out.reduced_matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseHermitian> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("SQDiag reduced eigenproblem did not converge");
  out.energy = es.eigenvalues()[0];
  out.coefficients = es.eigenvectors().col(0);
  fix_global_phase(out.coefficients);
  out.coefficients.normalize();
  out.refined_state = StateVector::Zero(h.dim());
  for (std::size_t k = 0; k < out.selected_indices.size(); ++k) {
    out.refined_state[out.selected_indices[k]] = out.coefficients[static_cast<Index>(k)];
  }
  return out;
}

}  // namespace qjd
