#include "qjd/subspace.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace qjd {

namespace {

constexpr double kProjectedHermitianTol = 1e-8;

RitzPair lowest_pair(const Matrix<Scalar>& h_proj, const Matrix<Scalar>& basis) {
  if (h_proj.rows() == 0) throw ValidationError("Rayleigh-Ritz on an empty subspace");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(h_proj);
  if (es.info() != Eigen::Success) throw NumericError("projected eigenproblem did not converge");
  RitzPair pair;
  pair.value = es.eigenvalues()[0];
  pair.coordinates = es.eigenvectors().col(0);
  fix_global_phase(pair.coordinates);
  pair.vector = basis * pair.coordinates;
  pair.vector.normalize();
  return pair;
}

}  // namespace

double Subspace::orthonormality_error() const {
  if (empty()) return 0.0;
  const Matrix<Scalar> gram = basis_.adjoint() * basis_;
  return (gram - Matrix<Scalar>::Identity(size(), size())).cwiseAbs().maxCoeff();
}

bool gram_schmidt_append(Subspace& v, const StateVector& t, double reject_tol) {
  if (t.size() != v.ambient_dim()) throw ShapeError("gram_schmidt_append: vector length mismatch");
  if (!t.allFinite()) throw NumericError("gram_schmidt_append: non-finite correction vector");
  const double t_norm = t.norm();
  if (t_norm == 0.0) return false;
  StateVector w = t;
  if (!v.empty()) {
    for (int pass = 0; pass < 2; ++pass) {
      const StateVector overlaps = v.basis_.adjoint() * w;
      w -= v.basis_ * overlaps;
    }
  }
  const double w_norm = w.norm();
  if (w_norm < reject_tol * t_norm) return false;
  const Index k = v.size();
  v.basis_.conservativeResize(Eigen::NoChange, k + 1);
  v.basis_.col(k) = w / w_norm;
  return true;
}

ProjectedProblem::ProjectedProblem(const HermitianOperator& h)
    : h_(h), v_(h.dim()), hv_(h.dim(), 0), h_proj_(0, 0) {}

bool ProjectedProblem::append(const StateVector& t, double reject_tol) {
  if (!gram_schmidt_append(v_, t, reject_tol)) return false;
  const Index k = v_.size() - 1;
  const StateVector hv_new = h_.apply(v_.basis().col(k));
  hv_.conservativeResize(Eigen::NoChange, k + 1);
  hv_.col(k) = hv_new;

  const StateVector column = v_.basis().adjoint() * hv_new;  // <v_j|H v_k>
  const StateVector row = hv_.adjoint() * v_.basis().col(k);   // <H v_j|v_k> = conj(<v_k|H v_j>)
  const double asym = (column - row).cwiseAbs().maxCoeff();
  if (asym > kProjectedHermitianTol) {
    std::ostringstream msg;
    msg << "projected matrix lost Hermiticity (" << asym << "); subspace orthonormality is broken";
    throw NumericError(msg.str());
  }
  h_proj_.conservativeResize(k + 1, k + 1);
  h_proj_.col(k) = column;
  h_proj_.row(k) = column.adjoint();
  h_proj_(k, k) = Scalar(column[k].real(), 0.0);
  return true;
}

RitzPair ProjectedProblem::lowest_ritz_pair() const { return lowest_pair(h_proj_, v_.basis()); }

StateVector ProjectedProblem::apply_to_ritz(const RitzPair& pair) const {
  // rv was renormalized after lifting; undo that scale for H V y.
  const double lift = (v_.basis() * pair.coordinates).norm();
  return hv_ * pair.coordinates / lift;
}

RitzPair rayleigh_ritz(const HermitianOperator& h, const Subspace& v) {
  if (v.empty()) throw ValidationError("Rayleigh-Ritz on an empty subspace");
  if (v.ambient_dim() != h.dim()) throw ShapeError("Rayleigh-Ritz: subspace and operator dimensions differ");
  Matrix<Scalar> hv(h.dim(), v.size());
  for (Index j = 0; j < v.size(); ++j) hv.col(j) = h.apply(v.basis().col(j));
  Matrix<Scalar> h_proj = v.basis().adjoint() * hv;
  if (const double err = hermiticity_error(h_proj); err > kProjectedHermitianTol) {
    std::ostringstream msg;
    msg << "projected matrix lost Hermiticity (" << err << "); subspace orthonormality is broken";
    throw NumericError(msg.str());
  }
  h_proj = (0.5 * (h_proj + h_proj.adjoint())).eval();
  return lowest_pair(h_proj, v.basis());
}

StateVector residual(const HermitianOperator& h, const RitzPair& pair) {
  return h.apply(pair.vector) - pair.value * pair.vector;
}

ConvergenceCheck check_convergence(double residual_norm, const RitzPair& pair, std::optional<double> oracle_energy,
                                   const ConvergenceCriteria& criteria) {
  const bool use_residual = criteria.gate != ConvergenceGate::EnergyOnly;
  const bool use_energy = criteria.gate != ConvergenceGate::ResidualOnly;
  if (use_residual && residual_norm <= criteria.residual_tol) {
    return {true, ConvergenceCriterion::Residual};
  }
  if (use_energy && oracle_energy && std::abs(pair.value - *oracle_energy) <= criteria.energy_tol) {
    return {true, ConvergenceCriterion::Energy};
  }
  return {};
}

std::string_view to_string(ConvergenceGate gate) {
  switch (gate) {
    case ConvergenceGate::Either: return "either";
    case ConvergenceGate::ResidualOnly: return "residual";
    case ConvergenceGate::EnergyOnly: return "energy";
  }
  return "either";
}

ConvergenceGate parse_convergence_gate(std::string_view s) {
  if (s == "either") return ConvergenceGate::Either;
  if (s == "residual") return ConvergenceGate::ResidualOnly;
  if (s == "energy") return ConvergenceGate::EnergyOnly;
  throw ValidationError("unknown convergence gate \"" + std::string(s) + "\" (expected either|residual|energy)");
}

}  // namespace qjd
