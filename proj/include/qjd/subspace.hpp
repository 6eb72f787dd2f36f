#pragma once

#include "qjd/core.hpp"
#include "qjd/operator.hpp"

#include <optional>
#include <string_view>

namespace qjd {

inline constexpr double kDefaultRejectTol = 1e-8;

/// Ordered orthonormal basis of the search space, stored as columns.
class Subspace {
 public:
  explicit Subspace(Index ambient_dim) : basis_(ambient_dim, 0) {}

  Index ambient_dim() const noexcept { return basis_.rows(); }
  Index size() const noexcept { return basis_.cols(); }
  bool empty() const noexcept { return basis_.cols() == 0; }
  const Matrix<Scalar>& basis() const noexcept { return basis_; }
  auto vector(Index i) const { return basis_.col(i); }

  /// max |V^H V - I|.
  double orthonormality_error() const;

 private:
  friend bool gram_schmidt_append(Subspace&, const StateVector&, double);
  Matrix<Scalar> basis_;
};

/// Classical Gram-Schmidt against the basis, run twice, then normalization.
/// Returns false (subspace unchanged) when the orthogonalized norm falls
/// below reject_tol * |t|. Throws NumericError on non-finite input.
[[nodiscard]] bool gram_schmidt_append(Subspace& v, const StateVector& t, double reject_tol = kDefaultRejectTol);

struct RitzPair {
  double value = 0.0;
  StateVector vector;         // V y, unit norm
  StateVector coordinates;    // y
};

/// Projected matrix V^H H V kept in step with a growing subspace: only the
/// new row and column are computed per appended vector.
class ProjectedProblem {
 public:
  explicit ProjectedProblem(const HermitianOperator& h);

  const HermitianOperator& op() const noexcept { return h_; }
  const Subspace& subspace() const noexcept { return v_; }
  const Matrix<Scalar>& projected() const noexcept { return h_proj_; }

  /// Appends t through gram_schmidt_append and extends H V and V^H H V.
  [[nodiscard]] bool append(const StateVector& t, double reject_tol = kDefaultRejectTol);

  /// Lowest Ritz pair of the current subspace.
  RitzPair lowest_ritz_pair() const;
  /// H |rv> from the cached H V columns.
  StateVector apply_to_ritz(const RitzPair& pair) const;

 private:
  HermitianOperator h_;
  Subspace v_;
  Matrix<Scalar> hv_;
  Matrix<Scalar> h_proj_;
};

/// Rayleigh-Ritz from scratch, lowest pair.
RitzPair rayleigh_ritz(const HermitianOperator& h, const Subspace& v);

/// r = (H - E') rv.
StateVector residual(const HermitianOperator& h, const RitzPair& pair);

enum class ConvergenceGate { Either, ResidualOnly, EnergyOnly };

struct ConvergenceCriteria {
  double residual_tol = 1e-10;  // c in |r| <= c
  double energy_tol = 1e-10;    // |E' - E0| <= eps_E, oracle runs only
  ConvergenceGate gate = ConvergenceGate::Either;
};

enum class ConvergenceCriterion { None, Residual, Energy };

struct ConvergenceCheck {
  bool converged = false;
  ConvergenceCriterion criterion = ConvergenceCriterion::None;
};

ConvergenceCheck check_convergence(double residual_norm, const RitzPair& pair, std::optional<double> oracle_energy,
                                   const ConvergenceCriteria& criteria);

std::string_view to_string(ConvergenceGate gate);
ConvergenceGate parse_convergence_gate(std::string_view s);

}  // namespace qjd
