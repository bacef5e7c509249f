#pragma once

#include <complex>

#include <Eigen/Core>

#include "linmeas/model.hpp"

namespace linmeas {

/// Ordered phase-space coordinates of the object/probe pair.
enum class Coord : int { x0 = 0, X0 = 1, p0 = 2, P0 = 3 };

/// cx0 x0 + cX0 X0 + cp0 p0 + cP0 P0 + cI I, with real coefficients.
struct CanonicalExpr {
  double cx0 = 0.0, cX0 = 0.0, cp0 = 0.0, cP0 = 0.0, cI = 0.0;

  static constexpr CanonicalExpr x0() { return {1, 0, 0, 0, 0}; }
  static constexpr CanonicalExpr X0() { return {0, 1, 0, 0, 0}; }
  static constexpr CanonicalExpr p0() { return {0, 0, 1, 0, 0}; }
  static constexpr CanonicalExpr P0() { return {0, 0, 0, 1, 0}; }
  static constexpr CanonicalExpr identity(double c = 1.0) { return {0, 0, 0, 0, c}; }

  constexpr CanonicalExpr& operator+=(const CanonicalExpr& o) {
    cx0 += o.cx0; cX0 += o.cX0; cp0 += o.cp0; cP0 += o.cP0; cI += o.cI;
    return *this;
  }
  constexpr CanonicalExpr& operator-=(const CanonicalExpr& o) { return *this += o * -1.0; }
  constexpr CanonicalExpr& operator*=(double s) {
    cx0 *= s; cX0 *= s; cp0 *= s; cP0 *= s; cI *= s;
    return *this;
  }

  friend constexpr CanonicalExpr operator+(CanonicalExpr a, const CanonicalExpr& b) { return a += b; }
  friend constexpr CanonicalExpr operator-(CanonicalExpr a, const CanonicalExpr& b) { return a -= b; }
  friend constexpr CanonicalExpr operator-(CanonicalExpr a) { return a *= -1.0; }
  friend constexpr CanonicalExpr operator*(CanonicalExpr a, double s) { return a *= s; }
  friend constexpr CanonicalExpr operator*(double s, CanonicalExpr a) { return a *= s; }
  friend constexpr bool operator==(const CanonicalExpr&, const CanonicalExpr&) = default;

  double max_abs_diff(const CanonicalExpr& o) const noexcept;
};

/// [a, b] = coefficient * i hbar * I. The commutator of two linear
/// expressions is always a c-number, so one real coefficient captures it.
struct CommutatorValue {
  double coefficient = 0.0;
  std::complex<double> value(double hbar) const { return {0.0, coefficient * hbar}; }
};

CommutatorValue commutator(const CanonicalExpr& a, const CanonicalExpr& b) noexcept;

struct PositionPair {
  CanonicalExpr object;  // x_t
  CanonicalExpr probe;   // X_t
};

struct MomentumPair {
  CanonicalExpr object;  // p_t
  CanonicalExpr probe;   // P_t
};

/// Estimators read off the probe: `pre` estimates x0, `post` estimates x_t.
struct ResultOperators {
  CanonicalExpr pre;
  CanonicalExpr post;
};

PositionPair heisenberg_positions(const LinearModel& model) noexcept;
MomentumPair heisenberg_momenta(const LinearModel& model) noexcept;

/// (x0)_exp = X_t/beta1 - (beta2/beta1)<X0>,  (x_t)_exp = (alpha1/beta1) X_t - <X0>/(beta1 Gamma).
/// Throws Error{Unmeasurable} if beta1 = 0.
ResultOperators result_operators(const LinearModel& model, double probe_mean_X0);

/// Ozawa's estimators: both are the bare probe readout X_t.
ResultOperators ozawa_result_operators(const LinearModel& model) noexcept;

/// H = (1/2) sum_ij M_ij z_i z_j in symmetrized ordering over (x0, X0, p0, P0),
/// per unit coupling K. The evolution parameter is g0 = K t.
class QuadraticHamiltonian {
 public:
  QuadraticHamiltonian() = default;
  explicit QuadraticHamiltonian(const Eigen::Matrix4d& matrix, double g0 = 1.0);

  /// Adds c * a * b (symmetrized if a and b do not commute).
  QuadraticHamiltonian& add_term(Coord a, Coord b, double c);

  const Eigen::Matrix4d& matrix() const noexcept { return matrix_; }
  double g0() const noexcept { return g0_; }
  QuadraticHamiltonian& set_g0(double g0) { g0_ = g0; return *this; }

  /// Generator N of dz/dt = N z (so z_t = exp(g0 N) z_0).
  Eigen::Matrix4d generator() const;

 private:
  Eigen::Matrix4d matrix_ = Eigen::Matrix4d::Zero();
  double g0_ = 1.0;
};

QuadraticHamiltonian von_neumann_hamiltonian(double g0 = 1.0);  // K x0 P0
QuadraticHamiltonian ozawa_hamiltonian(double g0 = 1.0);        // K pi/(3 sqrt3) (2x0P0 - 2p0X0 + x0p0 - X0P0)
QuadraticHamiltonian momentum_conserving_hamiltonian(double g0); // K (p0+P0)(X0-x0)

struct IntegratedMap {
  LinearModel position;
  MomentumMap momentum;
  Eigen::Matrix4d phase_space;  // z_t = phase_space * z_0
  bool nilpotent_generator = false;
};

/// Solves the linear Heisenberg equations for a quadratic Hamiltonian with
/// free terms neglected. Throws Error{NotPointTransform} when positions pick
/// up momentum components and Error{NonUnitaryResult} when |Gamma| != 1.
IntegratedMap integrate_hamiltonian(const QuadraticHamiltonian& h, double hbar = 1.0);

}  // namespace linmeas
