#include "linmeas/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <unsupported/Eigen/MatrixFunctions>

#include "linmeas/error.hpp"

namespace linmeas {

double CanonicalExpr::max_abs_diff(const CanonicalExpr& o) const noexcept {
  return std::max({std::abs(cx0 - o.cx0), std::abs(cX0 - o.cX0), std::abs(cp0 - o.cp0),
                   std::abs(cP0 - o.cP0), std::abs(cI - o.cI)});
}

CommutatorValue commutator(const CanonicalExpr& a, const CanonicalExpr& b) noexcept {
  // [x0, p0] = [X0, P0] = i hbar; every other pair commutes.
  return {a.cx0 * b.cp0 - a.cp0 * b.cx0 + a.cX0 * b.cP0 - a.cP0 * b.cX0};
}

PositionPair heisenberg_positions(const LinearModel& m) noexcept {
  return {{m.alpha1(), m.alpha2(), 0, 0, 0}, {m.beta1(), m.beta2(), 0, 0, 0}};
}

MomentumPair heisenberg_momenta(const LinearModel& m) noexcept {
  const auto mm = momentum_map(m);
  return {{0, 0, mm.a1, mm.a2, 0}, {0, 0, mm.b1, mm.b2, 0}};
}

ResultOperators result_operators(const LinearModel& m, double probe_mean_X0) {
  require_measurable(m);
  const auto [xt, Xt] = heisenberg_positions(m);
  const auto mean = CanonicalExpr::identity(probe_mean_X0);
  CanonicalExpr pre = Xt * (1.0 / m.beta1()) - mean * (m.beta2() / m.beta1());
  CanonicalExpr post = Xt * (m.alpha1() / m.beta1()) - mean * (1.0 / (m.beta1() * m.gamma()));
  return {pre, post};
}

ResultOperators ozawa_result_operators(const LinearModel& m) noexcept {
  const auto Xt = heisenberg_positions(m).probe;
  return {Xt, Xt};
}

QuadraticHamiltonian::QuadraticHamiltonian(const Eigen::Matrix4d& matrix, double g0)
    : matrix_(matrix), g0_(g0) {
  if (!matrix.allFinite() || !std::isfinite(g0)) {
    throw Error(ErrorKind::InvalidInput, "Hamiltonian coefficients must be finite");
  }
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + matrix.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::InvalidInput, "Hamiltonian coefficient matrix must be symmetric");
  }
}

QuadraticHamiltonian& QuadraticHamiltonian::add_term(Coord a, Coord b, double c) {
  const int i = static_cast<int>(a), j = static_cast<int>(b);
  // (1/2)(M_ij + M_ji) z_i z_j; the ordering constant of x p vs p x only
  // touches the identity component, which the Heisenberg equations ignore.
  matrix_(i, j) += c;
  matrix_(j, i) += c;
  return *this;
}

Eigen::Matrix4d QuadraticHamiltonian::generator() const {
  // dz_k/dt = (i/hbar)[H, z_k] = (J M z)_k with J = [[0, I], [-I, 0]].
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J.topRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
  J.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  return J * matrix_;
}

QuadraticHamiltonian von_neumann_hamiltonian(double g0) {
  QuadraticHamiltonian h;
  h.add_term(Coord::x0, Coord::P0, 1.0);
  return h.set_g0(g0);
}

QuadraticHamiltonian ozawa_hamiltonian(double g0) {
  const double c = std::numbers::pi / (3.0 * std::sqrt(3.0));
  QuadraticHamiltonian h;
  h.add_term(Coord::x0, Coord::P0, 2.0 * c)
      .add_term(Coord::p0, Coord::X0, -2.0 * c)
      .add_term(Coord::x0, Coord::p0, c)
      .add_term(Coord::X0, Coord::P0, -c);
  return h.set_g0(g0);
}

QuadraticHamiltonian momentum_conserving_hamiltonian(double g0) {
  // (p0 + P0)(X0 - x0) = p0X0 - p0x0 + P0X0 - P0x0
  QuadraticHamiltonian h;
  h.add_term(Coord::p0, Coord::X0, 1.0)
      .add_term(Coord::p0, Coord::x0, -1.0)
      .add_term(Coord::P0, Coord::X0, 1.0)
      .add_term(Coord::P0, Coord::x0, -1.0);
  return h.set_g0(g0);
}

namespace {

/// Returns the exact truncated series when g0 N is nilpotent.
std::optional<Eigen::Matrix4d> nilpotent_exp(const Eigen::Matrix4d& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d sum = Eigen::Matrix4d::Identity();
  for (int k = 1; k <= 4; ++k) {
    term = term * a / static_cast<double>(k);
    if (term.cwiseAbs().maxCoeff() <= 1e-15 * std::pow(scale, k)) return sum;
    sum += term;
  }
  return std::nullopt;  // a 4x4 nilpotent matrix satisfies a^4 = 0
}

}  // namespace

IntegratedMap integrate_hamiltonian(const QuadraticHamiltonian& h, double hbar) {
  const Eigen::Matrix4d a = h.generator() * h.g0();
  IntegratedMap out{identity_model(hbar), {}, Eigen::Matrix4d::Identity(), false};

  if (auto exact = nilpotent_exp(a)) {
    out.phase_space = *exact;
    out.nilpotent_generator = true;
  } else {
    out.phase_space = a.exp();
  }

  const Eigen::Matrix4d& s = out.phase_space;
  const double mixing = std::max(s.topRightCorner<2, 2>().cwiseAbs().maxCoeff(),
                                 s.bottomLeftCorner<2, 2>().cwiseAbs().maxCoeff());
  if (mixing > 1e-10 * std::max(1.0, s.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::NotPointTransform,
                "integrated map mixes positions with momenta; not a linear position model");
  }

  try {
    out.position = make_model(s(0, 0), s(0, 1), s(1, 0), s(1, 1), hbar);
  } catch (const Error& e) {
    throw Error(ErrorKind::NonUnitaryResult, e.what());
  }
  out.momentum = {s(2, 2), s(2, 3), s(3, 2), s(3, 3)};
  return out;
}

}  // namespace linmeas
