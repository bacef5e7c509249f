#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "linmeas/analytics.hpp"
#include "linmeas/fourier.hpp"
#include "linmeas/model.hpp"
#include "linmeas/packet.hpp"

namespace linmeas {

/// Boundary amplitude (relative to peak) above which prepare() rejects a domain.
inline constexpr double kBoundaryTol = 1e-12;
/// Probability allowed to leave the output domain under evolve().
inline constexpr double kLeakTol = 1e-10;
/// Conditional quantities need P(X) >= this fraction of max P.
inline constexpr double kConditionalThreshold = 1e-12;

/// n uniformly spaced nodes lo, lo + d, ..., hi - d (periodic-style, DFT ready).
struct Axis {
  std::size_t n = 512;
  double lo = -12.0;
  double hi = 12.0;

  double spacing() const noexcept { return (hi - lo) / static_cast<double>(n); }
  double node(std::size_t i) const noexcept { return lo + spacing() * static_cast<double>(i); }
  std::vector<double> nodes() const;
  friend bool operator==(const Axis&, const Axis&) = default;
};

struct GridSpec {
  Axis object;
  Axis probe;

  static GridSpec symmetric(std::size_t n, double half_width);
  static GridSpec make(Axis object, Axis probe);

  /// Power-of-two sizes, lo < hi, finite bounds. Throws Error{InvalidInput}.
  void validate() const;

  /// Both axes contain mean +- n_sigma * sigma of the initial packets and of
  /// their images under the model, and the momentum box contains the same
  /// extent of the initial and evolved momentum distributions.
  bool covers(const LinearModel& model, const MomentSummary& object, const MomentSummary& probe,
              double n_sigma = 10.0) const;

  /// Smallest grid at least as large and as fine as `base` satisfying
  /// covers(..., n_sigma); nullopt if that needs more than max_n nodes per axis.
  /// At 11 sigma a Gaussian edge amplitude is below kBoundaryTol of its peak.
  static std::optional<GridSpec> fitted(const LinearModel& model, const MomentSummary& object,
                                        const MomentSummary& probe, const GridSpec& base,
                                        std::size_t max_n = 2048, double n_sigma = 11.0);

  std::size_t size() const noexcept { return object.n * probe.n; }
  double cell_area() const noexcept { return object.spacing() * probe.spacing(); }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

using Amplitude2D = std::function<std::complex<double>(double x, double X)>;

/// Two-particle amplitude psi(x, X) sampled on a GridSpec, plus the exact
/// evaluator it was sampled from (used for slices at arbitrary X).
/// Storage is object-index major: psi(i, j) at i * probe.n + j.
/// Memory: 16 bytes per node, so 4 MiB at 512 x 512.
class GridState {
 public:
  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const std::complex<double>> amplitudes() const noexcept { return psi_; }
  std::complex<double> at(std::size_t i, std::size_t j) const { return psi_[i * grid_.probe.n + j]; }
  std::complex<double> evaluate(double x, double X) const { return eval_(x, X); }
  double hbar() const noexcept { return hbar_; }

  /// sum |psi|^2 dx dX on the grid.
  double norm() const noexcept { return norm_; }
  /// Norm of the sampled product before prepare() renormalized it.
  double raw_norm() const noexcept { return raw_norm_; }

  /// Initial-state probe mean <X0>, object mean and variance (by quadrature).
  double probe_mean0() const noexcept { return probe_mean0_; }
  double object_mean0() const noexcept { return object_mean0_; }
  double object_var0() const noexcept { return object_var0_; }

  /// Set once the state has been evolved.
  const std::optional<LinearModel>& model() const noexcept { return model_; }

  /// P(X_j) = sum_i |psi(x_i, X_j)|^2 dx at the probe nodes.
  const std::vector<double>& probe_marginal() const noexcept { return marginal_; }
  double max_probe_density() const noexcept { return max_marginal_; }

 private:
  friend GridState prepare(const PacketSpec&, const PacketSpec&, const GridSpec&);
  friend GridState evolve(const GridState&, const LinearModel&, const std::optional<GridSpec>&);

  GridState() = default;
  void sample(Amplitude2D eval);

  GridSpec grid_;
  Amplitude2D eval_;
  std::vector<std::complex<double>> psi_;
  std::vector<double> marginal_;
  double max_marginal_ = 0.0;
  double hbar_ = 1.0;
  double norm_ = 0.0;
  double raw_norm_ = 0.0;
  double probe_mean0_ = 0.0;
  double object_mean0_ = 0.0;
  double object_var0_ = 0.0;
  std::optional<LinearModel> model_;
};

/// Samples phi0(x) xi0(X) and renormalizes on the grid.
/// Throws Error{DomainTooSmall} if the boundary amplitude exceeds
/// kBoundaryTol of the peak.
GridState prepare(const PacketSpec& object, const PacketSpec& probe, const GridSpec& grid);

/// psi_t(x, X) = sqrt|G| psi0(G (b2 x - a2 X), G (-b1 x + a1 X)), evaluated
/// exactly through the initial evaluator. Throws Error{DomainTooSmall} when
/// more than kLeakTol of the probability leaves the output grid.
GridState evolve(const GridState& initial, const LinearModel& model,
                 const std::optional<GridSpec>& output = std::nullopt);

struct ProbeMarginal {
  std::vector<double> X;
  std::vector<double> density;
  double total = 0.0;  // sum P dX
};

ProbeMarginal probe_marginal(const GridState& state);

/// P(X) at arbitrary X from the exact slice psi(., X) on the object nodes.
double probe_density(const GridState& state, double X);

/// eps_X(x_t): RMS distance between the (x_t)_exp readout at X and the
/// object position, over the slice at X. Throws Error{NegligibleProbability}
/// when P(X) < kConditionalThreshold * max P.
double conditional_error_xt(const GridState& state_t, const LinearModel& model, double X);

/// eps_X(x0): same for the (x0)_exp readout against the pre-image
/// G (b2 x - a2 X) of the object position.
double conditional_error_x0(const GridState& state_t, const LinearModel& model, double X);

struct ConditionalState {
  double X = 0.0;
  double probability_density = 0.0;
  double mean = 0.0;
  double sigma = 0.0;
  std::vector<std::complex<double>> amplitude;  // on the object nodes, unit norm
};

ConditionalState conditional_state(const GridState& state_t, double X);

/// Joint momentum moments of a grid state (2D DFT).
JointMomentumMoments momentum_moments(const GridState& state);
/// Momentum moments of a single packet sampled on an axis (1D DFT).
MomentumMoments1D momentum_moments(const PacketSpec& packet, const Axis& axis);

/// Every measurement quantity evaluated by quadrature on the grid.
struct OracleValues {
  double eps_x0 = 0.0;
  double eps_xt = 0.0;
  double eps_ozawa_x0 = 0.0;
  double eps_ozawa_xt = 0.0;
  double dp_dis = 0.0;
  double sigma_x0exp = 0.0;
  double sigma_x0 = 0.0;      // initial object spread
  double probe_mean0 = 0.0;
  double eps_xt_sq_averaged = 0.0;  // \int eps_X(x_t)^2 P(X) dX
  double eps_x0_sq_averaged = 0.0;  // \int eps_X(x0)^2 P(X) dX
  double momentum_map_residual = 0.0;  // |<p_t^2>_grid - predicted| / predicted
};

OracleValues oracle_measurement(const GridState& initial, const GridState& evolved,
                                const LinearModel& model);

struct OracleComparison {
  MeasurementReport analytic;
  OracleValues oracle;
  double rel_eps_x0 = 0.0;
  double rel_eps_xt = 0.0;
  double rel_dp_dis = 0.0;
  double rel_sigma_x0exp = 0.0;
  double residual_avg_xt = 0.0;   // |avg eps_X(x_t)^2 - eps(x_t)^2| / eps(x_t)^2
  double residual_avg_x0 = 0.0;   // same for x0 (absolute when eps(x0) = 0)
  double residual_decomp = 0.0;   // |sigma_exp^2 - sigma_x0^2 - eps_x0^2| / sigma_exp^2, oracle values
  double max_rel_gap() const noexcept;
};

/// Runs prepare + evolve on `grid` and compares against full_report. Relative
/// gaps fall back to absolute differences when the analytic value is 0.
OracleComparison compare_with_analytics(const LinearModel& model, const PacketSpec& object,
                                        const PacketSpec& probe, const GridSpec& grid);

/// L1 distance between the density of the (x0)_exp readout (pushforward of
/// P(X)) and |phi0|^2, at the probe nodes mapped to readout values.
double born_rule_l1(const GridState& state_t, const LinearModel& model, const PacketSpec& object);

}  // namespace linmeas
