#pragma once

#include "linmeas/canonical.hpp"
#include "linmeas/model.hpp"

namespace linmeas {

/// Slack allowed below a relation's bound, in units of hbar.
inline constexpr double kRelationSlackTol = 1e-12;

/// First and second moments of a single-particle state. Values are in the
/// model's units: lengths for x, momenta for p.
struct MomentSummary {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;

  /// sigma_p = hbar / (2 sigma_x).
  static MomentSummary minimal_gaussian(double sigma_x, double mean_x = 0.0, double mean_p = 0.0,
                                        double hbar = 1.0);

  double sigma_x() const;
  double sigma_p() const;
  double second_x() const noexcept { return var_x + mean_x * mean_x; }
  double second_p() const noexcept { return var_p + mean_p * mean_p; }

  /// var_x var_p >= hbar^2/4 (up to rounding). Hypothetical summaries may fail this.
  bool is_physical(double hbar) const noexcept;

  /// Throws Error{InvalidInput} on non-finite values or negative variances.
  void validate() const;

  friend bool operator==(const MomentSummary&, const MomentSummary&) = default;
};

/// <expr> in the product state |object, probe>.
double expect(const CanonicalExpr& e, const MomentSummary& object, const MomentSummary& probe);

/// <expr^2> in the product state. Same-particle position-momentum products
/// need correlations a MomentSummary does not carry, so an expression that
/// mixes x0 with p0 (or X0 with P0) throws Error{InvalidInput}.
double expect_square(const CanonicalExpr& e, const MomentSummary& object,
                     const MomentSummary& probe);

// Measurement errors of the probe-based estimators.
double eps_x0(const LinearModel& model, const MomentSummary& probe);
double eps_xt(const LinearModel& model, const MomentSummary& probe);

/// RMS of p_t - p0 over the initial product state.
double dp_dis(const LinearModel& model, const MomentSummary& object, const MomentSummary& probe);

/// Standard deviation of the (x0)_exp readout: sqrt(var_x + eps_x0^2).
double sigma_x0exp(const LinearModel& model, const MomentSummary& object,
                   const MomentSummary& probe);

struct OzawaError {
  double error = 0.0;
  double bias = 0.0;  // <X_t> - <x0>
};

OzawaError eps_ozawa_x0(const LinearModel& model, const MomentSummary& object,
                        const MomentSummary& probe);
double eps_ozawa_xt(const LinearModel& model, const MomentSummary& object,
                    const MomentSummary& probe);

struct MeasurementReport {
  double hbar = 1.0;
  double eps_x0 = 0.0;
  double eps_xt = 0.0;
  double eps_ozawa_x0 = 0.0;
  double eps_ozawa_xt = 0.0;
  double dp_dis = 0.0;
  double sigma_x0exp = 0.0;
  double ozawa_bias = 0.0;

  // eps(x_t) dp >= hbar/2
  double prod_64 = 0.0, bound_64 = 0.0;
  // eps(x0) dp >= |beta2| hbar/2
  double prod_65 = 0.0, bound_65 = 0.0;
  // sigma((x0)_exp) dp >= hbar/2
  double prod_69 = 0.0, bound_69 = 0.0;
  // eps^Ozawa(x0) dp, compared against hbar/2 for information only
  double prod_ozawa = 0.0;

  bool pass_64 = false, pass_65 = false, pass_69 = false;
  bool ozawa_below_bound = false;
  bool physical_states = true;

  double slack_64() const noexcept { return prod_64 - bound_64; }
  double slack_65() const noexcept { return prod_65 - bound_65; }
  double slack_69() const noexcept { return prod_69 - bound_69; }

  friend bool operator==(const MeasurementReport&, const MeasurementReport&) = default;
};

/// Requires beta1 != 0.
MeasurementReport full_report(const LinearModel& model, const MomentSummary& object,
                              const MomentSummary& probe);

}  // namespace linmeas
