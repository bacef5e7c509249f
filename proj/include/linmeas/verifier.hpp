#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "linmeas/analytics.hpp"
#include "linmeas/grid.hpp"
#include "linmeas/model.hpp"

namespace linmeas {

/// Absolute product-minus-bound below which a row counts as saturating.
inline constexpr double kSaturationTol = 1e-9;
/// Oracle rows must agree with the closed forms to this relative gap.
inline constexpr double kOracleTol = 1e-6;

enum class ModelFamily { conserving, general, mixed };

ModelFamily parse_family(const std::string& name);
std::string to_string(ModelFamily family);

/// Random valid measurable model. Both families draw |b1| in [0.1, 3] with a
/// random sign and a random determinant sign. The conserving family then fixes
/// a1 + a2 = 1 and b1 + b2 = 1; the general family draws b2 and a1 in [-3, 3]
/// and solves a2 from det = +-1.
LinearModel random_model(std::mt19937_64& rng, ModelFamily family, double hbar = 1.0);

/// Random minimal-uncertainty Gaussian summaries: sigma_x0 in [0.2, 2],
/// sigma_X0 in [0.05, 2], position means in [-2, 2], momentum means in [-1, 1].
/// Lengths are in units where hbar = 1 and are scaled by sqrt(hbar).
std::pair<MomentSummary, MomentSummary> random_states(std::mt19937_64& rng, double hbar = 1.0);

struct SweepConfiguration {
  LinearModel model;
  std::optional<double> g0;
  MomentSummary object;
  MomentSummary probe;
};

struct SweepPlan {
  enum class Source { catalog, coefficients, random };
  Source source = Source::catalog;

  // catalog source: name plus g0 values (g0 is ignored by fixed catalog entries)
  std::string catalog = "momentum-conserving";
  std::vector<double> g0_values{1.0};
  // coefficients source
  std::vector<std::array<double, 4>> coefficients;
  // random source (models and states are both drawn)
  std::size_t random_count = 0;
  ModelFamily family = ModelFamily::mixed;
  std::uint64_t seed = 1;

  // catalog/coefficient sources use the Cartesian product of these widths
  std::vector<double> sigma_x0{1.0};
  std::vector<double> sigma_X0{0.5};
  double mean_x0 = 0.0, mean_p0 = 0.0, mean_X0 = 0.0, mean_P0 = 0.0;

  double hbar = 1.0;
  bool oracle = false;
  std::size_t oracle_subsample = 32;
  GridSpec oracle_grid = GridSpec::symmetric(512, 12.0);
  std::size_t oracle_max_n = 2048;
  double slack_tol = kRelationSlackTol;
  double saturation_tol = kSaturationTol;
  bool allow_unmeasurable = false;
};

/// Expands a plan into configurations. Throws Error{InvalidConfig} for an
/// empty plan and Error{Unmeasurable} for beta1 = 0 unless allowed.
std::vector<SweepConfiguration> expand_plan(const SweepPlan& plan);

struct SweepRow {
  std::size_t config_id = 0;
  SweepConfiguration config;
  std::optional<MeasurementReport> report;  // empty for unmeasurable models
  std::string error;
  std::optional<OracleComparison> oracle;
  std::string oracle_note;  // why an oracle row was skipped or failed
};

struct Saturation {
  std::size_t config_id = 0;
  std::string relation;  // "64", "65" or "69"
  double slack = 0.0;
};

struct RelationTally {
  std::size_t pass = 0;
  std::size_t fail = 0;
  double min_slack = 0.0;
  std::size_t min_slack_config = 0;
};

struct VerifierReport {
  std::vector<SweepRow> rows;
  RelationTally rel_64, rel_65, rel_69;
  std::vector<Saturation> saturations;
  std::size_t unmeasurable = 0;
  std::size_t oracle_rows = 0;
  std::size_t oracle_skipped = 0;
  std::size_t oracle_failures = 0;  // gap above kOracleTol or grid error
  double max_oracle_gap = 0.0;

  std::size_t violations() const noexcept { return rel_64.fail + rel_65.fail + rel_69.fail; }
};

VerifierReport verify_relations(const SweepPlan& plan);

/// Indices of `count` rows spread evenly over `n`.
std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t count);

struct OzawaDemo {
  MeasurementReport report;
  bool ozawa_product_below_bound = false;  // eps^Ozawa(x0) dp < hbar/2
  bool error_relation_holds = false;       // eps(x_t) dp >= hbar/2
  std::string narrative;
};

/// Ozawa's model with minimal Gaussian object/probe of the given widths.
OzawaDemo demo_ozawa_violation(double sigma_x0 = 1.0, double sigma_X0 = 0.5, double hbar = 1.0);

struct BornAuditRow {
  MomentSummary object;
  double readout_bias = 0.0;  // <(x0)_exp> - <x0>
  double ozawa_bias = 0.0;    // <X_t> - <x0>
};

std::vector<BornAuditRow> born_rule_audit(const LinearModel& model,
                                          const std::vector<MomentSummary>& objects,
                                          const MomentSummary& probe);

}  // namespace linmeas
