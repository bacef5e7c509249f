#include "linmeas/verifier.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "linmeas/canonical.hpp"
#include "linmeas/error.hpp"
#include "linmeas/packet.hpp"

namespace linmeas {

ModelFamily parse_family(const std::string& name) {
  if (name == "conserving") return ModelFamily::conserving;
  if (name == "general") return ModelFamily::general;
  if (name == "mixed") return ModelFamily::mixed;
  throw Error(ErrorKind::InvalidConfig, "unknown model family '" + name + "'");
}

std::string to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::conserving: return "conserving";
    case ModelFamily::general: return "general";
    case ModelFamily::mixed: return "mixed";
  }
  return "mixed";
}

LinearModel random_model(std::mt19937_64& rng, ModelFamily family, double hbar) {
  std::uniform_real_distribution<double> mag(0.1, 3.0), wide(-3.0, 3.0);
  std::bernoulli_distribution coin(0.5);
  if (family == ModelFamily::mixed) family = coin(rng) ? ModelFamily::conserving : ModelFamily::general;
  const double b1 = (coin(rng) ? 1.0 : -1.0) * mag(rng);
  const double det = coin(rng) ? 1.0 : -1.0;
  if (family == ModelFamily::conserving) {
    const double b2 = 1.0 - b1;
    const double a2 = b2 - det;
    return make_model(1.0 - a2, a2, b1, b2, hbar);
  }
  const double b2 = wide(rng);
  const double a1 = wide(rng);
  return make_model(a1, (a1 * b2 - det) / b1, b1, b2, hbar);
}

std::pair<MomentSummary, MomentSummary> random_states(std::mt19937_64& rng, double hbar) {
  std::uniform_real_distribution<double> sx(0.2, 2.0), sX(0.05, 2.0), mx(-2.0, 2.0), mp(-1.0, 1.0);
  const double L = std::sqrt(hbar), P = std::sqrt(hbar);
  const double s_obj = sx(rng) * L, s_probe = sX(rng) * L;
  const double m_obj = mx(rng) * L, m_probe = mx(rng) * L;
  const double p_obj = mp(rng) * P, p_probe = mp(rng) * P;
  return {MomentSummary::minimal_gaussian(s_obj, m_obj, p_obj, hbar),
          MomentSummary::minimal_gaussian(s_probe, m_probe, p_probe, hbar)};
}

std::vector<SweepConfiguration> expand_plan(const SweepPlan& plan) {
  std::vector<SweepConfiguration> out;
  if (plan.source == SweepPlan::Source::random) {
    if (plan.random_count == 0) throw Error(ErrorKind::InvalidConfig, "random sweep with zero configurations");
    std::mt19937_64 rng(plan.seed);
    out.reserve(plan.random_count);
    for (std::size_t k = 0; k < plan.random_count; ++k) {
      auto m = random_model(rng, plan.family, plan.hbar);
      auto [obj, probe] = random_states(rng, plan.hbar);
      out.push_back({std::move(m), std::nullopt, obj, probe});
    }
    return out;
  }

  std::vector<std::pair<LinearModel, std::optional<double>>> models;
  if (plan.source == SweepPlan::Source::catalog) {
    const bool uses_g0 = plan.catalog == "momentum-conserving" || plan.catalog == "momentum_conserving";
    if (uses_g0) {
      for (double g0 : plan.g0_values) models.emplace_back(catalog_model(plan.catalog, g0, plan.hbar), g0);
    } else {
      models.emplace_back(catalog_model(plan.catalog, 1.0, plan.hbar), std::nullopt);
    }
  } else {
    for (const auto& c : plan.coefficients) {
      models.emplace_back(make_model(c[0], c[1], c[2], c[3], plan.hbar), std::nullopt);
    }
  }
  if (models.empty() || plan.sigma_x0.empty() || plan.sigma_X0.empty()) {
    throw Error(ErrorKind::InvalidConfig, "sweep range is empty");
  }
  for (const auto& [m, g0] : models) {
    if (!m.measurable() && !plan.allow_unmeasurable) require_measurable(m);
    for (double sx : plan.sigma_x0) {
      for (double sX : plan.sigma_X0) {
        out.push_back({m, g0, MomentSummary::minimal_gaussian(sx, plan.mean_x0, plan.mean_p0, plan.hbar),
                       MomentSummary::minimal_gaussian(sX, plan.mean_X0, plan.mean_P0, plan.hbar)});
      }
    }
  }
  return out;
}

std::vector<std::size_t> subsample_indices(std::size_t n, std::size_t count) {
  std::vector<std::size_t> idx;
  if (n == 0 || count == 0) return idx;
  count = std::min(count, n);
  for (std::size_t k = 0; k < count; ++k) idx.push_back(k * n / count);
  return idx;
}

namespace {

void tally(RelationTally& t, bool pass, double slack, std::size_t id) {
  if (t.pass + t.fail == 0 || slack < t.min_slack) {
    t.min_slack = slack;
    t.min_slack_config = id;
  }
  ++(pass ? t.pass : t.fail);
}

void run_oracle(SweepRow& row, const SweepPlan& plan, VerifierReport& rep) {
  const auto& cfg = row.config;
  const auto grid = GridSpec::fitted(cfg.model, cfg.object, cfg.probe, plan.oracle_grid, plan.oracle_max_n);
  if (!grid) {
    row.oracle_note = "no grid within size limit covers this configuration";
    ++rep.oracle_skipped;
    return;
  }
  try {
    const auto obj = PacketSpec::gaussian(cfg.object.mean_x, cfg.object.mean_p, cfg.object.sigma_x(), plan.hbar);
    const auto probe = PacketSpec::gaussian(cfg.probe.mean_x, cfg.probe.mean_p, cfg.probe.sigma_x(), plan.hbar);
    row.oracle = compare_with_analytics(cfg.model, obj, probe, *grid);
    ++rep.oracle_rows;
    const double gap = row.oracle->max_rel_gap();
    rep.max_oracle_gap = std::max(rep.max_oracle_gap, gap);
    if (!(gap <= kOracleTol)) ++rep.oracle_failures;
  } catch (const Error& e) {
    row.oracle_note = e.what();
    ++rep.oracle_failures;
  }
}

}  // namespace

VerifierReport verify_relations(const SweepPlan& plan) {
  const auto configs = expand_plan(plan);
  VerifierReport rep;
  rep.rows.reserve(configs.size());
  for (std::size_t id = 0; id < configs.size(); ++id) {
    SweepRow row{id, configs[id], std::nullopt, {}, std::nullopt, {}};
    if (!row.config.model.measurable()) {
      row.error = "Unmeasurable: beta1 = 0";
      ++rep.unmeasurable;
      rep.rows.push_back(std::move(row));
      continue;
    }
    auto r = full_report(row.config.model, row.config.object, row.config.probe);
    const double tol = plan.slack_tol * plan.hbar;
    const double sat = plan.saturation_tol * plan.hbar;
    const std::array<std::pair<const char*, double>, 3> slacks{
        {{"64", r.slack_64()}, {"65", r.slack_65()}, {"69", r.slack_69()}}};
    tally(rep.rel_64, r.slack_64() >= -tol, r.slack_64(), id);
    tally(rep.rel_65, r.slack_65() >= -tol, r.slack_65(), id);
    tally(rep.rel_69, r.slack_69() >= -tol, r.slack_69(), id);
    for (const auto& [name, s] : slacks) {
      if (std::abs(s) < sat) rep.saturations.push_back({id, name, s});
    }
    row.report = r;
    rep.rows.push_back(std::move(row));
  }
  if (plan.oracle) {
    for (std::size_t i : subsample_indices(rep.rows.size(), plan.oracle_subsample)) {
      if (rep.rows[i].report) run_oracle(rep.rows[i], plan, rep);
    }
  }
  return rep;
}

OzawaDemo demo_ozawa_violation(double sigma_x0, double sigma_X0, double hbar) {
  const auto m = ozawa(hbar);
  const auto obj = MomentSummary::minimal_gaussian(sigma_x0, 0.0, 0.0, hbar);
  const auto probe = MomentSummary::minimal_gaussian(sigma_X0, 0.0, 0.0, hbar);
  OzawaDemo d;
  d.report = full_report(m, obj, probe);
  d.ozawa_product_below_bound = d.report.prod_ozawa < 0.5 * hbar - kRelationSlackTol * hbar;
  d.error_relation_holds = d.report.pass_64;
  std::ostringstream s;
  s.precision(6);
  s << "Ozawa model (1,-1,1,0), sigma(x0)=" << sigma_x0 << ", sigma(X0)=" << sigma_X0 << ", hbar=" << hbar
    << "\n  readout X_t as the x0 estimate: eps_Ozawa(x0) * dp_dis = " << d.report.eps_ozawa_x0 << " * "
    << d.report.dp_dis << " = " << d.report.prod_ozawa << (d.ozawa_product_below_bound ? " < " : " >= ")
    << 0.5 * hbar
    << "\n  corrected estimator:             eps(x_t) * dp_dis = " << d.report.eps_xt << " * "
    << d.report.dp_dis << " = " << d.report.prod_64 << (d.error_relation_holds ? " >= " : " < ")
    << 0.5 * hbar << '\n';
  d.narrative = s.str();
  return d;
}

std::vector<BornAuditRow> born_rule_audit(const LinearModel& m, const std::vector<MomentSummary>& objects,
                                          const MomentSummary& probe) {
  const auto ops = result_operators(m, probe.mean_x);
  std::vector<BornAuditRow> out;
  out.reserve(objects.size());
  for (const auto& obj : objects) {
    out.push_back({obj, expect(ops.pre, obj, probe) - obj.mean_x, eps_ozawa_x0(m, obj, probe).bias});
  }
  return out;
}

}  // namespace linmeas
