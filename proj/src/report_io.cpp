#include "linmeas/report_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "linmeas/error.hpp"

namespace linmeas {

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double get(const Json& j, const char* key, double null_value = std::numeric_limits<double>::quiet_NaN()) {
  const auto& v = j.at(key);
  return v.is_null() ? null_value : v.get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const MomentSummary& m) {
  return {{"mean_x", m.mean_x}, {"mean_p", m.mean_p}, {"var_x", m.var_x}, {"var_p", m.var_p}};
}

MomentSummary moments_from_json(const Json& j) {
  return {j.at("mean_x").get<double>(), j.at("mean_p").get<double>(), j.at("var_x").get<double>(),
          j.at("var_p").get<double>()};
}

Json to_json(const MeasurementReport& r) {
  return {{"hbar", r.hbar},
          {"eps_x0", r.eps_x0},
          {"eps_xt", r.eps_xt},
          {"eps_ozawa_x0", r.eps_ozawa_x0},
          {"eps_ozawa_xt", r.eps_ozawa_xt},
          {"dp_dis", r.dp_dis},
          {"sigma_x0exp", r.sigma_x0exp},
          {"ozawa_bias", r.ozawa_bias},
          {"prod_64", r.prod_64},
          {"bound_64", r.bound_64},
          {"prod_65", r.prod_65},
          {"bound_65", r.bound_65},
          {"prod_69", r.prod_69},
          {"bound_69", r.bound_69},
          {"prod_ozawa", r.prod_ozawa},
          {"pass_64", r.pass_64},
          {"pass_65", r.pass_65},
          {"pass_69", r.pass_69},
          {"ozawa_below_bound", r.ozawa_below_bound},
          {"physical_states", r.physical_states}};
}

MeasurementReport report_from_json(const Json& j) {
  MeasurementReport r;
  r.hbar = j.at("hbar").get<double>();
  r.eps_x0 = j.at("eps_x0").get<double>();
  r.eps_xt = j.at("eps_xt").get<double>();
  r.eps_ozawa_x0 = j.at("eps_ozawa_x0").get<double>();
  r.eps_ozawa_xt = j.at("eps_ozawa_xt").get<double>();
  r.dp_dis = j.at("dp_dis").get<double>();
  r.sigma_x0exp = j.at("sigma_x0exp").get<double>();
  r.ozawa_bias = j.at("ozawa_bias").get<double>();
  r.prod_64 = j.at("prod_64").get<double>();
  r.bound_64 = j.at("bound_64").get<double>();
  r.prod_65 = j.at("prod_65").get<double>();
  r.bound_65 = j.at("bound_65").get<double>();
  r.prod_69 = j.at("prod_69").get<double>();
  r.bound_69 = j.at("bound_69").get<double>();
  r.prod_ozawa = j.at("prod_ozawa").get<double>();
  r.pass_64 = j.at("pass_64").get<bool>();
  r.pass_65 = j.at("pass_65").get<bool>();
  r.pass_69 = j.at("pass_69").get<bool>();
  r.ozawa_below_bound = j.at("ozawa_below_bound").get<bool>();
  r.physical_states = j.at("physical_states").get<bool>();
  return r;
}

Json to_json(const LinearModel& m) {
  Json j{{"alpha1", m.alpha1()}, {"alpha2", m.alpha2()}, {"beta1", m.beta1()},
         {"beta2", m.beta2()},   {"hbar", m.hbar()},     {"name", m.name()}};
  return j;
}

LinearModel model_from_json(const Json& j) {
  auto m = make_model(j.at("alpha1").get<double>(), j.at("alpha2").get<double>(), j.at("beta1").get<double>(),
                      j.at("beta2").get<double>(), j.at("hbar").get<double>());
  const auto name = j.value("name", std::string{});
  return name.empty() ? m : with_provenance(m, name);
}

Json model_info_json(const LinearModel& m) {
  const auto mm = momentum_map(m);
  const auto d = m.diagnostics();
  return {{"model", to_json(m)},
          {"determinant", m.determinant()},
          {"gamma", d.gamma},
          {"momentum_map", {{"a1", mm.a1}, {"a2", mm.a2}, {"b1", mm.b1}, {"b2", mm.b2}}},
          {"conserves_momentum", d.conserves_momentum},
          {"measurable", d.measurable}};
}

Json to_json(const OracleValues& o) {
  return {{"eps_x0", o.eps_x0},
          {"eps_xt", o.eps_xt},
          {"eps_ozawa_x0", o.eps_ozawa_x0},
          {"eps_ozawa_xt", o.eps_ozawa_xt},
          {"dp_dis", o.dp_dis},
          {"sigma_x0exp", o.sigma_x0exp},
          {"sigma_x0", o.sigma_x0},
          {"probe_mean0", o.probe_mean0},
          {"eps_xt_sq_averaged", o.eps_xt_sq_averaged},
          {"eps_x0_sq_averaged", o.eps_x0_sq_averaged},
          {"momentum_map_residual", o.momentum_map_residual}};
}

OracleValues oracle_values_from_json(const Json& j) {
  OracleValues o;
  o.eps_x0 = j.at("eps_x0").get<double>();
  o.eps_xt = j.at("eps_xt").get<double>();
  o.eps_ozawa_x0 = j.at("eps_ozawa_x0").get<double>();
  o.eps_ozawa_xt = j.at("eps_ozawa_xt").get<double>();
  o.dp_dis = j.at("dp_dis").get<double>();
  o.sigma_x0exp = j.at("sigma_x0exp").get<double>();
  o.sigma_x0 = j.at("sigma_x0").get<double>();
  o.probe_mean0 = j.at("probe_mean0").get<double>();
  o.eps_xt_sq_averaged = j.at("eps_xt_sq_averaged").get<double>();
  o.eps_x0_sq_averaged = j.at("eps_x0_sq_averaged").get<double>();
  o.momentum_map_residual = j.at("momentum_map_residual").get<double>();
  return o;
}

Json to_json(const OracleComparison& c) {
  return {{"analytic", to_json(c.analytic)},
          {"oracle", to_json(c.oracle)},
          {"rel_eps_x0", c.rel_eps_x0},
          {"rel_eps_xt", c.rel_eps_xt},
          {"rel_dp_dis", c.rel_dp_dis},
          {"rel_sigma_x0exp", c.rel_sigma_x0exp},
          {"residual_avg_xt", c.residual_avg_xt},
          {"residual_avg_x0", c.residual_avg_x0},
          {"residual_decomp", c.residual_decomp},
          {"max_rel_gap", c.max_rel_gap()}};
}

OracleComparison comparison_from_json(const Json& j) {
  OracleComparison c;
  c.analytic = report_from_json(j.at("analytic"));
  c.oracle = oracle_values_from_json(j.at("oracle"));
  c.rel_eps_x0 = j.at("rel_eps_x0").get<double>();
  c.rel_eps_xt = j.at("rel_eps_xt").get<double>();
  c.rel_dp_dis = j.at("rel_dp_dis").get<double>();
  c.rel_sigma_x0exp = j.at("rel_sigma_x0exp").get<double>();
  c.residual_avg_xt = j.at("residual_avg_xt").get<double>();
  c.residual_avg_x0 = j.at("residual_avg_x0").get<double>();
  c.residual_decomp = j.at("residual_decomp").get<double>();
  return c;
}

Json to_json(const PovmCheck& c) {
  Json bins = Json::array();
  for (const auto& b : c.bins) {
    bins.push_back({{"lo", num(b.interval.lo)},
                    {"hi", num(b.interval.hi)},
                    {"min_eigenvalue", b.min_eigenvalue},
                    {"povm_probability", b.povm_probability},
                    {"marginal_probability", b.marginal_probability}});
  }
  return {{"completeness_residual", c.completeness_residual},
          {"min_eigenvalue", c.min_eigenvalue},
          {"hermiticity_residual", c.hermiticity_residual},
          {"max_probability_gap", c.max_probability_gap},
          {"total_probability", c.total_probability},
          {"bins", bins}};
}

PovmCheck povm_check_from_json(const Json& j) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  PovmCheck c;
  c.completeness_residual = j.at("completeness_residual").get<double>();
  c.min_eigenvalue = j.at("min_eigenvalue").get<double>();
  c.hermiticity_residual = j.at("hermiticity_residual").get<double>();
  c.max_probability_gap = j.at("max_probability_gap").get<double>();
  c.total_probability = j.at("total_probability").get<double>();
  for (const auto& b : j.at("bins")) {
    c.bins.push_back({{get(b, "lo", -inf), get(b, "hi", inf)},
                      b.at("min_eigenvalue").get<double>(),
                      b.at("povm_probability").get<double>(),
                      b.at("marginal_probability").get<double>()});
  }
  return c;
}

namespace {

Json tally_json(const RelationTally& t) {
  return {{"pass", t.pass}, {"fail", t.fail}, {"min_slack", t.min_slack}, {"min_slack_config", t.min_slack_config}};
}

RelationTally tally_from_json(const Json& j) {
  return {j.at("pass").get<std::size_t>(), j.at("fail").get<std::size_t>(), j.at("min_slack").get<double>(),
          j.at("min_slack_config").get<std::size_t>()};
}

}  // namespace

Json to_json(const VerifierReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json jr{{"config_id", row.config_id},
            {"model", to_json(row.config.model)},
            {"g0", row.config.g0 ? Json(*row.config.g0) : Json(nullptr)},
            {"object", to_json(row.config.object)},
            {"probe", to_json(row.config.probe)},
            {"report", row.report ? to_json(*row.report) : Json(nullptr)},
            {"error", row.error},
            {"oracle", row.oracle ? to_json(*row.oracle) : Json(nullptr)},
            {"oracle_note", row.oracle_note}};
    rows.push_back(std::move(jr));
  }
  Json sat = Json::array();
  for (const auto& s : r.saturations) {
    sat.push_back({{"config_id", s.config_id}, {"relation", s.relation}, {"slack", s.slack}});
  }
  return {{"rows", rows},
          {"relation_64", tally_json(r.rel_64)},
          {"relation_65", tally_json(r.rel_65)},
          {"relation_69", tally_json(r.rel_69)},
          {"violations", r.violations()},
          {"saturations", sat},
          {"unmeasurable", r.unmeasurable},
          {"oracle_rows", r.oracle_rows},
          {"oracle_skipped", r.oracle_skipped},
          {"oracle_failures", r.oracle_failures},
          {"max_oracle_gap", r.max_oracle_gap}};
}

VerifierReport verifier_report_from_json(const Json& j) {
  VerifierReport r;
  for (const auto& jr : j.at("rows")) {
    SweepRow row{jr.at("config_id").get<std::size_t>(),
                 {model_from_json(jr.at("model")),
                  jr.at("g0").is_null() ? std::nullopt : std::optional<double>(jr.at("g0").get<double>()),
                  moments_from_json(jr.at("object")), moments_from_json(jr.at("probe"))},
                 std::nullopt,
                 jr.at("error").get<std::string>(),
                 std::nullopt,
                 jr.at("oracle_note").get<std::string>()};
    if (!jr.at("report").is_null()) row.report = report_from_json(jr.at("report"));
    if (!jr.at("oracle").is_null()) row.oracle = comparison_from_json(jr.at("oracle"));
    r.rows.push_back(std::move(row));
  }
  r.rel_64 = tally_from_json(j.at("relation_64"));
  r.rel_65 = tally_from_json(j.at("relation_65"));
  r.rel_69 = tally_from_json(j.at("relation_69"));
  for (const auto& s : j.at("saturations")) {
    r.saturations.push_back(
        {s.at("config_id").get<std::size_t>(), s.at("relation").get<std::string>(), s.at("slack").get<double>()});
  }
  r.unmeasurable = j.at("unmeasurable").get<std::size_t>();
  r.oracle_rows = j.at("oracle_rows").get<std::size_t>();
  r.oracle_skipped = j.at("oracle_skipped").get<std::size_t>();
  r.oracle_failures = j.at("oracle_failures").get<std::size_t>();
  r.max_oracle_gap = j.at("max_oracle_gap").get<double>();
  return r;
}

Json to_json(const OzawaDemo& d) {
  return {{"report", to_json(d.report)},
          {"ozawa_product_below_bound", d.ozawa_product_below_bound},
          {"error_relation_holds", d.error_relation_holds},
          {"narrative", d.narrative}};
}

std::string sweep_csv_header(bool with_oracle) {
  std::string h =
      "config_id,alpha1,alpha2,beta1,beta2,gamma,g0,sigma_x0,sigma_X0,eps_x0,eps_xt,eps_ozawa_x0,"
      "eps_ozawa_xt,dp_dis,sigma_x0exp,prod_64,prod_65,prod_69,bound_64,bound_65,bound_69,pass_64,"
      "pass_65,pass_69";
  if (with_oracle) {
    h += ",oracle_eps_x0,oracle_eps_xt,oracle_dp_dis,oracle_sigma_x0exp,oracle_max_rel_gap";
  }
  return h;
}

void write_sweep_csv(std::ostream& out, const VerifierReport& r, bool with_oracle) {
  out << sweep_csv_header(with_oracle) << '\n';
  auto f = [](double v) { return format_double(v); };
  for (const auto& row : r.rows) {
    const auto& m = row.config.model;
    out << row.config_id << ',' << f(m.alpha1()) << ',' << f(m.alpha2()) << ',' << f(m.beta1()) << ','
        << f(m.beta2()) << ',' << f(m.gamma()) << ',' << (row.config.g0 ? f(*row.config.g0) : "") << ','
        << f(row.config.object.sigma_x()) << ',' << f(row.config.probe.sigma_x());
    if (row.report) {
      const auto& p = *row.report;
      for (double v : {p.eps_x0, p.eps_xt, p.eps_ozawa_x0, p.eps_ozawa_xt, p.dp_dis, p.sigma_x0exp, p.prod_64,
                       p.prod_65, p.prod_69, p.bound_64, p.bound_65, p.bound_69}) {
        out << ',' << f(v);
      }
      out << ',' << int(p.pass_64) << ',' << int(p.pass_65) << ',' << int(p.pass_69);
    } else {
      out << std::string(15, ',');
    }
    if (with_oracle) {
      if (row.oracle) {
        const auto& o = row.oracle->oracle;
        out << ',' << f(o.eps_x0) << ',' << f(o.eps_xt) << ',' << f(o.dp_dis) << ',' << f(o.sigma_x0exp) << ','
            << f(row.oracle->max_rel_gap());
      } else {
        out << ",,,,,";
      }
    }
    out << '\n';
  }
}

void write_series_csv(std::ostream& out, const VerifierReport& r, const std::string& relation) {
  if (relation != "64" && relation != "65" && relation != "69") {
    throw Error(ErrorKind::InvalidInput, "unknown relation '" + relation + "'");
  }
  const bool by_g0 = !r.rows.empty() && r.rows.front().config.g0.has_value();
  out << (by_g0 ? "g0" : "config_id") << ",product,bound\n";
  for (const auto& row : r.rows) {
    if (!row.report) continue;
    const auto& p = *row.report;
    const double prod = relation == "64" ? p.prod_64 : relation == "65" ? p.prod_65 : p.prod_69;
    const double bound = relation == "64" ? p.bound_64 : relation == "65" ? p.bound_65 : p.bound_69;
    out << (by_g0 ? format_double(*row.config.g0) : std::to_string(row.config_id)) << ',' << format_double(prod)
        << ',' << format_double(bound) << '\n';
  }
}

}  // namespace linmeas
