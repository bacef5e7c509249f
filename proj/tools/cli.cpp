#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "linmeas/config.hpp"
#include "linmeas/error.hpp"
#include "linmeas/povm.hpp"
#include "linmeas/report_io.hpp"
#include "linmeas/verifier.hpp"

namespace linmeas::cli {

namespace {

namespace fs = std::filesystem;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::DomainTooSmall:
    case ErrorKind::NegligibleProbability:
    case ErrorKind::AliasingDetected:
    case ErrorKind::NonUnitaryResult:
    case ErrorKind::NotPointTransform:
      return kOracleFailure;
    default:
      return kInvalid;
  }
}

// Raw flag values; each is applied on top of the config only when given.
struct Flags {
  std::string config, out, format, catalog, coeffs, object_file, probe_file;
  double hbar = 1.0, g0 = 1.0;
  std::uint64_t seed = 1;
  double object_sigma = 1.0, object_mean = 0.0, object_momentum = 0.0;
  double probe_sigma = 0.5, probe_mean = 0.0, probe_momentum = 0.0;
  std::size_t grid_n = 512, n_object = 512, n_probe = 512;
  double grid_half_width = 12.0;
  // sweep
  std::string g0_list, g0_range, object_sigmas, probe_sigmas, family;
  std::size_t random = 0, oracle_subsample = 8;
  bool oracle = false;
  // povm
  std::size_t bins = 16, povm_n = 128;
  std::string povm_range;
};

struct Context {
  CLI::App app{"Linear position-measurement models: errors, disturbance and uncertainty relations", "linmeas"};
  Flags f;
  std::ostream& out;
  std::ostream& err;

  Context(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  bool given(const std::string& name) const {
    // Options live on the root app; subcommand-local ones are searched too.
    if (auto* opt = app.get_option_no_throw(name); opt && opt->count() > 0) return true;
    for (const auto* sub : app.get_subcommands()) {
      if (auto* opt = sub->get_option_no_throw(name); opt && opt->count() > 0) return true;
    }
    return false;
  }
};

std::array<double, 3> parse_triple(const std::string& s, const char* what) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ':', ',');
  const auto v = parse_number_list(t);
  if (v.size() != 3) throw Error(ErrorKind::InvalidConfig, std::string(what) + " must be from:to:count");
  return {v[0], v[1], v[2]};
}

RunConfig build_config(const Context& c) {
  const auto& f = c.f;
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (c.given("--hbar")) cfg.hbar = f.hbar;
  if (c.given("--seed")) cfg.seed = f.seed;
  if (c.given("--catalog")) {
    cfg.model.catalog = f.catalog;
    cfg.model.coeffs.reset();
  }
  if (c.given("--coeffs")) {
    const auto v = parse_number_list(f.coeffs);
    if (v.size() != 4) throw Error(ErrorKind::InvalidConfig, "--coeffs needs alpha1,alpha2,beta1,beta2");
    cfg.model.coeffs = std::array<double, 4>{v[0], v[1], v[2], v[3]};
    cfg.model.catalog.reset();
  }
  if (c.given("--g0")) cfg.model.g0 = f.g0;
  if (c.given("--object-sigma")) cfg.object.sigma_x = f.object_sigma;
  if (c.given("--object-mean")) cfg.object.mean_x = f.object_mean;
  if (c.given("--object-momentum")) cfg.object.mean_p = f.object_momentum;
  if (c.given("--object-file")) cfg.object.file = f.object_file;
  if (c.given("--probe-sigma")) cfg.probe.sigma_x = f.probe_sigma;
  if (c.given("--probe-mean")) cfg.probe.mean_x = f.probe_mean;
  if (c.given("--probe-momentum")) cfg.probe.mean_p = f.probe_momentum;
  if (c.given("--probe-file")) cfg.probe.file = f.probe_file;
  if (c.given("--grid-n")) cfg.grid.object.n = cfg.grid.probe.n = f.grid_n;
  if (c.given("--n-object")) cfg.grid.object.n = f.n_object;
  if (c.given("--n-probe")) cfg.grid.probe.n = f.n_probe;
  if (c.given("--grid-half-width")) {
    cfg.grid.object.lo = cfg.grid.probe.lo = -f.grid_half_width;
    cfg.grid.object.hi = cfg.grid.probe.hi = f.grid_half_width;
  }
  if (c.given("--g0-list")) cfg.sweep.g0 = f.g0_list.empty() ? std::vector<double>{} : parse_number_list(f.g0_list);
  if (c.given("--g0-range")) cfg.sweep.g0_range = parse_triple(f.g0_range, "--g0-range");
  if (c.given("--object-sigmas")) cfg.sweep.sigma_x0 = parse_number_list(f.object_sigmas);
  if (c.given("--probe-sigmas")) cfg.sweep.sigma_X0 = parse_number_list(f.probe_sigmas);
  if (c.given("--random")) cfg.sweep.random = f.random;
  if (c.given("--family")) cfg.sweep.family = f.family;
  if (c.given("--oracle")) cfg.sweep.oracle = f.oracle;
  if (c.given("--oracle-subsample")) cfg.sweep.oracle_subsample = f.oracle_subsample;
  if (c.given("--bins")) cfg.povm.bins = f.bins;
  if (c.given("--povm-n")) cfg.povm.n_object = f.povm_n;
  if (c.given("--povm-range")) {
    std::string t = f.povm_range;
    std::replace(t.begin(), t.end(), ':', ',');
    const auto v = parse_number_list(t);
    if (v.size() != 2 || !(v[0] < v[1])) throw Error(ErrorKind::InvalidConfig, "--povm-range must be lo:hi");
    cfg.povm.lo = v[0];
    cfg.povm.hi = v[1];
  }
  if (c.given("--format")) cfg.format = f.format;
  if (c.given("--out")) {
    cfg.out_dir = f.out;
  } else if (!cfg.out_dir) {
    if (const char* env = std::getenv(kOutDirEnv); env && *env) cfg.out_dir = env;
  }
  if (cfg.format != "table" && cfg.format != "json" && cfg.format != "csv") {
    throw Error(ErrorKind::InvalidConfig, "format must be json, csv or table");
  }
  cfg.grid.validate();
  return cfg;
}

void write_file(const RunConfig& cfg, const std::string& name, const std::function<void(std::ostream&)>& body) {
  if (!cfg.out_dir) return;
  fs::create_directories(*cfg.out_dir);
  std::ofstream f(*cfg.out_dir / name);
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write " + (*cfg.out_dir / name).string());
  body(f);
}

std::string fmt(double v) { return format_double(v); }

void table(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(w) + 2) << k << v << '\n';
}

void csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) out << (i ? "," : "") << rows[i].first;
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) out << (i ? "," : "") << rows[i].second;
  out << '\n';
}

void emit(const Context& c, const RunConfig& cfg, const Json& j,
          const std::vector<std::pair<std::string, std::string>>& rows) {
  if (cfg.format == "json") {
    c.out << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    csv(c.out, rows);
  } else {
    table(c.out, rows);
  }
}

std::string yes(bool b) { return b ? "true" : "false"; }

int cmd_model_info(Context& c) {
  const auto cfg = build_config(c);
  const auto m = resolve_model(cfg);
  const auto mm = momentum_map(m);
  const auto d = m.diagnostics();
  const auto j = model_info_json(m);
  write_file(cfg, "model-info.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  emit(c, cfg, j,
       {{"name", m.name().empty() ? "custom" : m.name()},
        {"alpha1", fmt(m.alpha1())},
        {"alpha2", fmt(m.alpha2())},
        {"beta1", fmt(m.beta1())},
        {"beta2", fmt(m.beta2())},
        {"hbar", fmt(m.hbar())},
        {"gamma", fmt(d.gamma)},
        {"a1", fmt(mm.a1)},
        {"a2", fmt(mm.a2)},
        {"b1", fmt(mm.b1)},
        {"b2", fmt(mm.b2)},
        {"conserves_momentum", yes(d.conserves_momentum)},
        {"measurable", yes(d.measurable)}});
  if (!d.measurable) c.err << "warning: beta1 = 0, this apparatus cannot measure the object position\n";
  return kOk;
}

std::vector<std::pair<std::string, std::string>> report_rows(const MeasurementReport& r) {
  return {{"eps_x0", fmt(r.eps_x0)},
          {"eps_xt", fmt(r.eps_xt)},
          {"eps_ozawa_x0", fmt(r.eps_ozawa_x0)},
          {"eps_ozawa_xt", fmt(r.eps_ozawa_xt)},
          {"ozawa_bias", fmt(r.ozawa_bias)},
          {"dp_dis", fmt(r.dp_dis)},
          {"sigma_x0exp", fmt(r.sigma_x0exp)},
          {"prod_64", fmt(r.prod_64)},
          {"bound_64", fmt(r.bound_64)},
          {"pass_64", yes(r.pass_64)},
          {"prod_65", fmt(r.prod_65)},
          {"bound_65", fmt(r.bound_65)},
          {"pass_65", yes(r.pass_65)},
          {"prod_69", fmt(r.prod_69)},
          {"bound_69", fmt(r.bound_69)},
          {"pass_69", yes(r.pass_69)},
          {"prod_ozawa", fmt(r.prod_ozawa)},
          {"ozawa_below_bound", yes(r.ozawa_below_bound)},
          {"physical_states", yes(r.physical_states)}};
}

int cmd_analyze(Context& c) {
  const auto cfg = build_config(c);
  const auto m = resolve_model(cfg);
  require_measurable(m);
  const auto obj = resolve_packet(cfg.object, cfg.hbar);
  const auto probe = resolve_packet(cfg.probe, cfg.hbar);
  const auto r = full_report(m, obj.moments(), probe.moments());
  const Json j{{"model", to_json(m)},
               {"object", to_json(obj.moments())},
               {"probe", to_json(probe.moments())},
               {"report", to_json(r)}};
  write_file(cfg, "analyze.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  emit(c, cfg, j, report_rows(r));
  if (r.ozawa_below_bound && cfg.format == "table") {
    c.out << "note: eps_ozawa_x0 * dp_dis is below hbar/2 (informational)\n";
  }
  if (!(r.pass_64 && r.pass_69)) {
    c.err << "relation violated: eps(x_t) dp_dis or sigma((x0)_exp) dp_dis below hbar/2\n";
    return kRelationViolation;
  }
  return kOk;
}

int cmd_sweep(Context& c) {
  const auto cfg = build_config(c);
  const auto plan = make_sweep_plan(cfg);
  const auto rep = verify_relations(plan);
  const auto j = to_json(rep);
  write_file(cfg, "sweep.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  write_file(cfg, "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, rep, plan.oracle); });
  for (const char* rel : {"64", "65", "69"}) {
    write_file(cfg, std::string("series_") + rel + ".csv", [&](std::ostream& o) { write_series_csv(o, rep, rel); });
  }
  if (cfg.format == "json") {
    c.out << j.dump(2) << '\n';
  } else if (cfg.format == "csv") {
    write_sweep_csv(c.out, rep, plan.oracle);
  } else {
    std::vector<std::pair<std::string, std::string>> rows{{"configurations", std::to_string(rep.rows.size())}};
    const std::array<std::pair<const char*, const RelationTally*>, 3> rels{
        {{"64", &rep.rel_64}, {"65", &rep.rel_65}, {"69", &rep.rel_69}}};
    for (const auto& [name, t] : rels) {
      rows.emplace_back(std::string("relation_") + name,
                        std::to_string(t->pass) + " pass, " + std::to_string(t->fail) + " fail, min slack " +
                            fmt(t->min_slack) + " (config " + std::to_string(t->min_slack_config) + ")");
    }
    rows.emplace_back("saturations", std::to_string(rep.saturations.size()));
    rows.emplace_back("unmeasurable", std::to_string(rep.unmeasurable));
    if (plan.oracle) {
      rows.emplace_back("oracle_rows", std::to_string(rep.oracle_rows));
      rows.emplace_back("oracle_skipped", std::to_string(rep.oracle_skipped));
      rows.emplace_back("oracle_failures", std::to_string(rep.oracle_failures));
      rows.emplace_back("max_oracle_gap", fmt(rep.max_oracle_gap));
    }
    table(c.out, rows);
  }
  if (rep.violations() > 0) return kRelationViolation;
  if (rep.oracle_failures > 0) return kOracleFailure;
  return kOk;
}

int cmd_oracle_compare(Context& c) {
  const auto cfg = build_config(c);
  const auto m = resolve_model(cfg);
  require_measurable(m);
  const auto obj = resolve_packet(cfg.object, cfg.hbar);
  const auto probe = resolve_packet(cfg.probe, cfg.hbar);
  const auto cmp = compare_with_analytics(m, obj, probe, cfg.grid);
  const auto j = to_json(cmp);
  write_file(cfg, "oracle-compare.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  if (cfg.format == "table") {
    const auto& a = cmp.analytic;
    const auto& o = cmp.oracle;
    c.out << std::left << std::setw(22) << "quantity" << std::setw(26) << "analytic" << std::setw(26) << "oracle"
          << "gap\n";
    auto line = [&](const char* name, double av, double ov, double gap) {
      c.out << std::setw(22) << name << std::setw(26) << fmt(av) << std::setw(26) << fmt(ov) << fmt(gap) << '\n';
    };
    line("eps_x0", a.eps_x0, o.eps_x0, cmp.rel_eps_x0);
    line("eps_xt", a.eps_xt, o.eps_xt, cmp.rel_eps_xt);
    line("dp_dis", a.dp_dis, o.dp_dis, cmp.rel_dp_dis);
    line("sigma_x0exp", a.sigma_x0exp, o.sigma_x0exp, cmp.rel_sigma_x0exp);
    line("avg eps_X(x_t)^2", a.eps_xt * a.eps_xt, o.eps_xt_sq_averaged, cmp.residual_avg_xt);
    line("avg eps_X(x0)^2", a.eps_x0 * a.eps_x0, o.eps_x0_sq_averaged, cmp.residual_avg_x0);
    line("sigma_x0exp^2", o.sigma_x0 * o.sigma_x0 + o.eps_x0 * o.eps_x0, o.sigma_x0exp * o.sigma_x0exp,
         cmp.residual_decomp);
    line("eps_ozawa_x0", a.eps_ozawa_x0, o.eps_ozawa_x0, std::abs(a.eps_ozawa_x0 - o.eps_ozawa_x0));
    line("eps_ozawa_xt", a.eps_ozawa_xt, o.eps_ozawa_xt, std::abs(a.eps_ozawa_xt - o.eps_ozawa_xt));
  } else {
    emit(c, cfg, j,
         {{"rel_eps_x0", fmt(cmp.rel_eps_x0)},
          {"rel_eps_xt", fmt(cmp.rel_eps_xt)},
          {"rel_dp_dis", fmt(cmp.rel_dp_dis)},
          {"rel_sigma_x0exp", fmt(cmp.rel_sigma_x0exp)},
          {"residual_avg_xt", fmt(cmp.residual_avg_xt)},
          {"residual_avg_x0", fmt(cmp.residual_avg_x0)},
          {"residual_decomp", fmt(cmp.residual_decomp)},
          {"max_rel_gap", fmt(cmp.max_rel_gap())}});
  }
  if (!(cmp.max_rel_gap() <= kOracleTol)) {
    c.err << "oracle disagrees with the closed forms (max relative gap " << fmt(cmp.max_rel_gap()) << ")\n";
    return kOracleFailure;
  }
  return kOk;
}

int cmd_povm_check(Context& c) {
  const auto cfg = build_config(c);
  const auto m = resolve_model(cfg);
  const auto obj = resolve_packet(cfg.object, cfg.hbar);
  const auto probe = resolve_packet(cfg.probe, cfg.hbar);
  const Axis axis{cfg.povm.n_object, cfg.grid.object.lo, cfg.grid.object.hi};
  GridSpec::make(axis, cfg.grid.probe);
  const auto bins = cfg.povm.bins == 1
                        ? std::vector<PovmInterval>{{-std::numeric_limits<double>::infinity(),
                                                     std::numeric_limits<double>::infinity()}}
                        : uniform_partition(cfg.povm.lo, cfg.povm.hi, cfg.povm.bins);
  const auto ops = povm(m, probe, bins, axis);
  const auto chk = check_povm(ops, m, obj, probe, axis, cfg.grid);
  const auto j = to_json(chk);
  write_file(cfg, "povm-check.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  emit(c, cfg, j,
       {{"bins", std::to_string(chk.bins.size())},
        {"object_nodes", std::to_string(axis.n)},
        {"completeness_residual", fmt(chk.completeness_residual)},
        {"min_eigenvalue", fmt(chk.min_eigenvalue)},
        {"hermiticity_residual", fmt(chk.hermiticity_residual)},
        {"max_probability_gap", fmt(chk.max_probability_gap)},
        {"total_probability", fmt(chk.total_probability)}});
  const bool ok = chk.completeness_residual <= 1e-8 && chk.min_eigenvalue >= -1e-8 && chk.max_probability_gap <= 1e-7;
  return ok ? kOk : kOracleFailure;
}

int cmd_demo_ozawa(Context& c) {
  const auto cfg = build_config(c);
  const auto d = demo_ozawa_violation(cfg.object.sigma_x, cfg.probe.sigma_x, cfg.hbar);
  const auto j = to_json(d);
  write_file(cfg, "ozawa-violation.json", [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  if (cfg.format == "table") {
    c.out << d.narrative;
  } else {
    auto rows = report_rows(d.report);
    rows.emplace_back("ozawa_product_below_bound", yes(d.ozawa_product_below_bound));
    rows.emplace_back("error_relation_holds", yes(d.error_relation_holds));
    emit(c, cfg, j, rows);
  }
  return kOk;
}

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", f.out, std::string("Output directory (default: $") + kOutDirEnv + ")");
  app.add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--hbar", f.hbar, "Reduced Planck constant");
  app.add_option("--seed", f.seed, "Seed for random sweeps");
  app.add_option("--catalog", f.catalog, "identity, von-neumann, ozawa or momentum-conserving");
  app.add_option("--g0", f.g0, "Coupling for the momentum-conserving model");
  app.add_option("--coeffs", f.coeffs, "alpha1,alpha2,beta1,beta2");
  app.add_option("--object-sigma", f.object_sigma, "Object Gaussian width");
  app.add_option("--object-mean", f.object_mean, "Object mean position");
  app.add_option("--object-momentum", f.object_momentum, "Object mean momentum");
  app.add_option("--object-file", f.object_file, "Tabulated object amplitude (x re im rows)");
  app.add_option("--probe-sigma", f.probe_sigma, "Probe Gaussian width");
  app.add_option("--probe-mean", f.probe_mean, "Probe mean position");
  app.add_option("--probe-momentum", f.probe_momentum, "Probe mean momentum");
  app.add_option("--probe-file", f.probe_file, "Tabulated probe amplitude (x re im rows)");
  app.add_option("--grid-n", f.grid_n, "Nodes per grid axis");
  app.add_option("--n-object", f.n_object, "Nodes on the object axis");
  app.add_option("--n-probe", f.n_probe, "Nodes on the probe axis");
  app.add_option("--grid-half-width", f.grid_half_width, "Both axes span [-w, w]");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context c(out, err);
  auto& app = c.app;
  auto& f = c.f;
  app.require_subcommand(1);
  app.fallthrough();
  add_common(app, f);

  auto* info = app.add_subcommand("model-info", "Coefficients, Gamma, momentum map and diagnostics");
  auto* analyze = app.add_subcommand("analyze", "Closed-form measurement report for one configuration");
  auto* sweep = app.add_subcommand("sweep", "Check the uncertainty relations over a parameter sweep");
  sweep->add_option("--g0-list", f.g0_list, "Comma-separated g0 values");
  sweep->add_option("--g0-range", f.g0_range, "from:to:count");
  sweep->add_option("--object-sigmas", f.object_sigmas, "Comma-separated object widths");
  sweep->add_option("--probe-sigmas", f.probe_sigmas, "Comma-separated probe widths");
  sweep->add_option("--random", f.random, "Number of random model/state configurations");
  sweep->add_option("--family", f.family, "Random model family")->check(CLI::IsMember({"conserving", "general", "mixed"}));
  sweep->add_flag("--oracle", f.oracle, "Cross-check a subsample on the grid oracle");
  sweep->add_option("--oracle-subsample", f.oracle_subsample, "Rows checked by the oracle");
  auto* oracle = app.add_subcommand("oracle-compare", "Closed forms against grid quadrature");
  auto* povm_cmd = app.add_subcommand("povm-check", "Completeness, positivity and probabilities of the POVM");
  povm_cmd->add_option("--bins", f.bins, "Number of bins (outer bins are open)");
  povm_cmd->add_option("--povm-range", f.povm_range, "lo:hi of the inner bin edges");
  povm_cmd->add_option("--povm-n", f.povm_n, "Object nodes for the POVM matrices");
  auto* demo = app.add_subcommand("demo", "Demonstrations");
  demo->require_subcommand(1);
  auto* ozawa_demo = demo->add_subcommand("ozawa-violation", "Ozawa model: both error definitions side by side");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    if (info->parsed()) return cmd_model_info(c);
    if (analyze->parsed()) return cmd_analyze(c);
    if (sweep->parsed()) return cmd_sweep(c);
    if (oracle->parsed()) return cmd_oracle_compare(c);
    if (povm_cmd->parsed()) return cmd_povm_check(c);
    if (ozawa_demo->parsed()) return cmd_demo_ozawa(c);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace linmeas::cli
