#include "linmeas/config.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include "linmeas/error.hpp"

namespace linmeas {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw Error(ErrorKind::InvalidConfig, "unknown key '" + where + "." + key + "'");
  }
}

template <class T>
T typed(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::InvalidConfig, "wrong type for '" + where + "'");
  }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& dst) {
  if (j.contains(key)) dst = typed<T>(j.at(key), where + "." + key);
}

template <class T>
void read(const json& j, const char* key, const std::string& where, std::optional<T>& dst) {
  if (j.contains(key)) dst = typed<T>(j.at(key), where + "." + key);
}

std::pair<double, double> range(const json& j, const std::string& where) {
  const auto v = typed<std::vector<double>>(j, where);
  if (v.size() != 2 || !(v[0] < v[1])) throw Error(ErrorKind::InvalidConfig, where + " must be [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

PacketConfig parse_packet(const json& j, const std::string& where, PacketConfig p,
                          const std::filesystem::path& base) {
  only_keys(j, where, {"sigma_x", "mean_x", "mean_p", "file"});
  read(j, "sigma_x", where, p.sigma_x);
  read(j, "mean_x", where, p.mean_x);
  read(j, "mean_p", where, p.mean_p);
  if (j.contains("file")) {
    std::filesystem::path f = typed<std::string>(j.at("file"), where + ".file");
    p.file = f.is_relative() && !base.empty() ? base / f : f;
  }
  return p;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    std::string item = text.substr(start, end - start);
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    item = b == std::string::npos ? "" : item.substr(b, e - b + 1);
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw Error(ErrorKind::InvalidConfig, "cannot parse number list '" + text + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

RunConfig parse_config(const json& j, const std::filesystem::path& base) {
  RunConfig c;
  only_keys(j, "config", {"model", "hbar", "seed", "object", "probe", "grid", "sweep", "povm", "output"});
  read(j, "hbar", "config", c.hbar);
  read(j, "seed", "config", c.seed);

  if (j.contains("model")) {
    const auto& m = j.at("model");
    only_keys(m, "model", {"catalog", "g0", "coeffs"});
    if (m.contains("catalog")) c.model.catalog = typed<std::string>(m.at("catalog"), "model.catalog");
    read(m, "g0", "model", c.model.g0);
    if (m.contains("coeffs")) c.model.coeffs = typed<std::array<double, 4>>(m.at("coeffs"), "model.coeffs");
  }
  if (j.contains("object")) c.object = parse_packet(j.at("object"), "object", c.object, base);
  if (j.contains("probe")) c.probe = parse_packet(j.at("probe"), "probe", c.probe, base);

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    only_keys(g, "grid", {"n_object", "n_probe", "object_range", "probe_range"});
    read(g, "n_object", "grid", c.grid.object.n);
    read(g, "n_probe", "grid", c.grid.probe.n);
    if (g.contains("object_range")) std::tie(c.grid.object.lo, c.grid.object.hi) = range(g.at("object_range"), "grid.object_range");
    if (g.contains("probe_range")) std::tie(c.grid.probe.lo, c.grid.probe.hi) = range(g.at("probe_range"), "grid.probe_range");
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    only_keys(s, "sweep", {"g0", "g0_range", "sigma_x0", "sigma_X0", "random", "family", "oracle", "oracle_subsample"});
    read(s, "g0", "sweep", c.sweep.g0);
    if (s.contains("g0_range")) {
      const auto& r = s.at("g0_range");
      only_keys(r, "sweep.g0_range", {"from", "to", "count"});
      if (!r.contains("from") || !r.contains("to") || !r.contains("count")) {
        throw Error(ErrorKind::InvalidConfig, "sweep.g0_range needs from, to and count");
      }
      c.sweep.g0_range = std::array<double, 3>{typed<double>(r.at("from"), "sweep.g0_range.from"),
                                               typed<double>(r.at("to"), "sweep.g0_range.to"),
                                               typed<double>(r.at("count"), "sweep.g0_range.count")};
    }
    read(s, "sigma_x0", "sweep", c.sweep.sigma_x0);
    read(s, "sigma_X0", "sweep", c.sweep.sigma_X0);
    read(s, "random", "sweep", c.sweep.random);
    read(s, "family", "sweep", c.sweep.family);
    read(s, "oracle", "sweep", c.sweep.oracle);
    read(s, "oracle_subsample", "sweep", c.sweep.oracle_subsample);
  }

  if (j.contains("povm")) {
    const auto& p = j.at("povm");
    only_keys(p, "povm", {"bins", "range", "n_object"});
    read(p, "bins", "povm", c.povm.bins);
    read(p, "n_object", "povm", c.povm.n_object);
    if (p.contains("range")) std::tie(c.povm.lo, c.povm.hi) = range(p.at("range"), "povm.range");
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    only_keys(o, "output", {"dir", "format"});
    if (o.contains("dir")) c.out_dir = typed<std::string>(o.at("dir"), "output.dir");
    read(o, "format", "output", c.format);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j, path.parent_path());
}

LinearModel resolve_model(const RunConfig& cfg) {
  const auto& s = cfg.model;
  if (s.catalog && s.coeffs) throw Error(ErrorKind::InvalidConfig, "give either a catalog model or coefficients");
  if (s.coeffs) {
    const auto& c = *s.coeffs;
    return make_model(c[0], c[1], c[2], c[3], cfg.hbar);
  }
  return catalog_model(s.catalog.value_or("momentum-conserving"), s.g0, cfg.hbar);
}

PacketSpec resolve_packet(const PacketConfig& p, double hbar) {
  if (p.file) return PacketSpec::load_tabulated(*p.file, hbar);
  return PacketSpec::gaussian(p.mean_x, p.mean_p, p.sigma_x, hbar);
}

SweepPlan make_sweep_plan(const RunConfig& cfg) {
  SweepPlan plan;
  plan.hbar = cfg.hbar;
  plan.seed = cfg.seed;
  plan.oracle = cfg.sweep.oracle;
  plan.oracle_subsample = cfg.sweep.oracle_subsample;
  plan.oracle_grid = cfg.grid;
  plan.family = parse_family(cfg.sweep.family);
  plan.mean_x0 = cfg.object.mean_x;
  plan.mean_p0 = cfg.object.mean_p;
  plan.mean_X0 = cfg.probe.mean_x;
  plan.mean_P0 = cfg.probe.mean_p;
  plan.sigma_x0 = cfg.sweep.sigma_x0.value_or(std::vector<double>{cfg.object.sigma_x});
  plan.sigma_X0 = cfg.sweep.sigma_X0.value_or(std::vector<double>{cfg.probe.sigma_x});

  if (cfg.sweep.random > 0) {
    plan.source = SweepPlan::Source::random;
    plan.random_count = cfg.sweep.random;
    return plan;
  }
  if (cfg.model.coeffs) {
    if (cfg.model.catalog) throw Error(ErrorKind::InvalidConfig, "give either a catalog model or coefficients");
    plan.source = SweepPlan::Source::coefficients;
    plan.coefficients = {*cfg.model.coeffs};
    return plan;
  }
  plan.source = SweepPlan::Source::catalog;
  plan.catalog = cfg.model.catalog.value_or("momentum-conserving");
  std::vector<double> g0 = cfg.sweep.g0.value_or(std::vector<double>{});
  if (cfg.sweep.g0_range) {
    const auto [from, to, count] = *cfg.sweep.g0_range;
    if (count < 1 || count != std::floor(count)) {
      throw Error(ErrorKind::InvalidConfig, "sweep.g0_range.count must be a positive integer");
    }
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t k = 0; k < n; ++k) {
      g0.push_back(n == 1 ? from : from + (to - from) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
  }
  if (!cfg.sweep.g0 && !cfg.sweep.g0_range) g0 = {cfg.model.g0};
  plan.g0_values = g0;
  return plan;
}

}  // namespace linmeas
