#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "linmeas/config.hpp"
#include "linmeas/error.hpp"
#include "linmeas/report_io.hpp"

using namespace linmeas;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidInput;
}

std::size_t count(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

}  // namespace

TEST(Json, ReportRoundTripIsBitExact) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 200; ++k) {
    const auto m = random_model(rng, ModelFamily::mixed);
    const auto [o, p] = random_states(rng);
    const auto r = full_report(m, o, p);
    const auto back = report_from_json(Json::parse(to_json(r).dump()));
    EXPECT_EQ(back, r);
    EXPECT_EQ(model_from_json(Json::parse(to_json(m).dump())), m);
    EXPECT_EQ(moments_from_json(Json::parse(to_json(o).dump())), o);
  }
}

TEST(Json, ModelInfoFields) {
  const auto j = model_info_json(ozawa());
  EXPECT_EQ(j.at("gamma").get<double>(), 1.0);
  EXPECT_FALSE(j.at("conserves_momentum").get<bool>());
  EXPECT_TRUE(j.at("measurable").get<bool>());
  EXPECT_EQ(j.at("momentum_map").at("b1").get<double>(), 1.0);
}

TEST(Json, VerifierReportRoundTrip) {
  SweepPlan plan;
  plan.g0_values = {0.5, 1.0};
  plan.oracle = true;
  plan.oracle_subsample = 1;
  const auto r = verify_relations(plan);
  const auto back = verifier_report_from_json(Json::parse(to_json(r).dump()));
  ASSERT_EQ(back.rows.size(), r.rows.size());
  EXPECT_EQ(*back.rows[1].report, *r.rows[1].report);
  EXPECT_EQ(back.rows[0].oracle->oracle.dp_dis, r.rows[0].oracle->oracle.dp_dis);
  EXPECT_EQ(back.rel_64.min_slack, r.rel_64.min_slack);
  EXPECT_EQ(back.oracle_rows, 1u);
}

TEST(Json, PovmCheckKeepsInfiniteEdges) {
  PovmCheck c;
  c.bins.push_back({{-INFINITY, 0.0}, 0.0, 0.4, 0.4});
  c.bins.push_back({{0.0, INFINITY}, 0.0, 0.6, 0.6});
  const auto j = to_json(c);
  const auto back = povm_check_from_json(Json::parse(j.dump()));
  EXPECT_TRUE(std::isinf(back.bins[0].interval.lo) && back.bins[0].interval.lo < 0);
  EXPECT_TRUE(std::isinf(back.bins[1].interval.hi) && back.bins[1].interval.hi > 0);
}

TEST(Csv, SweepHeaderAndRows) {
  EXPECT_EQ(sweep_csv_header(false).rfind("config_id,alpha1,alpha2,beta1,beta2,gamma,g0,", 0), 0u);
  EXPECT_NE(sweep_csv_header(false).find("prod_64,prod_65,prod_69,bound_64,bound_65,bound_69,pass_64,pass_65,pass_69"),
            std::string::npos);
  SweepPlan plan;
  plan.g0_values = {0.5, 1.0, 2.0};
  const auto r = verify_relations(plan);
  std::ostringstream out;
  write_sweep_csv(out, r, false);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  for (const auto& l : lines) EXPECT_EQ(count(l, ','), count(lines[0], ','));

  std::ostringstream series;
  write_series_csv(series, r, "64");
  EXPECT_EQ(series.str().rfind("g0,product,bound\n0.5,", 0), 0u);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1), "0.1");
  const double v = std::sqrt(2.0);
  EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Config, DefaultsAndOverrides) {
  const auto c = parse_config(Json::parse(R"({"model": {"catalog": "ozawa"}, "hbar": 2.0,
      "probe": {"sigma_x": 0.3}, "grid": {"n_object": 256, "object_range": [-8, 8]},
      "sweep": {"g0": [0.5, 1.0]}, "output": {"format": "json"}})"));
  EXPECT_EQ(*c.model.catalog, "ozawa");
  EXPECT_EQ(c.hbar, 2.0);
  EXPECT_EQ(c.probe.sigma_x, 0.3);
  EXPECT_EQ(c.object.sigma_x, 1.0);
  EXPECT_EQ(c.grid.object, (Axis{256, -8, 8}));
  EXPECT_EQ(c.grid.probe, (Axis{512, -12, 12}));
  EXPECT_EQ(c.format, "json");
  EXPECT_EQ(resolve_model(c), ozawa(2.0));
}

TEST(Config, RejectsUnknownKeysAndWrongTypes) {
  EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"modle": {}})")); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"sweep": {"g0_list": [1]}})")); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"hbar": "one"})")); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"grid": {"object_range": [3, 1]}})")); }),
            ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { load_config("/nonexistent/config.json"); }), ErrorKind::InvalidConfig);
}

TEST(Config, CatalogAndCoefficientsConflict) {
  const auto c = parse_config(Json::parse(R"({"model": {"catalog": "ozawa", "coeffs": [1, 0, 1, 1]}})"));
  EXPECT_EQ(kind_of([&] { resolve_model(c); }), ErrorKind::InvalidConfig);
}

TEST(Config, SweepPlans) {
  const auto ranged = make_sweep_plan(parse_config(Json::parse(R"({"sweep": {"g0_range": {"from": -1, "to": 1, "count": 5}}})")));
  EXPECT_EQ(ranged.g0_values, (std::vector<double>{-1, -0.5, 0, 0.5, 1}));
  const auto empty = make_sweep_plan(parse_config(Json::parse(R"({"sweep": {"g0": []}})")));
  EXPECT_EQ(kind_of([&] { expand_plan(empty); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { make_sweep_plan(parse_config(Json::parse(R"({"sweep": {"g0_range": {"from": 0, "to": 1, "count": 0}}})"))); }),
            ErrorKind::InvalidConfig);
  const auto rnd = make_sweep_plan(parse_config(Json::parse(R"({"seed": 9, "sweep": {"random": 10, "family": "general"}})")));
  EXPECT_EQ(rnd.source, SweepPlan::Source::random);
  EXPECT_EQ(rnd.seed, 9u);
  EXPECT_EQ(rnd.family, ModelFamily::general);
}

TEST(Config, TabulatedPacketPathIsRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "linmeas_cfg_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream packet(dir / "packet.txt");
    for (int k = -60; k <= 60; ++k) packet << 0.1 * k << ' ' << std::exp(-0.01 * k * k / 4) << " 0\n";
    std::ofstream(dir / "run.json") << R"({"object": {"file": "packet.txt"}})";
  }
  const auto c = load_config(dir / "run.json");
  ASSERT_TRUE(c.object.file);
  EXPECT_EQ(resolve_packet(c.object, 1.0).kind(), PacketSpec::Kind::tabulated);
  std::filesystem::remove_all(dir);
}

TEST(NumberList, Parses) {
  EXPECT_EQ(parse_number_list("0.5,1,-2e-1"), (std::vector<double>{0.5, 1, -0.2}));
  EXPECT_EQ(kind_of([] { parse_number_list("1,,2"); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([] { parse_number_list("a"); }), ErrorKind::InvalidConfig);
}
