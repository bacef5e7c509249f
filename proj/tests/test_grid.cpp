#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "linmeas/error.hpp"
#include "linmeas/grid.hpp"
#include "linmeas/verifier.hpp"
#include "support/oracle.hpp"

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

oracle::Coeffs raw(const LinearModel& m) { return {m.alpha1(), m.alpha2(), m.beta1(), m.beta2()}; }

oracle::Gauss og(const PacketSpec& p) { return {p.mean_x(), p.mean_p(), p.sigma_x(), p.hbar()}; }

PacketSpec from(const MomentSummary& m, double hbar = 1.0) {
  return PacketSpec::gaussian(m.mean_x, m.mean_p, m.sigma_x(), hbar);
}

const GridSpec kBase = GridSpec::symmetric(256, 12.0);

}  // namespace

TEST(GridSpec, Validation) {
  EXPECT_NO_THROW(GridSpec::symmetric(64, 5).validate());
  EXPECT_EQ(kind_of([] { GridSpec::symmetric(100, 5).validate(); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { GridSpec::symmetric(4, 5).validate(); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { GridSpec::make({64, 1, -1}, {64, -1, 1}).validate(); }), ErrorKind::InvalidInput);
  const Axis a{8, -4, 4};
  EXPECT_EQ(a.spacing(), 1.0);
  EXPECT_EQ(a.nodes().back(), 3.0);
}

TEST(GridSpec, CoversAndFitted) {
  const auto o = MomentSummary::minimal_gaussian(1.0), p = MomentSummary::minimal_gaussian(0.5);
  EXPECT_TRUE(GridSpec::symmetric(512, 12).covers(ozawa(), o, p));
  EXPECT_FALSE(GridSpec::symmetric(512, 12).covers(ozawa(), MomentSummary::minimal_gaussian(3.0), p));
  // Too coarse for the momentum spread of a narrow probe.
  EXPECT_FALSE(GridSpec::symmetric(64, 12).covers(ozawa(), o, MomentSummary::minimal_gaussian(0.05)));

  const auto wide = MomentSummary::minimal_gaussian(3.0);
  const auto f = GridSpec::fitted(momentum_conserving(2.0), wide, p, kBase);
  ASSERT_TRUE(f);
  EXPECT_TRUE(f->covers(momentum_conserving(2.0), wide, p));
  EXPECT_GE(f->object.n, kBase.object.n);
  EXPECT_LE(f->object.spacing(), kBase.object.spacing());
  EXPECT_FALSE(GridSpec::fitted(momentum_conserving(2.0), wide, p, kBase, 256));
}

TEST(Prepare, NormalizesGaussianProduct) {
  const auto s = prepare(PacketSpec::gaussian(0.2, 0.1, 1.0), PacketSpec::gaussian(-0.3, 0, 0.5),
                         GridSpec::symmetric(256, 12));
  EXPECT_NEAR(s.raw_norm(), 1.0, 1e-12);
  EXPECT_NEAR(s.norm(), 1.0, 1e-14);
  EXPECT_NEAR(s.object_mean0(), 0.2, 1e-12);
  EXPECT_NEAR(s.object_var0(), 1.0, 1e-12);
  EXPECT_NEAR(s.probe_mean0(), -0.3, 1e-12);
  EXPECT_NEAR(probe_marginal(s).total, 1.0, 1e-14);
}

TEST(Prepare, TabulatedPacketNorm) {
  std::vector<std::complex<double>> v;
  for (int k = 0; k <= 2000; ++k) {
    const double x = -10.0 + 0.01 * k;
    v.push_back(std::exp(-(x + 2) * (x + 2) / (4 * 0.36)) +
                0.7 * std::exp(-(x - 2.5) * (x - 2.5) / (4 * 0.25)) * std::polar(1.0, 1.2 * x));
  }
  const auto t = PacketSpec::tabulated(-10.0, 0.01, v);
  const auto s = prepare(t, PacketSpec::gaussian(0, 0, 0.5), GridSpec::symmetric(512, 12));
  EXPECT_NEAR(s.raw_norm(), 1.0, 1e-8);
}

TEST(Prepare, RejectsSmallDomain) {
  EXPECT_EQ(kind_of([] { prepare(PacketSpec::gaussian(0, 0, 1.0), PacketSpec::gaussian(0, 0, 0.5),
                                 GridSpec::symmetric(256, 4)); }),
            ErrorKind::DomainTooSmall);
  EXPECT_EQ(kind_of([] { prepare(PacketSpec::gaussian(8, 0, 1.0), PacketSpec::gaussian(0, 0, 0.5),
                                 GridSpec::symmetric(256, 10)); }),
            ErrorKind::DomainTooSmall);
  EXPECT_EQ(kind_of([] { prepare(PacketSpec::gaussian(0, 0, 1.0), PacketSpec::gaussian(0, 0, 0.5, 2.0),
                                 GridSpec::symmetric(256, 10)); }),
            ErrorKind::InvalidInput);
}

TEST(Evolve, IdentityLeavesStateUnchanged) {
  const auto s = prepare(PacketSpec::gaussian(0.2, 0.4, 1.0), PacketSpec::gaussian(0, -0.1, 0.5), kBase);
  const auto t = evolve(s, identity_model());
  ASSERT_EQ(t.amplitudes().size(), s.amplitudes().size());
  for (std::size_t k = 0; k < s.amplitudes().size(); ++k) EXPECT_EQ(t.amplitudes()[k], s.amplitudes()[k]);
}

TEST(Evolve, PreservesNormForRandomModels) {
  std::mt19937_64 rng(71);
  int done = 0;
  for (int k = 0; k < 40 && done < 8; ++k) {
    const auto m = random_model(rng, ModelFamily::mixed);
    const auto [o, p] = random_states(rng);
    const auto g = GridSpec::fitted(m, o, p, kBase, 1024);
    if (!g) continue;
    const auto s = prepare(from(o), from(p), *g);
    const auto t = evolve(s, m);
    EXPECT_NEAR(t.norm(), 1.0, 1e-10);
    ++done;
  }
  EXPECT_EQ(done, 8);
}

TEST(Evolve, LeakRaisesDomainTooSmall) {
  const auto s = prepare(PacketSpec::gaussian(0, 0, 0.6), PacketSpec::gaussian(0, 0, 0.5), GridSpec::symmetric(256, 8));
  EXPECT_EQ(kind_of([&] { evolve(s, momentum_conserving(5.0)); }), ErrorKind::DomainTooSmall);
}

TEST(ProbeMarginal, VonNeumannIsConvolution) {
  const auto s = prepare(PacketSpec::gaussian(0.3, 0, 1.0), PacketSpec::gaussian(-0.2, 0, 0.5), kBase);
  const auto t = evolve(s, von_neumann());
  const auto pm = probe_marginal(t);
  const double sd = std::sqrt(1.25);
  double worst = 0.0;
  for (std::size_t j = 0; j < pm.X.size(); ++j)
    worst = std::max(worst, std::abs(pm.density[j] - oracle::gauss_density(pm.X[j], 0.1, sd)));
  EXPECT_LT(worst, 1e-12);
  EXPECT_NEAR(probe_density(t, 0.77), oracle::gauss_density(0.77, 0.1, sd), 1e-12);
}

TEST(ProbeMarginal, OzawaReproducesObjectDensity) {
  const auto obj = PacketSpec::gaussian(0.5, 0.3, 0.8);
  const auto t = evolve(prepare(obj, PacketSpec::gaussian(0, 0, 0.5), kBase), ozawa());
  const auto pm = probe_marginal(t);
  for (std::size_t j = 0; j < pm.X.size(); j += 7) EXPECT_NEAR(pm.density[j], obj.density(pm.X[j]), 1e-12);
}

TEST(Conditional, MatchesGaussianConditioning) {
  std::mt19937_64 rng(73);
  int done = 0;
  for (int k = 0; k < 40 && done < 6; ++k) {
    const auto m = random_model(rng, ModelFamily::mixed);
    const auto [om, pm] = random_states(rng);
    const auto g = GridSpec::fitted(m, om, pm, kBase, 1024);
    if (!g) continue;
    const auto o = from(om), p = from(pm);
    const auto t = evolve(prepare(o, p, *g), m);
    const double mX = m.beta1() * om.mean_x + m.beta2() * pm.mean_x;
    const double sX = std::hypot(m.beta1() * om.sigma_x(), m.beta2() * pm.sigma_x());
    for (double z : {-1.5, 0.0, 0.7}) {
      const double X = mX + z * sX;
      const auto ct = oracle::condition_xt_on_Xt(raw(m), og(o), og(p), X);
      const double rt = m.alpha1() / m.beta1() * X - pm.mean_x / (m.beta1() * m.gamma());
      const double want_t = std::sqrt(ct.variance + (rt - ct.mean) * (rt - ct.mean));
      EXPECT_NEAR(conditional_error_xt(t, m, X), want_t, 1e-8 * std::max(1.0, want_t));

      const auto c0 = oracle::condition_x0_on_Xt(raw(m), og(o), og(p), X);
      const double r0 = X / m.beta1() - m.beta2() / m.beta1() * pm.mean_x;
      const double want_0 = std::sqrt(c0.variance + (r0 - c0.mean) * (r0 - c0.mean));
      EXPECT_NEAR(conditional_error_x0(t, m, X), want_0, 1e-8 * std::max(1.0, want_0));

      const auto cs = conditional_state(t, X);
      EXPECT_NEAR(cs.mean, ct.mean, 1e-8 * std::max(1.0, std::abs(ct.mean)));
      EXPECT_NEAR(cs.sigma, std::sqrt(ct.variance), 1e-8);
      EXPECT_LE(cs.sigma, conditional_error_xt(t, m, X) + 1e-12);
    }
    ++done;
  }
  EXPECT_EQ(done, 6);
}

TEST(Conditional, OzawaErrorsAreIndependentOfX) {
  const auto t = evolve(prepare(PacketSpec::gaussian(0.4, 0, 1.0), PacketSpec::gaussian(0.1, 0, 0.5), kBase), ozawa());
  for (double X : {-2.0, -0.5, 0.4, 1.0, 3.0}) {
    EXPECT_NEAR(conditional_error_x0(t, ozawa(), X), 0.0, 1e-12);
    EXPECT_NEAR(conditional_error_xt(t, ozawa(), X), 0.5, 1e-12);
  }
}

TEST(Conditional, NarrowProbeLocalizesObject) {
  // sigma(X0) = 0.01 needs a fine axis on whichever coordinate resolves it.
  const auto init_grid = GridSpec::make({4096, -11, 11}, {256, -0.5, 0.5});
  const auto out_grid = GridSpec::make({4096, -11, 11}, {256, -8, 8});
  const auto o = PacketSpec::gaussian(0, 0, 1.0), p = PacketSpec::gaussian(0, 0, 0.01);
  const auto t = evolve(prepare(o, p, init_grid), von_neumann(), out_grid);
  for (double X : {-1.0, 0.0, 0.6}) {
    const auto c = oracle::condition_x0_on_Xt(raw(von_neumann()), og(o), og(p), X);
    const double want = std::sqrt(c.variance + (X - c.mean) * (X - c.mean));
    EXPECT_NEAR(conditional_error_x0(t, von_neumann(), X), want, 1e-6 * want);
    EXPECT_LT(conditional_state(t, X).sigma, 0.0101);
  }
}

TEST(Conditional, NegligibleProbabilityIsRejected) {
  const auto t = evolve(prepare(PacketSpec::gaussian(0, 0, 0.3), PacketSpec::gaussian(0, 0, 0.3), kBase), von_neumann());
  EXPECT_EQ(kind_of([&] { conditional_error_xt(t, von_neumann(), 9.0); }), ErrorKind::NegligibleProbability);
  EXPECT_EQ(kind_of([&] { conditional_state(t, 9.0); }), ErrorKind::NegligibleProbability);
  EXPECT_EQ(kind_of([&] { conditional_error_x0(t, identity_model(), 0.0); }), ErrorKind::Unmeasurable);
}

TEST(Oracle, OzawaDisturbance) {
  const auto c = compare_with_analytics(ozawa(), PacketSpec::gaussian(0, 0, 1.0), PacketSpec::gaussian(0, 0, 0.5),
                                        GridSpec::symmetric(512, 12));
  EXPECT_NEAR(c.oracle.dp_dis, std::sqrt(1.25), 1e-8);
  EXPECT_NEAR(c.oracle.eps_ozawa_x0, 0.0, 1e-12);
  EXPECT_LT(c.max_rel_gap(), 1e-6);
  EXPECT_LT(c.oracle.momentum_map_residual, 1e-8);
}

TEST(Oracle, CatalogModelsAgreeWithClosedForms) {
  const auto o = PacketSpec::gaussian(0.3, -0.2, 0.9), p = PacketSpec::gaussian(-0.1, 0.4, 0.6);
  for (const auto& m : {von_neumann(), ozawa(), momentum_conserving(1.0), momentum_conserving(-0.7)}) {
    const auto g = GridSpec::fitted(m, o.moments(), p.moments(), GridSpec::symmetric(512, 12));
    ASSERT_TRUE(g);
    const auto c = compare_with_analytics(m, o, p, *g);
    EXPECT_LT(c.max_rel_gap(), 1e-6) << m.name();
    EXPECT_NEAR(c.oracle.eps_ozawa_xt, c.analytic.eps_ozawa_xt, 1e-8);
  }
}

TEST(BornRule, OzawaReadoutFollowsObjectDensity) {
  const auto obj = PacketSpec::gaussian(0.2, 0, 1.0);
  const auto probe = PacketSpec::gaussian(0, 0, 0.5);
  const auto toz = evolve(prepare(obj, probe, kBase), ozawa());
  EXPECT_LT(born_rule_l1(toz, ozawa(), obj), 1e-10);
  const auto tvn = evolve(prepare(obj, probe, kBase), von_neumann());
  EXPECT_GT(born_rule_l1(tvn, von_neumann(), obj), 0.05);
}
