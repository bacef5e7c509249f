#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "linmeas/error.hpp"
#include "linmeas/fourier.hpp"
#include "linmeas/grid.hpp"
#include "linmeas/packet.hpp"
#include "support/oracle.hpp"

using namespace linmeas;
using cd = std::complex<double>;

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

std::vector<cd> sample(const PacketSpec& p, const Axis& a) {
  std::vector<cd> v(a.n);
  for (std::size_t i = 0; i < a.n; ++i) v[i] = p.amplitude(a.node(i));
  return v;
}

PacketSpec two_peaks() {
  std::vector<cd> s;
  for (int k = 0; k <= 2000; ++k) {
    const double x = -10.0 + 0.01 * k;
    s.push_back(std::exp(-(x + 2) * (x + 2) / (4 * 0.36)) +
                0.7 * std::exp(-(x - 2.5) * (x - 2.5) / (4 * 0.25)) * std::polar(1.0, 1.2 * x));
  }
  return PacketSpec::tabulated(-10.0, 0.01, s);
}

}  // namespace

TEST(Gaussian, AmplitudeIsNormalized) {
  const auto p = PacketSpec::gaussian(0.3, -0.4, 0.7);
  EXPECT_NEAR(oracle::simpson([&](double x) { return p.density(x); }, -10, 10, 4000), 1.0, 1e-12);
  EXPECT_NEAR(p.density(0.3), oracle::gauss_density(0.3, 0.3, 0.7), 1e-14);
  EXPECT_DOUBLE_EQ(p.moments().var_x, 0.49);
  EXPECT_NEAR(std::arg(p.amplitude(1.0) / p.amplitude(0.0)), -0.4, 1e-14);
}

TEST(Gaussian, RejectsBadParameters) {
  EXPECT_EQ(kind_of([] { PacketSpec::gaussian(0, 0, 0.0); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { PacketSpec::gaussian(0, 0, 1.0, -1.0); }), ErrorKind::InvalidInput);
}

TEST(Gaussian, CdfMatchesErf) {
  const auto p = PacketSpec::gaussian(0.5, 0.0, 0.8);
  for (double x : {-2.0, 0.0, 0.5, 1.7}) {
    EXPECT_NEAR(p.cdf(x), 0.5 * std::erfc(-(x - 0.5) / (0.8 * std::numbers::sqrt2)), 1e-14);
  }
}

TEST(Fourier, MinimalGaussianMomentumSpread) {
  const Axis a{512, -12, 12};
  const auto m = momentum_moments(PacketSpec::gaussian(0.0, 0.0, 0.5), a);
  EXPECT_NEAR(std::sqrt(m.variance()), 1.0, 1e-8);
  EXPECT_NEAR(m.mean, 0.0, 1e-12);
}

TEST(Fourier, MeanMomentumAndHbar) {
  const Axis a{1024, -20, 20};
  const auto m = momentum_moments(PacketSpec::gaussian(0.4, 0.75, 1.2, 2.5), a);
  EXPECT_NEAR(m.mean, 0.75, 1e-10);
  EXPECT_NEAR(std::sqrt(m.variance()), 2.5 / (2 * 1.2), 1e-9);
}

TEST(Fourier, Parseval) {
  const Axis a{256, -10, 10};
  const auto v = sample(two_peaks(), a);
  double pos = 0;
  for (const auto& z : v) pos += std::norm(z) * a.spacing();
  const auto m = momentum_moments(v, a.spacing(), 1.0);
  EXPECT_NEAR(m.norm, pos, 1e-10);
}

TEST(Fourier, DetectsAliasing) {
  // sigma_p = 1/(2*0.05) = 10 against a Nyquist momentum of pi/0.25.
  const Axis a{64, -8, 8};
  const auto v = sample(PacketSpec::gaussian(0, 0, 0.05), a);
  EXPECT_EQ(kind_of([&] { momentum_moments(v, a.spacing(), 1.0); }), ErrorKind::AliasingDetected);
}

TEST(Fourier, JointMomentsOfProductState) {
  const auto g = GridSpec::symmetric(128, 12);
  const auto o = PacketSpec::gaussian(0, 0.3, 1.0), p = PacketSpec::gaussian(0, -0.2, 0.5);
  const auto st = prepare(o, p, g);
  const auto j = momentum_moments(st);
  EXPECT_NEAR(j.mean_p, 0.3, 1e-10);
  EXPECT_NEAR(j.mean_P, -0.2, 1e-10);
  EXPECT_NEAR(j.second_p, 0.25 + 0.09, 1e-10);
  EXPECT_NEAR(j.second_P, 1.0 + 0.04, 1e-10);
  EXPECT_NEAR(j.cross, 0.3 * -0.2, 1e-10);
}

TEST(DftMomentum, SignedFrequencies) {
  EXPECT_EQ(dft_momentum(0, 8, 1.0, 1.0), 0.0);
  EXPECT_NEAR(dft_momentum(1, 8, 1.0, 1.0), 2 * std::numbers::pi / 8, 1e-15);
  EXPECT_NEAR(dft_momentum(7, 8, 1.0, 1.0), -2 * std::numbers::pi / 8, 1e-15);
}

TEST(Tabulated, NormalizedInterpolant) {
  const auto p = two_peaks();
  EXPECT_NEAR(oracle::simpson([&](double x) { return p.density(x); }, -10, 10, 20000), 1.0, 1e-8);
  EXPECT_EQ(p.amplitude(-10.5), cd(0.0));
  EXPECT_EQ(p.amplitude(10.5), cd(0.0));
  EXPECT_NEAR(p.cdf(11.0), 1.0, 1e-8);
  EXPECT_NEAR(p.cdf(-11.0), 0.0, 1e-15);
}

TEST(Tabulated, MomentsMatchGaussianTable) {
  std::vector<cd> s;
  const auto g = PacketSpec::gaussian(0.2, 0.5, 0.6);
  for (int k = 0; k <= 1600; ++k) s.push_back(g.amplitude(-8.0 + 0.01 * k));
  const auto t = PacketSpec::tabulated(-8.0, 0.01, s);
  EXPECT_NEAR(t.moments().mean_x, 0.2, 1e-8);
  EXPECT_NEAR(t.moments().var_x, 0.36, 1e-7);
  EXPECT_NEAR(t.moments().mean_p, 0.5, 1e-7);
  EXPECT_NEAR(t.moments().var_p, 1.0 / (4 * 0.36), 1e-6);
}

TEST(Tabulated, ParseAndRoundTrip) {
  std::ostringstream text;
  text << "# x re im\n";
  for (int k = -60; k <= 60; ++k) {
    const double x = 0.1 * k;
    text << x << ' ' << std::exp(-x * x / 4) << ' ' << 0.25 * std::exp(-x * x / 4) << '\n';
  }
  std::istringstream in(text.str());
  const auto p = PacketSpec::parse_tabulated(in);
  EXPECT_EQ(p.kind(), PacketSpec::Kind::tabulated);
  EXPECT_NEAR(std::arg(p.amplitude(0.0)), std::atan2(0.25, 1.0), 1e-12);

  std::ostringstream out;
  p.write_tabulated(out);
  std::istringstream back(out.str());
  const auto q = PacketSpec::parse_tabulated(back);
  for (double x : {-1.5, -0.3, 0.0, 0.8}) EXPECT_NEAR(std::abs(p.amplitude(x) - q.amplitude(x)), 0.0, 1e-12);
}

TEST(Tabulated, RejectsMalformedInput) {
  std::istringstream uneven("0 1 0\n1 1 0\n3 1 0\n4 1 0\n5 1 0\n");
  EXPECT_EQ(kind_of([&] { PacketSpec::parse_tabulated(uneven); }), ErrorKind::InvalidInput);
  std::istringstream few("0 1 0\n1 1 0\n");
  EXPECT_EQ(kind_of([&] { PacketSpec::parse_tabulated(few); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { PacketSpec::tabulated(0, 0.1, std::vector<cd>(8, 0.0)); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { PacketSpec::load_tabulated("/nonexistent/packet.txt"); }), ErrorKind::InvalidInput);
}
