#include "linmeas/packet.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "linmeas/error.hpp"
#include "linmeas/fourier.hpp"

namespace linmeas {

namespace detail {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
using Gauss7 = boost::math::quadrature::gauss<double, 7>;

struct TabulatedData {
  double x_first = 0.0;
  double dx = 0.0;
  std::size_t n = 0;
  double amp_scale = 1.0;
  std::vector<std::complex<double>> samples;  // already scaled
  Spline re, im;
  std::vector<double> cumulative;  // \int_{x_first}^{x_k} |phi|^2, exact per knot interval

  double x_last() const { return x_first + dx * static_cast<double>(n - 1); }

  std::complex<double> raw(double x) const {
    if (x < x_first || x > x_last()) return {0.0, 0.0};
    return {re(x), im(x)};
  }
  // |s|^2 is a degree-6 polynomial between knots, so 7-point Gauss is exact.
  template <class F>
  double integrate_knots(F&& f, double a, double b) const {
    return Gauss7::integrate(std::forward<F>(f), a, b);
  }
};

}  // namespace detail

PacketSpec PacketSpec::gaussian(double mean_x, double mean_p, double sigma_x, double hbar) {
  PacketSpec p;
  p.kind_ = Kind::gaussian;
  p.hbar_ = hbar;
  p.moments_ = MomentSummary::minimal_gaussian(sigma_x, mean_x, mean_p, hbar);
  p.sigma_x_ = sigma_x;
  p.gauss_norm_ = std::pow(2.0 * std::numbers::pi * sigma_x * sigma_x, -0.25);
  return p;
}

PacketSpec PacketSpec::tabulated(double x_first, double dx, std::vector<std::complex<double>> samples,
                                 double hbar) {
  if (samples.size() < 5) throw Error(ErrorKind::InvalidInput, "tabulated packet needs >= 5 samples");
  if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x_first)) {
    throw Error(ErrorKind::InvalidInput, "tabulated packet needs a positive finite spacing");
  }
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidInput, "hbar must be positive");
  for (const auto& s : samples) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw Error(ErrorKind::InvalidInput, "tabulated amplitudes must be finite");
    }
  }

  auto build = [&](double scale) {
    auto t = std::make_shared<detail::TabulatedData>();
    t->x_first = x_first;
    t->dx = dx;
    t->n = samples.size();
    t->amp_scale = scale;
    t->samples.reserve(samples.size());
    std::vector<double> re, im;
    for (const auto& s : samples) {
      t->samples.push_back(s * scale);
      re.push_back(s.real() * scale);
      im.push_back(s.imag() * scale);
    }
    t->re = detail::Spline(re.data(), re.size(), x_first, dx);
    t->im = detail::Spline(im.data(), im.size(), x_first, dx);
    t->cumulative.assign(t->n, 0.0);
    for (std::size_t k = 1; k < t->n; ++k) {
      const double a = x_first + dx * static_cast<double>(k - 1);
      t->cumulative[k] = t->cumulative[k - 1] +
                         t->integrate_knots([&](double x) { return std::norm(t->raw(x)); }, a, a + dx);
    }
    return t;
  };

  auto first = build(1.0);
  const double total = first->cumulative.back();
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidInput, "tabulated packet has zero norm");
  auto table = build(1.0 / std::sqrt(total));

  PacketSpec p;
  p.kind_ = Kind::tabulated;
  p.hbar_ = hbar;
  p.table_ = table;

  double mean = 0.0, second = 0.0;
  for (std::size_t k = 0; k + 1 < table->n; ++k) {
    const double a = x_first + dx * static_cast<double>(k);
    mean += table->integrate_knots([&](double x) { return x * std::norm(table->raw(x)); }, a, a + dx);
    second += table->integrate_knots([&](double x) { return x * x * std::norm(table->raw(x)); }, a, a + dx);
  }
  const auto mom = momentum_moments(table->samples, dx, hbar);
  p.moments_ = MomentSummary{mean, mom.mean, std::max(0.0, second - mean * mean), std::max(0.0, mom.variance())};
  p.sigma_x_ = std::sqrt(p.moments_.var_x);
  return p;
}

PacketSpec PacketSpec::parse_tabulated(std::istream& in, double hbar) {
  std::vector<double> xs;
  std::vector<std::complex<double>> amps;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double x, re, im;
    if (!(row >> x)) continue;  // blank
    if (!(row >> re >> im)) {
      throw Error(ErrorKind::InvalidInput,
                  "tabulated packet line " + std::to_string(lineno) + ": expected 'x re im'");
    }
    xs.push_back(x);
    amps.emplace_back(re, im);
  }
  if (xs.size() < 5) throw Error(ErrorKind::InvalidInput, "tabulated packet needs >= 5 rows");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (std::abs(xs[k] - (xs.front() + dx * static_cast<double>(k))) > 1e-6 * std::abs(dx)) {
      throw Error(ErrorKind::InvalidInput, "tabulated packet positions must be uniformly spaced");
    }
  }
  return tabulated(xs.front(), dx, std::move(amps), hbar);
}

PacketSpec PacketSpec::load_tabulated(const std::filesystem::path& path, double hbar) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open packet file " + path.string());
  return parse_tabulated(in, hbar);
}

std::complex<double> PacketSpec::amplitude(double x) const {
  if (kind_ == Kind::tabulated) return table_->raw(x);
  const double u = (x - moments_.mean_x) / sigma_x_;
  const double envelope = gauss_norm_ * std::exp(-0.25 * u * u);
  return std::polar(envelope, moments_.mean_p * x / hbar_);
}

double PacketSpec::cdf(double x) const {
  if (kind_ == Kind::gaussian) {
    return 0.5 * std::erfc(-(x - moments_.mean_x) / (sigma_x_ * std::numbers::sqrt2));
  }
  const auto& t = *table_;
  if (x <= t.x_first) return 0.0;
  if (x >= t.x_last()) return t.cumulative.back();
  const auto k = static_cast<std::size_t>((x - t.x_first) / t.dx);
  const double a = t.x_first + t.dx * static_cast<double>(k);
  return t.cumulative[k] + t.integrate_knots([&](double s) { return std::norm(t.raw(s)); }, a, x);
}

std::pair<double, double> PacketSpec::support(double n_sigma) const {
  if (kind_ == Kind::tabulated) return {table_->x_first, table_->x_last()};
  return {moments_.mean_x - n_sigma * sigma_x_, moments_.mean_x + n_sigma * sigma_x_};
}

void PacketSpec::write_tabulated(std::ostream& out, std::size_t n) const {
  out << "# position re im\n" << std::setprecision(17);
  if (kind_ == Kind::tabulated) {
    for (std::size_t k = 0; k < table_->n; ++k) {
      const auto& s = table_->samples[k];
      out << table_->x_first + table_->dx * static_cast<double>(k) << ' ' << s.real() << ' ' << s.imag() << '\n';
    }
    return;
  }
  const auto [lo, hi] = support();
  const double dx = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = lo + dx * static_cast<double>(k);
    const auto a = amplitude(x);
    out << x << ' ' << a.real() << ' ' << a.imag() << '\n';
  }
}

}  // namespace linmeas
