#include "linmeas/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "linmeas/error.hpp"

namespace linmeas {

std::vector<double> Axis::nodes() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = node(i);
  return out;
}

GridSpec GridSpec::symmetric(std::size_t n, double half_width) {
  return make({n, -half_width, half_width}, {n, -half_width, half_width});
}

GridSpec GridSpec::make(Axis object, Axis probe) {
  GridSpec g{object, probe};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  for (const Axis* a : {&object, &probe}) {
    if (a->n < 8 || !std::has_single_bit(a->n)) {
      throw Error(ErrorKind::InvalidInput, "grid sizes must be powers of two >= 8");
    }
    if (!std::isfinite(a->lo) || !std::isfinite(a->hi) || !(a->lo < a->hi)) {
      throw Error(ErrorKind::InvalidInput, "grid bounds must be finite with lo < hi");
    }
  }
}

namespace {

struct Extent {
  double lo, hi;
};

struct Requirements {
  Extent object_x, probe_x;
  double object_p, probe_p;  // largest |p| to be resolved on each axis
};

Requirements requirements(const LinearModel& m, const MomentSummary& obj,
                          const MomentSummary& probe, double k) {
  auto extent = [k](double mean, double var) {
    const double s = k * std::sqrt(std::max(var, 0.0));
    return Extent{mean - s, mean + s};
  };
  auto join = [](Extent a, Extent b) { return Extent{std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; };
  auto lin_var = [](double c1, double v1, double c2, double v2) { return c1 * c1 * v1 + c2 * c2 * v2; };
  const auto mm = momentum_map(m);

  Requirements r{};
  r.object_x = join(extent(obj.mean_x, obj.var_x),
                    extent(m.alpha1() * obj.mean_x + m.alpha2() * probe.mean_x,
                           lin_var(m.alpha1(), obj.var_x, m.alpha2(), probe.var_x)));
  r.probe_x = join(extent(probe.mean_x, probe.var_x),
                   extent(m.beta1() * obj.mean_x + m.beta2() * probe.mean_x,
                          lin_var(m.beta1(), obj.var_x, m.beta2(), probe.var_x)));
  auto pmax = [](Extent e) { return std::max(std::abs(e.lo), std::abs(e.hi)); };
  r.object_p = std::max(pmax(extent(obj.mean_p, obj.var_p)),
                        pmax(extent(mm.a1 * obj.mean_p + mm.a2 * probe.mean_p,
                                    lin_var(mm.a1, obj.var_p, mm.a2, probe.var_p))));
  r.probe_p = std::max(pmax(extent(probe.mean_p, probe.var_p)),
                       pmax(extent(mm.b1 * obj.mean_p + mm.b2 * probe.mean_p,
                                   lin_var(mm.b1, obj.var_p, mm.b2, probe.var_p))));
  return r;
}

double nyquist(const Axis& a, double hbar) { return std::numbers::pi * hbar / a.spacing(); }

}  // namespace

bool GridSpec::covers(const LinearModel& m, const MomentSummary& obj, const MomentSummary& prb,
                      double n_sigma) const {
  const auto r = requirements(m, obj, prb, n_sigma);
  const double hbar = m.hbar();
  return object.lo <= r.object_x.lo && object.hi >= r.object_x.hi && probe.lo <= r.probe_x.lo &&
         probe.hi >= r.probe_x.hi && nyquist(object, hbar) >= r.object_p &&
         nyquist(probe, hbar) >= r.probe_p;
}

std::optional<GridSpec> GridSpec::fitted(const LinearModel& m, const MomentSummary& obj,
                                         const MomentSummary& probe, const GridSpec& base,
                                         std::size_t max_n, double n_sigma) {
  base.validate();
  const auto r = requirements(m, obj, probe, n_sigma);
  auto fit = [&](const Axis& b, Extent need, double pmax) -> std::optional<Axis> {
    const double lo = std::min(b.lo, need.lo);
    const double hi = std::max(b.hi, need.hi);
    double spacing = b.spacing();
    if (pmax > 0.0) spacing = std::min(spacing, std::numbers::pi * m.hbar() / pmax);
    const double want = std::ceil((hi - lo) / spacing - 1e-9);
    if (!(want <= static_cast<double>(max_n))) return std::nullopt;
    const std::size_t n = std::bit_ceil(std::max<std::size_t>(8, static_cast<std::size_t>(want)));
    if (n > max_n) return std::nullopt;
    return Axis{n, lo, hi};
  };
  auto o = fit(base.object, r.object_x, r.object_p);
  auto p = fit(base.probe, r.probe_x, r.probe_p);
  if (!o || !p) return std::nullopt;
  return GridSpec::make(*o, *p);
}

void GridState::sample(Amplitude2D eval) {
  eval_ = std::move(eval);
  const std::size_t no = grid_.object.n, np = grid_.probe.n;
  const double dx = grid_.object.spacing();
  psi_.assign(no * np, {});
  marginal_.assign(np, 0.0);
  for (std::size_t i = 0; i < no; ++i) {
    const double x = grid_.object.node(i);
    for (std::size_t j = 0; j < np; ++j) {
      const auto v = eval_(x, grid_.probe.node(j));
      psi_[i * np + j] = v;
      marginal_[j] += std::norm(v) * dx;
    }
  }
  norm_ = 0.0;
  for (double m : marginal_) norm_ += m * grid_.probe.spacing();
  max_marginal_ = *std::max_element(marginal_.begin(), marginal_.end());
}

GridState prepare(const PacketSpec& object, const PacketSpec& probe, const GridSpec& grid) {
  grid.validate();
  if (object.hbar() != probe.hbar()) {
    throw Error(ErrorKind::InvalidInput, "object and probe packets use different hbar");
  }

  GridState s;
  s.grid_ = grid;
  s.hbar_ = object.hbar();
  s.sample([object, probe](double x, double X) { return object.amplitude(x) * probe.amplitude(X); });
  s.raw_norm_ = s.norm_;

  const std::size_t no = grid.object.n, np = grid.probe.n;
  double peak = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < no; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double a = std::abs(s.psi_[i * np + j]);
      peak = std::max(peak, a);
      if (i == 0 || j == 0 || i == no - 1 || j == np - 1) edge = std::max(edge, a);
    }
  }
  if (!(peak > 0.0) || s.raw_norm_ < 0.5 || edge > kBoundaryTol * peak) {
    std::ostringstream msg;
    msg << "initial packets are not contained in the grid (boundary/peak = "
        << (peak > 0.0 ? edge / peak : 1.0) << ", captured norm = " << s.raw_norm_ << ")";
    throw Error(ErrorKind::DomainTooSmall, msg.str());
  }

  const double c = 1.0 / std::sqrt(s.raw_norm_);
  for (auto& v : s.psi_) v *= c;
  for (auto& m : s.marginal_) m *= c * c;
  s.max_marginal_ *= c * c;
  s.norm_ *= c * c;
  auto base = s.eval_;
  s.eval_ = [base, c](double x, double X) { return base(x, X) * c; };

  // Initial moments by quadrature.
  const double dA = grid.cell_area();
  double mx = 0.0, mxx = 0.0, mX = 0.0;
  for (std::size_t i = 0; i < no; ++i) {
    const double x = grid.object.node(i);
    for (std::size_t j = 0; j < np; ++j) {
      const double w = std::norm(s.psi_[i * np + j]) * dA;
      mx += x * w;
      mxx += x * x * w;
      mX += grid.probe.node(j) * w;
    }
  }
  s.object_mean0_ = mx;
  s.object_var0_ = std::max(0.0, mxx - mx * mx);
  s.probe_mean0_ = mX;
  return s;
}

GridState evolve(const GridState& initial, const LinearModel& m, const std::optional<GridSpec>& output) {
  GridState s = initial;
  if (output) {
    output->validate();
    s.grid_ = *output;
  }
  s.model_ = m;
  const double g = m.gamma();
  const double scale = std::sqrt(std::abs(g));
  const double a1 = m.alpha1(), a2 = m.alpha2(), b1 = m.beta1(), b2 = m.beta2();
  auto base = initial.eval_;
  s.sample([=](double x, double X) {
    return scale * base(g * (b2 * x - a2 * X), g * (-b1 * x + a1 * X));
  });
  const double leak = initial.norm() - s.norm_;
  if (leak > kLeakTol) {
    std::ostringstream msg;
    msg << "evolved state leaks probability " << leak << " outside the grid";
    throw Error(ErrorKind::DomainTooSmall, msg.str());
  }
  return s;
}

ProbeMarginal probe_marginal(const GridState& state) {
  ProbeMarginal out{state.grid().probe.nodes(), state.probe_marginal(), 0.0};
  for (double p : out.density) out.total += p * state.grid().probe.spacing();
  return out;
}

namespace {

struct Slice {
  std::vector<std::complex<double>> psi;
  double density = 0.0;  // P(X)
};

Slice slice_at(const GridState& s, double X) {
  const auto& ax = s.grid().object;
  Slice out;
  out.psi.resize(ax.n);
  for (std::size_t i = 0; i < ax.n; ++i) {
    out.psi[i] = s.evaluate(ax.node(i), X);
    out.density += std::norm(out.psi[i]) * ax.spacing();
  }
  return out;
}

Slice checked_slice(const GridState& s, double X) {
  auto sl = slice_at(s, X);
  if (!(sl.density >= kConditionalThreshold * s.max_probe_density()) || sl.density <= 0.0) {
    std::ostringstream msg;
    msg << "P(X=" << X << ") = " << sl.density << " is below the conditioning threshold";
    throw Error(ErrorKind::NegligibleProbability, msg.str());
  }
  return sl;
}

template <class F>
double conditional_mean_square(const GridState& s, const Slice& sl, F&& residual) {
  const auto& ax = s.grid().object;
  double acc = 0.0;
  for (std::size_t i = 0; i < ax.n; ++i) {
    const double r = residual(ax.node(i));
    acc += r * r * std::norm(sl.psi[i]) * ax.spacing();
  }
  return acc / sl.density;
}

}  // namespace

double probe_density(const GridState& state, double X) { return slice_at(state, X).density; }

double conditional_error_xt(const GridState& s, const LinearModel& m, double X) {
  require_measurable(m);
  const auto sl = checked_slice(s, X);
  const double readout = m.alpha1() / m.beta1() * X - s.probe_mean0() / (m.beta1() * m.gamma());
  return std::sqrt(conditional_mean_square(s, sl, [&](double x) { return readout - x; }));
}

double conditional_error_x0(const GridState& s, const LinearModel& m, double X) {
  require_measurable(m);
  const auto sl = checked_slice(s, X);
  const double g = m.gamma();
  const double readout = X / m.beta1() - m.beta2() / m.beta1() * s.probe_mean0();
  return std::sqrt(conditional_mean_square(
      s, sl, [&](double x) { return readout - g * (m.beta2() * x - m.alpha2() * X); }));
}

ConditionalState conditional_state(const GridState& s, double X) {
  auto sl = checked_slice(s, X);
  const auto& ax = s.grid().object;
  ConditionalState out;
  out.X = X;
  out.probability_density = sl.density;
  const double c = 1.0 / std::sqrt(sl.density);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < ax.n; ++i) {
    sl.psi[i] *= c;
    const double w = std::norm(sl.psi[i]) * ax.spacing();
    m1 += ax.node(i) * w;
    m2 += ax.node(i) * ax.node(i) * w;
  }
  out.mean = m1;
  // Central second moment, accumulated directly to avoid cancellation.
  double var = 0.0;
  for (std::size_t i = 0; i < ax.n; ++i) {
    const double d = ax.node(i) - m1;
    var += d * d * std::norm(sl.psi[i]) * ax.spacing();
  }
  out.sigma = std::sqrt(var);
  out.amplitude = std::move(sl.psi);
  return out;
}

JointMomentumMoments momentum_moments(const GridState& s) {
  const auto& g = s.grid();
  return joint_momentum_moments(s.amplitudes(), g.object.n, g.probe.n, g.object.spacing(),
                                g.probe.spacing(), s.hbar());
}

MomentumMoments1D momentum_moments(const PacketSpec& packet, const Axis& axis) {
  std::vector<std::complex<double>> samples(axis.n);
  for (std::size_t i = 0; i < axis.n; ++i) samples[i] = packet.amplitude(axis.node(i));
  return momentum_moments(samples, axis.spacing(), packet.hbar());
}

OracleValues oracle_measurement(const GridState& initial, const GridState& evolved,
                                const LinearModel& m) {
  require_measurable(m);
  const auto& grid = evolved.grid();
  const std::size_t no = grid.object.n, np = grid.probe.n;
  const double dA = grid.cell_area(), dX = grid.probe.spacing();
  const double g = m.gamma();
  const double a1 = m.alpha1(), a2 = m.alpha2(), b1 = m.beta1(), b2 = m.beta2();
  const double mean_X0 = initial.probe_mean0();

  OracleValues o;
  o.probe_mean0 = mean_X0;
  o.sigma_x0 = std::sqrt(initial.object_var0());

  double s_xt = 0.0, s_x0 = 0.0, s_oz0 = 0.0, s_ozt = 0.0;
  for (std::size_t i = 0; i < no; ++i) {
    const double x = grid.object.node(i);
    for (std::size_t j = 0; j < np; ++j) {
      const double X = grid.probe.node(j);
      const double w = std::norm(evolved.at(i, j)) * dA;
      const double pre_image_x0 = g * (b2 * x - a2 * X);
      const double r_xt = a1 / b1 * X - mean_X0 / (b1 * g) - x;
      const double r_x0 = X / b1 - b2 / b1 * mean_X0 - pre_image_x0;
      const double r_oz0 = X - pre_image_x0;
      const double r_ozt = X - x;
      s_xt += r_xt * r_xt * w;
      s_x0 += r_x0 * r_x0 * w;
      s_oz0 += r_oz0 * r_oz0 * w;
      s_ozt += r_ozt * r_ozt * w;
    }
  }
  o.eps_xt = std::sqrt(s_xt);
  o.eps_x0 = std::sqrt(s_x0);
  o.eps_ozawa_x0 = std::sqrt(s_oz0);
  o.eps_ozawa_xt = std::sqrt(s_ozt);

  // Readout (x0)_exp = X/b1 - (b2/b1)<X0> distributed as P(X).
  const auto& P = evolved.probe_marginal();
  double r1 = 0.0;
  for (std::size_t j = 0; j < np; ++j) r1 += (grid.probe.node(j) / b1 - b2 / b1 * mean_X0) * P[j] * dX;
  double r2 = 0.0;
  for (std::size_t j = 0; j < np; ++j) {
    const double d = grid.probe.node(j) / b1 - b2 / b1 * mean_X0 - r1;
    r2 += d * d * P[j] * dX;
  }
  o.sigma_x0exp = std::sqrt(r2);

  // Averages of the conditional errors over the readout distribution.
  const double cutoff = kConditionalThreshold * evolved.max_probe_density();
  for (std::size_t j = 0; j < np; ++j) {
    if (P[j] < cutoff || P[j] <= 0.0) continue;
    const double X = grid.probe.node(j);
    const double ext = conditional_error_xt(evolved, m, X);
    const double ex0 = conditional_error_x0(evolved, m, X);
    o.eps_xt_sq_averaged += ext * ext * P[j] * dX;
    o.eps_x0_sq_averaged += ex0 * ex0 * P[j] * dX;
  }

  const auto mm = momentum_map(m);
  const auto pm = momentum_moments(initial);
  const double c_obj = mm.a1 - 1.0, c_probe = mm.a2;
  o.dp_dis = std::sqrt(std::max(0.0, c_obj * c_obj * pm.second_p + c_probe * c_probe * pm.second_P +
                                         2.0 * c_obj * c_probe * pm.cross));

  const auto pt = momentum_moments(evolved);
  const double predicted =
      mm.a1 * mm.a1 * pm.second_p + mm.a2 * mm.a2 * pm.second_P + 2.0 * mm.a1 * mm.a2 * pm.cross;
  o.momentum_map_residual =
      predicted > 0.0 ? std::abs(pt.second_p - predicted) / predicted : std::abs(pt.second_p);
  return o;
}

namespace {

double rel_gap(double oracle, double analytic) {
  const double d = std::abs(oracle - analytic);
  return std::abs(analytic) > 1e-12 ? d / std::abs(analytic) : d;
}

}  // namespace

double OracleComparison::max_rel_gap() const noexcept {
  return std::max({rel_eps_x0, rel_eps_xt, rel_dp_dis, rel_sigma_x0exp, residual_avg_xt,
                   residual_avg_x0, residual_decomp});
}

OracleComparison compare_with_analytics(const LinearModel& m, const PacketSpec& object,
                                        const PacketSpec& probe, const GridSpec& grid) {
  OracleComparison c;
  c.analytic = full_report(m, object.moments(), probe.moments());
  const auto init = prepare(object, probe, grid);
  const auto evolved = evolve(init, m);
  c.oracle = oracle_measurement(init, evolved, m);

  const auto& a = c.analytic;
  const auto& o = c.oracle;
  c.rel_eps_x0 = rel_gap(o.eps_x0, a.eps_x0);
  c.rel_eps_xt = rel_gap(o.eps_xt, a.eps_xt);
  c.rel_dp_dis = rel_gap(o.dp_dis, a.dp_dis);
  c.rel_sigma_x0exp = rel_gap(o.sigma_x0exp, a.sigma_x0exp);
  c.residual_avg_xt = rel_gap(o.eps_xt_sq_averaged, a.eps_xt * a.eps_xt);
  c.residual_avg_x0 = rel_gap(o.eps_x0_sq_averaged, a.eps_x0 * a.eps_x0);
  const double s2 = o.sigma_x0exp * o.sigma_x0exp;
  c.residual_decomp = rel_gap(o.sigma_x0 * o.sigma_x0 + o.eps_x0 * o.eps_x0, s2);
  return c;
}

double born_rule_l1(const GridState& s, const LinearModel& m, const PacketSpec& object) {
  require_measurable(m);
  const auto& ax = s.grid().probe;
  const auto& P = s.probe_marginal();
  const double b1 = m.beta1(), b2 = m.beta2();
  double l1 = 0.0;
  for (std::size_t j = 0; j < ax.n; ++j) {
    const double readout = ax.node(j) / b1 - b2 / b1 * s.probe_mean0();
    const double pushed = std::abs(b1) * P[j];
    l1 += std::abs(pushed - object.density(readout)) * ax.spacing() / std::abs(b1);
  }
  return l1;
}

}  // namespace linmeas
