#include "linmeas/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "linmeas/error.hpp"

namespace linmeas {

MomentSummary MomentSummary::minimal_gaussian(double sigma_x, double mean_x, double mean_p,
                                              double hbar) {
  if (!(sigma_x > 0.0) || !std::isfinite(sigma_x)) {
    throw Error(ErrorKind::InvalidInput, "sigma_x must be positive and finite");
  }
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidInput, "hbar must be positive");
  const double sigma_p = hbar / (2.0 * sigma_x);
  MomentSummary m{mean_x, mean_p, sigma_x * sigma_x, sigma_p * sigma_p};
  m.validate();
  return m;
}

double MomentSummary::sigma_x() const { return std::sqrt(var_x); }
double MomentSummary::sigma_p() const { return std::sqrt(var_p); }

bool MomentSummary::is_physical(double hbar) const noexcept {
  return var_x * var_p >= 0.25 * hbar * hbar * (1.0 - 1e-12);
}

void MomentSummary::validate() const {
  for (double v : {mean_x, mean_p, var_x, var_p}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "moments must be finite");
  }
  if (var_x < 0.0 || var_p < 0.0) throw Error(ErrorKind::InvalidInput, "variances must be >= 0");
}

namespace {

// Per-coordinate first moments and same-coordinate second moments, indexed
// by Coord order (x0, X0, p0, P0).
struct ProductMoments {
  std::array<double, 4> mean;
  std::array<double, 4> second;
};

ProductMoments product_moments(const MomentSummary& obj, const MomentSummary& probe) {
  obj.validate();
  probe.validate();
  return {{obj.mean_x, probe.mean_x, obj.mean_p, probe.mean_p},
          {obj.second_x(), probe.second_x(), obj.second_p(), probe.second_p()}};
}

std::array<double, 4> coeffs(const CanonicalExpr& e) { return {e.cx0, e.cX0, e.cp0, e.cP0}; }

}  // namespace

double expect(const CanonicalExpr& e, const MomentSummary& obj, const MomentSummary& probe) {
  const auto pm = product_moments(obj, probe);
  const auto c = coeffs(e);
  double s = e.cI;
  for (int i = 0; i < 4; ++i) s += c[i] * pm.mean[i];
  return s;
}

double expect_square(const CanonicalExpr& e, const MomentSummary& obj, const MomentSummary& probe) {
  if ((e.cx0 != 0.0 && e.cp0 != 0.0) || (e.cX0 != 0.0 && e.cP0 != 0.0)) {
    throw Error(ErrorKind::InvalidInput,
                "expression mixes position and momentum of the same particle");
  }
  const auto pm = product_moments(obj, probe);
  const auto c = coeffs(e);
  double s = e.cI * e.cI;
  for (int i = 0; i < 4; ++i) {
    s += 2.0 * e.cI * c[i] * pm.mean[i];
    s += c[i] * c[i] * pm.second[i];
    for (int j = i + 1; j < 4; ++j) {
      // Distinct coordinates here belong to different particles or are a
      // same-particle x/p pair already excluded above.
      s += 2.0 * c[i] * c[j] * pm.mean[i] * pm.mean[j];
    }
  }
  return s;
}

double eps_x0(const LinearModel& m, const MomentSummary& probe) {
  require_measurable(m);
  probe.validate();
  return std::abs(m.beta2() / m.beta1()) * probe.sigma_x();
}

double eps_xt(const LinearModel& m, const MomentSummary& probe) {
  require_measurable(m);
  probe.validate();
  return probe.sigma_x() / std::abs(m.beta1());
}

double dp_dis(const LinearModel& m, const MomentSummary& obj, const MomentSummary& probe) {
  obj.validate();
  probe.validate();
  const auto mm = momentum_map(m);
  const double c_obj = mm.a1 - 1.0;
  const double c_probe = mm.a2;
  const double sq = c_obj * c_obj * obj.second_p() + c_probe * c_probe * probe.second_p() +
                    2.0 * c_obj * c_probe * obj.mean_p * probe.mean_p;
  return std::sqrt(std::max(0.0, sq));
}

double sigma_x0exp(const LinearModel& m, const MomentSummary& obj, const MomentSummary& probe) {
  const double e = eps_x0(m, probe);
  return std::sqrt(obj.var_x + e * e);
}

OzawaError eps_ozawa_x0(const LinearModel& m, const MomentSummary& obj,
                        const MomentSummary& probe) {
  const CanonicalExpr diff = heisenberg_positions(m).probe - CanonicalExpr::x0();
  return {std::sqrt(std::max(0.0, expect_square(diff, obj, probe))), expect(diff, obj, probe)};
}

double eps_ozawa_xt(const LinearModel& m, const MomentSummary& obj, const MomentSummary& probe) {
  const auto [xt, Xt] = heisenberg_positions(m);
  return std::sqrt(std::max(0.0, expect_square(Xt - xt, obj, probe)));
}

MeasurementReport full_report(const LinearModel& m, const MomentSummary& obj,
                              const MomentSummary& probe) {
  require_measurable(m);
  const double hbar = m.hbar();
  const double half = 0.5 * hbar;
  const double tol = kRelationSlackTol * hbar;

  MeasurementReport r;
  r.hbar = hbar;
  r.eps_x0 = eps_x0(m, probe);
  r.eps_xt = eps_xt(m, probe);
  const auto oz = eps_ozawa_x0(m, obj, probe);
  r.eps_ozawa_x0 = oz.error;
  r.ozawa_bias = oz.bias;
  r.eps_ozawa_xt = eps_ozawa_xt(m, obj, probe);
  r.dp_dis = dp_dis(m, obj, probe);
  r.sigma_x0exp = sigma_x0exp(m, obj, probe);

  r.prod_64 = r.eps_xt * r.dp_dis;
  r.bound_64 = half;
  r.prod_65 = r.eps_x0 * r.dp_dis;
  r.bound_65 = std::abs(m.beta2()) * half;
  r.prod_69 = r.sigma_x0exp * r.dp_dis;
  r.bound_69 = half;
  r.prod_ozawa = r.eps_ozawa_x0 * r.dp_dis;

  r.pass_64 = r.slack_64() >= -tol;
  r.pass_65 = r.slack_65() >= -tol;
  r.pass_69 = r.slack_69() >= -tol;
  r.ozawa_below_bound = r.prod_ozawa < half - tol;
  r.physical_states = obj.is_physical(hbar) && probe.is_physical(hbar);
  return r;
}

}  // namespace linmeas
