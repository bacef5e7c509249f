#pragma once

// Test-side reference computations. Nothing here calls into the library's
// analytics or grid code; models enter only as four raw coefficients.

#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

namespace oracle {

struct Coeffs {
  double a1, a2, b1, b2;
};

struct Gauss {
  double mean_x, mean_p, sigma_x;
  double hbar = 1.0;
  double sigma_p() const { return hbar / (2.0 * sigma_x); }
};

/// Momentum coefficients as the inverse transpose of the position matrix,
/// computed with a generic matrix inverse.
inline Coeffs momentum_coeffs(const Coeffs& c) {
  Eigen::Matrix2d A;
  A << c.a1, c.a2, c.b1, c.b2;
  const Eigen::Matrix2d M = A.inverse().transpose();
  return {M(0, 0), M(0, 1), M(1, 0), M(1, 1)};
}

/// Composite Simpson rule on [lo, hi] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 2000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double gauss_density(double x, double mean, double sigma) {
  const double u = (x - mean) / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// <f(x0, X0)> over the product of two Gaussian position densities, by
/// nested Simpson quadrature over +-12 sigma.
inline double product_expectation(const std::function<double(double, double)>& f, const Gauss& obj,
                                  const Gauss& probe, int n = 600) {
  const double lo1 = obj.mean_x - 12 * obj.sigma_x, hi1 = obj.mean_x + 12 * obj.sigma_x;
  const double lo2 = probe.mean_x - 12 * probe.sigma_x, hi2 = probe.mean_x + 12 * probe.sigma_x;
  return simpson(
      [&](double x) {
        return gauss_density(x, obj.mean_x, obj.sigma_x) *
               simpson([&](double X) { return gauss_density(X, probe.mean_x, probe.sigma_x) * f(x, X); }, lo2, hi2, n);
      },
      lo1, hi1, n);
}

/// Same for momenta (Gaussian momentum densities of minimal packets).
inline double product_expectation_p(const std::function<double(double, double)>& f, const Gauss& obj,
                                    const Gauss& probe, int n = 600) {
  return product_expectation(f, Gauss{obj.mean_p, 0.0, obj.sigma_p(), obj.hbar},
                             Gauss{probe.mean_p, 0.0, probe.sigma_p(), probe.hbar}, n);
}

/// Conditioning of the jointly Gaussian (x_t, X_t) on X_t = X.
struct Conditional {
  double mean;      // E[x_t | X_t = X]
  double variance;  // Var[x_t | X_t]
};

inline Conditional condition_xt_on_Xt(const Coeffs& c, const Gauss& obj, const Gauss& probe, double X) {
  Eigen::Matrix2d A;
  A << c.a1, c.a2, c.b1, c.b2;
  Eigen::Matrix2d S0 = Eigen::Matrix2d::Zero();
  S0(0, 0) = obj.sigma_x * obj.sigma_x;
  S0(1, 1) = probe.sigma_x * probe.sigma_x;
  const Eigen::Vector2d mu = A * Eigen::Vector2d(obj.mean_x, probe.mean_x);
  const Eigen::Matrix2d S = A * S0 * A.transpose();
  return {mu(0) + S(0, 1) / S(1, 1) * (X - mu(1)), S(0, 0) - S(0, 1) * S(0, 1) / S(1, 1)};
}

/// Conditioning of x0 on X_t = X.
inline Conditional condition_x0_on_Xt(const Coeffs& c, const Gauss& obj, const Gauss& probe, double X) {
  const double vx = obj.sigma_x * obj.sigma_x, vX = probe.sigma_x * probe.sigma_x;
  const double mX = c.b1 * obj.mean_x + c.b2 * probe.mean_x;
  const double vXt = c.b1 * c.b1 * vx + c.b2 * c.b2 * vX;
  const double cov = c.b1 * vx;
  return {obj.mean_x + cov / vXt * (X - mX), vx - cov * cov / vXt};
}

}  // namespace oracle
