#include "linmeas/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "linmeas/error.hpp"

namespace linmeas {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

std::vector<std::complex<double>> forward_dft(std::span<const std::complex<double>> in,
                                              std::size_t n0, std::size_t n1) {
  std::vector<std::complex<double>> src(in.begin(), in.end());
  std::vector<std::complex<double>> out(in.size());
  auto* s = reinterpret_cast<fftw_complex*>(src.data());
  auto* o = reinterpret_cast<fftw_complex*>(out.data());
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(n1 == 1 ? fftw_plan_dft_1d(static_cast<int>(n0), s, o, FFTW_FORWARD, FFTW_ESTIMATE)
                       : fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1), s, o,
                                          FFTW_FORWARD, FFTW_ESTIMATE));
  }
  if (!plan) throw Error(ErrorKind::InvalidInput, "FFTW failed to create a plan");
  fftw_execute(plan.get());
  return out;
}

bool near_edge(std::size_t k, std::size_t n) {
  const auto half = static_cast<long>(n / 2);
  long kk = static_cast<long>(k);
  if (kk >= half) kk -= static_cast<long>(n);
  return std::abs(kk) >= half - 1;
}

}  // namespace

double dft_momentum(std::size_t k, std::size_t n, double dx, double hbar) noexcept {
  long kk = static_cast<long>(k);
  if (k >= n / 2) kk -= static_cast<long>(n);
  return 2.0 * std::numbers::pi * hbar * static_cast<double>(kk) / (static_cast<double>(n) * dx);
}

MomentumMoments1D momentum_moments(std::span<const std::complex<double>> samples, double dx,
                                   double hbar, double alias_tol) {
  const std::size_t n = samples.size();
  if (n < 4) throw Error(ErrorKind::InvalidInput, "need at least 4 samples for a DFT");
  const auto spec = forward_dft(samples, n, 1);

  const double dp = 2.0 * std::numbers::pi * hbar / (static_cast<double>(n) * dx);
  const double scale = dx * dx / (2.0 * std::numbers::pi * hbar);  // |dx/sqrt(2 pi hbar)|^2

  MomentumMoments1D m;
  double peak = 0.0, edge = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double rho = std::norm(spec[k]) * scale;
    const double p = dft_momentum(k, n, dx, hbar);
    m.norm += rho * dp;
    m.mean += p * rho * dp;
    m.second += p * p * rho * dp;
    peak = std::max(peak, rho);
    if (near_edge(k, n)) edge = std::max(edge, rho);
  }
  m.mean /= m.norm;
  m.second /= m.norm;
  m.boundary_ratio = peak > 0.0 ? edge / peak : 0.0;
  if (m.boundary_ratio > alias_tol) {
    throw Error(ErrorKind::AliasingDetected,
                "momentum density at the DFT edge is " + std::to_string(m.boundary_ratio) +
                    " of peak; refine the grid spacing");
  }
  return m;
}

JointMomentumMoments joint_momentum_moments(std::span<const std::complex<double>> samples,
                                            std::size_t n_obj, std::size_t n_probe, double dx,
                                            double dX, double hbar, double alias_tol) {
  if (samples.size() != n_obj * n_probe) {
    throw Error(ErrorKind::InvalidInput, "sample count does not match grid shape");
  }
  const auto spec = forward_dft(samples, n_obj, n_probe);

  const double dp = 2.0 * std::numbers::pi * hbar / (static_cast<double>(n_obj) * dx);
  const double dP = 2.0 * std::numbers::pi * hbar / (static_cast<double>(n_probe) * dX);
  const double scale = (dx * dx / (2.0 * std::numbers::pi * hbar)) * (dX * dX / (2.0 * std::numbers::pi * hbar));

  JointMomentumMoments m;
  double peak = 0.0, edge = 0.0;
  for (std::size_t k = 0; k < n_obj; ++k) {
    const double p = dft_momentum(k, n_obj, dx, hbar);
    const bool edge_k = near_edge(k, n_obj);
    for (std::size_t l = 0; l < n_probe; ++l) {
      const double P = dft_momentum(l, n_probe, dX, hbar);
      const double w = std::norm(spec[k * n_probe + l]) * scale * dp * dP;
      m.norm += w;
      m.mean_p += p * w;
      m.mean_P += P * w;
      m.second_p += p * p * w;
      m.second_P += P * P * w;
      m.cross += p * P * w;
      const double rho = w / (dp * dP);
      peak = std::max(peak, rho);
      if (edge_k || near_edge(l, n_probe)) edge = std::max(edge, rho);
    }
  }
  m.mean_p /= m.norm;
  m.mean_P /= m.norm;
  m.second_p /= m.norm;
  m.second_P /= m.norm;
  m.cross /= m.norm;
  m.boundary_ratio = peak > 0.0 ? edge / peak : 0.0;
  if (m.boundary_ratio > alias_tol) {
    throw Error(ErrorKind::AliasingDetected,
                "joint momentum density at the DFT edge is " + std::to_string(m.boundary_ratio) +
                    " of peak; refine the grid spacing");
  }
  return m;
}

}  // namespace linmeas
