#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace linmeas {

/// Momentum-space density threshold (relative to peak) at the edge of the
/// DFT momentum box above which a sampled state is considered aliased.
inline constexpr double kAliasTol = 1e-10;

/// Moments of the momentum density obtained from
///   phi~(p) = (2 pi hbar)^(-1/2) \int phi(x) exp(-i p x / hbar) dx
/// evaluated by a unitary-normalized DFT on a uniform grid.
struct MomentumMoments1D {
  double mean = 0.0;
  double second = 0.0;
  double norm = 0.0;            // sum |phi~|^2 dp (Parseval: equals sum |phi|^2 dx)
  double boundary_ratio = 0.0;  // edge density / peak density
  double variance() const noexcept { return second - mean * mean; }
};

/// Throws Error{AliasingDetected} if boundary_ratio > alias_tol.
MomentumMoments1D momentum_moments(std::span<const std::complex<double>> samples, double dx,
                                   double hbar, double alias_tol = kAliasTol);

struct JointMomentumMoments {
  double mean_p = 0.0, mean_P = 0.0;
  double second_p = 0.0, second_P = 0.0;
  double cross = 0.0;  // <p P>
  double norm = 0.0;
  double boundary_ratio = 0.0;
};

/// Same convention on a row-major (object index major) 2D array.
JointMomentumMoments joint_momentum_moments(std::span<const std::complex<double>> samples,
                                            std::size_t n_obj, std::size_t n_probe, double dx,
                                            double dX, double hbar,
                                            double alias_tol = kAliasTol);

/// Signed DFT momentum of bin k on an n-point grid with spacing dx.
double dft_momentum(std::size_t k, std::size_t n, double dx, double hbar) noexcept;

}  // namespace linmeas
