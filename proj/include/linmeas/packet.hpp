#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "linmeas/analytics.hpp"

namespace linmeas {

namespace detail {
struct TabulatedData;
}

/// A normalized single-particle wavefunction: either a closed-form
/// minimal-uncertainty Gaussian or a uniformly sampled table interpolated by
/// a cubic spline (zero outside the table). Cheap to copy; immutable.
class PacketSpec {
 public:
  enum class Kind { gaussian, tabulated };

  static PacketSpec gaussian(double mean_x, double mean_p, double sigma_x, double hbar = 1.0);

  /// Samples at x_first + k dx. Rescaled so the interpolant has unit norm.
  static PacketSpec tabulated(double x_first, double dx, std::vector<std::complex<double>> samples,
                              double hbar = 1.0);

  /// Whitespace-separated "position re im" rows; '#' starts a comment.
  /// Positions must be uniformly spaced.
  static PacketSpec parse_tabulated(std::istream& in, double hbar = 1.0);
  static PacketSpec load_tabulated(const std::filesystem::path& path, double hbar = 1.0);

  Kind kind() const noexcept { return kind_; }
  double hbar() const noexcept { return hbar_; }

  std::complex<double> amplitude(double x) const;
  double density(double x) const { return std::norm(amplitude(x)); }
  /// \int_{-inf}^{x} |phi|^2.
  double cdf(double x) const;

  /// Exact for Gaussians; quadrature + DFT for tables.
  const MomentSummary& moments() const noexcept { return moments_; }

  /// Interval outside which the amplitude is negligible.
  std::pair<double, double> support(double n_sigma = 10.5) const;

  // Gaussian parameters (sigma_x is also filled for tables, from the moments).
  double mean_x() const noexcept { return moments_.mean_x; }
  double mean_p() const noexcept { return moments_.mean_p; }
  double sigma_x() const noexcept { return sigma_x_; }

  /// Writes the two-column-pair text format at the table's own samples, or
  /// `n` samples over support() for a Gaussian.
  void write_tabulated(std::ostream& out, std::size_t n = 2048) const;

 private:
  PacketSpec() = default;

  Kind kind_ = Kind::gaussian;
  double hbar_ = 1.0;
  double sigma_x_ = 1.0;
  double gauss_norm_ = 0.0;
  MomentSummary moments_;
  std::shared_ptr<const detail::TabulatedData> table_;
};

}  // namespace linmeas
