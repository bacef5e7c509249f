#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "linmeas/grid.hpp"
#include "linmeas/model.hpp"
#include "linmeas/packet.hpp"

namespace linmeas {

/// Default object axis for POVM matrices (n^2 complex entries per bin).
inline const Axis kPovmDefaultAxis{128, -12.0, 12.0};

/// Half-open range [lo, hi) of the pointer value M = X_t/b1 - (b2/b1)<X0>.
/// Either end may be infinite.
struct PovmInterval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const PovmInterval&, const PovmInterval&) = default;
};

/// Bins between consecutive edges; with open_ends, two more bins run from
/// -inf to the first edge and from the last edge to +inf.
std::vector<PovmInterval> make_partition(std::span<const double> edges, bool open_ends = true);
/// n_bins bins total with equally spaced inner edges spanning [lo, hi].
std::vector<PovmInterval> uniform_partition(double lo, double hi, std::size_t n_bins,
                                            bool open_ends = true);
/// Throws Error{PartitionGap} unless the intervals are nonempty, ordered and
/// abut exactly, and (when finite at either end) cover `axis`.
void validate_partition(std::span<const PovmInterval> bins, const Axis& axis);

struct PovmBin {
  PovmInterval interval;
  Eigen::MatrixXcd op;  // on the object nodes of the axis
};

/// Effective object-space operators of the pointer readout. Because the
/// interaction is a point transform, each Pi(D) is the multiplication
/// operator w_D(x) = Prob_xi(x + (b2/b1)(X0 - <X0>) in D).
/// Throws Error{Unmeasurable}, Error{PartitionGap}.
std::vector<PovmBin> povm(const LinearModel& model, const PacketSpec& probe,
                          std::span<const PovmInterval> bins, const Axis& object_axis = kPovmDefaultAxis);

struct PovmBinCheck {
  PovmInterval interval;
  double min_eigenvalue = 0.0;
  double povm_probability = 0.0;      // <phi0| Pi(D) |phi0>
  double marginal_probability = 0.0;  // \int P(X) dX over the X preimage of D
};

struct PovmCheck {
  double completeness_residual = 0.0;  // || sum Pi - I ||, operator norm
  double min_eigenvalue = 0.0;
  double hermiticity_residual = 0.0;   // max |Pi - Pi^dagger|
  double max_probability_gap = 0.0;
  double total_probability = 0.0;
  std::vector<PovmBinCheck> bins;
};

/// Completeness, positivity and Hermiticity of `bins`, and each bin's
/// probability against the grid oracle's P(X) on `oracle_grid`
/// (adaptive Gauss-Kronrod over X).
PovmCheck check_povm(const std::vector<PovmBin>& bins, const LinearModel& model,
                     const PacketSpec& object, const PacketSpec& probe, const Axis& object_axis,
                     const GridSpec& oracle_grid);

}  // namespace linmeas
