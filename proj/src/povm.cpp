#include "linmeas/povm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "linmeas/error.hpp"

namespace linmeas {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<PovmInterval> make_partition(std::span<const double> edges, bool open_ends) {
  if (edges.size() < (open_ends ? 1u : 2u)) {
    throw Error(ErrorKind::InvalidInput, "partition needs more edges");
  }
  std::vector<PovmInterval> out;
  if (open_ends) out.push_back({-kInf, edges.front()});
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) out.push_back({edges[k], edges[k + 1]});
  if (open_ends) out.push_back({edges.back(), kInf});
  return out;
}

std::vector<PovmInterval> uniform_partition(double lo, double hi, std::size_t n_bins, bool open_ends) {
  const std::size_t n_edges = open_ends ? n_bins - 1 : n_bins + 1;
  if (n_bins < (open_ends ? 2u : 1u) || !(lo < hi)) {
    throw Error(ErrorKind::InvalidInput, "uniform partition needs lo < hi and enough bins");
  }
  std::vector<double> edges(n_edges);
  for (std::size_t k = 0; k < n_edges; ++k) {
    edges[k] = n_edges == 1 ? 0.5 * (lo + hi)
                            : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_edges - 1);
  }
  return make_partition(edges, open_ends);
}

void validate_partition(std::span<const PovmInterval> bins, const Axis& axis) {
  if (bins.empty()) throw Error(ErrorKind::PartitionGap, "empty partition");
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (!(bins[k].lo < bins[k].hi)) {
      throw Error(ErrorKind::PartitionGap, "bin " + std::to_string(k) + " is empty or reversed");
    }
    if (k > 0 && bins[k].lo != bins[k - 1].hi) {
      std::ostringstream msg;
      msg << "bins " << k - 1 << " and " << k << " do not abut (" << bins[k - 1].hi << " vs "
          << bins[k].lo << ")";
      throw Error(ErrorKind::PartitionGap, msg.str());
    }
  }
  if (bins.front().lo > axis.lo || bins.back().hi < axis.hi) {
    throw Error(ErrorKind::PartitionGap, "partition does not cover the object axis");
  }
}

std::vector<PovmBin> povm(const LinearModel& m, const PacketSpec& probe,
                          std::span<const PovmInterval> bins, const Axis& axis) {
  require_measurable(m);
  validate_partition(bins, axis);
  const double ratio = m.beta2() / m.beta1();
  const double mean_X0 = probe.mean_x();

  // Prob(x + ratio (X0 - <X0>) < c) for the probe distribution.
  auto below = [&](double x, double c) {
    if (c == kInf) return 1.0;
    if (c == -kInf) return 0.0;
    if (ratio == 0.0) return x < c ? 1.0 : 0.0;
    const double t = mean_X0 + (c - x) / ratio;
    return ratio > 0.0 ? probe.cdf(t) : 1.0 - probe.cdf(t);
  };

  std::vector<PovmBin> out;
  out.reserve(bins.size());
  for (const auto& b : bins) {
    PovmBin bin{b, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(axis.n),
                                          static_cast<Eigen::Index>(axis.n))};
    for (std::size_t i = 0; i < axis.n; ++i) {
      const double x = axis.node(i);
      const auto ii = static_cast<Eigen::Index>(i);
      bin.op(ii, ii) = std::clamp(below(x, b.hi) - below(x, b.lo), 0.0, 1.0);
    }
    out.push_back(std::move(bin));
  }
  return out;
}

PovmCheck check_povm(const std::vector<PovmBin>& bins, const LinearModel& m, const PacketSpec& object,
                     const PacketSpec& probe, const Axis& axis, const GridSpec& oracle_grid) {
  require_measurable(m);
  if (bins.empty()) throw Error(ErrorKind::PartitionGap, "empty partition");
  const auto n = static_cast<Eigen::Index>(axis.n);
  PovmCheck c;
  c.min_eigenvalue = kInf;

  Eigen::VectorXcd phi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phi(i) = object.amplitude(axis.node(static_cast<std::size_t>(i))) * std::sqrt(axis.spacing());
  }

  const auto evolved = evolve(prepare(object, probe, oracle_grid), m);
  const double b1 = m.beta1(), b2 = m.beta2();
  const double mean_X0 = probe.mean_x();
  const double X_lo = oracle_grid.probe.lo, X_hi = oracle_grid.probe.hi;
  auto pointer_to_X = [&](double v) {
    if (std::isinf(v)) return (v > 0) == (b1 > 0) ? X_hi : X_lo;
    return std::clamp(b1 * v + b2 * mean_X0, X_lo, X_hi);
  };
  auto density = [&](double X) { return probe_density(evolved, X); };

  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& bin : bins) {
    sum += bin.op;
    c.hermiticity_residual = std::max(c.hermiticity_residual, (bin.op - bin.op.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(bin.op, Eigen::EigenvaluesOnly);
    PovmBinCheck bc;
    bc.interval = bin.interval;
    bc.min_eigenvalue = es.eigenvalues().minCoeff();
    bc.povm_probability = std::real(phi.dot(bin.op * phi));
    double a = pointer_to_X(bin.interval.lo), b = pointer_to_X(bin.interval.hi);
    if (a > b) std::swap(a, b);
    bc.marginal_probability =
        a < b ? boost::math::quadrature::gauss_kronrod<double, 31>::integrate(density, a, b, 20, 1e-13)
              : 0.0;
    c.min_eigenvalue = std::min(c.min_eigenvalue, bc.min_eigenvalue);
    c.max_probability_gap =
        std::max(c.max_probability_gap, std::abs(bc.povm_probability - bc.marginal_probability));
    c.total_probability += bc.povm_probability;
    c.bins.push_back(bc);
  }
  sum -= Eigen::MatrixXcd::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sum, Eigen::EigenvaluesOnly);
  c.completeness_residual = es.eigenvalues().cwiseAbs().maxCoeff();
  return c;
}

}  // namespace linmeas
