#include "linmeas/model.hpp"

#include <cmath>
#include <sstream>

#include "linmeas/error.hpp"

namespace linmeas {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::UnitarityViolation: return "UnitarityViolation";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::Unmeasurable: return "Unmeasurable";
    case ErrorKind::NonUnitaryResult: return "NonUnitaryResult";
    case ErrorKind::NotPointTransform: return "NotPointTransform";
    case ErrorKind::DomainTooSmall: return "DomainTooSmall";
    case ErrorKind::NegligibleProbability: return "NegligibleProbability";
    case ErrorKind::AliasingDetected: return "AliasingDetected";
    case ErrorKind::PartitionGap: return "PartitionGap";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

bool LinearModel::measurable() const noexcept { return std::abs(beta1_) >= kMeasurableTol; }

bool LinearModel::conserves_momentum() const noexcept {
  return std::abs(alpha1_ + alpha2_ - 1.0) <= kConservationTol &&
         std::abs(beta1_ + beta2_ - 1.0) <= kConservationTol;
}

ModelDiagnostics LinearModel::diagnostics() const noexcept {
  return {gamma(), conserves_momentum(), measurable()};
}

LinearModel make_model(double alpha1, double alpha2, double beta1, double beta2, double hbar) {
  for (double v : {alpha1, alpha2, beta1, beta2, hbar}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "model coefficients must be finite");
  }
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidInput, "hbar must be positive");

  const double det = alpha1 * beta2 - alpha2 * beta1;
  if (det == 0.0) throw Error(ErrorKind::Degenerate, "position map has zero determinant");
  const double gamma = 1.0 / det;
  if (std::abs(std::abs(gamma) - 1.0) > kUnitarityTol) {
    std::ostringstream msg;
    msg << "|Gamma| = " << std::abs(gamma) << " (det = " << det << "), expected 1";
    throw Error(ErrorKind::UnitarityViolation, msg.str());
  }
  return LinearModel(alpha1, alpha2, beta1, beta2, hbar);
}

LinearModel with_provenance(LinearModel model, std::string name,
                            std::optional<std::array<int, 4>> exact) {
  model.name_ = std::move(name);
  model.exact_ = exact;
  return model;
}

LinearModel identity_model(double hbar) {
  return with_provenance(make_model(1, 0, 0, 1, hbar), "identity", std::array{1, 0, 0, 1});
}

LinearModel von_neumann(double hbar) {
  return with_provenance(make_model(1, 0, 1, 1, hbar), "von-neumann", std::array{1, 0, 1, 1});
}

LinearModel ozawa(double hbar) {
  return with_provenance(make_model(1, -1, 1, 0, hbar), "ozawa", std::array{1, -1, 1, 0});
}

LinearModel momentum_conserving(double g0, double hbar) {
  if (!std::isfinite(g0)) throw Error(ErrorKind::InvalidInput, "g0 must be finite");
  std::optional<std::array<int, 4>> exact;
  if (g0 == std::round(g0) && std::abs(g0) < 1e6) {
    const int g = static_cast<int>(g0);
    exact = std::array{1 - g, g, -g, 1 + g};
  }
  return with_provenance(make_model(1.0 - g0, g0, -g0, 1.0 + g0, hbar), "momentum-conserving", exact);
}

LinearModel catalog_model(const std::string& name, double g0, double hbar) {
  if (name == "identity") return identity_model(hbar);
  if (name == "von-neumann" || name == "von_neumann") return von_neumann(hbar);
  if (name == "ozawa") return ozawa(hbar);
  if (name == "momentum-conserving" || name == "momentum_conserving") {
    return momentum_conserving(g0, hbar);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown catalog model '" + name + "'");
}

MomentumMap momentum_map(const LinearModel& m) noexcept {
  const double g = m.gamma();
  // + 0.0 turns negative zeros into zeros.
  return {g * m.beta2() + 0.0, -g * m.beta1() + 0.0, -g * m.alpha2() + 0.0, g * m.alpha1() + 0.0};
}

LinearModel inverse(const LinearModel& m) {
  const double g = m.gamma();
  return make_model(g * m.beta2() + 0.0, -g * m.alpha2() + 0.0, -g * m.beta1() + 0.0, g * m.alpha1() + 0.0,
                    m.hbar());
}

void require_measurable(const LinearModel& model) {
  if (!model.measurable()) {
    throw Error(ErrorKind::Unmeasurable,
                "beta1 = 0: the probe readout carries no information about x0");
  }
}

}  // namespace linmeas
