#pragma once

#include <array>
#include <optional>
#include <string>

namespace linmeas {

/// ||Gamma| - 1| above this rejects a coefficient set as non-unitary.
inline constexpr double kUnitarityTol = 1e-9;
/// |beta1| below this marks the apparatus as unable to measure x0.
inline constexpr double kMeasurableTol = 1e-12;
/// Tolerance on alpha1+alpha2 = 1 and beta1+beta2 = 1.
inline constexpr double kConservationTol = 1e-9;

struct MomentumMap {
  double a1 = 1.0, a2 = 0.0, b1 = 0.0, b2 = 1.0;
};

struct ModelDiagnostics {
  double gamma = 1.0;
  bool conserves_momentum = false;
  bool measurable = false;
};

/// Linear position map of the object/probe interaction:
///   x_t = alpha1 x0 + alpha2 X0,   X_t = beta1 x0 + beta2 X0.
/// Instances are only obtainable through make_model() or the catalog, so a
/// LinearModel always satisfies |det| = 1 within kUnitarityTol.
class LinearModel {
 public:
  double alpha1() const noexcept { return alpha1_; }
  double alpha2() const noexcept { return alpha2_; }
  double beta1() const noexcept { return beta1_; }
  double beta2() const noexcept { return beta2_; }
  double hbar() const noexcept { return hbar_; }

  double determinant() const noexcept { return alpha1_ * beta2_ - alpha2_ * beta1_; }
  double gamma() const noexcept { return 1.0 / determinant(); }
  bool measurable() const noexcept;
  bool conserves_momentum() const noexcept;
  ModelDiagnostics diagnostics() const noexcept;

  /// Catalog name ("von-neumann", "ozawa", ...) or empty for user models.
  const std::string& name() const noexcept { return name_; }
  /// Integer coefficients when the model came from an exact catalog entry.
  const std::optional<std::array<int, 4>>& exact_coefficients() const noexcept { return exact_; }

  std::array<double, 4> coefficients() const noexcept { return {alpha1_, alpha2_, beta1_, beta2_}; }

  friend bool operator==(const LinearModel& a, const LinearModel& b) noexcept {
    return a.coefficients() == b.coefficients() && a.hbar_ == b.hbar_;
  }

 private:
  friend LinearModel make_model(double, double, double, double, double);
  friend LinearModel with_provenance(LinearModel, std::string, std::optional<std::array<int, 4>>);

  LinearModel(double a1, double a2, double b1, double b2, double hbar)
      : alpha1_(a1), alpha2_(a2), beta1_(b1), beta2_(b2), hbar_(hbar) {}

  double alpha1_, alpha2_, beta1_, beta2_, hbar_;
  std::string name_;
  std::optional<std::array<int, 4>> exact_;
};

/// Validates finiteness, hbar > 0 and |Gamma| = 1.
/// Throws Error{Degenerate} for det = 0 and Error{UnitarityViolation} otherwise.
LinearModel make_model(double alpha1, double alpha2, double beta1, double beta2,
                       double hbar = 1.0);

LinearModel with_provenance(LinearModel model, std::string name,
                            std::optional<std::array<int, 4>> exact = std::nullopt);

// Catalog.
LinearModel identity_model(double hbar = 1.0);
LinearModel von_neumann(double hbar = 1.0);
LinearModel ozawa(double hbar = 1.0);
LinearModel momentum_conserving(double g0, double hbar = 1.0);

/// Resolves a catalog name; g0 is used only by "momentum-conserving".
LinearModel catalog_model(const std::string& name, double g0 = 1.0, double hbar = 1.0);

/// p_t = a1 p0 + a2 P0, P_t = b1 p0 + b2 P0 with a1 = G b2, a2 = -G b1,
/// b1 = -G a2, b2 = G a1 (the inverse transpose of the position map).
MomentumMap momentum_map(const LinearModel& model) noexcept;

/// The position map A^{-1}; also unitary.
LinearModel inverse(const LinearModel& model);

/// Throws Error{Unmeasurable} if beta1 == 0.
void require_measurable(const LinearModel& model);

}  // namespace linmeas
