#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "linmeas/grid.hpp"
#include "linmeas/model.hpp"
#include "linmeas/packet.hpp"
#include "linmeas/verifier.hpp"

namespace linmeas {

struct ModelSelector {
  std::optional<std::string> catalog;
  double g0 = 1.0;
  std::optional<std::array<double, 4>> coeffs;
};

struct PacketConfig {
  double sigma_x = 1.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  std::optional<std::filesystem::path> file;  // tabulated amplitudes; overrides the Gaussian
};

struct SweepConfig {
  // Explicitly empty lists are kept so the sweep can reject them.
  std::optional<std::vector<double>> g0;
  std::optional<std::array<double, 3>> g0_range;  // from, to, count
  std::optional<std::vector<double>> sigma_x0;
  std::optional<std::vector<double>> sigma_X0;
  std::size_t random = 0;
  std::string family = "mixed";
  bool oracle = false;
  std::size_t oracle_subsample = 8;
};

struct PovmConfig {
  std::size_t bins = 16;
  double lo = -6.0;
  double hi = 6.0;
  std::size_t n_object = 128;
};

struct RunConfig {
  ModelSelector model;
  double hbar = 1.0;
  std::uint64_t seed = 1;
  PacketConfig object{1.0, 0.0, 0.0, std::nullopt};
  PacketConfig probe{0.5, 0.0, 0.0, std::nullopt};
  GridSpec grid = GridSpec::symmetric(512, 12.0);
  SweepConfig sweep;
  PovmConfig povm;
  std::optional<std::filesystem::path> out_dir;
  std::string format = "table";
};

/// Parses a JSON config document. Unknown keys at any level and wrongly
/// typed values throw Error{InvalidConfig}. Relative packet file paths are
/// resolved against `base_dir`.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Model named by the selector (catalog or coefficients, not both).
LinearModel resolve_model(const RunConfig& cfg);
PacketSpec resolve_packet(const PacketConfig& p, double hbar);

/// Sweep plan for the configured model selector, or a random plan when
/// sweep.random > 0.
SweepPlan make_sweep_plan(const RunConfig& cfg);

/// Comma-separated list of doubles. Throws Error{InvalidConfig}.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace linmeas
