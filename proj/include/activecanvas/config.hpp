#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

namespace activecanvas {

/// Every estimator, optimizer and regressor knob in one place.
struct EngineConfig {
  int k = 3;                    // KSG neighbours
  std::size_t top_k = 50;       // columns kept after ranking
  int sweeps = 5;               // refinement rounds over the touched items
  int per_item_evals = 20;      // objective evaluations per item per sweep
  double simplex_edge = 0.05;   // initial 2-D simplex edge
  double delta = 0.15;          // per-item trust radius per refine call
  double C = 10.0;
  double epsilon = 0.01;
  std::optional<double> gamma_override;
  double jitter_amplitude = 1e-10;
  std::uint64_t seed = 0;

  /// Throws Error(kInvalidArgument) on the first violated bound.
  void validate() const;
};

void to_json(nlohmann::json& j, const EngineConfig& c);
/// Missing keys keep their defaults; unknown keys are ignored.
void from_json(const nlohmann::json& j, EngineConfig& c);

EngineConfig load_config(const std::filesystem::path& file);

}  // namespace activecanvas
