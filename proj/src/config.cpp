#include "activecanvas/config.hpp"

#include <cmath>
#include <fstream>

#include "activecanvas/error.hpp"

namespace activecanvas {

void EngineConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("invalid engine config: ") + what);
  };
  require(k >= 1, "k >= 1");
  require(top_k >= 1, "top_k >= 1");
  require(sweeps >= 1, "sweeps >= 1");
  require(per_item_evals >= 3, "per_item_evals >= 3");
  require(simplex_edge > 0.0, "simplex_edge > 0");
  require(delta > 0.0 && delta <= 1.0, "delta in (0, 1]");
  require(C > 0.0, "C > 0");
  require(epsilon >= 0.0, "epsilon >= 0");
  require(!gamma_override || (std::isfinite(*gamma_override) && *gamma_override > 0.0), "gamma > 0");
  require(jitter_amplitude >= 0.0, "jitter_amplitude >= 0");
}

void to_json(nlohmann::json& j, const EngineConfig& c) {
  j = nlohmann::json{{"k", c.k},
                     {"top_k", c.top_k},
                     {"sweeps", c.sweeps},
                     {"per_item_evals", c.per_item_evals},
                     {"simplex_edge", c.simplex_edge},
                     {"delta", c.delta},
                     {"C", c.C},
                     {"epsilon", c.epsilon},
                     {"jitter_amplitude", c.jitter_amplitude},
                     {"seed", c.seed}};
  j["gamma_override"] = c.gamma_override ? nlohmann::json(*c.gamma_override) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, EngineConfig& c) {
  c.k = j.value("k", c.k);
  c.top_k = j.value("top_k", c.top_k);
  c.sweeps = j.value("sweeps", c.sweeps);
  c.per_item_evals = j.value("per_item_evals", c.per_item_evals);
  c.simplex_edge = j.value("simplex_edge", c.simplex_edge);
  c.delta = j.value("delta", c.delta);
  c.C = j.value("C", c.C);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.jitter_amplitude = j.value("jitter_amplitude", c.jitter_amplitude);
  c.seed = j.value("seed", c.seed);
  if (auto it = j.find("gamma_override"); it != j.end()) {
    c.gamma_override = it->is_null() ? std::nullopt : std::optional<double>(it->get<double>());
  }
}

EngineConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + file.string());
  EngineConfig cfg;
  try {
    cfg = nlohmann::json::parse(in).get<EngineConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "config " + file.string() + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace activecanvas
