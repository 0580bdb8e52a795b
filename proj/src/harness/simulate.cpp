#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "activecanvas/error.hpp"
#include "activecanvas/harness.hpp"

namespace activecanvas::harness {

Strategy parse_strategy(const std::string& name) {
  if (name == "class-anchors") return Strategy::kClassAnchors;
  if (name == "bullseye") return Strategy::kBullseye;
  if (name == "axis-gradient") return Strategy::kAxisGradient;
  throw Error(ErrorCode::kInvalidArgument, "unknown strategy '" + name + "'");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kClassAnchors: return "class-anchors";
    case Strategy::kBullseye: return "bullseye";
    case Strategy::kAxisGradient: return "axis-gradient";
  }
  return "unknown";
}

void SimulatedUser::validate() const {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be >= 0");
  if (schedule.empty()) throw Error(ErrorCode::kInvalidArgument, "touch schedule is empty");
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] <= schedule[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "touch schedule must be strictly increasing");
    }
  }
}

Placer::Placer(Strategy strategy, int classes, double sigma, std::uint64_t seed)
    : strategy_(strategy), classes_(std::max(classes, 1)), sigma_(sigma), rng_(seed) {}

std::array<double, 2> Placer::target(int label) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double frac = classes_ > 1 ? static_cast<double>(label) / (classes_ - 1) : 0.0;
  double x = 0.5;
  double y = 0.5;
  switch (strategy_) {
    case Strategy::kClassAnchors: {
      const double angle = 2.0 * std::numbers::pi * label / classes_ - std::numbers::pi / 2.0;
      x = 0.5 + 0.32 * std::cos(angle);
      y = 0.5 + 0.32 * std::sin(angle);
      break;
    }
    case Strategy::kBullseye: {
      const double radius = 0.05 + 0.38 * frac;
      const double angle = 2.0 * std::numbers::pi * unit(rng_);
      x = 0.5 + radius * std::cos(angle);
      y = 0.5 + radius * std::sin(angle);
      break;
    }
    case Strategy::kAxisGradient:
      x = 0.1 + 0.8 * frac;
      y = 0.1 + 0.8 * unit(rng_);
      break;
  }
  x += sigma_ * noise(rng_);
  y += sigma_ * noise(rng_);
  return {clamp_unit(x), clamp_unit(y)};
}

std::vector<std::size_t> touch_order(const std::vector<int>& labels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  std::vector<int> class_order(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) class_order[c] = c;
  std::shuffle(class_order.begin(), class_order.end(), rng);
  for (auto& m : members) std::shuffle(m.begin(), m.end(), rng);

  std::vector<std::size_t> order;
  order.reserve(labels.size());
  for (std::size_t round = 0; order.size() < labels.size(); ++round) {
    for (int c : class_order) {
      if (round < members[c].size()) order.push_back(members[c][round]);
    }
  }
  return order;
}

RunReport simulate(workspace::Workspace& ws, const std::vector<int>& labels,
                   const SimulatedUser& user, const EngineConfig& config) {
  user.validate();
  config.validate();
  if (labels.size() != ws.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "labels do not cover the workspace");
  }
  if (user.schedule.back() > ws.size()) {
    throw Error(ErrorCode::kInvalidArgument, "touch schedule exceeds item count");
  }
  const int classes = *std::max_element(labels.begin(), labels.end()) + 1;

  RunReport report{config, user, {}, 0.0};
  workspace::begin_session(ws, user.seed);
  Placer placer(user.strategy, classes, user.sigma, user.seed ^ 0x5eedULL);
  const auto order = touch_order(labels, user.seed + 1);

  std::size_t next = 0;
  for (std::size_t target : user.schedule) {
    std::vector<workspace::Move> moves;
    for (; next < target; ++next) {
      const auto p = placer.target(labels[order[next]]);
      moves.push_back({ws.manifest()[order[next]].id, p[0], p[1]});
    }
    workspace::apply_layout(ws, moves);

    const auto t0 = std::chrono::steady_clock::now();
    const auto r = workspace::run_refinement(ws, config);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    report.records.push_back({r.touched, r.mi_before, r.mi_after, layout_ari(ws.layout(), labels, user.seed), ms});
  }
  report.final_ari = report.records.back().ari;
  return report;
}

void commit_sorted_layout(workspace::Workspace& ws, const std::vector<int>& labels, Strategy strategy,
                          double sigma, std::uint64_t seed, const std::string& session_id) {
  if (labels.size() != ws.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "labels do not cover the workspace");
  }
  const int classes = labels.empty() ? 1 : *std::max_element(labels.begin(), labels.end()) + 1;
  Placer placer(strategy, classes, sigma, seed);
  std::vector<workspace::Move> moves;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const auto p = placer.target(labels[i]);
    moves.push_back({ws.manifest()[i].id, p[0], p[1]});
  }
  workspace::apply_layout(ws, moves);
  workspace::commit(ws, session_id, "sorted by " + to_string(strategy));
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : report.records) {
    records.push_back({{"touched", r.touched},
                       {"mi_before", r.mi_before},
                       {"mi_after", r.mi_after},
                       {"ari", r.ari},
                       {"engine_ms", r.engine_ms}});
  }
  return {{"config", report.config},
          {"seed", report.user.seed},
          {"user",
           {{"strategy", to_string(report.user.strategy)},
            {"sigma", report.user.sigma},
            {"schedule", report.user.schedule}}},
          {"records", records},
          {"final_ari", report.final_ari}};
}

}  // namespace activecanvas::harness
