#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "activecanvas/error.hpp"
#include "activecanvas/harness.hpp"

namespace activecanvas::harness {

namespace {

// Nearest-rank percentile of an ascending sample.
double percentile(const std::vector<double>& sorted, double q) {
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

std::vector<BenchRow> bench(const workspace::Workspace& ws, const EngineConfig& config,
                            std::size_t repetitions, const std::vector<std::size_t>& touched_counts) {
  if (ws.size() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot bench an empty dataset");
  if (repetitions < 1) throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  config.validate();

  std::vector<BenchRow> rows;
  for (std::size_t touched : touched_counts) {
    if (touched > ws.size()) continue;
    std::vector<double> times;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      workspace::Workspace copy = ws;
      workspace::begin_session(copy, config.seed + rep);
      std::mt19937_64 rng(config.seed * 7919 + rep);
      std::vector<std::size_t> idx(copy.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      std::uniform_real_distribution<double> coord(0.05, 0.95);
      std::vector<workspace::Move> moves;
      for (std::size_t t = 0; t < touched; ++t) {
        const double x = coord(rng);
        const double y = coord(rng);
        moves.push_back({copy.manifest()[idx[t]].id, x, y});
      }
      workspace::apply_layout(copy, moves);

      const auto t0 = std::chrono::steady_clock::now();
      workspace::run_refinement(copy, config);
      times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(times.begin(), times.end());
    rows.push_back({touched, repetitions, percentile(times, 0.50), percentile(times, 0.95), times.back()});
  }
  return rows;
}

nlohmann::json to_json(const std::vector<BenchRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"touched", r.touched},
                   {"repetitions", r.repetitions},
                   {"p50_ms", r.p50_ms},
                   {"p95_ms", r.p95_ms},
                   {"max_ms", r.max_ms}});
  }
  return out;
}

}  // namespace activecanvas::harness
