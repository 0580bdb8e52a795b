#include "activecanvas/refiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "activecanvas/error.hpp"
#include "activecanvas/nelder_mead.hpp"

namespace activecanvas::refine {

namespace {

void check_inputs(const features::FeatureMatrix& reduced, const Layout& layout,
                  const EngineConfig& config) {
  if (reduced.cols() == 0) throw Error(ErrorCode::kNoFeatures, "reduced feature set is empty");
  if (reduced.rows() != layout.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "layout and feature matrix disagree on item count");
  }
  const std::size_t touched = layout.touched_count();
  if (touched < static_cast<std::size_t>(config.k) + 2) {
    throw Error(ErrorCode::kTooFewTouched, "need >= " + std::to_string(config.k + 2) +
                                               " touched, got " + std::to_string(touched));
  }
}

// Holds the feature-side distances fixed; only positions vary between calls.
class Objective {
 public:
  Objective(const features::FeatureMatrix& reduced, const std::vector<std::size_t>& touched,
            const EngineConfig& config)
      : config_(config),
        dx_(mi::DistanceMatrix::chebyshev(
            mi::prepare_block(features::to_block(reduced, touched), config.jitter_amplitude,
                              config.seed))) {}

  double operator()(const mi::SampleBlock& positions) const {
    const auto dy = mi::DistanceMatrix::chebyshev(
        mi::prepare_block(positions, config_.jitter_amplitude, config_.seed));
    return mi::ksg_estimate(dx_, dy, config_.k);
  }

 private:
  const EngineConfig& config_;
  mi::DistanceMatrix dx_;
};

// Largest representable bound on the far side of `start` whose distance from
// `start` still evaluates to at most delta.
double offset_within(double start, double delta, double direction) {
  double bound = start + direction * delta;
  while (std::abs(bound - start) > delta) {
    bound = std::nextafter(bound, start);
  }
  return bound;
}

}  // namespace

double objective(const features::FeatureMatrix& reduced, const Layout& layout,
                 const EngineConfig& config) {
  check_inputs(reduced, layout, config);
  const auto touched = layout.touched_indices();
  return Objective(reduced, touched, config)(layout.positions(touched));
}

RefineResult refine_positions(const features::FeatureMatrix& reduced, const Layout& layout,
                              const EngineConfig& config) {
  config.validate();
  check_inputs(reduced, layout, config);

  const auto touched = layout.touched_indices();
  const Objective f(reduced, touched, config);

  mi::SampleBlock current = layout.positions(touched);
  RefineResult result;
  result.mi_before = f(current);
  result.evaluations = 1;
  double current_value = result.mi_before;

  std::vector<Box2> boxes(touched.size());
  for (std::size_t r = 0; r < touched.size(); ++r) {
    for (int a = 0; a < 2; ++a) {
      const double start = current(r, a);
      boxes[r].lo[a] = std::max(0.0, offset_within(start, config.delta, -1.0));
      boxes[r].hi[a] = std::min(1.0, offset_within(start, config.delta, +1.0));
    }
  }

  std::vector<std::size_t> order(touched.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return layout[touched[a]].id < layout[touched[b]].id;
  });

  for (int sweep = 0; sweep < config.sweeps; ++sweep) {
    for (std::size_t r : order) {
      const Point2 start{current(r, 0), current(r, 1)};
      auto eval = [&](const Point2& p) {
        current(r, 0) = p[0];
        current(r, 1) = p[1];
        return f(current);
      };
      const auto step = maximize_simplex_2d(eval, start, current_value, boxes[r],
                                            config.simplex_edge, config.per_item_evals);
      current(r, 0) = step.best[0];
      current(r, 1) = step.best[1];
      current_value = step.best_value;
      result.evaluations += step.evaluations;
    }
  }

  result.refined = layout;
  for (std::size_t r = 0; r < touched.size(); ++r) {
    result.refined.set_position(touched[r], current(r, 0), current(r, 1));
  }
  result.mi_after = current_value;
  return result;
}

}  // namespace activecanvas::refine
