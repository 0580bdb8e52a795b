#pragma once

#include <array>
#include <functional>

namespace activecanvas::refine {

using Point2 = std::array<double, 2>;

/// Axis-aligned feasible region; every candidate is projected into it.
struct Box2 {
  Point2 lo{0.0, 0.0};
  Point2 hi{1.0, 1.0};

  Point2 project(const Point2& p) const noexcept;
};

struct SimplexResult {
  Point2 best;
  double best_value = 0.0;
  int evaluations = 0;
};

/// Bounded 2-D Nelder-Mead that *maximizes* `f`. The start value is supplied
/// by the caller and not re-evaluated; at most `max_evals` further calls are
/// made. `best` only changes on strict improvement, so best_value >= start_value.
SimplexResult maximize_simplex_2d(const std::function<double(const Point2&)>& f,
                                  const Point2& start, double start_value, const Box2& box,
                                  double edge, int max_evals);

}  // namespace activecanvas::refine
