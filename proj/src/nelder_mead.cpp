#include "activecanvas/nelder_mead.hpp"

#include <algorithm>

namespace activecanvas::refine {

Point2 Box2::project(const Point2& p) const noexcept {
  return {std::clamp(p[0], lo[0], hi[0]), std::clamp(p[1], lo[1], hi[1])};
}

namespace {

struct Vertex {
  Point2 p;
  double v;
};

Point2 along(const Point2& from, const Point2& to, double t) {
  return {from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])};
}

// Offsets the start along one axis; flips direction when the box wall is hit.
Point2 initial_vertex(const Point2& start, const Box2& box, int axis, double edge) {
  Point2 p = start;
  p[axis] = start[axis] + edge;
  p = box.project(p);
  if (p[axis] == start[axis]) {
    p[axis] = start[axis] - edge;
    p = box.project(p);
  }
  return p;
}

}  // namespace

SimplexResult maximize_simplex_2d(const std::function<double(const Point2&)>& f,
                                  const Point2& start, double start_value, const Box2& box,
                                  double edge, int max_evals) {
  SimplexResult out{start, start_value, 0};
  auto eval = [&](const Point2& p) {
    const double v = f(p);
    ++out.evaluations;
    if (v > out.best_value) {
      out.best = p;
      out.best_value = v;
    }
    return v;
  };
  auto budget = [&] { return out.evaluations < max_evals; };

  std::array<Vertex, 3> s{};
  s[0] = {start, start_value};
  for (int axis = 0; axis < 2; ++axis) {
    if (!budget()) return out;
    const Point2 p = initial_vertex(start, box, axis, edge);
    s[axis + 1] = {p, eval(p)};
  }

  while (budget()) {
    // Best first. Stable so ties keep their previous order.
    std::stable_sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.v > b.v; });
    const Point2 centroid{(s[0].p[0] + s[1].p[0]) / 2.0, (s[0].p[1] + s[1].p[1]) / 2.0};
    const Vertex& worst = s[2];

    const Point2 xr = box.project(along(centroid, worst.p, -1.0));
    const double fr = eval(xr);

    if (fr > s[0].v) {
      if (!budget()) {
        s[2] = {xr, fr};
        break;
      }
      const Point2 xe = box.project(along(centroid, worst.p, -2.0));
      const double fe = eval(xe);
      s[2] = fe > fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr > s[1].v) {
      s[2] = {xr, fr};
      continue;
    }
    if (!budget()) break;

    const bool outside = fr > worst.v;
    const Point2 xc = outside ? box.project(along(centroid, xr, 0.5))
                              : box.project(along(centroid, worst.p, 0.5));
    const double fc = eval(xc);
    if (fc > std::max(outside ? fr : worst.v, worst.v)) {
      s[2] = {xc, fc};
      continue;
    }

    // Shrink towards the best vertex.
    for (int i = 1; i < 3 && budget(); ++i) {
      const Point2 p = box.project(along(s[0].p, s[i].p, 0.5));
      s[i] = {p, eval(p)};
    }
  }
  return out;
}

}  // namespace activecanvas::refine
