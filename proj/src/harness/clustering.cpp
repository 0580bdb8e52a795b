#include <algorithm>
#include <limits>
#include <map>
#include <random>

#include "activecanvas/error.hpp"
#include "activecanvas/harness.hpp"

namespace activecanvas::harness {

namespace {

using Point = std::array<double, 2>;

double dist2(const Point& a, const Point& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

KMeansResult lloyd(const std::vector<Point>& pts, int k, std::mt19937_64& rng) {
  const std::size_t n = pts.size();
  std::vector<Point> centers;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  centers.push_back(pts[pick(rng)]);

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], dist2(pts[i], centers.back()));
      total += d2[i];
    }
    if (!(total > 0.0)) {
      centers.push_back(pts[pick(rng)]);
      continue;
    }
    double r = std::uniform_real_distribution<double>(0.0, total)(rng);
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      r -= d2[i];
      if (r <= 0.0) {
        chosen = i;
        break;
      }
    }
    centers.push_back(pts[chosen]);
  }

  KMeansResult res;
  res.assignment.assign(n, -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = dist2(pts[i], centers[0]);
      for (int c = 1; c < k; ++c) {
        const double d = dist2(pts[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (res.assignment[i] != best) {
        res.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Point> sum(static_cast<std::size_t>(k), Point{0.0, 0.0});
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[res.assignment[i]][0] += pts[i][0];
      sum[res.assignment[i]][1] += pts[i][1];
      ++count[res.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] == 0) continue;  // empty cluster keeps its centre
      centers[c] = {sum[c][0] / count[c], sum[c][1] / count[c]};
    }
  }
  for (std::size_t i = 0; i < n; ++i) res.inertia += dist2(pts[i], centers[res.assignment[i]]);
  return res;
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

KMeansResult kmeans(const std::vector<std::array<double, 2>>& points, int k, int restarts,
                    std::uint64_t seed) {
  if (k < 1 || points.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kInvalidArgument, "k-means needs 1 <= k <= number of points");
  }
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    auto res = lloyd(points, k, rng);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "label vectors differ in length");
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, v] : table) index += choose2(v);
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (const auto& [key, v] : rows) sum_a += choose2(v);
  for (const auto& [key, v] : cols) sum_b += choose2(v);
  const double expected = sum_a * sum_b / choose2(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both partitions trivial
  return (index - expected) / (max_index - expected);
}

double layout_ari(const Layout& layout, const std::vector<int>& labels, std::uint64_t seed) {
  std::vector<std::array<double, 2>> pts;
  pts.reserve(layout.size());
  for (const auto& p : layout) pts.push_back({p.x, p.y});
  const int k = labels.empty() ? 1 : *std::max_element(labels.begin(), labels.end()) + 1;
  return adjusted_rand_index(kmeans(pts, k, 20, seed).assignment, labels);
}

}  // namespace activecanvas::harness
