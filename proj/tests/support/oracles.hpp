#pragma once

// Test-only reference implementations. None of these call engine code
// except where a function says so.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "activecanvas/features.hpp"
#include "activecanvas/layout.hpp"
#include "activecanvas/mi.hpp"

namespace oracle {

// psi(n) = -gamma + sum_{j<n} 1/j, summed in long double.
inline double digamma_harmonic(long n) {
  const long double euler = 0.57721566490153286060651209008240243L;
  long double h = 0.0L;
  for (long j = n - 1; j >= 1; --j) h += 1.0L / static_cast<long double>(j);
  return static_cast<double>(-euler + h);
}

inline double gaussian_mi(double rho) { return -0.5 * std::log(1.0 - rho * rho); }

// Textbook KSG (variant 1, max-norm) by direct double loops on raw rows.
// Uses its own digamma so it shares nothing with the engine.
inline double naive_ksg(const std::vector<std::vector<double>>& x,
                        const std::vector<std::vector<double>>& y, int k) {
  const std::size_t n = x.size();
  auto cheb = [](const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  };
  long double acc = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> joint;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) joint.push_back(std::max(cheb(x[i], x[j]), cheb(y[i], y[j])));
    }
    std::sort(joint.begin(), joint.end());
    const double eps = joint[static_cast<std::size_t>(k) - 1];
    long nx = 0, ny = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (cheb(x[i], x[j]) < eps) ++nx;
      if (cheb(y[i], y[j]) < eps) ++ny;
    }
    acc += digamma_harmonic(nx + 1) + digamma_harmonic(ny + 1);
  }
  return digamma_harmonic(k) + digamma_harmonic(static_cast<long>(n)) -
         static_cast<double>(acc / static_cast<long double>(n));
}

inline std::vector<std::vector<double>> rows_of(const activecanvas::mi::SampleBlock& b) {
  std::vector<std::vector<double>> out(b.rows(), std::vector<double>(b.cols()));
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) out[r][c] = b(r, c);
  }
  return out;
}

struct GaussianPair {
  activecanvas::mi::SampleBlock x;
  activecanvas::mi::SampleBlock y;
};

inline GaussianPair correlated_gaussian(std::size_t n, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = z(rng);
    const double b = z(rng);
    xs[i] = a;
    ys[i] = rho * a + std::sqrt(1.0 - rho * rho) * b;
  }
  return {activecanvas::mi::SampleBlock(n, 1, xs), activecanvas::mi::SampleBlock(n, 1, ys)};
}

template <class F>
activecanvas::mi::SampleBlock map_block(const activecanvas::mi::SampleBlock& b, F f) {
  std::vector<double> v(b.values().begin(), b.values().end());
  for (auto& e : v) e = f(e);
  return activecanvas::mi::SampleBlock(b.rows(), b.cols(), std::move(v));
}

inline activecanvas::Layout make_layout(std::size_t n) {
  std::vector<activecanvas::Placement> items;
  for (std::size_t i = 0; i < n; ++i) items.push_back({"it" + std::to_string(i), 0.5, 0.5, false});
  return activecanvas::Layout(std::move(items));
}

inline activecanvas::features::FeatureMatrix matrix_from_columns(std::vector<std::vector<double>> cols) {
  std::vector<std::string> names;
  std::vector<activecanvas::features::Provenance> prov;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    names.push_back("c" + std::to_string(c));
    prov.push_back(activecanvas::features::Provenance::innate());
  }
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  return {std::move(names), std::move(prov), std::move(cols), rows};
}

// Descending score, ascending index on ties; scores clamped at zero.
inline std::vector<std::size_t> rank_by_score(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double sa = std::max(0.0, scores[a]);
    const double sb = std::max(0.0, scores[b]);
    if (sa != sb) return sa > sb;
    return a < b;
  });
  return idx;
}

// Brute-force ranking: one full estimate_mi call per column on the touched rows.
inline std::vector<double> per_column_mi(const activecanvas::features::FeatureMatrix& m,
                                         const activecanvas::Layout& layout, int k,
                                         std::uint64_t seed) {
  const auto touched = layout.touched_indices();
  const auto pos = layout.positions(touched);
  std::vector<double> out;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::vector<double> v;
    for (auto r : touched) v.push_back(m(r, c));
    out.push_back(activecanvas::mi::estimate_mi(activecanvas::mi::SampleBlock::from_column(v), pos, k, seed).nats);
  }
  return out;
}

// Nearest class centroid in feature space (labels used only to form centroids).
inline std::vector<int> nearest_centroid(const activecanvas::features::FeatureMatrix& m,
                                         const std::vector<int>& labels, int classes) {
  std::vector<std::vector<double>> centroid(classes, std::vector<double>(m.cols(), 0.0));
  std::vector<int> count(classes, 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    ++count[labels[r]];
    for (std::size_t c = 0; c < m.cols(); ++c) centroid[labels[r]][c] += m(r, c);
  }
  for (int k = 0; k < classes; ++k) {
    for (auto& v : centroid[k]) v /= std::max(count[k], 1);
  }
  std::vector<int> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double best = INFINITY;
    for (int k = 0; k < classes; ++k) {
      double d = 0.0;
      for (std::size_t c = 0; c < m.cols(); ++c) d += (m(r, c) - centroid[k][c]) * (m(r, c) - centroid[k][c]);
      if (d < best) {
        best = d;
        out[r] = k;
      }
    }
  }
  return out;
}

// ARI from the pair-counting contingency table.
inline double ari(const std::vector<int>& a, const std::vector<int>& b) {
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<std::vector<double>> t(ka, std::vector<double>(kb, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) t[a[i]][b[i]] += 1.0;
  auto c2 = [](double v) { return v * (v - 1.0) / 2.0; };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  std::vector<double> cols(kb, 0.0);
  for (int i = 0; i < ka; ++i) {
    double row = 0.0;
    for (int j = 0; j < kb; ++j) {
      sum_ij += c2(t[i][j]);
      row += t[i][j];
      cols[j] += t[i][j];
    }
    sum_a += c2(row);
  }
  for (double c : cols) sum_b += c2(c);
  const double expected = sum_a * sum_b / c2(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

// Removes the directory on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ac-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
