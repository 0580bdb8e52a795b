#include "activecanvas/mi.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "activecanvas/error.hpp"

namespace activecanvas::mi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SampleBlock::SampleBlock(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

SampleBlock::SampleBlock(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "sample block expects " + std::to_string(rows_ * cols_) + " values, got " +
                    std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "sample block holds a non-finite value");
  }
}

SampleBlock SampleBlock::from_column(std::span<const double> column) {
  return SampleBlock(column.size(), 1, std::vector<double>(column.begin(), column.end()));
}

double digamma(long x) {
  if (x < 1) throw Error(ErrorCode::kDomain, "digamma is defined here for x >= 1, got " + std::to_string(x));
  return boost::math::digamma(static_cast<double>(x));
}

SampleBlock jitter(const SampleBlock& block, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "jitter amplitude must be >= 0");
  if (amplitude == 0.0) return block;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-amplitude, amplitude);
  SampleBlock out = block;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += noise(rng);
  }
  return out;
}

std::uint64_t fingerprint(const SampleBlock& block) noexcept {
  // FNV-1a over shape and raw bits.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(block.rows());
  mix(block.cols());
  for (double v : block.values()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    mix(bits);
  }
  return h;
}

SampleBlock prepare_block(const SampleBlock& block, double jitter_amplitude, std::uint64_t seed) {
  const std::size_t n = block.rows();
  SampleBlock z(n, block.cols());
  for (std::size_t c = 0; c < block.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += block(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = block(r, c) - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    // Near-constant columns would otherwise blow rounding noise up to unit scale.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) continue;
    for (std::size_t r = 0; r < n; ++r) z(r, c) = (block(r, c) - mean) / sd;
  }
  return jitter(z, jitter_amplitude, splitmix64(seed ^ splitmix64(fingerprint(block))));
}

DistanceMatrix DistanceMatrix::chebyshev(const SampleBlock& block) {
  DistanceMatrix m;
  const std::size_t n = block.rows();
  m.n_ = n;
  m.d_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = block.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = block.row(j);
      double d = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) d = std::max(d, std::abs(a[c] - b[c]));
      m.d_[i * n + j] = d;
      m.d_[j * n + i] = d;
    }
  }
  return m;
}

double ksg_estimate(const DistanceMatrix& dx, const DistanceMatrix& dy, int k) {
  const std::size_t n = dx.size();
  if (dy.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "paired blocks must have equal row counts");
  }
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (n <= static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kSampleTooSmall, "need more than k=" + std::to_string(k) +
                                                " samples, got " + std::to_string(n));
  }

  std::vector<double> joint(n - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) joint[m++] = std::max(dx(i, j), dy(i, j));
    }
    std::nth_element(joint.begin(), joint.begin() + (k - 1), joint.end());
    const double eps = joint[k - 1];

    long nx = 0;
    long ny = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (dx(i, j) < eps) ++nx;
      if (dy(i, j) < eps) ++ny;
    }
    acc += digamma(nx + 1) + digamma(ny + 1);
  }
  return digamma(k) + digamma(static_cast<long>(n)) - acc / static_cast<double>(n);
}

MiEstimate estimate_mi(const SampleBlock& xs, const SampleBlock& ys, int k, std::uint64_t seed,
                       double jitter_amplitude) {
  if (xs.rows() != ys.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "row counts differ: " + std::to_string(xs.rows()) + " vs " + std::to_string(ys.rows()));
  }
  if (xs.cols() == 0 || ys.cols() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "sample blocks need at least one column");
  }
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (xs.rows() <= static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kSampleTooSmall, "need more than k=" + std::to_string(k) +
                                                " samples, got " + std::to_string(xs.rows()));
  }
  const auto dx = DistanceMatrix::chebyshev(prepare_block(xs, jitter_amplitude, seed));
  const auto dy = DistanceMatrix::chebyshev(prepare_block(ys, jitter_amplitude, seed));
  return {ksg_estimate(dx, dy, k), k, xs.rows()};
}

}  // namespace activecanvas::mi
