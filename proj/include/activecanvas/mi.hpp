#pragma once

// k-nearest-neighbour mutual information (Kraskov-Stoegbauer-Grassberger,
// first variant) between two continuous multi-dimensional sample blocks.
//
//   I(X;Y) = psi(k) + psi(n) - < psi(n_x + 1) + psi(n_y + 1) >
//
// n_x, n_y count marginal neighbours strictly inside the Chebyshev distance
// to the k-th neighbour in the joint space. The max norm is used everywhere.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace activecanvas::mi {

inline constexpr int kDefaultNeighbors = 3;
inline constexpr double kDefaultJitter = 1e-10;

/// Row-major N x d block of real samples; every entry finite.
class SampleBlock {
 public:
  SampleBlock() = default;
  SampleBlock(std::size_t rows, std::size_t cols);
  SampleBlock(std::size_t rows, std::size_t cols, std::vector<double> values);

  static SampleBlock from_column(std::span<const double> column);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const SampleBlock&, const SampleBlock&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct MiEstimate {
  double nats = 0.0;
  int k = kDefaultNeighbors;
  std::size_t n = 0;
};

/// psi(x) for integer x >= 1.
double digamma(long x);

/// Adds i.i.d. uniform noise in [-amplitude, amplitude] to every entry.
SampleBlock jitter(const SampleBlock& block, double amplitude, std::uint64_t seed);

/// Stable 64-bit hash of the block's shape and bit patterns.
std::uint64_t fingerprint(const SampleBlock& block) noexcept;

/// Column-wise z-scoring (population stddev, constant columns become zero)
/// followed by tie-breaking jitter. The noise stream is derived from `seed`
/// and the block's own fingerprint, so it does not depend on argument order.
SampleBlock prepare_block(const SampleBlock& block, double jitter_amplitude,
                          std::uint64_t seed);

/// Dense symmetric matrix of pairwise Chebyshev distances.
class DistanceMatrix {
 public:
  static DistanceMatrix chebyshev(const SampleBlock& block);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// KSG core on precomputed marginal distances. Callers that hold one block
/// fixed across many evaluations reuse its matrix.
double ksg_estimate(const DistanceMatrix& dx, const DistanceMatrix& dy, int k);

/// Full estimator: validation, preparation of both blocks, KSG.
/// Bit-identical under swapping xs and ys.
MiEstimate estimate_mi(const SampleBlock& xs, const SampleBlock& ys, int k,
                       std::uint64_t seed, double jitter_amplitude = kDefaultJitter);

}  // namespace activecanvas::mi
