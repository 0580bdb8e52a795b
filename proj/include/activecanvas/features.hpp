#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "activecanvas/layout.hpp"
#include "activecanvas/mi.hpp"

namespace activecanvas::features {

/// Where a column came from: shipped with the dataset, or appended by a commit.
struct Provenance {
  enum class Kind { kInnate, kCommitted };

  Kind kind = Kind::kInnate;
  std::string session_id;
  char axis = '\0';            // 'x' or 'y' for committed columns
  std::size_t commit_index = 0;  // 1-based

  static Provenance innate() { return {}; }
  static Provenance committed(std::string session_id, char axis, std::size_t commit_index) {
    return {Kind::kCommitted, std::move(session_id), axis, commit_index};
  }
  bool is_committed() const noexcept { return kind == Kind::kCommitted; }

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// N items x D named columns, stored column-major.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  /// Validates: equal column lengths, unique names, finite values.
  FeatureMatrix(std::vector<std::string> names, std::vector<Provenance> provenance,
                std::vector<std::vector<double>> columns, std::size_t rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }

  const std::string& name(std::size_t c) const { return names_.at(c); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const Provenance& provenance(std::size_t c) const { return provenance_.at(c); }
  const std::vector<Provenance>& provenance() const noexcept { return provenance_; }
  const std::vector<double>& column(std::size_t c) const { return columns_.at(c); }
  double operator()(std::size_t r, std::size_t c) const { return columns_[c][r]; }

  std::vector<double> row(std::size_t r) const;

  void append_column(std::string name, Provenance provenance, std::vector<double> values);

  FeatureMatrix select_columns(std::span<const std::size_t> cols) const;
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::vector<Provenance> provenance_;
  std::vector<std::vector<double>> columns_;
};

/// Dense |rows| x D sample block of the given rows, columns in matrix order.
mi::SampleBlock to_block(const FeatureMatrix& matrix, std::span<const std::size_t> rows);

struct ColumnStats {
  double mean = 0.0;
  double stddev = 0.0;
  bool zero_variance = false;
};

struct Standardized {
  FeatureMatrix matrix;
  std::vector<ColumnStats> stats;
};

/// Population z-score per column. Zero-variance columns become all zeros.
ColumnStats column_stats(std::span<const double> values);
std::vector<double> standardize_column(std::span<const double> values, const ColumnStats& stats);
Standardized standardize(const FeatureMatrix& matrix);

struct RankedFeature {
  std::size_t column = 0;
  double mi_nats = 0.0;  // clamped at 0

  friend bool operator==(const RankedFeature&, const RankedFeature&) = default;
};

/// Descending by MI, ties by ascending column index. A permutation of all columns.
using FeatureRanking = std::vector<RankedFeature>;

/// Orders an arbitrary per-column score vector the way rank_features does.
FeatureRanking order_by_score(std::span<const double> raw_mi);

/// Scores every column by MI between its touched rows and the touched
/// positions (a scalar vs 2-D estimate). Untouched rows do not participate.
FeatureRanking rank_features(const FeatureMatrix& matrix, const Layout& layout, int k,
                             std::uint64_t seed, double jitter_amplitude = mi::kDefaultJitter);

/// Keeps the min(top_k, D) best-ranked columns, in rank order, all rows.
FeatureMatrix reduce(const FeatureMatrix& matrix, const FeatureRanking& ranking, std::size_t top_k);

}  // namespace activecanvas::features
