#include "activecanvas/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "activecanvas/error.hpp"

namespace activecanvas::features {

FeatureMatrix::FeatureMatrix(std::vector<std::string> names, std::vector<Provenance> provenance,
                             std::vector<std::vector<double>> columns, std::size_t rows)
    : rows_(rows),
      names_(std::move(names)),
      provenance_(std::move(provenance)),
      columns_(std::move(columns)) {
  if (names_.size() != columns_.size() || provenance_.size() != columns_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "names, provenance and columns differ in length");
  }
  if (columns_.empty()) throw Error(ErrorCode::kNoFeatures, "feature matrix needs at least one column");
  std::unordered_set<std::string> seen;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (!seen.insert(names_[c]).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate column name '" + names_[c] + "'");
    }
    if (columns_[c].size() != rows_) {
      throw Error(ErrorCode::kRowCountMismatch, "column '" + names_[c] + "' has " +
                                                    std::to_string(columns_[c].size()) +
                                                    " rows, expected " + std::to_string(rows_));
    }
    for (double v : columns_[c]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFinite, "column '" + names_[c] + "' holds a non-finite value");
      }
    }
  }
}

std::vector<double> FeatureMatrix::row(std::size_t r) const {
  std::vector<double> out(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) out[c] = columns_[c].at(r);
  return out;
}

void FeatureMatrix::append_column(std::string name, Provenance provenance, std::vector<double> values) {
  if (values.size() != rows_) {
    throw Error(ErrorCode::kRowCountMismatch, "appended column has wrong row count");
  }
  if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
    throw Error(ErrorCode::kDuplicateId, "duplicate column name '" + name + "'");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "appended column holds a non-finite value");
  }
  names_.push_back(std::move(name));
  provenance_.push_back(std::move(provenance));
  columns_.push_back(std::move(values));
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> cols) const {
  FeatureMatrix out;
  out.rows_ = rows_;
  for (std::size_t c : cols) {
    out.names_.push_back(names_.at(c));
    out.provenance_.push_back(provenance_[c]);
    out.columns_.push_back(columns_[c]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.rows_ = rows.size();
  out.names_ = names_;
  out.provenance_ = provenance_;
  out.columns_.resize(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    out.columns_[c].reserve(rows.size());
    for (std::size_t r : rows) out.columns_[c].push_back(columns_[c].at(r));
  }
  return out;
}

mi::SampleBlock to_block(const FeatureMatrix& matrix, std::span<const std::size_t> rows) {
  mi::SampleBlock block(rows.size(), matrix.cols());
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    const auto& col = matrix.column(c);
    for (std::size_t r = 0; r < rows.size(); ++r) block(r, c) = col.at(rows[r]);
  }
  return block;
}

ColumnStats column_stats(std::span<const double> values) {
  ColumnStats s;
  if (values.empty()) {
    s.zero_variance = true;
    return s;
  }
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / n);
  s.zero_variance = !(s.stddev > 1e-12 * std::max(1.0, std::abs(s.mean)));
  return s;
}

std::vector<double> standardize_column(std::span<const double> values, const ColumnStats& stats) {
  std::vector<double> out(values.size(), 0.0);
  if (stats.zero_variance) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - stats.mean) / stats.stddev;
  return out;
}

Standardized standardize(const FeatureMatrix& matrix) {
  std::vector<std::vector<double>> cols;
  std::vector<ColumnStats> stats;
  std::vector<Provenance> prov;
  cols.reserve(matrix.cols());
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    stats.push_back(column_stats(matrix.column(c)));
    cols.push_back(standardize_column(matrix.column(c), stats.back()));
    prov.push_back(matrix.provenance(c));
  }
  return {FeatureMatrix(matrix.names(), std::move(prov), std::move(cols), matrix.rows()),
          std::move(stats)};
}

FeatureRanking order_by_score(std::span<const double> raw_mi) {
  FeatureRanking ranking(raw_mi.size());
  for (std::size_t c = 0; c < raw_mi.size(); ++c) ranking[c] = {c, std::max(0.0, raw_mi[c])};
  std::stable_sort(ranking.begin(), ranking.end(), [](const RankedFeature& a, const RankedFeature& b) {
    return a.mi_nats > b.mi_nats;
  });
  return ranking;
}

FeatureRanking rank_features(const FeatureMatrix& matrix, const Layout& layout, int k,
                             std::uint64_t seed, double jitter_amplitude) {
  if (layout.size() != matrix.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "layout and feature matrix disagree on item count");
  }
  const auto touched = layout.touched_indices();
  if (touched.size() < static_cast<std::size_t>(k) + 2) {
    throw Error(ErrorCode::kTooFewTouched, "need >= " + std::to_string(k + 2) + " touched, got " +
                                               std::to_string(touched.size()));
  }

  // The position block is shared by every column; prepare it once.
  const auto dy = mi::DistanceMatrix::chebyshev(
      mi::prepare_block(layout.positions(touched), jitter_amplitude, seed));

  std::vector<double> raw(matrix.cols());
  std::vector<double> values(touched.size());
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    const auto& col = matrix.column(c);
    for (std::size_t r = 0; r < touched.size(); ++r) values[r] = col[touched[r]];
    const auto dx = mi::DistanceMatrix::chebyshev(
        mi::prepare_block(mi::SampleBlock::from_column(values), jitter_amplitude, seed));
    raw[c] = mi::ksg_estimate(dx, dy, k);
  }
  return order_by_score(raw);
}

FeatureMatrix reduce(const FeatureMatrix& matrix, const FeatureRanking& ranking, std::size_t top_k) {
  if (top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  const std::size_t keep = std::min(top_k, ranking.size());
  std::vector<std::size_t> cols;
  cols.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) cols.push_back(ranking[i].column);
  return matrix.select_columns(cols);
}

}  // namespace activecanvas::features
