#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "activecanvas/config.hpp"
#include "activecanvas/features.hpp"
#include "activecanvas/layout.hpp"

namespace activecanvas::workspace {

struct ManifestItem {
  std::string id;
  std::string thumb;
  std::optional<std::string> label;  // harness ground truth; the engine never reads it

  friend bool operator==(const ManifestItem&, const ManifestItem&) = default;
};

struct CommitRecord {
  std::string session_id;
  std::string timestamp;  // ISO-8601 UTC
  std::string annotation;
  std::size_t x_column = 0;
  std::size_t y_column = 0;

  friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

struct Move {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

/// Dataset manifest, raw and standardized features, the live layout and the
/// commit log. Raw committed columns hold [0,1] positions; the standardized
/// copy is what the engine consumes.
class Workspace {
 public:
  Workspace(std::string dataset_id, std::vector<ManifestItem> manifest,
            features::FeatureMatrix raw, Layout layout, std::vector<CommitRecord> commits = {},
            std::filesystem::path asset_root = {});

  const std::string& dataset_id() const noexcept { return dataset_id_; }
  const std::vector<ManifestItem>& manifest() const noexcept { return manifest_; }
  const features::FeatureMatrix& raw_features() const noexcept { return raw_; }
  const features::FeatureMatrix& features() const noexcept { return standardized_; }
  const Layout& layout() const noexcept { return layout_; }
  const std::vector<CommitRecord>& commits() const noexcept { return commits_; }
  const std::filesystem::path& asset_root() const noexcept { return asset_root_; }

  std::size_t size() const noexcept { return manifest_.size(); }
  std::size_t dims() const noexcept { return raw_.cols(); }
  std::size_t innate_dims() const noexcept { return raw_.cols() - 2 * commits_.size(); }

  /// Throws Error(kUnknownId).
  std::size_t index_of(const std::string& id) const;

  void set_layout(Layout layout);
  Layout& layout_mut() noexcept { return layout_; }

  /// Appends the committed pair to raw and standardized features and the log.
  void append_commit(CommitRecord record, std::vector<double> xs, std::vector<double> ys);

 private:
  std::string dataset_id_;
  std::vector<ManifestItem> manifest_;
  features::FeatureMatrix raw_;
  features::FeatureMatrix standardized_;
  Layout layout_;
  std::vector<CommitRecord> commits_;
  std::filesystem::path asset_root_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Uniform in [0.05, 0.95]^2, all untouched.
Layout random_layout(const std::vector<ManifestItem>& manifest, std::uint64_t seed);

/// Reads a JSON manifest and a headered CSV whose rows follow manifest order.
/// The dataset id defaults to the manifest's parent directory name.
Workspace load_workspace(const std::filesystem::path& manifest_file,
                         const std::filesystem::path& features_file,
                         std::optional<std::string> dataset_id = std::nullopt,
                         std::uint64_t layout_seed = 0);

/// Fresh session on the same features: new random layout, nothing touched.
void begin_session(Workspace& ws, std::uint64_t layout_seed);

/// Drags: each item moves (clamped) and becomes touched. All ids are checked
/// before anything changes.
void apply_layout(Workspace& ws, std::span<const Move> moves);

struct RankedColumn {
  std::size_t column = 0;
  std::string name;
  double mi_nats = 0.0;
};

struct RefineReport {
  std::size_t touched = 0;
  double mi_before = 0.0;
  double mi_after = 0.0;
  int evaluations = 0;
  std::vector<RankedColumn> ranked_head;  // first few ranked columns
  double rank_ms = 0.0;
  double refine_ms = 0.0;
  double extrapolate_ms = 0.0;
  double total_ms = 0.0;
};

/// rank -> reduce -> refine touched -> train SVR -> predict untouched.
/// On error the workspace is left as it was.
RefineReport run_refinement(Workspace& ws, const EngineConfig& config);

/// Appends the current x and y of every item as two new columns. When
/// `data_dir` is given the workspace is saved there first; on a save failure
/// the in-memory workspace is unchanged.
const CommitRecord& commit(Workspace& ws, const std::string& session_id,
                           const std::string& annotation,
                           const std::optional<std::filesystem::path>& data_dir = std::nullopt);

/// Writes <data_dir>/<dataset_id>/{manifest.json, features.csv, commits.jsonl,
/// layout.csv, checksums.json}.
void save_workspace(const Workspace& ws, const std::filesystem::path& data_dir);

/// Verifies every SHA-256 in checksums.json before parsing.
Workspace reload_workspace(const std::filesystem::path& data_dir, const std::string& dataset_id);

bool is_saved_workspace(const std::filesystem::path& dir);

// File-format helpers, exposed for tools and tests.
std::vector<ManifestItem> read_manifest(const std::filesystem::path& file);
void write_manifest(const std::filesystem::path& file, const std::vector<ManifestItem>& manifest);
features::FeatureMatrix read_features_csv(const std::filesystem::path& file);
void write_features_csv(const std::filesystem::path& file, const features::FeatureMatrix& matrix);
std::string sha256_hex(const std::filesystem::path& file);

}  // namespace activecanvas::workspace
