#include "activecanvas/workspace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <random>
#include <unordered_set>

#include "activecanvas/error.hpp"
#include "activecanvas/extrapolator.hpp"
#include "activecanvas/refiner.hpp"

namespace activecanvas::workspace {

namespace {

constexpr std::size_t kReportHead = 10;

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Workspace::Workspace(std::string dataset_id, std::vector<ManifestItem> manifest,
                     features::FeatureMatrix raw, Layout layout, std::vector<CommitRecord> commits,
                     std::filesystem::path asset_root)
    : dataset_id_(std::move(dataset_id)),
      manifest_(std::move(manifest)),
      raw_(std::move(raw)),
      standardized_(features::standardize(raw_).matrix),
      layout_(std::move(layout)),
      commits_(std::move(commits)),
      asset_root_(std::move(asset_root)) {
  if (raw_.rows() != manifest_.size()) {
    throw Error(ErrorCode::kRowCountMismatch, "feature file has " + std::to_string(raw_.rows()) +
                                                  " rows for " + std::to_string(manifest_.size()) +
                                                  " manifest items");
  }
  if (layout_.size() != manifest_.size()) {
    throw Error(ErrorCode::kRowCountMismatch, "layout size differs from manifest");
  }
  if (2 * commits_.size() > raw_.cols()) {
    throw Error(ErrorCode::kCorruption, "commit log names more columns than exist");
  }
  for (std::size_t i = 0; i < manifest_.size(); ++i) {
    if (!index_.emplace(manifest_[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate item id '" + manifest_[i].id + "'");
    }
    if (layout_[i].id != manifest_[i].id) {
      throw Error(ErrorCode::kCorruption, "layout order differs from manifest at item " + manifest_[i].id);
    }
  }
}

std::size_t Workspace::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kUnknownId, "unknown item id '" + id + "'");
  return it->second;
}

void Workspace::set_layout(Layout layout) {
  if (layout.size() != manifest_.size()) {
    throw Error(ErrorCode::kRowCountMismatch, "layout size differs from manifest");
  }
  layout_ = std::move(layout);
}

void Workspace::append_commit(CommitRecord record, std::vector<double> xs, std::vector<double> ys) {
  const std::size_t index = commits_.size() + 1;
  const std::string stem = "commit" + std::to_string(index) + "_";
  record.x_column = raw_.cols();
  record.y_column = raw_.cols() + 1;

  auto append = [&](std::vector<double> values, char axis) {
    auto prov = features::Provenance::committed(record.session_id, axis, index);
    const auto z = features::standardize_column(values, features::column_stats(values));
    raw_.append_column(stem + axis, prov, std::move(values));
    standardized_.append_column(stem + axis, prov, z);
  };
  append(std::move(xs), 'x');
  append(std::move(ys), 'y');
  commits_.push_back(std::move(record));
}

Layout random_layout(const std::vector<ManifestItem>& manifest, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.05, 0.95);
  std::vector<Placement> items;
  items.reserve(manifest.size());
  for (const auto& m : manifest) {
    const double x = coord(rng);
    const double y = coord(rng);
    items.push_back({m.id, x, y, false});
  }
  return Layout(std::move(items));
}

Workspace load_workspace(const std::filesystem::path& manifest_file,
                         const std::filesystem::path& features_file,
                         std::optional<std::string> dataset_id, std::uint64_t layout_seed) {
  auto manifest = read_manifest(manifest_file);
  auto raw = read_features_csv(features_file);
  if (raw.rows() != manifest.size()) {
    throw Error(ErrorCode::kRowCountMismatch, "feature file has " + std::to_string(raw.rows()) +
                                                  " rows for " + std::to_string(manifest.size()) +
                                                  " manifest items");
  }
  const auto root = std::filesystem::absolute(manifest_file).parent_path();
  std::string id = dataset_id ? *dataset_id : root.filename().string();
  auto layout = random_layout(manifest, layout_seed);
  return Workspace(std::move(id), std::move(manifest), std::move(raw), std::move(layout), {}, root);
}

void begin_session(Workspace& ws, std::uint64_t layout_seed) {
  ws.set_layout(random_layout(ws.manifest(), layout_seed));
}

void apply_layout(Workspace& ws, std::span<const Move> moves) {
  std::vector<std::size_t> idx;
  idx.reserve(moves.size());
  for (const auto& m : moves) {
    if (!std::isfinite(m.x) || !std::isfinite(m.y)) {
      throw Error(ErrorCode::kNonFinite, "move for '" + m.id + "' has a non-finite coordinate");
    }
    idx.push_back(ws.index_of(m.id));
  }
  for (std::size_t i = 0; i < moves.size(); ++i) ws.layout_mut().move(idx[i], moves[i].x, moves[i].y);
}

RefineReport run_refinement(Workspace& ws, const EngineConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RefineReport report;
  const Layout& layout = ws.layout();
  report.touched = layout.touched_count();

  const auto ranking = features::rank_features(ws.features(), layout, config.k, config.seed,
                                               config.jitter_amplitude);
  const auto reduced = features::reduce(ws.features(), ranking, config.top_k);
  for (std::size_t i = 0; i < std::min(kReportHead, ranking.size()); ++i) {
    report.ranked_head.push_back(
        {ranking[i].column, ws.features().name(ranking[i].column), ranking[i].mi_nats});
  }
  report.rank_ms = ms_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  auto refined = refine::refine_positions(reduced, layout, config);
  report.mi_before = refined.mi_before;
  report.mi_after = refined.mi_after;
  report.evaluations = refined.evaluations;
  report.refine_ms = ms_since(t1);

  const auto t2 = std::chrono::steady_clock::now();
  Layout next = std::move(refined.refined);
  const auto model = svr::train(reduced, next, config);
  for (const auto& p : svr::predict_untouched(model, reduced, next)) next.set_position(p.index, p.x, p.y);
  report.extrapolate_ms = ms_since(t2);

  ws.set_layout(std::move(next));
  report.total_ms = ms_since(t0);
  return report;
}

const CommitRecord& commit(Workspace& ws, const std::string& session_id,
                           const std::string& annotation,
                           const std::optional<std::filesystem::path>& data_dir) {
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(ws.size());
  ys.reserve(ws.size());
  for (const auto& p : ws.layout()) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  Workspace next = ws;
  next.append_commit({session_id, utc_now_iso8601(), annotation, 0, 0}, std::move(xs), std::move(ys));
  if (data_dir) save_workspace(next, *data_dir);
  ws = std::move(next);
  return ws.commits().back();
}

}  // namespace activecanvas::workspace
