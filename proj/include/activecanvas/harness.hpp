#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "activecanvas/config.hpp"
#include "activecanvas/features.hpp"
#include "activecanvas/workspace.hpp"

namespace activecanvas::harness {

// ---------------------------------------------------------------- synthetic

struct SyntheticSpec {
  int classes = 5;
  std::size_t items = 250;
  std::size_t dims = 500;
  std::size_t informative = 20;
  double noise = 1.0;       // within-class stddev
  double separation = 4.0;  // adjacent class-mean gap, in units of `noise`
  std::uint64_t seed = 42;
};

struct SyntheticDataset {
  std::vector<workspace::ManifestItem> manifest;
  features::FeatureMatrix features;
  std::vector<int> labels;                        // class per item
  std::vector<std::size_t> informative_columns;   // ascending
  std::vector<std::vector<double>> class_means;   // [class][informative column]
};

/// Class-conditional Gaussians on `informative` randomly chosen columns; each
/// informative column orders the class means by a random permutation of
/// evenly spaced levels. All other columns are pure noise.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

/// manifest.json, features.csv and placeholder SVG tiles under thumbs/.
void write_dataset(const SyntheticDataset& data, const std::filesystem::path& dir);

/// Integer class per item from manifest labels (first-seen order). Throws if any label is missing.
std::vector<int> labels_of(const workspace::Workspace& ws);

// --------------------------------------------------------------- clustering

struct KMeansResult {
  std::vector<int> assignment;
  double inertia = 0.0;
};

/// Lloyd iterations from k-means++ seeds; best of `restarts` by inertia.
KMeansResult kmeans(const std::vector<std::array<double, 2>>& points, int k, int restarts,
                    std::uint64_t seed);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// ARI of k-means (k = class count, 20 restarts) on the layout against labels.
double layout_ari(const Layout& layout, const std::vector<int>& labels, std::uint64_t seed);

// ---------------------------------------------------------- simulated users

enum class Strategy { kClassAnchors, kBullseye, kAxisGradient };

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy s);

struct SimulatedUser {
  Strategy strategy = Strategy::kClassAnchors;
  double sigma = 0.03;
  std::vector<std::size_t> schedule{8, 14, 20};  // cumulative touched counts
  std::uint64_t seed = 1;

  void validate() const;
};

/// Where this user wants an item of class `label` to go (before noise).
/// Bullseye and axis-gradient draw a free coordinate from `rng`.
class Placer {
 public:
  Placer(Strategy strategy, int classes, double sigma, std::uint64_t seed);
  std::array<double, 2> target(int label);

 private:
  Strategy strategy_;
  int classes_;
  double sigma_;
  std::mt19937_64 rng_;
};

/// Touch order of a user who knows the classes: round-robin over a shuffled
/// class order, items shuffled within each class.
std::vector<std::size_t> touch_order(const std::vector<int>& labels, std::uint64_t seed);

struct RefinementRecord {
  std::size_t touched = 0;
  double mi_before = 0.0;
  double mi_after = 0.0;
  double ari = 0.0;
  double engine_ms = 0.0;
};

struct RunReport {
  EngineConfig config;
  SimulatedUser user;
  std::vector<RefinementRecord> records;
  double final_ari = 0.0;
};

nlohmann::json to_json(const RunReport& report);

/// Starts a fresh session on `ws`, then for each schedule step moves the
/// next items to the user's targets and requests a refinement. The workspace
/// is left in its final state so callers may commit it.
RunReport simulate(workspace::Workspace& ws, const std::vector<int>& labels,
                   const SimulatedUser& user, const EngineConfig& config);

/// A diligent user places every item at its class target and commits.
void commit_sorted_layout(workspace::Workspace& ws, const std::vector<int>& labels, Strategy strategy,
                          double sigma, std::uint64_t seed, const std::string& session_id);

// -------------------------------------------------------------------- bench

struct BenchRow {
  std::size_t touched = 0;
  std::size_t repetitions = 0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
};

/// Wall-clock of run_refinement with T random touched items, per T.
/// T values larger than the dataset are skipped.
std::vector<BenchRow> bench(const workspace::Workspace& ws, const EngineConfig& config,
                            std::size_t repetitions,
                            const std::vector<std::size_t>& touched_counts = {8, 20, 50});

nlohmann::json to_json(const std::vector<BenchRow>& rows);

}  // namespace activecanvas::harness
