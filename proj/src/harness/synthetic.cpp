#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_map>

#include "activecanvas/error.hpp"
#include "activecanvas/harness.hpp"

namespace fs = std::filesystem;

namespace activecanvas::harness {

namespace {

const char* const kNames[] = {"frog", "dice", "deer", "elephant", "pram"};

std::string class_name(int c, int classes) {
  if (classes <= 5) return kNames[c];
  return "class_" + std::to_string(c);
}

std::string pad(std::size_t i, std::size_t total) {
  const int width = std::max<int>(3, static_cast<int>(std::to_string(total > 0 ? total - 1 : 0).size()));
  std::string s = std::to_string(i);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.classes < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 classes");
  if (spec.dims < 1) throw Error(ErrorCode::kInvalidArgument, "need at least 1 feature column");
  if (spec.informative > spec.dims) {
    throw Error(ErrorCode::kInvalidArgument, "informative columns exceed dims");
  }
  if (!(spec.noise > 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise must be > 0");
  if (spec.separation < 4.0) throw Error(ErrorCode::kInvalidArgument, "separation must be >= 4");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, spec.noise);

  SyntheticDataset data;
  data.labels.resize(spec.items);
  for (std::size_t i = 0; i < spec.items; ++i) data.labels[i] = static_cast<int>(i % spec.classes);
  std::shuffle(data.labels.begin(), data.labels.end(), rng);

  std::vector<std::size_t> cols(spec.dims);
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(cols.begin(), cols.end(), rng);
  data.informative_columns.assign(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(spec.informative));
  std::sort(data.informative_columns.begin(), data.informative_columns.end());

  data.class_means.assign(static_cast<std::size_t>(spec.classes), std::vector<double>(spec.informative));
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t j = 0; j < spec.informative; ++j) {
    slot[data.informative_columns[j]] = j;
    std::vector<int> levels(static_cast<std::size_t>(spec.classes));
    std::iota(levels.begin(), levels.end(), 0);
    std::shuffle(levels.begin(), levels.end(), rng);
    for (int c = 0; c < spec.classes; ++c) {
      data.class_means[c][j] = levels[c] * spec.separation * spec.noise;
    }
  }

  std::vector<std::string> names;
  std::vector<std::vector<double>> columns(spec.dims, std::vector<double>(spec.items));
  for (std::size_t d = 0; d < spec.dims; ++d) names.push_back("f" + pad(d, spec.dims));
  for (std::size_t i = 0; i < spec.items; ++i) {
    for (std::size_t d = 0; d < spec.dims; ++d) {
      double v = gauss(rng);
      if (auto it = slot.find(d); it != slot.end()) v += data.class_means[data.labels[i]][it->second];
      columns[d][i] = v;
    }
  }
  std::vector<features::Provenance> prov(spec.dims, features::Provenance::innate());
  data.features = features::FeatureMatrix(std::move(names), std::move(prov), std::move(columns), spec.items);

  for (std::size_t i = 0; i < spec.items; ++i) {
    const std::string id = "img_" + pad(i, spec.items);
    data.manifest.push_back({id, "thumbs/" + id + ".svg", class_name(data.labels[i], spec.classes)});
  }
  return data;
}

void write_dataset(const SyntheticDataset& data, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "thumbs", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  workspace::write_manifest(dir / "manifest.json", data.manifest);
  workspace::write_features_csv(dir / "features.csv", data.features);

  int classes = 0;
  for (int l : data.labels) classes = std::max(classes, l + 1);
  for (std::size_t i = 0; i < data.manifest.size(); ++i) {
    const int hue = classes > 0 ? 360 * data.labels[i] / classes : 0;
    std::ofstream out(dir / data.manifest[i].thumb, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write thumbnail for " + data.manifest[i].id);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"64\" height=\"64\">"
        << "<rect width=\"64\" height=\"64\" fill=\"hsl(" << hue << ",70%,55%)\"/>"
        << "<text x=\"32\" y=\"38\" font-size=\"10\" text-anchor=\"middle\">" << data.manifest[i].id
        << "</text></svg>\n";
  }
}

std::vector<int> labels_of(const workspace::Workspace& ws) {
  std::unordered_map<std::string, int> ids;
  std::vector<int> out;
  out.reserve(ws.size());
  for (const auto& m : ws.manifest()) {
    if (!m.label) throw Error(ErrorCode::kInvalidArgument, "item '" + m.id + "' has no label");
    const auto [it, inserted] = ids.emplace(*m.label, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace activecanvas::harness
