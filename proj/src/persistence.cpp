#include <charconv>
#include <cmath>
#include <map>
#include <unordered_set>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "activecanvas/error.hpp"
#include "activecanvas/workspace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace activecanvas::workspace {

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kFeatures = "features.csv";
constexpr const char* kCommits = "commits.jsonl";
constexpr const char* kLayout = "layout.csv";
constexpr const char* kChecksums = "checksums.json";

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const fs::path& file, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParse, file.string() + ":" + std::to_string(line) + ": bad number '" +
                                       std::string(text) + "'");
  }
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kNonFinite, file.string() + ":" + std::to_string(line) + ": non-finite value");
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so a crash never leaves a half-written file behind.
void write_file(const fs::path& file, const std::string& bytes) {
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << bytes;
    if (!out.flush()) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string manifest_bytes(const std::vector<ManifestItem>& manifest) {
  json arr = json::array();
  for (const auto& m : manifest) {
    json item = {{"id", m.id}, {"thumb", m.thumb}};
    if (m.label) item["label"] = *m.label;
    arr.push_back(std::move(item));
  }
  return arr.dump(1) + "\n";
}

std::string features_bytes(const features::FeatureMatrix& matrix) {
  std::string out;
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    if (c) out += ',';
    out += matrix.name(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      if (c) out += ',';
      out += format_double(matrix(r, c));
    }
    out += '\n';
  }
  return out;
}

features::FeatureMatrix parse_features(const std::string& text, const fs::path& file) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, file.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> names;
  for (auto field : split_csv(line)) {
    if (field.empty()) throw Error(ErrorCode::kParse, file.string() + ": empty column name");
    names.emplace_back(field);
  }
  std::vector<std::vector<double>> cols(names.size());
  std::size_t rows = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != names.size()) {
      throw Error(ErrorCode::kParse, file.string() + ":" + std::to_string(lineno) + ": expected " +
                                         std::to_string(names.size()) + " fields, got " +
                                         std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) cols[c].push_back(parse_double(fields[c], file, lineno));
    ++rows;
  }
  std::vector<features::Provenance> prov(names.size(), features::Provenance::innate());
  return features::FeatureMatrix(std::move(names), std::move(prov), std::move(cols), rows);
}

std::vector<ManifestItem> parse_manifest(const std::string& text, const fs::path& file) {
  std::vector<ManifestItem> out;
  try {
    const auto arr = json::parse(text);
    if (!arr.is_array()) throw Error(ErrorCode::kParse, file.string() + ": manifest must be a JSON array");
    for (const auto& item : arr) {
      ManifestItem m;
      m.id = item.at("id").get<std::string>();
      m.thumb = item.value("thumb", std::string());
      if (auto it = item.find("label"); it != item.end() && !it->is_null()) m.label = it->get<std::string>();
      out.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, file.string() + ": " + e.what());
  }
  std::unordered_set<std::string> seen;
  for (const auto& m : out) {
    if (m.id.empty()) throw Error(ErrorCode::kParse, file.string() + ": empty item id");
    if (!seen.insert(m.id).second) throw Error(ErrorCode::kDuplicateId, "duplicate item id '" + m.id + "'");
  }
  return out;
}

std::string sha256_of(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

}  // namespace

std::vector<ManifestItem> read_manifest(const fs::path& file) {
  return parse_manifest(read_file(file), file);
}

void write_manifest(const fs::path& file, const std::vector<ManifestItem>& manifest) {
  write_file(file, manifest_bytes(manifest));
}

features::FeatureMatrix read_features_csv(const fs::path& file) {
  return parse_features(read_file(file), file);
}

void write_features_csv(const fs::path& file, const features::FeatureMatrix& matrix) {
  write_file(file, features_bytes(matrix));
}

std::string sha256_hex(const fs::path& file) { return sha256_of(read_file(file)); }

bool is_saved_workspace(const fs::path& dir) { return fs::is_regular_file(dir / kChecksums); }

void save_workspace(const Workspace& ws, const fs::path& data_dir) {
  const fs::path dir = data_dir / ws.dataset_id();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "cannot create workspace directory " + dir.string());
  }

  // Relative thumbnails stay valid only when saving next to the original assets.
  auto manifest = ws.manifest();
  const bool same_root = !ws.asset_root().empty() && fs::exists(ws.asset_root()) &&
                         fs::equivalent(ws.asset_root(), dir, ec);
  if (!same_root && !ws.asset_root().empty()) {
    for (auto& m : manifest) {
      if (!m.thumb.empty() && fs::path(m.thumb).is_relative()) m.thumb = (ws.asset_root() / m.thumb).string();
    }
  }

  std::string commits;
  for (const auto& c : ws.commits()) {
    commits += json{{"session_id", c.session_id},
                    {"timestamp", c.timestamp},
                    {"annotation", c.annotation},
                    {"x_column", c.x_column},
                    {"y_column", c.y_column}}
                   .dump();
    commits += '\n';
  }

  std::string layout = "id,x,y,touched\n";
  for (const auto& p : ws.layout()) {
    layout += p.id + ',' + format_double(p.x) + ',' + format_double(p.y) + ',' + (p.touched ? "1" : "0") + '\n';
  }

  const std::vector<std::pair<std::string, std::string>> files = {
      {kManifest, manifest_bytes(manifest)},
      {kFeatures, features_bytes(ws.raw_features())},
      {kCommits, commits},
      {kLayout, layout},
  };
  json sums = {{"algorithm", "sha256"}, {"dataset_id", ws.dataset_id()}, {"files", json::object()}};
  for (const auto& [name, bytes] : files) {
    write_file(dir / name, bytes);
    sums["files"][name] = sha256_of(bytes);
  }
  write_file(dir / kChecksums, sums.dump(1) + "\n");
}

Workspace reload_workspace(const fs::path& data_dir, const std::string& dataset_id) {
  const fs::path dir = data_dir / dataset_id;
  if (!is_saved_workspace(dir)) {
    throw Error(ErrorCode::kNotFound, "no saved workspace '" + dataset_id + "' under " + data_dir.string());
  }

  std::map<std::string, std::string> contents;
  try {
    const auto sums = json::parse(read_file(dir / kChecksums));
    for (const char* name : {kManifest, kFeatures, kCommits, kLayout}) {
      const auto expected = sums.at("files").at(name).get<std::string>();
      auto bytes = read_file(dir / name);
      if (sha256_of(bytes) != expected) {
        throw Error(ErrorCode::kCorruption, (dir / name).string() + ": checksum mismatch");
      }
      contents[name] = std::move(bytes);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruption, (dir / kChecksums).string() + ": " + e.what());
  }

  auto manifest = parse_manifest(contents[kManifest], dir / kManifest);
  const auto parsed = parse_features(contents[kFeatures], dir / kFeatures);

  std::vector<CommitRecord> commits;
  {
    std::istringstream in(contents[kCommits]);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto j = json::parse(line);
        commits.push_back({j.at("session_id").get<std::string>(), j.at("timestamp").get<std::string>(),
                           j.at("annotation").get<std::string>(), j.at("x_column").get<std::size_t>(),
                           j.at("y_column").get<std::size_t>()});
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kCorruption, (dir / kCommits).string() + ": " + e.what());
      }
    }
  }

  std::vector<features::Provenance> prov(parsed.cols(), features::Provenance::innate());
  for (std::size_t i = 0; i < commits.size(); ++i) {
    const auto& c = commits[i];
    if (c.x_column >= parsed.cols() || c.y_column >= parsed.cols()) {
      throw Error(ErrorCode::kCorruption, "commit log references a missing column");
    }
    prov[c.x_column] = features::Provenance::committed(c.session_id, 'x', i + 1);
    prov[c.y_column] = features::Provenance::committed(c.session_id, 'y', i + 1);
  }
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < parsed.cols(); ++c) cols.push_back(parsed.column(c));
  features::FeatureMatrix raw(parsed.names(), std::move(prov), std::move(cols), parsed.rows());

  std::vector<Placement> placements;
  {
    std::istringstream in(contents[kLayout]);
    std::string line;
    std::getline(in, line);  // header
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto f = split_csv(line);
      if (f.size() != 4) throw Error(ErrorCode::kCorruption, (dir / kLayout).string() + ": bad row");
      placements.push_back({std::string(f[0]), parse_double(f[1], dir / kLayout, lineno),
                            parse_double(f[2], dir / kLayout, lineno), f[3] == "1"});
    }
  }

  return Workspace(dataset_id, std::move(manifest), std::move(raw), Layout(std::move(placements)),
                   std::move(commits), fs::absolute(dir));
}

}  // namespace activecanvas::workspace
