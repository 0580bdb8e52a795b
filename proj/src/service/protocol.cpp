#include <chrono>
#include <cmath>

#include "activecanvas/error.hpp"
#include "activecanvas/service.hpp"

namespace activecanvas::service {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct ProtocolError {
  std::string code;
  std::string detail;
};

struct WirePosition {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  bool touched = false;
};

double number_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ProtocolError{"BAD_MESSAGE", std::string("missing numeric field '") + key + "'"};
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ProtocolError{"BAD_MESSAGE", std::string("non-finite '") + key + "'"};
  return v;
}

std::vector<WirePosition> parse_positions(const json& msg, const char* field, bool default_touched) {
  const auto it = msg.find(field);
  if (it == msg.end()) return {};
  if (!it->is_array()) throw ProtocolError{"BAD_MESSAGE", std::string("'") + field + "' must be an array"};
  std::vector<WirePosition> out;
  out.reserve(it->size());
  for (const auto& p : *it) {
    if (!p.is_object()) throw ProtocolError{"BAD_MESSAGE", "position entries must be objects"};
    const auto id = p.find("id");
    if (id == p.end() || !id->is_string()) throw ProtocolError{"BAD_MESSAGE", "position entry without string 'id'"};
    WirePosition w{id->get<std::string>(), number_field(p, "x"), number_field(p, "y"), default_touched};
    if (const auto t = p.find("touched"); t != p.end()) {
      if (!t->is_boolean()) throw ProtocolError{"BAD_MESSAGE", "'touched' must be a boolean"};
      w.touched = t->get<bool>();
    }
    out.push_back(std::move(w));
  }
  return out;
}

// All ids are resolved before anything moves.
void apply_positions(workspace::Workspace& ws, const std::vector<WirePosition>& positions) {
  std::vector<std::size_t> rows;
  rows.reserve(positions.size());
  for (const auto& p : positions) {
    try {
      rows.push_back(ws.index_of(p.id));
    } catch (const Error&) {
      throw ProtocolError{"UNKNOWN_ITEM", "unknown item '" + p.id + "'"};
    }
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i].touched) {
      ws.layout_mut().move(rows[i], positions[i].x, positions[i].y);
    } else {
      ws.layout_mut().set_position(rows[i], positions[i].x, positions[i].y);
    }
  }
}

std::string thumb_url(const std::string& dataset, const std::string& item) {
  return "/thumbs/" + dataset + "/" + item;
}

}  // namespace

std::string error_frame(const std::string& code, const std::string& detail) {
  ordered_json j;
  j["type"] = "error";
  j["protocol_version"] = kProtocolVersion;
  j["code"] = code;
  j["detail"] = detail;
  return j.dump();
}

ordered_json positions_json(const workspace::Workspace& ws) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : ws.layout()) {
    ordered_json e;
    e["id"] = p.id;
    e["x"] = p.x;
    e["y"] = p.y;
    e["touched"] = p.touched;
    arr.push_back(std::move(e));
  }
  return arr;
}

ordered_json dataset_summary(const workspace::Workspace& ws) {
  ordered_json manifest = ordered_json::array();
  for (const auto& item : ws.manifest()) {
    ordered_json e;
    e["id"] = item.id;
    e["thumb"] = thumb_url(ws.dataset_id(), item.id);
    if (item.label) e["label"] = *item.label;
    manifest.push_back(std::move(e));
  }
  ordered_json j;
  j["id"] = ws.dataset_id();
  j["dims"] = ws.dims();
  j["commits"] = ws.commits().size();
  j["manifest"] = std::move(manifest);
  j["positions"] = positions_json(ws);
  return j;
}

std::string content_type_for(const std::filesystem::path& file) {
  auto ext = file.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  return "application/octet-stream";
}

SessionHandler::SessionHandler(WorkspaceStore& store, EngineConfig config, std::string dataset_id,
                               std::string session_id)
    : store_(store),
      config_(std::move(config)),
      dataset_id_(std::move(dataset_id)),
      session_id_(std::move(session_id)) {}

ordered_json SessionHandler::dataset_message() const {
  const auto ws = store_.snapshot(dataset_id_);
  ordered_json items = ordered_json::array();
  for (const auto& item : ws.manifest()) {
    ordered_json e;
    e["id"] = item.id;
    e["thumb"] = thumb_url(dataset_id_, item.id);
    items.push_back(std::move(e));
  }
  ordered_json j;
  j["type"] = "dataset";
  j["protocol_version"] = kProtocolVersion;
  j["dataset"] = dataset_id_;
  j["dims"] = ws.dims();
  j["commits"] = ws.commits().size();
  j["items"] = std::move(items);
  j["positions"] = positions_json(ws);
  return j;
}

std::vector<std::string> SessionHandler::on_open() {
  if (!store_.contains(dataset_id_)) {
    closed_ = true;
    return {error_frame("NOT_FOUND", "unknown dataset '" + dataset_id_ + "'")};
  }
  return {dataset_message().dump()};
}

std::vector<std::string> SessionHandler::on_frame(std::string_view text) {
  if (closed_) return {};
  try {
    const json msg = json::parse(text, nullptr, false);
    if (msg.is_discarded()) throw ProtocolError{"BAD_MESSAGE", "frame is not valid JSON"};
    if (!msg.is_object()) throw ProtocolError{"BAD_MESSAGE", "frame must be a JSON object"};
    const auto type_it = msg.find("type");
    if (type_it == msg.end() || !type_it->is_string()) {
      throw ProtocolError{"BAD_MESSAGE", "missing string field 'type'"};
    }
    if (const auto v = msg.find("protocol_version"); v != msg.end()) {
      if (!v->is_number_integer() || v->get<long long>() != kProtocolVersion) {
        throw ProtocolError{"UNSUPPORTED_VERSION",
                            "server speaks protocol_version " + std::to_string(kProtocolVersion) +
                                ", got " + v->dump()};
      }
    }
    const auto type = type_it->get<std::string>();
    if (type == "hello") return {dataset_message().dump()};
    if (type == "move") {
      handle_move(msg);
      return {};
    }
    if (type == "refine_request") return {handle_refine(msg).dump()};
    if (type == "commit_request") return {handle_commit(msg).dump()};
    if (type == "dataset" || type == "refine_result" || type == "commit_ack" || type == "error") {
      throw ProtocolError{"BAD_MESSAGE", "'" + type + "' is sent by the server only"};
    }
    throw ProtocolError{"UNKNOWN_TYPE", "unknown message type '" + type + "'"};
  } catch (const ProtocolError& e) {
    return {error_frame(e.code, e.detail)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotFound) return {error_frame("NOT_FOUND", e.what())};
    return {error_frame("INTERNAL", e.what())};
  } catch (const std::exception& e) {
    return {error_frame("INTERNAL", e.what())};
  }
}

void SessionHandler::handle_move(const json& msg) {
  const auto moves = parse_positions(msg, "moves", true);
  auto lease = store_.try_acquire(dataset_id_);
  if (!lease) throw ProtocolError{"BUSY", "workspace is busy with another request"};
  apply_positions(lease->working(), moves);
  lease->publish();
}

ordered_json SessionHandler::handle_refine(const json& msg) {
  const auto positions = parse_positions(msg, "positions", false);
  const auto t0 = std::chrono::steady_clock::now();
  auto lease = store_.try_acquire(dataset_id_);
  if (!lease) throw ProtocolError{"BUSY", "workspace is busy with another request"};
  auto& ws = lease->working();
  apply_positions(ws, positions);

  workspace::RefineReport report;
  try {
    report = workspace::run_refinement(ws, config_);
  } catch (const Error& e) {
    // The moves stand even when the refinement cannot run.
    lease->publish();
    if (e.code() == ErrorCode::kTooFewTouched) {
      throw ProtocolError{"TOO_FEW_TOUCHED", "need >= " + std::to_string(config_.k + 2) +
                                                 " touched, got " +
                                                 std::to_string(ws.layout().touched_count())};
    }
    throw ProtocolError{"INTERNAL", e.what()};
  }
  lease->publish();
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);

  ordered_json j;
  j["type"] = "refine_result";
  j["protocol_version"] = kProtocolVersion;
  j["positions"] = positions_json(ws);
  j["touched"] = report.touched;
  j["mi_before"] = report.mi_before;
  j["mi_after"] = report.mi_after;
  j["elapsed_ms"] = static_cast<long long>(std::llround(elapsed.count()));
  return j;
}

ordered_json SessionHandler::handle_commit(const json& msg) {
  std::string annotation;
  if (const auto a = msg.find("annotation"); a != msg.end()) {
    if (!a->is_string()) throw ProtocolError{"BAD_MESSAGE", "'annotation' must be a string"};
    annotation = a->get<std::string>();
  }
  auto lease = store_.try_acquire(dataset_id_);
  if (!lease) throw ProtocolError{"BUSY", "workspace is busy with another request"};
  auto& ws = lease->working();
  try {
    workspace::commit(ws, session_id_, annotation, store_.data_dir());
  } catch (const Error& e) {
    throw ProtocolError{"COMMIT_FAILED", std::string("could not persist the workspace (") + to_string(e.code()) + ")"};
  } catch (const std::exception&) {
    throw ProtocolError{"COMMIT_FAILED", "could not persist the workspace"};
  }
  lease->publish();

  ordered_json j;
  j["type"] = "commit_ack";
  j["protocol_version"] = kProtocolVersion;
  j["new_dim"] = ws.dims();
  j["commit_index"] = ws.commits().size();
  return j;
}

}  // namespace activecanvas::service
