#include <algorithm>

#include "activecanvas/error.hpp"
#include "activecanvas/service.hpp"

namespace activecanvas::service {

namespace fs = std::filesystem;

struct WorkspaceStore::Lease::Entry {
  explicit Entry(workspace::Workspace w) : ws(std::move(w)) {}
  std::mutex mutex;
  workspace::Workspace ws;
  bool busy = false;
};

WorkspaceStore::WorkspaceStore(std::optional<fs::path> data_dir) : data_dir_(std::move(data_dir)) {}

WorkspaceStore::~WorkspaceStore() = default;

std::unique_ptr<WorkspaceStore> WorkspaceStore::open(const fs::path& data_dir, std::uint64_t seed) {
  if (!fs::is_directory(data_dir)) {
    throw Error(ErrorCode::kNotFound, "data directory not found: " + data_dir.string());
  }
  auto store = std::make_unique<WorkspaceStore>(data_dir);
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(data_dir)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const std::string id = dir.filename().string();
    if (workspace::is_saved_workspace(dir)) {
      store->add(workspace::reload_workspace(data_dir, id));
    } else if (fs::exists(dir / "manifest.json") && fs::exists(dir / "features.csv")) {
      store->add(workspace::load_workspace(dir / "manifest.json", dir / "features.csv", id, seed));
    }
  }
  return store;
}

void WorkspaceStore::add(workspace::Workspace ws) {
  std::lock_guard lock(map_mutex_);
  const std::string id = ws.dataset_id();
  if (entries_.count(id) != 0) throw Error(ErrorCode::kDuplicateId, "dataset already loaded: " + id);
  entries_.emplace(id, std::make_unique<Lease::Entry>(std::move(ws)));
}

std::vector<std::string> WorkspaceStore::ids() const {
  std::lock_guard lock(map_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : entries_) out.push_back(id);
  return out;
}

bool WorkspaceStore::contains(const std::string& id) const {
  std::lock_guard lock(map_mutex_);
  return entries_.count(id) != 0;
}

WorkspaceStore::Lease::Entry& WorkspaceStore::entry(const std::string& id) const {
  std::lock_guard lock(map_mutex_);
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorCode::kNotFound, "unknown dataset '" + id + "'");
  return *it->second;
}

workspace::Workspace WorkspaceStore::snapshot(const std::string& id) const {
  auto& e = entry(id);
  std::lock_guard lock(e.mutex);
  return e.ws;
}

std::optional<WorkspaceStore::Lease> WorkspaceStore::try_acquire(const std::string& id) {
  auto& e = entry(id);
  std::lock_guard lock(e.mutex);
  if (e.busy) return std::nullopt;
  e.busy = true;
  return Lease(&e, e.ws);
}

WorkspaceStore::Lease::Lease(Entry* entry, workspace::Workspace working)
    : entry_(entry), working_(std::move(working)) {}

WorkspaceStore::Lease::Lease(Lease&& other) noexcept
    : entry_(std::exchange(other.entry_, nullptr)), working_(std::move(other.working_)) {}

WorkspaceStore::Lease::~Lease() {
  if (entry_ == nullptr) return;
  std::lock_guard lock(entry_->mutex);
  entry_->busy = false;
}

void WorkspaceStore::Lease::publish() {
  std::lock_guard lock(entry_->mutex);
  entry_->ws = working_;
}

}  // namespace activecanvas::service
