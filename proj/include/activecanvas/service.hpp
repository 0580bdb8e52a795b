#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "activecanvas/config.hpp"
#include "activecanvas/workspace.hpp"

namespace activecanvas::service {

inline constexpr int kProtocolVersion = 1;

// ---------------------------------------------------------------- store

/// Named workspaces with one writer at a time each. Readers copy a snapshot
/// under a short lock; a writer works on its own copy and publishes it, so
/// reads never wait for a refinement.
class WorkspaceStore {
 public:
  /// Without a data directory commits stay in memory.
  explicit WorkspaceStore(std::optional<std::filesystem::path> data_dir = std::nullopt);
  ~WorkspaceStore();

  /// Every subdirectory of `data_dir` that is a saved workspace or holds
  /// manifest.json + features.csv. Fresh datasets get a layout seeded by `seed`.
  static std::unique_ptr<WorkspaceStore> open(const std::filesystem::path& data_dir,
                                              std::uint64_t seed);

  void add(workspace::Workspace ws);

  std::vector<std::string> ids() const;
  bool contains(const std::string& id) const;
  const std::optional<std::filesystem::path>& data_dir() const noexcept { return data_dir_; }

  /// Throws Error(kNotFound).
  workspace::Workspace snapshot(const std::string& id) const;

  /// Exclusive write access to one workspace; released on destruction.
  class Lease {
   public:
    Lease(Lease&& other) noexcept;
    Lease& operator=(Lease&&) = delete;
    ~Lease();

    /// Private copy to mutate.
    workspace::Workspace& working() noexcept { return working_; }
    /// Makes the working copy visible to readers.
    void publish();

   private:
    friend class WorkspaceStore;
    struct Entry;
    Lease(Entry* entry, workspace::Workspace working);
    Entry* entry_;
    workspace::Workspace working_;
  };

  /// nullopt when another writer holds the workspace. Throws Error(kNotFound).
  std::optional<Lease> try_acquire(const std::string& id);

 private:
  Lease::Entry& entry(const std::string& id) const;

  std::optional<std::filesystem::path> data_dir_;
  mutable std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<Lease::Entry>> entries_;
};

// ------------------------------------------------------------- protocol

/// Protocol state of one websocket connection, independent of the transport.
/// Every call returns the frames to send, in order.
class SessionHandler {
 public:
  SessionHandler(WorkspaceStore& store, EngineConfig config, std::string dataset_id,
                 std::string session_id);

  std::vector<std::string> on_open();
  std::vector<std::string> on_frame(std::string_view text);

  /// True after a fatal error (unknown dataset); the transport should close.
  bool closed() const noexcept { return closed_; }

 private:
  nlohmann::ordered_json dataset_message() const;
  void handle_move(const nlohmann::json& msg);
  nlohmann::ordered_json handle_refine(const nlohmann::json& msg);
  nlohmann::ordered_json handle_commit(const nlohmann::json& msg);

  WorkspaceStore& store_;
  EngineConfig config_;
  std::string dataset_id_;
  std::string session_id_;
  bool closed_ = false;
};

std::string error_frame(const std::string& code, const std::string& detail);

/// Full layout as the wire `positions` array.
nlohmann::ordered_json positions_json(const workspace::Workspace& ws);

/// Manifest, layout, dimension and commit count for GET /api/dataset/{id}.
nlohmann::ordered_json dataset_summary(const workspace::Workspace& ws);

/// Content type from a file extension.
std::string content_type_for(const std::filesystem::path& file);

// --------------------------------------------------------------- server

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  EngineConfig config;
};

/// HTTP + websocket front end, one thread per connection.
class Server {
 public:
  Server(WorkspaceStore& store, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting. Returns the bound port. Throws on bind failure.
  unsigned short start();
  /// Stops accepting, shuts down open connections and joins their threads.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace activecanvas::service
