#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cfx/json_io.hpp"
#include "cfx/session.hpp"

namespace httplib {
class Server;
}

namespace cfx {

struct StoredDataset {
  std::string id;
  std::string name;
  std::size_t bytes = 0;
  std::map<std::string, TypeHint, std::less<>> type_hints;
  json manifest;
};

void to_json(json& j, const StoredDataset& stored);

/// On-disk persistence under `root`:
///   datasets/<id>.csv, datasets/<id>.json  uploaded bytes and manifest
///   sessions/<id>.json                      session event log
/// Dataset ids derive from name and content, so they survive restarts.
/// Sessions are rebuilt from their logs on first access after a restart.
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  StoredDataset add_dataset(std::string_view csv_text, std::string name, const LoadOptions& options = {});
  /// Throws Error(UnknownDataset).
  StoredDataset dataset_info(std::string_view id);
  std::shared_ptr<const Dataset> dataset(std::string_view id);
  std::vector<StoredDataset> datasets();

  /// Returns the new session id and its initial snapshot.
  std::pair<std::string, AnalysisSnapshot> create_session(std::string_view dataset_id, std::string outcome, Mode mode,
                                                          SimilarityConfig config);

  /// Runs `fn(Session&)` under the session's lock; a grown event log is
  /// persisted before returning. Throws Error(UnknownSession).
  template <typename Fn>
  auto with_session(std::string_view id, Fn&& fn) {
    Entry& entry = session_entry(id);
    std::lock_guard lock(entry.mutex);
    const std::size_t before = entry.session->log().events.size();
    auto result = fn(*entry.session);
    if (entry.session->log().events.size() != before) save_log(std::string(id), entry.session->log());
    return result;
  }

 private:
  struct Entry {
    std::mutex mutex;
    std::unique_ptr<Session> session;
  };

  Entry& session_entry(std::string_view id);
  void save_log(const std::string& id, const SessionLog& log);
  std::filesystem::path dataset_path(std::string_view id, const char* ext) const;

  std::filesystem::path root_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Dataset>, std::less<>> loaded_;
  std::map<std::string, std::unique_ptr<Entry>, std::less<>> sessions_;
};

/// Registers the JSON API on `server`:
///   POST   /datasets?name=&type=col:numerical     CSV body (or multipart field "file")
///   GET    /datasets, /datasets/{id}/summary
///   GET    /datasets/{id}/columns/{name}/distribution?subset=0,2,5-9
///   POST   /sessions                              {dataset, outcome, mode?, config?}
///   GET    /sessions/{id}/log
///   GET    /sessions/{id}/snapshot?feature=
///   POST   /sessions/{id}/filters                 {constraint}
///   DELETE /sessions/{id}/filters/{column}
/// Errors answer {"error": {"code", "message"}} with 400, 404 or 422.
void install_routes(httplib::Server& server, Store& store);

/// Parses "0,2,5-9" into ascending unique rows. Throws Error(MalformedRequest).
RowSet parse_row_list(std::string_view text);

}  // namespace cfx
