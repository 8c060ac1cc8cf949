#include "cfx/service.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>

#include "cfx/error.hpp"

namespace cfx {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  }
  fs::rename(tmp, path);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// FNV-1a
std::uint64_t fingerprint(std::initializer_list<std::string_view> parts) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto part : parts) {
    for (unsigned char c : part) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

bool valid_id(std::string_view id) {
  return id.size() == 16 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

std::string_view hint_name(TypeHint hint) { return hint == TypeHint::Numerical ? "numerical" : "categorical"; }

}  // namespace

void to_json(json& j, const StoredDataset& s) {
  json hints = json::object();
  for (const auto& [column, hint] : s.type_hints) hints[column] = hint_name(hint);
  j = json{{"id", s.id}, {"name", s.name}, {"bytes", s.bytes}, {"type_hints", hints}, {"manifest", s.manifest}};
}

Store::Store(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "datasets");
  fs::create_directories(root_ / "sessions");
}

fs::path Store::dataset_path(std::string_view id, const char* ext) const {
  return root_ / "datasets" / (std::string(id) + ext);
}

StoredDataset Store::add_dataset(std::string_view csv_text, std::string name, const LoadOptions& options) {
  auto dataset = std::make_shared<const Dataset>(load_csv(csv_text, name, options));

  std::string hint_key;
  for (const auto& [column, hint] : options.type_hints) {
    hint_key += column + "=" + std::string(hint_name(hint)) + ";";
  }
  StoredDataset stored;
  stored.id = hex64(fingerprint({name, hint_key, csv_text}));
  stored.name = std::move(name);
  stored.bytes = csv_text.size();
  stored.type_hints = options.type_hints;
  stored.manifest = column_manifest(*dataset);

  std::lock_guard lock(mutex_);
  if (!fs::exists(dataset_path(stored.id, ".json"))) {
    write_file_atomic(dataset_path(stored.id, ".csv"), csv_text);
    write_file_atomic(dataset_path(stored.id, ".json"), canonical(json(stored)));
  }
  loaded_.emplace(stored.id, std::move(dataset));
  return stored;
}

StoredDataset Store::dataset_info(std::string_view id) {
  const fs::path path = dataset_path(id, ".json");
  if (!valid_id(id) || !fs::exists(path)) {
    throw Error(ErrorCode::UnknownDataset, "unknown dataset '" + std::string(id) + "'");
  }
  const json j = json::parse(read_file(path));
  StoredDataset s;
  s.id = j.at("id").get<std::string>();
  s.name = j.at("name").get<std::string>();
  s.bytes = j.at("bytes").get<std::size_t>();
  for (const auto& [column, hint] : j.at("type_hints").items()) {
    s.type_hints.emplace(column, *parse_type_hint(hint.get<std::string>()));
  }
  s.manifest = j.at("manifest");
  return s;
}

std::shared_ptr<const Dataset> Store::dataset(std::string_view id) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = loaded_.find(id); it != loaded_.end()) return it->second;
  }
  const StoredDataset info = dataset_info(id);
  LoadOptions options;
  options.type_hints = info.type_hints;
  auto dataset = std::make_shared<const Dataset>(load_csv(read_file(dataset_path(id, ".csv")), info.name, options));
  std::lock_guard lock(mutex_);
  return loaded_.emplace(std::string(id), std::move(dataset)).first->second;
}

std::vector<StoredDataset> Store::datasets() {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "datasets")) {
    if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  std::vector<StoredDataset> out;
  for (const auto& id : ids) out.push_back(dataset_info(id));
  return out;
}

std::pair<std::string, AnalysisSnapshot> Store::create_session(std::string_view dataset_id, std::string outcome,
                                                              Mode mode, SimilarityConfig config) {
  auto data = dataset(dataset_id);
  auto session = std::make_unique<Session>(data, std::string(dataset_id), std::move(outcome), mode, std::move(config));
  AnalysisSnapshot snapshot = session->snapshot();

  std::lock_guard lock(mutex_);
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::string id;
  do {
    id = hex64(rng());
  } while (sessions_.contains(id) || fs::exists(root_ / "sessions" / (id + ".json")));
  save_log(id, session->log());
  auto entry = std::make_unique<Entry>();
  entry->session = std::move(session);
  sessions_.emplace(id, std::move(entry));
  return {id, std::move(snapshot)};
}

Store::Entry& Store::session_entry(std::string_view id) {
  std::unique_lock lock(mutex_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return *it->second;
  const fs::path path = root_ / "sessions" / (std::string(id) + ".json");
  if (!valid_id(id) || !fs::exists(path)) {
    throw Error(ErrorCode::UnknownSession, "unknown session '" + std::string(id) + "'");
  }
  const SessionLog log = session_log_from_json(json::parse(read_file(path)));
  lock.unlock();
  auto session = std::make_unique<Session>(Session::replay(dataset(log.dataset), log));
  lock.lock();
  auto [it, inserted] = sessions_.try_emplace(std::string(id));
  if (inserted) {
    it->second = std::make_unique<Entry>();
    it->second->session = std::move(session);
  }
  return *it->second;
}

void Store::save_log(const std::string& id, const SessionLog& log) {
  write_file_atomic(root_ / "sessions" / (id + ".json"), json(log).dump(2));
}

RowSet parse_row_list(std::string_view text) {
  RowSet rows;
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
      throw Error(ErrorCode::MalformedRequest, "bad row list '" + std::string(text) + "'");
    }
    return v;
  };
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      rows.push_back(number(item));
    } else {
      const std::size_t lo = number(item.substr(0, dash));
      const std::size_t hi = number(item.substr(dash + 1));
      if (lo > hi) throw Error(ErrorCode::MalformedRequest, "descending row range in '" + std::string(text) + "'");
      for (std::size_t r = lo; r <= hi; ++r) rows.push_back(r);
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

namespace {

int status_for(ErrorCode code) {
  switch (kind_of(code)) {
    case ErrorKind::Input: return 400;
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Domain: return 422;
  }
  return 500;
}

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(canonical(body), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send(res, status, json{{"error", {{"code", code}, {"message", message}}}});
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, status_for(e.code()), e.name(), e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, code_name(ErrorCode::MalformedRequest), e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "Internal", e.what());
  }
}

json body_json(const httplib::Request& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::MalformedRequest, "request body must be a JSON object");
  return j;
}

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw Error(ErrorCode::MalformedRequest, std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

void install_routes(httplib::Server& server, Store& store) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Post("/datasets", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string content = req.body;
      std::string name = req.has_param("name") ? req.get_param_value("name") : "dataset";
      if (req.is_multipart_form_data()) {
        if (!req.has_file("file")) throw Error(ErrorCode::MalformedRequest, "multipart upload needs a 'file' field");
        const auto file = req.get_file_value("file");
        content = file.content;
        if (!req.has_param("name") && !file.filename.empty()) name = fs::path(file.filename).stem().string();
      }
      LoadOptions options;
      for (std::size_t i = 0; i < req.get_param_value_count("type"); ++i) {
        const std::string spec = req.get_param_value("type", i);
        const auto colon = spec.rfind(':');
        const auto hint = colon == std::string::npos ? std::nullopt : parse_type_hint(spec.substr(colon + 1));
        if (!hint) throw Error(ErrorCode::MalformedRequest, "type override must be column:numerical|categorical");
        options.type_hints[spec.substr(0, colon)] = *hint;
      }
      send(res, 201, json(store.add_dataset(content, std::move(name), options)));
    });
  });

  server.Get("/datasets", [&store](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, json(store.datasets())); });
  });

  server.Get(R"(/datasets/([^/]+)/summary)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, json(store.dataset_info(req.matches[1].str()))); });
  });

  server.Get(R"(/datasets/([^/]+)/columns/([^/]+)/distribution)",
             [&store](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 auto data = store.dataset(req.matches[1].str());
                 const std::string column = req.matches[2].str();
                 if (req.has_param("subset")) {
                   const RowSet rows = parse_row_list(req.get_param_value("subset"));
                   send(res, 200, json(column_distribution(*data, column, std::span<const RowIndex>(rows))));
                 } else {
                   send(res, 200, json(column_distribution(*data, column)));
                 }
               });
             });

  server.Post("/sessions", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = body_json(req);
      const auto mode = parse_mode(body.value("mode", std::string("counterfactual")));
      if (!mode) throw Error(ErrorCode::MalformedRequest, "mode must be counterfactual or control");
      const SimilarityConfig config = config_from_json(body.value("config", json(nullptr)));
      auto [id, snapshot] =
          store.create_session(required_string(body, "dataset"), required_string(body, "outcome"), *mode, config);
      send(res, 201, json{{"id", id}, {"snapshot", snapshot}});
    });
  });

  server.Get(R"(/sessions/([^/]+)/log)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send(res, 200, store.with_session(req.matches[1].str(), [](Session& s) { return json(s.log()); }));
    });
  });

  server.Get(R"(/sessions/([^/]+)/snapshot)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<std::string> feature;
      if (req.has_param("feature")) feature = req.get_param_value("feature");
      send(res, 200, store.with_session(req.matches[1].str(), [&](Session& s) {
        return json(feature ? s.snapshot(std::string_view(*feature)) : s.snapshot());
      }));
    });
  });

  server.Post(R"(/sessions/([^/]+)/filters)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = body_json(req);
      if (!body.contains("constraint")) throw Error(ErrorCode::MalformedRequest, "missing field 'constraint'");
      FilterConstraint constraint = constraint_from_json(body["constraint"]);
      send(res, 200, store.with_session(req.matches[1].str(), [&](Session& s) {
        return json(s.push_filter(std::move(constraint)));
      }));
    });
  });

  server.Delete(R"(/sessions/([^/]+)/filters/([^/]+))", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string column = req.matches[2].str();
      send(res, 200, store.with_session(req.matches[1].str(), [&](Session& s) { return json(s.pop_filter(column)); }));
    });
  });
}

}  // namespace cfx
