#pragma once

// Design-loop HTTP service: sessions hold an immutable base mesh and a
// chain of labelled revisions. Handler logic is transport-free;
// install_routes() wires it to an HTTP server.

#include "lk/geometry.hpp"

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <list>
#include <mutex>
#include <shared_mutex>

namespace lk {

/// Component count, per-component lengths, linking matrix of the closed
/// components and mesh warnings.
inline ordered_json analysis_report(const LabeledMesh& mesh, const RealizationParams& params = {}) {
  const auto strands = trace(mesh);
  ordered_json doc;
  doc["count"] = strands.component_count();
  doc["cycles"] = strands.cycle_count();
  doc["paths"] = strands.path_count();
  auto lengths = ordered_json::array();
  for (const auto& c : strands.components) lengths.push_back(c.length());
  doc["lengths"] = std::move(lengths);

  auto warnings = ordered_json::array();
  for (const auto& w : connectivity_report(mesh).warnings) warnings.push_back(w);

  StrandGeometry closed;
  auto ids = ordered_json::array();
  try {
    const auto g = realize(mesh, strands, params);
    for (const auto& c : g.components) {
      if (!c.closed) continue;
      closed.components.push_back(c);
      ids.push_back(c.id);
    }
    doc["closed_components"] = ids;
    doc["linking_matrix"] = matrix_json(linking_matrix(closed));
  } catch (const Error& e) {
    doc["closed_components"] = ids;
    doc["linking_matrix"] = nullptr;
    warnings.push_back(std::string("linking matrix unavailable: ") + e.what());
  }
  doc["warnings"] = std::move(warnings);
  return doc;
}

struct HttpResponse {
  int status = 200;
  std::string body;
};

struct ServiceOptions {
  std::string save_dir;         // LKM snapshot per revision when set
  std::size_t cache_size = 32;  // geometry documents kept
};

/// Session store and request handler. Safe to call from any thread.
class Service {
 public:
  explicit Service(ServiceOptions options = {}) : options_(std::move(options)) {}

  /// Routes one request. query holds decoded query parameters.
  HttpResponse handle(const std::string& method, const std::string& path,
                      const std::map<std::string, std::string>& query, const std::string& body) {
    try {
      const auto parts = split(path);
      if (method == "POST" && parts.size() == 1 && parts[0] == "session") return create(body);
      if (parts.size() == 3 && parts[0] == "session") {
        const auto session = find(parts[1]);
        if (!session) return error(404, "unknown session " + parts[1]);
        const auto& what = parts[2];
        if (method == "PATCH" && what == "labels") return patch(*session, body);
        if (method == "GET") {
          const auto rev = revision(*session, query);
          if (what == "mesh") return ok(to_json(*rev.mesh));
          if (what == "strands") return strands(rev);
          if (what == "geometry") return geometry(parts[1], rev, query);
          if (what == "report") return report(rev);
        }
      }
      return error(404, "no route for " + method + " " + path);
    } catch (const HttpError& e) {
      return error(e.status, e.what());
    } catch (const ParseError& e) {
      return error(400, e.what());
    } catch (const ValidationError& e) {
      return error(422, e.what());
    } catch (const PreconditionError& e) {
      return error(422, e.what());
    } catch (const GeometryError& e) {
      return error(422, e.what());
    } catch (const json::exception& e) {
      return error(400, e.what());
    }
  }

  /// Registers a session for an already parsed mesh and returns its id.
  std::string open(LabeledMesh mesh) {
    auto s = std::make_shared<Session>();
    s->revisions.push_back(std::make_shared<const LabeledMesh>(std::move(mesh)));
    std::unique_lock lock(sessions_mutex_);
    const auto id = std::to_string(++next_id_);
    s->id = id;
    sessions_[id] = s;
    snapshot(*s, 0);
    return id;
  }

 private:
  struct HttpError : Error {
    HttpError(int code, const std::string& msg) : Error(msg), status(code) {}
    int status;
  };

  struct Session {
    std::string id;
    mutable std::shared_mutex mutex;
    std::vector<std::shared_ptr<const LabeledMesh>> revisions;  // revision r at index r
  };

  struct Revision {
    std::size_t number = 0;
    std::shared_ptr<const LabeledMesh> mesh;
  };

  static std::vector<std::string> split(const std::string& path) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
      const auto j = path.find('/', i);
      const auto end = j == std::string::npos ? path.size() : j;
      if (end > i) out.push_back(path.substr(i, end - i));
      i = end + 1;
    }
    return out;
  }

  static HttpResponse ok(const ordered_json& doc) { return {200, doc.dump()}; }

  static HttpResponse error(int status, const std::string& msg) {
    ordered_json doc;
    doc["error"] = msg;
    return {status, doc.dump()};
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  static Revision revision(const Session& s, const std::map<std::string, std::string>& query) {
    std::shared_lock lock(s.mutex);
    const auto current = s.revisions.size() - 1;
    const auto it = query.find("rev");
    if (it == query.end()) return {current, s.revisions[current]};
    std::size_t rev = 0;
    try {
      rev = std::stoul(it->second);
    } catch (const std::exception&) {
      throw HttpError(400, "rev must be a non-negative integer");
    }
    if (rev > current) throw HttpError(409, "revision " + it->second + " does not exist yet");
    return {rev, s.revisions[rev]};
  }

  HttpResponse create(const std::string& body) {
    const auto doc = json::parse(body);
    const auto& lkm = doc.contains("lkm") ? doc.at("lkm") : doc;
    const auto id = open(parse_mesh(lkm));
    ordered_json out;
    out["session"] = id;
    out["revision"] = 0;
    return {201, out.dump()};
  }

  HttpResponse patch(Session& s, const std::string& body) {
    const auto doc = json::parse(body);
    std::unique_lock lock(s.mutex);
    const auto current = s.revisions.size() - 1;
    if (const auto it = doc.find("revision"); it != doc.end()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() != static_cast<std::int64_t>(current)) {
        throw HttpError(409, "stale revision; current is " + std::to_string(current));
      }
    }
    auto mesh = *s.revisions[current];
    if (const auto it = doc.find("edits"); it != doc.end()) {
      if (!it->is_array()) throw ParseError("edits must be an array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto w = "edits[" + std::to_string(i) + "]";
        const auto& edit = (*it)[i];
        const auto edge = detail::parse_edge(detail::require(edit, "edge", w), w);
        const auto t = detail::as_int(detail::require(edit, "t", w), w);
        if (!mesh.find_edge(edge)) throw ValidationError(w + ": unknown edge " + to_string(edge));
        mesh = mesh.with_twist(edge, t);
      }
    }
    if (const auto it = doc.find("nulls"); it != doc.end()) {
      if (!it->is_array()) throw ParseError("nulls must be an array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto w = "nulls[" + std::to_string(i) + "]";
        const auto& entry = (*it)[i];
        NullSide side;
        side.face = FaceId{detail::as_int(detail::require(entry, "face", w), w)};
        side.edge = detail::parse_edge(detail::require(entry, "edge", w), w);
        if (const auto occ = entry.find("occurrence"); occ != entry.end()) {
          side.occurrence = static_cast<int>(detail::as_int(*occ, w));
        }
        bool flag = true;
        if (const auto n = entry.find("null"); n != entry.end()) {
          if (!n->is_boolean()) throw ParseError(w + ": null must be a boolean");
          flag = n->get<bool>();
        }
        if (!side.face.valid() || side.face.index() >= mesh.face_count()) {
          throw ValidationError(w + ": unknown face " + std::to_string(side.face.value));
        }
        mesh = mesh.with_null(mesh.slot_of(side), flag);
      }
    }
    s.revisions.push_back(std::make_shared<const LabeledMesh>(std::move(mesh)));
    const auto rev = s.revisions.size() - 1;
    snapshot(s, rev);
    ordered_json out;
    out["revision"] = rev;
    return ok(out);
  }

  static HttpResponse strands(const Revision& rev) {
    auto doc = strand_report(*rev.mesh, trace(*rev.mesh));
    ordered_json out;
    out["revision"] = rev.number;
    for (auto& [k, v] : doc.items()) out[k] = v;
    return ok(out);
  }

  static HttpResponse report(const Revision& rev) {
    ordered_json out;
    out["revision"] = rev.number;
    const auto doc = analysis_report(*rev.mesh);
    for (const auto& [k, v] : doc.items()) out[k] = v;
    return ok(out);
  }

  HttpResponse geometry(const std::string& session, const Revision& rev,
                        const std::map<std::string, std::string>& query) {
    RealizationParams params;
    const auto real = [&](const char* key, double& target) {
      if (const auto it = query.find(key); it != query.end()) {
        try {
          target = std::stod(it->second);
        } catch (const std::exception&) {
          throw HttpError(400, std::string(key) + " must be a number");
        }
      }
    };
    real("inset", params.inset);
    real("radius", params.tube_radius);
    params.validate();
    const auto key = session + "/" + std::to_string(rev.number) + "/" + detail::fmt6(params.inset) + "/" +
                     detail::fmt6(params.tube_radius);
    {
      std::lock_guard lock(cache_mutex_);
      for (auto it = cache_.begin(); it != cache_.end(); ++it) {
        if (it->first == key) {
          cache_.splice(cache_.begin(), cache_, it);
          return {200, it->second};
        }
      }
    }
    const auto g = realize(*rev.mesh, params);
    ordered_json out;
    out["revision"] = rev.number;
    out["tube_radius"] = effective_tube_radius(g, params);
    out["components"] = geometry_json(g)["components"];
    auto body = out.dump();
    {
      std::lock_guard lock(cache_mutex_);
      cache_.emplace_front(key, body);
      while (cache_.size() > options_.cache_size) cache_.pop_back();
    }
    return {200, body};
  }

  void snapshot(const Session& s, std::size_t rev) const {
    if (options_.save_dir.empty()) return;
    std::filesystem::create_directories(options_.save_dir);
    write_text_file(options_.save_dir + "/session" + s.id + "_r" + std::to_string(rev) + ".lkm",
                    to_json(*s.revisions[rev]).dump(2) + "\n");
  }

  ServiceOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_id_ = 0;
  std::mutex cache_mutex_;
  std::list<std::pair<std::string, std::string>> cache_;
};

/// Adapts the service to an HTTP server with permissive CORS for local
/// browser clients. ui_dir, when set, is served at /.
inline void install_routes(httplib::Server& server, Service& service, const std::string& ui_dir = {}) {
  const auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const auto out = service.handle(req.method, req.path, query, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Post("/session", forward);
  server.Patch(R"(/session/[^/]+/labels)", forward);
  server.Get(R"(/session/[^/]+/(mesh|strands|geometry|report))", forward);
  if (!ui_dir.empty() && !server.set_mount_point("/", ui_dir)) {
    throw ValidationError("UI directory " + ui_dir + " does not exist");
  }
}

}  // namespace lk
