#pragma once

// LKM documents: parsing, validation, and serialization of labeled meshes.

#include "lk/mesh.hpp"

#include <json.hpp>

#include <fstream>

namespace lk {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace detail {

inline const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing \"" + key + "\"");
  return *it;
}

inline std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<std::int64_t>();
}

inline double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

inline EdgeKey parse_edge(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw ParseError(where + ": edge must be [a,b]");
  const auto a = as_int(v[0], where);
  const auto b = as_int(v[1], where);
  if (a >= b) throw ValidationError(where + ": edge must satisfy a < b");
  return {VertexId{a}, VertexId{b}};
}

inline json edge_json(const EdgeKey& e) { return json::array({e.a.value, e.b.value}); }

}  // namespace detail

/// Parsed but unvalidated LKM content.
struct MeshDocument {
  std::vector<Vec3> vertices;
  std::vector<std::vector<VertexId>> faces;
  std::vector<std::pair<EdgeKey, std::int64_t>> twists;
  std::vector<NullSide> null_sides;
  std::optional<json> periodic;
};

inline std::vector<std::pair<EdgeKey, std::int64_t>> parse_twist_list(const json& list, const std::string& where) {
  if (!list.is_array()) throw ParseError(where + " must be an array");
  std::vector<std::pair<EdgeKey, std::int64_t>> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto w = where + "[" + std::to_string(i) + "]";
    if (!list[i].is_object()) throw ParseError(w + ": expected an object");
    out.emplace_back(detail::parse_edge(detail::require(list[i], "edge", w), w),
                     detail::as_int(detail::require(list[i], "t", w), w));
  }
  return out;
}

inline MeshDocument parse_document(const json& doc) {
  if (!doc.is_object()) throw ParseError("LKM document must be an object");
  MeshDocument out;

  const auto& verts = detail::require(doc, "vertices", "document");
  if (!verts.is_array()) throw ParseError("vertices must be an array");
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const auto w = "vertices[" + std::to_string(i) + "]";
    const auto& v = verts[i];
    if (!v.is_array() || v.size() < 2 || v.size() > 3) throw ParseError(w + ": expected [x,y,z]");
    Vec3 p = Vec3::Zero();
    for (std::size_t c = 0; c < v.size(); ++c) p[static_cast<Eigen::Index>(c)] = detail::as_real(v[c], w);
    out.vertices.push_back(p);
  }

  const auto& faces = detail::require(doc, "faces", "document");
  if (!faces.is_array()) throw ParseError("faces must be an array");
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto w = "faces[" + std::to_string(f) + "]";
    if (!faces[f].is_array()) throw ParseError(w + ": expected an array of vertex ids");
    std::vector<VertexId> cycle;
    for (const auto& v : faces[f]) cycle.emplace_back(detail::as_int(v, w));
    out.faces.push_back(std::move(cycle));
  }

  if (const auto it = doc.find("twists"); it != doc.end()) out.twists = parse_twist_list(*it, "twists");

  if (const auto it = doc.find("null_sides"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("null_sides must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto w = "null_sides[" + std::to_string(i) + "]";
      const auto& entry = (*it)[i];
      if (!entry.is_object()) throw ParseError(w + ": expected an object");
      NullSide side;
      side.face = FaceId{detail::as_int(detail::require(entry, "face", w), w)};
      side.edge = detail::parse_edge(detail::require(entry, "edge", w), w);
      if (const auto occ = entry.find("occurrence"); occ != entry.end()) {
        side.occurrence = static_cast<int>(detail::as_int(*occ, w));
      }
      out.null_sides.push_back(side);
    }
  }

  if (const auto it = doc.find("periodic"); it != doc.end() && !it->is_null()) out.periodic = *it;
  return out;
}

/// Applies a twist list. Rejects unknown edges and duplicate entries.
inline LabeledMesh apply_twists(const LabeledMesh& mesh, const std::vector<std::pair<EdgeKey, std::int64_t>>& twists) {
  std::set<EdgeKey> seen;
  TwistAssignment assignment;
  for (const auto& [edge, t] : twists) {
    if (!seen.insert(edge).second) throw ValidationError("duplicate twist for edge " + to_string(edge));
    if (!mesh.find_edge(edge)) throw ValidationError("twist on nonexistent edge " + to_string(edge));
    assignment[edge] = t;
  }
  return mesh.with_twists(assignment);
}

inline LabeledMesh build_mesh(const MeshDocument& doc) {
  auto mesh = LabeledMesh::build(doc.vertices, doc.faces);
  mesh = apply_twists(mesh, doc.twists);
  for (const auto& side : doc.null_sides) mesh = mesh.with_null(side);
  return mesh;
}

inline LabeledMesh parse_mesh(const json& doc) { return build_mesh(parse_document(doc)); }

inline ordered_json twists_json(const TwistAssignment& assignment) {
  auto list = ordered_json::array();
  for (const auto& [edge, t] : assignment) {
    ordered_json entry;
    entry["edge"] = detail::edge_json(edge);
    entry["t"] = t;
    list.push_back(std::move(entry));
  }
  return list;
}

/// TwistAssignment document, mergeable into an LKM file.
inline ordered_json assignment_document(const TwistAssignment& assignment) {
  ordered_json doc;
  doc["twists"] = twists_json(assignment);
  return doc;
}

inline TwistAssignment parse_assignment(const json& doc) {
  const auto list = parse_twist_list(detail::require(doc, "twists", "assignment"), "twists");
  TwistAssignment out;
  for (const auto& [edge, t] : list) {
    if (!out.emplace(edge, t).second) throw ValidationError("duplicate twist for edge " + to_string(edge));
  }
  return out;
}

/// Serializes combinatorics, non-zero twists and null sides.
inline ordered_json to_json(const LabeledMesh& mesh, const std::optional<json>& periodic = std::nullopt) {
  ordered_json doc;
  auto verts = ordered_json::array();
  for (const auto& p : mesh.vertices()) verts.push_back(ordered_json::array({p.x(), p.y(), p.z()}));
  doc["vertices"] = std::move(verts);
  auto faces = ordered_json::array();
  for (const auto& face : mesh.faces()) {
    auto cycle = ordered_json::array();
    for (const auto v : face) cycle.push_back(v.value);
    faces.push_back(std::move(cycle));
  }
  doc["faces"] = std::move(faces);
  doc["twists"] = twists_json(mesh.twists());
  auto nulls = ordered_json::array();
  for (const auto& side : mesh.null_sides()) {
    ordered_json entry;
    entry["face"] = side.face.value;
    entry["edge"] = detail::edge_json(side.edge);
    entry["occurrence"] = side.occurrence;
    nulls.push_back(std::move(entry));
  }
  doc["null_sides"] = std::move(nulls);
  if (periodic) doc["periodic"] = ordered_json::parse(periodic->dump());
  return doc;
}

inline ordered_json to_json(const ValidationReport& report) {
  ordered_json doc;
  doc["ok"] = report.ok();
  doc["errors"] = report.errors;
  doc["warnings"] = report.warnings;
  ordered_json hist = ordered_json::object();
  for (const auto& [k, n] : report.edge_degree_histogram) hist[std::to_string(k)] = n;
  doc["edge_degree_histogram"] = std::move(hist);
  doc["edge_connected_components"] = report.edge_connected_components;
  doc["vertex_connected_components"] = report.vertex_connected_components;
  return doc;
}

/// Parses and validates without throwing; problems land in errors.
inline ValidationReport validate_document(const json& doc) {
  try {
    return connectivity_report(parse_mesh(doc));
  } catch (const Error& err) {
    ValidationReport report;
    report.errors.emplace_back(err.what());
    return report;
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw ParseError(path + ": " + err.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

}  // namespace lk
