#pragma once

#include "lk/lkm.hpp"
#include "lk/topology.hpp"

#include <numeric>

namespace lk {

/// Slot of the same edge at radial index (i + t) mod K.
[[nodiscard]] inline SlotId transfer(const LabeledMesh& mesh, SlotId s) {
  return transfer(mesh.complex(), mesh.labels(), s);
}

/// Next passage along the strand, or nullopt at a null cut.
[[nodiscard]] inline std::optional<Passage> successor(const LabeledMesh& mesh, Passage p) {
  return next_passage(mesh.complex(), mesh.labels(), p);
}

/// Successor of the passage that leaves s low to high.
[[nodiscard]] inline std::optional<SlotId> successor(const LabeledMesh& mesh, SlotId s) {
  const auto n = successor(mesh, Passage{s, true});
  if (!n) return std::nullopt;
  return n->slot;
}

[[nodiscard]] inline StrandSet trace(const LabeledMesh& mesh) { return trace_strands(mesh.complex(), mesh.labels()); }

[[nodiscard]] inline std::size_t component_count(const LabeledMesh& mesh) { return trace(mesh).component_count(); }

struct OrbitLaw {
  std::int64_t k = 1;
  std::int64_t t = 0;
  std::int64_t orbit_count = 1;
  std::int64_t orbit_length = 1;
};

/// Orbits of i -> i + t on Z_K: gcd(K, t mod K) of them, with gcd(K, 0) = K.
[[nodiscard]] inline OrbitLaw orbit_law(std::int64_t k, std::int64_t t) {
  if (k < 1) throw PreconditionError("orbit_law needs K >= 1");
  const auto count = std::gcd(k, mod(t, k));
  return {k, t, count, k / count};
}

/// Strand report: one entry per component with its passages' low-end slots
/// as [face, position] pairs.
[[nodiscard]] inline ordered_json strand_report(const LabeledMesh& mesh, const StrandSet& strands) {
  ordered_json doc;
  auto comps = ordered_json::array();
  for (const auto& c : strands.components) {
    ordered_json entry;
    entry["kind"] = c.closed() ? "cycle" : "path";
    auto slots = ordered_json::array();
    for (const auto& p : c.passages) {
      const auto& rec = mesh.complex().slot(p.slot);
      slots.push_back(ordered_json::array({rec.face.value, rec.position}));
    }
    entry["slots"] = std::move(slots);
    entry["length"] = c.length();
    comps.push_back(std::move(entry));
  }
  doc["components"] = std::move(comps);
  doc["count"] = strands.component_count();
  return doc;
}

}  // namespace lk
