#pragma once

// Combinatorial core shared by finite and periodic meshes: slots, radial
// orders, corner ports, and the strand walk.

#include "lk/core.hpp"

#include <optional>
#include <span>

namespace lk {

enum class End : std::uint8_t { Low = 0, High = 1 };

/// A slot's corner at one endpoint of its edge.
struct Port {
  SlotId slot;
  End end = End::Low;

  friend bool operator==(const Port&, const Port&) = default;
};

/// The twisted piece of strand that leaves the slot's low-end station and
/// arrives at the high end, t stations further around the edge. forward is
/// the low-to-high direction of travel.
struct Passage {
  SlotId slot;
  bool forward = true;

  [[nodiscard]] Passage reversed() const { return {slot, !forward}; }
  friend bool operator==(const Passage&, const Passage&) = default;
};

struct SlotRecord {
  FaceId face;
  int position = 0;      // k: the slot runs from face vertex k to k+1
  EdgeIndex edge;
  bool forward = true;   // the face walks its edge from low to high vertex
  int radial_index = 0;  // station i in Z_K around the edge
};

class SlotComplex {
 public:
  SlotComplex() = default;

  /// slots must be listed face-major with consecutive positions; radial[e]
  /// lists the slots of edge e in radial order. radial_index is filled in.
  SlotComplex(std::vector<SlotRecord> slots, std::vector<std::vector<SlotId>> radial)
      : slots_(std::move(slots)), radial_(std::move(radial)) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      const auto& rec = slots_[i];
      if (rec.position == 0) {
        if (rec.face.index() != face_offset_.size()) throw std::logic_error("slots must be face-major");
        face_offset_.push_back(static_cast<std::int32_t>(i));
      } else if (i == 0 || slots_[i - 1].face != rec.face || slots_[i - 1].position + 1 != rec.position) {
        throw std::logic_error("slots must be face-major");
      }
    }
    face_offset_.push_back(static_cast<std::int32_t>(slots_.size()));

    for (std::size_t e = 0; e < radial_.size(); ++e) {
      for (std::size_t i = 0; i < radial_[e].size(); ++i) {
        auto& rec = slots_[radial_[e][i].index()];
        rec.radial_index = static_cast<int>(i);
        if (rec.edge.index() != e) throw std::logic_error("radial order lists a foreign slot");
      }
    }

    corner_.assign(2 * slots_.size(), -1);
    for (std::size_t f = 0; f + 1 < face_offset_.size(); ++f) {
      const auto begin = static_cast<std::size_t>(face_offset_[f]);
      const auto n = static_cast<std::size_t>(face_offset_[f + 1]) - begin;
      for (std::size_t k = 0; k < n; ++k) {
        const SlotId a{begin + k};
        const SlotId b{begin + (k + 1) % n};
        const auto pa = encode(end_port(a));
        const auto pb = encode(start_port(b));
        corner_[pa] = static_cast<std::int32_t>(pb);
        corner_[pb] = static_cast<std::int32_t>(pa);
      }
    }
  }

  [[nodiscard]] std::size_t slot_count() const { return slots_.size(); }
  [[nodiscard]] std::size_t edge_count() const { return radial_.size(); }
  [[nodiscard]] std::size_t face_count() const { return face_offset_.empty() ? 0 : face_offset_.size() - 1; }

  [[nodiscard]] const SlotRecord& slot(SlotId s) const { return slots_[s.index()]; }
  [[nodiscard]] std::span<const SlotRecord> slots() const { return slots_; }
  [[nodiscard]] std::span<const SlotId> radial(EdgeIndex e) const { return radial_[e.index()]; }
  [[nodiscard]] int degree(EdgeIndex e) const { return static_cast<int>(radial_[e.index()].size()); }

  [[nodiscard]] int face_size(FaceId f) const {
    return face_offset_[f.index() + 1] - face_offset_[f.index()];
  }
  [[nodiscard]] SlotId face_slot(FaceId f, int k) const {
    return SlotId{face_offset_[f.index()] + k};
  }

  /// Station (i + shift) mod K of the slot's edge.
  [[nodiscard]] SlotId rotate(SlotId s, std::int64_t shift) const {
    const auto& rec = slots_[s.index()];
    const auto& order = radial_[rec.edge.index()];
    const auto k = static_cast<std::int64_t>(order.size());
    return order[static_cast<std::size_t>(mod(rec.radial_index + shift, k))];
  }

  [[nodiscard]] Port start_port(SlotId s) const {
    return {s, slots_[s.index()].forward ? End::Low : End::High};
  }
  [[nodiscard]] Port end_port(SlotId s) const {
    return {s, slots_[s.index()].forward ? End::High : End::Low};
  }

  /// The port joined to p by a face corner.
  [[nodiscard]] Port corner(Port p) const { return decode(static_cast<std::size_t>(corner_[encode(p)])); }

 private:
  static std::size_t encode(Port p) { return 2 * p.slot.index() + static_cast<std::size_t>(p.end); }
  static Port decode(std::size_t x) { return {SlotId{x / 2}, static_cast<End>(x % 2)}; }

  std::vector<SlotRecord> slots_;
  std::vector<std::vector<SlotId>> radial_;
  std::vector<std::int32_t> face_offset_;
  std::vector<std::int32_t> corner_;
};

/// Twist per edge and null flag per slot.
struct Labels {
  std::vector<std::int64_t> twist;
  std::vector<char> null;

  static Labels zero(const SlotComplex& cx) {
    return {std::vector<std::int64_t>(cx.edge_count(), 0), std::vector<char>(cx.slot_count(), 0)};
  }
};

/// Slot reached from s by the edge's cyclic shift i -> i + t (mod K).
[[nodiscard]] inline SlotId transfer(const SlotComplex& cx, const Labels& labels, SlotId s) {
  return cx.rotate(s, labels.twist[cx.slot(s).edge.index()]);
}

/// Port where the passage ends.
[[nodiscard]] inline Port exit_port(const SlotComplex& cx, const Labels& labels, Passage p) {
  if (p.forward) return {transfer(cx, labels, p.slot), End::High};
  return {p.slot, End::Low};
}

/// Port where the passage begins.
[[nodiscard]] inline Port entry_port(const SlotComplex& cx, const Labels& labels, Passage p) {
  return exit_port(cx, labels, p.reversed());
}

/// The passage that starts at port q.
[[nodiscard]] inline Passage passage_from(const SlotComplex& cx, const Labels& labels, Port q) {
  if (q.end == End::Low) return {q.slot, true};
  const auto& rec = cx.slot(q.slot);
  return {cx.rotate(q.slot, -labels.twist[rec.edge.index()]), false};
}

/// Next passage along the strand, or nullopt where a null slot cuts it.
[[nodiscard]] inline std::optional<Passage> next_passage(const SlotComplex& cx, const Labels& labels,
                                                         Passage p) {
  const Passage n = passage_from(cx, labels, cx.corner(exit_port(cx, labels, p)));
  if (labels.null[n.slot.index()] != 0) return std::nullopt;
  return n;
}

[[nodiscard]] inline std::optional<Passage> previous_passage(const SlotComplex& cx, const Labels& labels,
                                                             Passage p) {
  auto n = next_passage(cx, labels, p.reversed());
  if (!n) return std::nullopt;
  return n->reversed();
}

struct StrandComponent {
  enum class Kind { Cycle, Path };
  Kind kind = Kind::Cycle;
  std::vector<Passage> passages;

  [[nodiscard]] bool closed() const { return kind == Kind::Cycle; }
  [[nodiscard]] std::size_t length() const { return passages.size(); }
};

/// Partition of the non-null slots into closed cycles and null-cut paths.
/// Components are ordered by their minimal slot id.
struct StrandSet {
  std::vector<StrandComponent> components;

  [[nodiscard]] std::size_t component_count() const { return components.size(); }
  [[nodiscard]] std::size_t cycle_count() const {
    return static_cast<std::size_t>(std::count_if(components.begin(), components.end(),
                                                  [](const auto& c) { return c.closed(); }));
  }
  [[nodiscard]] std::size_t path_count() const { return component_count() - cycle_count(); }

  /// Component index per slot (-1 for null slots).
  [[nodiscard]] std::vector<int> slot_partition(std::size_t slot_count) const {
    std::vector<int> part(slot_count, -1);
    for (std::size_t c = 0; c < components.size(); ++c) {
      for (const auto& p : components[c].passages) part[p.slot.index()] = static_cast<int>(c);
    }
    return part;
  }
};

/// Decomposes all non-null passages into strands. Each component starts at
/// its minimal slot travelling forward; paths start at their first passage.
[[nodiscard]] inline StrandSet trace_strands(const SlotComplex& cx, const Labels& labels) {
  StrandSet out;
  const auto n = cx.slot_count();
  std::vector<char> seen(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] != 0 || labels.null[i] != 0) continue;
    const Passage start{SlotId{i}, true};

    Passage begin = start;
    bool closed = true;
    for (std::size_t steps = 0;; ++steps) {
      auto prev = previous_passage(cx, labels, begin);
      if (!prev) {
        closed = false;
        break;
      }
      if (*prev == start) break;
      begin = *prev;
      if (steps > n) throw std::logic_error("strand walk did not terminate");
    }
    if (closed) begin = start;

    StrandComponent comp;
    comp.kind = closed ? StrandComponent::Kind::Cycle : StrandComponent::Kind::Path;
    std::optional<Passage> cur = begin;
    while (cur) {
      comp.passages.push_back(*cur);
      seen[cur->slot.index()] = 1;
      cur = next_passage(cx, labels, *cur);
      if (cur && *cur == begin) break;
      if (comp.passages.size() > n) throw std::logic_error("strand walk did not terminate");
    }
    out.components.push_back(std::move(comp));
  }
  return out;
}

}  // namespace lk
