#pragma once

// Command-line front end. run() is the whole program minus main(), so the
// tests can drive it in-process.

#include "lk/design.hpp"
#include "lk/periodic.hpp"
#include "lk/service.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <ostream>

namespace lk::cli {

namespace detail {

inline std::int64_t parse_int(std::string_view text, const std::string& what) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ValidationError(what + ": '" + std::string(text) + "' is not an integer");
  }
  return v;
}

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (true) {
    const auto j = text.find(sep, i);
    out.emplace_back(text.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

inline std::vector<std::int64_t> parse_csv(std::string_view text, const std::string& what) {
  std::vector<std::int64_t> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_int(part, what));
  return out;
}

inline EdgeKey parse_edge_pair(std::string_view text, const std::string& what) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ValidationError(what + ": expected A,B");
  return EdgeKey::of(VertexId{parse_int(parts[0], what)}, VertexId{parse_int(parts[1], what)});
}

/// "A,B=T".
inline std::pair<EdgeKey, std::int64_t> parse_set(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ValidationError("--set: expected A,B=T, got '" + std::string(text) + "'");
  return {parse_edge_pair(text.substr(0, eq), "--set"), parse_int(text.substr(eq + 1), "--set")};
}

/// "FACE,A,B[,OCC]".
inline NullSide parse_null(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3 && parts.size() != 4) throw ValidationError("--null: expected FACE,A,B[,OCC]");
  NullSide side;
  side.face = FaceId{parse_int(parts[0], "--null")};
  side.edge = EdgeKey::of(VertexId{parse_int(parts[1], "--null")}, VertexId{parse_int(parts[2], "--null")});
  if (parts.size() == 4) side.occurrence = static_cast<int>(parse_int(parts[3], "--null"));
  return side;
}

/// "AxBxC", or "AxB" for planar lattices.
inline std::array<int, 3> parse_extent(std::string_view text) {
  const auto parts = split(text, 'x');
  if (parts.size() != 2 && parts.size() != 3) throw ValidationError("--extent: expected AxBxC");
  std::array<int, 3> out{1, 1, 1};
  for (std::size_t i = 0; i < parts.size(); ++i) out[i] = static_cast<int>(parse_int(parts[i], "--extent"));
  return out;
}

inline std::string box_string(const std::array<int, 3>& box, int dim) {
  std::string s = std::to_string(box[0]);
  for (int a = 1; a < dim; ++a) s += "x" + std::to_string(box[a]);
  return s;
}

inline std::string shift_string(const Shift& s, int dim) {
  std::string out = "(";
  for (int a = 0; a < dim; ++a) out += (a > 0 ? "," : "") + std::to_string(s[a]);
  return out + ")";
}

template <class Doc>
void emit_report(const Doc& doc, const std::string& path, std::ostream& out) {
  if (path.empty()) return;
  const auto text = doc.dump(2) + "\n";
  if (path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

}  // namespace detail

/// Everything the subcommands read. Label edits are kept as raw strings and
/// replayed in command-line order.
struct Options {
  std::string in, out, report, preset, generators, extent, ui, save_dir;
  std::string palette = "-2,-1,1,2";
  std::string predicate = "any";
  std::string group = "all";
  std::string edge;
  std::vector<std::string> set_all, set, nulls, class_twists, uniform, signs;
  std::uint64_t seed = 0;
  std::int64_t odd = 1, even = 0, multiple = 1;
  double inset = RealizationParams{}.inset;
  double tube_radius = 0.0;
  int port = 7431;
  std::string host = "127.0.0.1";
  bool trace = false, lines = false, negate = false;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Cyclic-twist strand design on polygonal meshes", "lk"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lk 1.0");

    auto* validate = app.add_subcommand("validate", "Check an LKM document");
    input(validate);
    report(validate);

    auto* analyze = app.add_subcommand("analyze", "Components, lengths, linking matrix and warnings");
    labelled(analyze);
    realization(analyze);

    auto* trace = app.add_subcommand("trace", "Trace strands of a labelled mesh or periodic document");
    labelled(trace);
    periodic_labels(trace);
    trace->add_option("--out", opt_.out, "Write the labelled LKM");

    auto* knot = app.add_subcommand("design-knot", "Single-strand labelling from a random dual spanning tree");
    labelled(knot);
    knot->add_option("--seed", opt_.seed, "Spanning tree seed");
    knot->add_option("--odd", opt_.odd, "Twist on tree edges (odd)");
    knot->add_option("--even", opt_.even, "Twist on the other edges (even)");
    design_outputs(knot);

    auto* mail = app.add_subcommand("design-chainmail", "Every face its own loop, linked to its neighbours");
    labelled(mail);
    repeatable(mail->add_option("--sign", opt_.signs, "Per-edge sign A,B=+1|-1 (repeatable)"));
    mail->add_flag("--negate", opt_.negate, "Use -1 on every edge without an explicit --sign");
    design_outputs(mail);

    auto* tight = app.add_subcommand("tighten", "Add a multiple of K to one edge; strands are unchanged");
    labelled(tight);
    tight->add_option("--edge", opt_.edge, "Edge A,B")->required();
    tight->add_option("--multiple", opt_.multiple, "Multiple of K to add");
    design_outputs(tight);

    auto* orbits = app.add_subcommand("orbits", "Symmetry classes of labellings");
    labelled(orbits);
    orbits->add_option("--palette", opt_.palette, "Twist values, comma separated");
    orbits->add_option("--predicate", opt_.predicate, "any | single-cycle");
    orbits->add_option("--group", opt_.group, "rotations | full | full_with_negation | all");

    auto* lattice = app.add_subcommand("lattice", "Periodic honeycomb from a preset or periodic document");
    periodic_input(lattice);
    lattice->add_flag("--trace", opt_.trace, "Trace strands and print the count");
    lattice->add_option("--out", opt_.out, "Write the periodic LKM");
    report(lattice);

    auto* tile = app.add_subcommand("tile", "Finite block of a periodic design as a plain LKM");
    periodic_input(tile);
    tile->add_option("--extent", opt_.extent, "Cells per axis, AxBxC")->required();
    tile->add_option("--out", opt_.out, "Write the tiled LKM");
    tile->add_flag("--trace", opt_.trace, "Trace strands of the block");
    report(tile);

    auto* realize = app.add_subcommand("realize", "Strand curves and tubes as OBJ");
    labelled(realize);
    realization(realize);
    realize->add_option("--out", opt_.out, "OBJ path; the .mtl is written next to it");
    realize->add_flag("--lines", opt_.lines, "Export centre lines instead of tubes");

    auto* serve = app.add_subcommand("serve", "HTTP service for the interactive viewer");
    serve->add_option("--in", opt_.in, "Open a session for this LKM at start");
    serve->add_option("--port", opt_.port, "TCP port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", opt_.host, "Bind address");
    serve->add_option("--save-dir", opt_.save_dir, "Write an LKM snapshot per revision");
    serve->add_option("--ui", opt_.ui, "Static viewer bundle served at /");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::CallForVersion& e) {
      out_ << e.what() << "\n";
      return 0;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return 2;
    }

    try {
      auto* sub = app.get_subcommands().front();
      const auto name = sub->get_name();
      order_ = sub->parse_order();
      if (name == "validate") return cmd_validate();
      if (name == "analyze") return cmd_analyze();
      if (name == "trace") return cmd_trace();
      if (name == "design-knot") return cmd_knot();
      if (name == "design-chainmail") return cmd_chainmail();
      if (name == "tighten") return cmd_tighten();
      if (name == "orbits") return cmd_orbits();
      if (name == "lattice") return cmd_lattice();
      if (name == "tile") return cmd_tile();
      if (name == "realize") return cmd_realize();
      if (name == "serve") return cmd_serve();
      throw std::logic_error("unhandled subcommand " + name);
    } catch (const ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return 2;
    } catch (const ValidationError& e) {
      err_ << "error: " << e.what() << "\n";
      return 2;
    } catch (const PreconditionError& e) {
      err_ << "error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err_ << "internal error: " << e.what() << "\n";
      return 1;
    }
  }

 private:
  // One value per occurrence, every occurrence kept.
  static void repeatable(CLI::Option* o) { o->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll); }

  void input(CLI::App* sub) { sub->add_option("--in", opt_.in, "Input LKM document")->required(); }

  void report(CLI::App* sub) { sub->add_option("--report", opt_.report, "Write a JSON report ('-' for stdout)"); }

  void labelled(CLI::App* sub) {
    input(sub);
    report(sub);
    repeatable(sub->add_option("--set-all", opt_.set_all, "Twist every edge"));
    repeatable(sub->add_option("--set", opt_.set, "Twist one edge, A,B=T (repeatable)"));
    repeatable(sub->add_option("--null", opt_.nulls, "Null side FACE,A,B[,OCC] (repeatable)"));
  }

  void periodic_labels(CLI::App* sub) {
    repeatable(sub->add_option("--class-twists", opt_.class_twists, "Twists per edge class, comma separated"));
    repeatable(sub->add_option("--uniform", opt_.uniform, "Same twist on every edge class"));
  }

  void periodic_input(CLI::App* sub) {
    sub->add_option("--in", opt_.in, "Periodic LKM document");
    sub->add_option("--preset", opt_.preset, "sq | hex | cP | hP | oF | cF | cI");
    sub->add_option("--generators", opt_.generators, "JSON list of Cartesian generator points");
    periodic_labels(sub);
  }

  void realization(CLI::App* sub) {
    sub->add_option("--inset", opt_.inset, "Strand inset toward face centroids");
    sub->add_option("--tube-radius", opt_.tube_radius, "Tube radius (0 picks one from the edge lengths)");
  }

  void design_outputs(CLI::App* sub) {
    sub->add_option("--out", opt_.out, "Write the labelled LKM");
    sub->add_flag("--trace", opt_.trace, "Trace the result and print the count");
  }

  // Replays the label flags of the active subcommand in command-line order.
  // Each option occurrence appears once in the parse order.
  template <class Fn>
  void replay(const std::vector<std::pair<std::string, const std::vector<std::string>*>>& flags, Fn&& apply) const {
    std::map<std::string, std::size_t> used;
    for (const auto* o : order_) {
      for (const auto& [name, values] : flags) {
        if (o->get_name() != name) continue;
        const auto i = used[name]++;
        if (i < values->size()) apply(name, (*values)[i]);
      }
    }
  }

  json load() const { return read_json_file(opt_.in); }

  LabeledMesh labelled_mesh(const json& doc) const {
    auto mesh = parse_mesh(doc);
    replay({{"--set-all", &opt_.set_all}, {"--set", &opt_.set}, {"--null", &opt_.nulls}},
           [&](const std::string& name, const std::string& value) {
             if (name == "--set-all") {
               mesh = mesh.with_all_twists(detail::parse_int(value, "--set-all"));
             } else if (name == "--set") {
               const auto [edge, t] = detail::parse_set(value);
               if (!mesh.find_edge(edge)) throw ValidationError("--set: unknown edge " + to_string(edge));
               mesh = mesh.with_twist(edge, t);
             } else {
               const auto side = detail::parse_null(value);
               if (!side.face.valid() || side.face.index() >= mesh.face_count()) {
                 throw ValidationError("--null: unknown face " + std::to_string(side.face.value));
               }
               mesh = mesh.with_null(side);
             }
           });
    return mesh;
  }

  PeriodicMesh periodic_mesh(const json* doc) const {
    PeriodicMesh pm;
    if (doc != nullptr) {
      if (!opt_.preset.empty() || !opt_.generators.empty()) {
        throw ValidationError("--preset and --generators cannot be combined with --in");
      }
      pm = parse_periodic(*doc);
    } else {
      if (opt_.preset.empty()) throw ValidationError("either --in or --preset is required");
      std::vector<Vec3> gens{Vec3::Zero()};
      if (!opt_.generators.empty()) {
        const auto g = read_json_file(opt_.generators);
        const auto& list = g.is_object() ? lk::detail::require(g, "generators", opt_.generators) : g;
        if (!list.is_array() || list.empty()) throw ParseError(opt_.generators + ": expected a list of points");
        gens.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
          gens.push_back(lk::detail::parse_point(list[i], "generators[" + std::to_string(i) + "]"));
        }
      }
      pm = periodic_scaffold(lattice_preset(opt_.preset), gens);
    }
    replay({{"--uniform", &opt_.uniform}, {"--class-twists", &opt_.class_twists}},
           [&](const std::string& name, const std::string& value) {
             if (name == "--uniform") {
               pm = pm.with_uniform_twist(detail::parse_int(value, "--uniform"));
             } else {
               pm = pm.with_class_twists(detail::parse_csv(value, "--class-twists"));
             }
           });
    return pm;
  }

  PeriodicMesh periodic_from_flags() const {
    if (opt_.in.empty()) return periodic_mesh(nullptr);
    const auto doc = load();
    return periodic_mesh(&doc);
  }

  RealizationParams params() const {
    RealizationParams p;
    p.inset = opt_.inset;
    p.tube_radius = opt_.tube_radius;
    p.validate();
    return p;
  }

  void print_strands(const StrandSet& s) {
    out_ << "count " << s.component_count() << " (cycles " << s.cycle_count() << ", paths " << s.path_count()
         << ")\n";
    for (std::size_t c = 0; c < s.components.size(); ++c) {
      const auto& comp = s.components[c];
      out_ << "  strand " << c << ": " << (comp.closed() ? "cycle" : "path") << ", length " << comp.length() << "\n";
    }
  }

  void print_periodic(const PeriodicMesh& pm, const PeriodicStrandSet& s) {
    using K = PeriodicComponent::Kind;
    out_ << "count " << s.component_count() << " (loops " << s.count(K::Loop) << ", threads " << s.count(K::Thread)
         << ", paths " << s.count(K::Path) << ")\n";
    for (std::size_t c = 0; c < s.components.size(); ++c) {
      const auto& comp = s.components[c];
      out_ << "  strand " << c << ": " << to_string(comp.kind) << ", length " << comp.strand.length();
      if (comp.kind == K::Thread) out_ << ", period " << detail::shift_string(comp.closure, pm.dim());
      out_ << ", repeat box " << detail::box_string(comp.repeat_box, pm.dim()) << "\n";
    }
    const auto dirs = s.direction_classes();
    if (!dirs.empty()) {
      out_ << "direction classes " << dirs.size() << ":";
      for (const auto& d : dirs) out_ << " " << detail::shift_string(d, pm.dim());
      out_ << "\n";
    }
    out_ << "repeat box " << detail::box_string(s.repeat_box(), pm.dim()) << "\n";
  }

  void write_mesh(const LabeledMesh& mesh) const {
    if (!opt_.out.empty()) write_text_file(opt_.out, to_json(mesh).dump(2) + "\n");
  }

  int cmd_validate() {
    const auto doc = load();
    ordered_json rep;
    bool ok = false;
    if (doc.is_object() && doc.contains("periodic")) {
      try {
        const auto pm = parse_periodic(doc);
        const auto classes = edge_classes(pm);
        std::map<int, int> hist;
        for (const auto k : classes.degree) ++hist[k];
        rep["ok"] = true;
        rep["dim"] = pm.dim();
        rep["faces"] = pm.face_count();
        rep["edge_classes"] = classes.count();
        ordered_json h = ordered_json::object();
        for (const auto& [k, n] : hist) h[std::to_string(k)] = n;
        rep["edge_degree_histogram"] = std::move(h);
        ok = true;
      } catch (const Error& e) {
        rep["ok"] = false;
        rep["errors"] = ordered_json::array({e.what()});
      }
    } else {
      const auto v = validate_document(doc);
      rep = to_json(v);
      ok = v.ok();
    }
    out_ << (ok ? "ok" : "invalid") << "\n";
    if (rep.contains("errors")) {
      for (const auto& e : rep["errors"]) out_ << "  error: " << e.get<std::string>() << "\n";
    }
    if (rep.contains("warnings")) {
      for (const auto& w : rep["warnings"]) out_ << "  warning: " << w.get<std::string>() << "\n";
    }
    if (rep.contains("edge_degree_histogram")) {
      out_ << "edge degrees:";
      for (const auto& [k, n] : rep["edge_degree_histogram"].items()) out_ << " K=" << k << ":" << n.get<int>();
      out_ << "\n";
    }
    detail::emit_report(rep, opt_.report, out_);
    return ok ? 0 : 2;
  }

  int cmd_analyze() {
    const auto mesh = labelled_mesh(load());
    const auto rep = analysis_report(mesh, params());
    out_ << "count " << rep["count"].get<std::size_t>() << " (cycles " << rep["cycles"].get<std::size_t>()
         << ", paths " << rep["paths"].get<std::size_t>() << ")\n";
    out_ << "lengths " << rep["lengths"].dump() << "\n";
    if (rep["linking_matrix"].is_null()) {
      out_ << "linking matrix unavailable\n";
    } else {
      out_ << "linking matrix over components " << rep["closed_components"].dump() << "\n";
      for (const auto& row : rep["linking_matrix"]) out_ << "  " << row.dump() << "\n";
    }
    for (const auto& w : rep["warnings"]) out_ << "warning: " << w.get<std::string>() << "\n";
    detail::emit_report(rep, opt_.report, out_);
    return 0;
  }

  int cmd_trace() {
    const auto doc = load();
    if (doc.is_object() && doc.contains("periodic")) {
      if (!opt_.set_all.empty() || !opt_.set.empty() || !opt_.nulls.empty()) {
        throw ValidationError("periodic documents take --uniform or --class-twists");
      }
      const auto pm = periodic_mesh(&doc);
      const auto s = trace_periodic(pm);
      print_periodic(pm, s);
      if (!opt_.out.empty()) write_text_file(opt_.out, periodic_document(pm).dump(2) + "\n");
      detail::emit_report(periodic_report(pm, s), opt_.report, out_);
      return 0;
    }
    if (!opt_.uniform.empty() || !opt_.class_twists.empty()) {
      throw ValidationError("--uniform and --class-twists need a periodic document");
    }
    const auto mesh = labelled_mesh(doc);
    const auto s = trace(mesh);
    print_strands(s);
    for (const auto& w : mesh.label_warnings()) out_ << "warning: " << w << "\n";
    write_mesh(mesh);
    auto rep = strand_report(mesh, s);
    rep["cycles"] = s.cycle_count();
    rep["paths"] = s.path_count();
    detail::emit_report(rep, opt_.report, out_);
    return 0;
  }

  int finish_design(const LabeledMesh& mesh, const TwistAssignment& assignment, ordered_json rep) {
    const auto result = mesh.with_twists(assignment);
    write_mesh(result);
    rep["assignment"] = twists_json(assignment);
    if (opt_.trace) {
      const auto s = trace(result);
      print_strands(s);
      rep["count"] = s.component_count();
    }
    detail::emit_report(rep, opt_.report, out_);
    return 0;
  }

  int cmd_knot() {
    const auto mesh = labelled_mesh(load());
    const auto assignment = spanning_tree_knot(mesh, opt_.seed, opt_.odd, opt_.even);
    std::size_t tree = 0;
    for (const auto& [e, t] : assignment) tree += mod(t, 2) == 1 ? 1 : 0;
    out_ << "spanning tree of " << tree << " dual links over " << mesh.face_count() << " faces (seed " << opt_.seed
         << ")\n";
    ordered_json rep;
    rep["seed"] = opt_.seed;
    rep["tree_edges"] = tree;
    return finish_design(mesh, assignment, std::move(rep));
  }

  int cmd_chainmail() {
    const auto mesh = labelled_mesh(load());
    std::map<EdgeKey, int> signs;
    if (opt_.negate) {
      for (const auto& e : mesh.edges()) signs[e] = -1;
    }
    for (const auto& s : opt_.signs) {
      const auto [edge, v] = detail::parse_set(s);
      if (!mesh.find_edge(edge)) throw ValidationError("--sign: unknown edge " + to_string(edge));
      signs[edge] = static_cast<int>(v);
    }
    const auto assignment = chainmail(mesh, signs);
    out_ << "chainmail over " << mesh.face_count() << " faces\n";
    return finish_design(mesh, assignment, ordered_json::object());
  }

  int cmd_tighten() {
    const auto mesh = labelled_mesh(load());
    const auto edge = detail::parse_edge_pair(opt_.edge, "--edge");
    if (!mesh.find_edge(edge)) throw ValidationError("--edge: unknown edge " + to_string(edge));
    const auto before = mesh.twist(edge);
    const auto assignment = tighten(mesh, mesh.twists(), edge, opt_.multiple);
    out_ << "edge " << to_string(edge) << " K=" << mesh.degree(edge) << ": t " << before << " -> "
         << assignment.at(edge) << "\n";
    ordered_json rep;
    rep["edge"] = lk::detail::edge_json(edge);
    rep["k"] = mesh.degree(edge);
    rep["before"] = before;
    rep["after"] = assignment.at(edge);
    return finish_design(mesh, assignment, std::move(rep));
  }

  int cmd_orbits() {
    const auto mesh = labelled_mesh(load());
    const auto palette = detail::parse_csv(opt_.palette, "--palette");
    StrandPredicate pred;
    if (opt_.predicate == "single-cycle") {
      pred = single_cycle;
    } else if (opt_.predicate != "any") {
      throw ValidationError("--predicate must be any or single-cycle");
    }
    std::vector<GroupMode> modes;
    if (opt_.group == "all") {
      modes = {GroupMode::Rotations, GroupMode::Full, GroupMode::FullWithNegation};
    } else {
      modes = {parse_group_mode(opt_.group)};
    }
    ordered_json rep;
    rep["palette"] = palette;
    rep["predicate"] = opt_.predicate;
    auto groups = ordered_json::array();
    for (const auto mode : modes) {
      const auto r = enumerate_orbits(mesh, palette, pred, mode);
      out_ << to_string(mode) << ": " << r.orbit_count << " orbits (group order " << r.group_order << ", accepted "
           << r.accepted << " of " << r.labelings << ", Burnside " << lk::detail::fmt6(r.burnside_count) << ")\n";
      ordered_json g;
      g["group"] = to_string(mode);
      g["group_order"] = r.group_order;
      g["labelings"] = r.labelings;
      g["accepted"] = r.accepted;
      g["orbits"] = r.orbit_count;
      g["burnside"] = r.burnside_count;
      groups.push_back(std::move(g));
    }
    rep["groups"] = std::move(groups);
    detail::emit_report(rep, opt_.report, out_);
    return 0;
  }

  int cmd_lattice() {
    const auto pm = periodic_from_flags();
    const auto classes = edge_classes(pm);
    out_ << "dimension " << pm.dim() << ", " << pm.face_count() << " face classes, " << classes.count()
         << " edge classes\n";
    for (std::size_t e = 0; e < classes.count(); ++e) {
      const auto& k = classes.representatives[e];
      out_ << "  class " << e << ": [" << k.lo.value << "," << k.hi.value << "] shift "
           << detail::shift_string(k.delta, pm.dim()) << ", K=" << classes.degree[e]
           << ", t=" << pm.labels().twist[e] << "\n";
    }
    ordered_json rep;
    rep["dim"] = pm.dim();
    rep["face_classes"] = pm.face_count();
    auto list = ordered_json::array();
    for (std::size_t e = 0; e < classes.count(); ++e) {
      const auto& k = classes.representatives[e];
      ordered_json entry;
      entry["edge"] = ordered_json::array({k.lo.value, k.hi.value});
      entry["shift"] = shift_json(k.delta, pm.dim());
      entry["k"] = classes.degree[e];
      entry["t"] = pm.labels().twist[e];
      list.push_back(std::move(entry));
    }
    rep["edge_classes"] = std::move(list);
    if (opt_.trace) {
      const auto s = trace_periodic(pm);
      print_periodic(pm, s);
      rep["strands"] = periodic_report(pm, s);
    }
    if (!opt_.out.empty()) write_text_file(opt_.out, periodic_document(pm).dump(2) + "\n");
    detail::emit_report(rep, opt_.report, out_);
    return 0;
  }

  int cmd_tile() {
    const auto pm = periodic_from_flags();
    const auto block = tile(pm, detail::parse_extent(opt_.extent));
    const auto& mesh = block.mesh;
    out_ << "tiled " << mesh.vertex_count() << " vertices, " << mesh.face_count() << " faces, " << mesh.edge_count()
         << " edges\n";
    write_mesh(mesh);
    ordered_json rep;
    rep["vertices"] = mesh.vertex_count();
    rep["faces"] = mesh.face_count();
    rep["edges"] = mesh.edge_count();
    if (opt_.trace) {
      const auto s = trace(mesh);
      print_strands(s);
      rep["strands"] = strand_report(mesh, s);
    }
    detail::emit_report(rep, opt_.report, out_);
    return 0;
  }

  int cmd_realize() {
    const auto mesh = labelled_mesh(load());
    const auto p = params();
    const auto g = realize(mesh, p);
    std::vector<std::string> warnings;
    const double radius = effective_tube_radius(g, p, &warnings);
    out_ << g.components.size() << " strands, tube radius " << lk::detail::fmt6(radius) << ", min separation "
         << lk::detail::fmt6(g.components.size() >= 2 ? min_separation(g) : 0.0) << "\n";
    if (!opt_.out.empty()) {
      if (opt_.lines) {
        export_obj(g, nullptr, opt_.out);
      } else {
        std::vector<TriangleMesh> tubes;
        for (const auto& c : g.components) tubes.push_back(tube(c, radius, p.tube_sides));
        export_obj(g, &tubes, opt_.out);
      }
    }
    ordered_json rep;
    rep["tube_radius"] = radius;
    rep["warnings"] = warnings;
    rep["components"] = geometry_json(g)["components"];
    detail::emit_report(rep, opt_.report, out_);
    return 0;
  }

  int cmd_serve() {
    Service service({opt_.save_dir, 32});
    if (!opt_.in.empty()) out_ << "session " << service.open(parse_mesh(load())) << " opened for " << opt_.in << "\n";
    httplib::Server server;
    install_routes(server, service, opt_.ui);
    int port = opt_.port;
    if (port == 0) {
      port = server.bind_to_any_port(opt_.host);
    } else if (!server.bind_to_port(opt_.host, port)) {
      port = -1;
    }
    if (port < 0) throw Error("cannot bind " + opt_.host + ":" + std::to_string(opt_.port));
    out_ << "listening on http://" << opt_.host << ":" << port << std::endl;
    if (!server.listen_after_bind()) throw Error("server stopped with an error");
    return 0;
  }

  std::ostream& out_;
  std::ostream& err_;
  Options opt_;
  std::vector<CLI::Option*> order_;
};

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(args);
}

}  // namespace lk::cli
