#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "curvesplit/errors.hpp"
#include "curvesplit/geometry.hpp"
#include "curvesplit/json_io.hpp"
#include "curvesplit/resgraph.hpp"
#include "curvesplit/search.hpp"

using namespace curvesplit;

namespace {

constexpr const char* kSchemas = R"(JSON formats (every top-level document carries "schema_version": 1):

  diagram      {"crossings": [{"id": int, "slots": [arcEnd x4]}],
                "arcs": [{"id": int, "length": float}],
                "components": [[arc id, ...], ...], "genus": int?}
               arcEnd = {"arc": int, "end": "tail"|"head"}; slots are listed
               counterclockwise, slot k continues straight to slot k+2.
               A Gauss code string such as "O1+U1+" is accepted instead.
  event        {"kind": "R1_BIRTH"|"R1_DEATH"|"R2_BIRTH"|"R2_DEATH"|"R3",
                "site": {"darts": [{"arc": int, "reversed": bool}], "new_crossings": [int],
                         "new_arcs": [int], "new_length": float},
                "disc": {"boundary": [arcEnd], "crossings_before": [int],
                         "crossings_after": [int], "arcs": [int], "before": side, "after": side}?,
                "carry": [[arc, arc]]?, "arc_lengths": [{"arc": int, "length": float}]?,
                "provenance": {"frame": int, "x": float, "y": float}?}
               Deaths and R3 name a face by its dart cycle, births name host darts.
  script       {"initial": diagram, "events": [event], "bound": float?,
                "terminal_disc": bool, "m": int?}
  certificate  {"m": int, "path": [{"level": int, "resolution": bits, "curve": arc id}],
                "edges": [{"step": int, "pair": int, "bijection": [[loop, loop]]}],
                "terminal": {"kind": "DISC_CONTRACTION"|"LOCAL_CIRCLE", "case": str,
                             "degenerate": bool, "terminal_disc": bool, "evidence": {...}?},
                "length_audit": float, "bound": float?}
  frames       {"frames": [{"t": float, "curves": [[[x, y], ...], ...]}], "bound": float?,
                "m": int?, "events": [{"kind": str, "frame": int, "point": [x, y]}]?}

Resolution bits: character i is the smoothing of the i-th smallest crossing id
(0 = A, 1 = B). Steps are 1-based in all output.

Exit status: 0 success, 2 invalid input or resource limit, 3 invariant violation
or rejected certificate. Errors are reported on stderr as one JSON object.)";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("io", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("io", "cannot write " + path);
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void report(const Json& j) { std::cerr << j.dump() << "\n"; }

int fail(const Error& e) {
  const int code = e.is_invariant_violation() ? 3 : 2;
  Json j{{"error", e.code()}, {"message", e.what()}, {"exit", code}};
  if (const auto* s = dynamic_cast<const ScriptError*>(&e)) j["step"] = s->step();
  if (const auto* r = dynamic_cast<const ResourceError*>(&e)) {
    j["crossings"] = r->crossings();
    j["cap"] = r->cap();
  }
  report(j);
  return code;
}

const PolylineFrame& pick_frame(const FramesDocument& doc, int index) {
  const int n = static_cast<int>(doc.frames.size());
  if (index < 0) index += n;
  if (index < 0 || index >= n) {
    throw ValidationError("frame index " + std::to_string(index) + " out of range");
  }
  return doc.frames[static_cast<std::size_t>(index)];
}

std::vector<Polyline> smooth_with_auto_radius(const PolylineFrame& f, std::uint64_t mask,
                                              double radius, double tol) {
  const auto xs = frame_intersections(f, tol);
  if (radius <= 0) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = i + 1; j < xs.size(); ++j) gap = std::min(gap, norm(xs[i].point - xs[j].point));
    }
    radius = std::isfinite(gap) ? gap / 3 : 0.05;
    for (int tries = 0; tries < 20; ++tries, radius /= 2) {
      try {
        return smooth_frame(f, mask, radius, tol);
      } catch (const RadiusError&) {
      }
    }
  }
  return smooth_frame(f, mask, radius, tol);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resolution graphs and isotopy certificates for homotopies of closed curves"};
  app.footer(kSchemas);
  app.require_subcommand(1);
  app.fallthrough();
  std::string output;
  double tol = kDefaultTolerance;
  int cap = kDefaultCrossingCap;
  app.add_option("-o,--output", output, "Output file (default: stdout)");

  auto* gen = app.add_subcommand("generate", "Frames contracting the perturbed m-fold circle");
  int m = 3;
  double bound = 100.0;
  int steps = 200;
  bool no_finger = false;
  bool as_script = false;
  std::uint64_t seed = 1;
  gen->add_option("m", m, "Multiplicity (>= 2)")->required();
  gen->add_option("L", bound, "Length bound")->required();
  gen->add_option("steps", steps, "Number of frame intervals (with --script: padding moves)")->required();
  gen->add_flag("--no-finger", no_finger, "Omit the opening finger move");
  gen->add_flag("--script", as_script, "Emit a random combinatorial script instead of frames");
  gen->add_option("--seed", seed, "Seed for --script");

  auto* det = app.add_subcommand("detect", "Infer the move sequence of a frames file");
  std::string frames_path;
  std::optional<double> det_bound;
  det->add_option("frames", frames_path, "frames.json")->required();
  det->add_option("--bound", det_bound, "Length bound (default: the file's bound)");
  det->add_option("--tol", tol, "Genericity tolerance")->check(CLI::PositiveNumber);

  auto* graph = app.add_subcommand("graph", "Build the resolution graph of a script");
  std::string script_path;
  std::string mode = "lazy";
  graph->add_option("script", script_path, "script.json")->required();
  graph->add_option("--mode", mode, "full or lazy")->check(CLI::IsMember({"full", "lazy"}));
  graph->add_option("--cap", cap, "Crossing cap for full mode")->check(CLI::PositiveNumber);

  auto* cert = app.add_subcommand("certify", "Find an isotopy certificate for a script");
  cert->add_option("script", script_path, "script.json")->required();
  cert->add_option("--cap", cap, "Crossing cap")->check(CLI::PositiveNumber);

  auto* ver = app.add_subcommand("verify", "Check a certificate against a script");
  std::string cert_path;
  ver->add_option("script", script_path, "script.json")->required();
  ver->add_option("certificate", cert_path, "cert.json")->required();

  auto* render = app.add_subcommand("render", "Draw a frame or a smoothed state as SVG");
  std::string what;
  int index = 0;
  std::string bits;
  double radius = 0.0;
  bool svg = false;
  render->add_option("what", what, "frame or state")->required()->check(CLI::IsMember({"frame", "state"}));
  render->add_option("frames", frames_path, "frames.json")->required();
  render->add_option("--index", index, "Frame index (negative counts from the end)");
  render->add_option("--resolution", bits, "Smoothing bits for state (default: all A)");
  render->add_option("--radius", radius, "Surgery radius for state (default: automatic)");
  render->add_option("--tol", tol, "Genericity tolerance")->check(CLI::PositiveNumber);
  render->add_flag("--svg", svg, "SVG output (the only format)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report(Json{{"error", "usage"}, {"message", e.what()}, {"exit", 2}});
    return 2;
  }

  try {
    if (*gen) {
      if (as_script) {
        RandomScriptOptions opt;
        opt.padding = steps;
        opt.bound = bound;
        write_output(output, dump(to_json(random_contraction_script(m, seed, opt))));
      } else {
        write_output(output, dump(to_json(to_document(generate_contraction(m, bound, steps, !no_finger)))));
      }
    } else if (*det) {
      const FramesDocument doc = frames_from_json(parse_json(read_file(frames_path)));
      HomotopyScript s = detect_events(doc.frames, det_bound ? det_bound : doc.bound, tol);
      s.m = doc.m;
      write_output(output, dump(to_json(s)));
    } else if (*graph) {
      const HomotopyScript s = script_from_json(parse_json(read_file(script_path)));
      const Timeline t = resolve_script(s);
      const auto g = build_graph(t, find_v_star(t.slices[0], s.m.value_or(t.slices[0].crossing_count() + 1), cap),
                                 mode == "full" ? GraphMode::Full : GraphMode::Lazy, cap);
      write_output(output, export_edge_list(t, g));
    } else if (*cert) {
      const HomotopyScript s = script_from_json(parse_json(read_file(script_path)));
      const Timeline t = resolve_script(s);
      const Certificate c = find_certificate(s, cap);
      const auto rep = verify_certificate(s, c);
      if (!rep.accepted()) {
        throw InvariantViolation("emitted certificate fails verification: " + rep.failures.front().code +
                                 ": " + rep.failures.front().message);
      }
      write_output(output, dump(to_json(c, t)));
    } else if (*ver) {
      const HomotopyScript s = script_from_json(parse_json(read_file(script_path)));
      const Certificate c = certificate_from_json(parse_json(read_file(cert_path)));
      const auto rep = verify_certificate(s, c);
      Json failures = Json::array();
      for (const auto& f : rep.failures) failures.push_back({{"code", f.code}, {"message", f.message}});
      write_output(output, dump(Json{{"accepted", rep.accepted()}, {"failures", failures}}));
      if (!rep.accepted()) {
        report(Json{{"error", rep.failures.front().code},
                    {"message", rep.failures.front().message},
                    {"failures", failures},
                    {"exit", 3}});
        return 3;
      }
    } else if (*render) {
      const FramesDocument doc = frames_from_json(parse_json(read_file(frames_path)));
      const PolylineFrame& f = pick_frame(doc, index);
      SvgOptions opt;
      opt.tol = tol;
      if (what == "frame") {
        write_output(output, render_svg(f.curves, opt));
      } else {
        const auto xs = frame_intersections(f, tol);
        if (!bits.empty() && bits.size() != xs.size()) {
          throw ValidationError("resolution has " + std::to_string(bits.size()) + " bits but the frame has " +
                                std::to_string(xs.size()) + " crossings");
        }
        const std::uint64_t mask = bits.empty() ? 0 : bits_to_mask(bits);
        write_output(output, render_svg(smooth_with_auto_radius(f, mask, radius, tol), opt));
      }
    }
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    report(Json{{"error", "internal"}, {"message", e.what()}, {"exit", 3}});
    return 3;
  }
  return 0;
}
