#pragma once

// Command-line front end. parse_command turns argv into a Command, execute
// dispatches to the library and returns a Report, emit serializes it.
// Exit codes: 0 ok, 1 violations found, 2 input or usage error.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tropmoduli/error.hpp"
#include "tropmoduli/family.hpp"
#include "tropmoduli/json_io.hpp"
#include "tropmoduli/moduli.hpp"
#include "tropmoduli/parallel.hpp"
#include "tropmoduli/polyhedral.hpp"
#include "tropmoduli/tropcurve.hpp"

namespace tropmoduli::cli {

using io::json;

struct VerbSpec {
  const char* name;
  std::size_t inputs;
  const char* usage;
};

inline const std::vector<VerbSpec>& verbs() {
  static const std::vector<VerbSpec> v = {
      {"validate-complex", 1, "complex.json"},
      {"skeleton", 1, "pair.json"},
      {"validate-curve", 1, "curve.json"},
      {"enumerate", 0, "--genus G --contracted N --degree \"1,0;0,1;-1,-1\" --max-edges E [--dim D]"},
      {"classify", 1, "type.json"},
      {"resolve", 1, "type.json --vertex V"},
      {"wallgraph", 1, "types.json [--connect A B]"},
      {"validate-family", 1, "family.json"},
      {"fiber", 1, "family.json --face F --point \"1/2,0\""},
      {"alpha", 1, "family.json"},
      {"verdicts", 1, "family.json [--face F]"},
      {"propagate", 2, "wallgraph.json seeds.json"},
  };
  return v;
}

struct Command {
  std::string verb;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> options;
  std::string format = "json";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string output;  // empty: stdout
};

enum class Status { Ok, Violations, Error };

constexpr const char* to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::Violations: return "violations";
    case Status::Error: return "error";
  }
  return "?";
}

struct Report {
  std::string verb;
  Status status = Status::Ok;
  json payload = json::object();
  std::string summary;
  ValidationReport violations;
};

inline int exit_code(const Report& r) {
  switch (r.status) {
    case Status::Ok: return 0;
    case Status::Violations: return 1;
    case Status::Error: return 2;
  }
  return 2;
}

inline std::string usage() {
  std::string s = "usage: tropmoduli <verb> [inputs] [--format json|text] [--seed S] [--threads T] [-o FILE]\nverbs:\n";
  for (const auto& v : verbs()) s += std::string("  ") + v.name + " " + v.usage + "\n";
  return s;
}

inline Command parse_command(const std::vector<std::string>& args) {
  if (args.empty()) throw Error(ErrorCode::MissingInput, "no verb given");
  const VerbSpec* spec = nullptr;
  for (const auto& v : verbs())
    if (args[0] == v.name) spec = &v;
  if (!spec) throw Error(ErrorCode::UnknownVerb, "unknown verb '" + args[0] + "'");

  Command c;
  c.verb = spec->name;
  CLI::App app{"tropmoduli " + c.verb};
  app.set_help_flag();
  app.add_option("--format", c.format)->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", c.seed);
  app.add_option("--threads", c.threads);
  app.add_option("-o,--output", c.output);
  if (spec->inputs > 0) app.add_option("inputs", c.inputs)->required()->expected(static_cast<int>(spec->inputs));

  std::map<std::string, std::string> values;
  std::vector<std::string> connect;
  auto value = [&](const std::string& name, bool required) {
    auto* o = app.add_option("--" + name, values[name]);
    if (required) o->required();
  };
  if (c.verb == "enumerate") {
    value("genus", true);
    value("contracted", false);
    value("degree", true);
    value("max-edges", true);
    value("dim", false);
  } else if (c.verb == "resolve") {
    value("vertex", true);
  } else if (c.verb == "wallgraph") {
    app.add_option("--connect", connect)->expected(2);
  } else if (c.verb == "fiber") {
    value("face", true);
    value("point", true);
  } else if (c.verb == "verdicts") {
    value("face", false);
  }

  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::RequiredError& e) {
    throw Error(ErrorCode::MissingInput, c.verb + ": " + e.what());
  } catch (const CLI::ArgumentMismatch& e) {
    throw Error(ErrorCode::MissingInput, c.verb + ": " + e.what());
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::InvalidArgument, c.verb + ": " + e.what());
  }
  for (auto& [k, v] : values)
    if (app.get_option("--" + k)->count() > 0) c.options[k] = v;
  if (!connect.empty()) {
    c.options["connect-from"] = connect[0];
    c.options["connect-to"] = connect[1];
  }
  return c;
}

inline Command parse_command(int argc, const char* const* argv) {
  return parse_command(std::vector<std::string>(argv + 1, argv + argc));
}

namespace detail {

inline json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, path + ": " + e.what());
  }
  io::check_schema(doc);
  // the output of another verb: read its payload
  if (doc.contains("status") && doc.contains("payload")) {
    if (doc["status"] != "ok") throw Error(ErrorCode::SchemaError, path + ": report status is not ok");
    json inner = doc["payload"];
    inner["schema"] = io::kSchema;
    return inner;
  }
  return doc;
}

inline long long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, what + ": expected an integer, got '" + s + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

/// "1,0;0,1;-1,-1" -> three vectors. An empty string is the empty degree.
inline std::vector<IntVector> parse_degree(const std::string& s) {
  std::vector<IntVector> out;
  if (s.empty()) return out;
  for (const auto& entry : split(s, ';')) {
    IntVector v;
    for (const auto& x : split(entry, ',')) v.push_back(Int(parse_int(x, "--degree")));
    out.push_back(std::move(v));
  }
  return out;
}

inline RatVector parse_point(const std::string& s) {
  RatVector q;
  if (s.empty()) return q;
  for (const auto& x : split(s, ',')) q.push_back(parse_rat(x));
  return q;
}

inline Report from_validation(const std::string& verb, ValidationReport v, json payload, const std::string& what) {
  Report r;
  r.verb = verb;
  r.status = v.ok() ? Status::Ok : Status::Violations;
  payload["violations"] = io::to_json(v);
  r.payload = std::move(payload);
  r.summary = v.ok() ? what + " is valid" : what + " has " + std::to_string(v.violations.size()) + " violation(s)";
  r.violations = std::move(v);
  return r;
}

inline json type_summary(const CombinatorialType& t) {
  auto cls = classify(t);
  auto dim = dim_stratum(t);
  json j = {{"canonical", canonical_string(t)},
            {"kind", to_string(cls.kind)},
            {"genus", genus(t.graph)},
            {"stable", is_stable(t.graph)},
            {"balanced", is_balanced(t)},
            {"dim_stratum", dim ? json(*dim) : json(nullptr)}};
  j["four_valent_vertex"] = cls.four_valent_vertex ? json(t.graph.vertices[*cls.four_valent_vertex].id) : json(nullptr);
  return j;
}

inline Report run_validate_complex(const Command& c) {
  auto doc = load(c.inputs[0]);
  auto complex = io::read_complex(io::Reader(doc));
  return from_validation(c.verb, validate_complex(complex), json::object(), "complex");
}

inline Report run_skeleton(const Command& c) {
  auto doc = load(c.inputs[0]);
  auto pair = io::read_pair(io::Reader(doc));
  auto complex = build_skeleton(pair);
  auto report = validate_complex(complex);
  auto r = from_validation(c.verb, report, {{"complex", io::to_json(complex)}}, "skeleton");
  r.summary = "skeleton with " + std::to_string(complex.faces.size()) + " faces; " + r.summary;
  return r;
}

inline Report run_validate_curve(const Command& c) {
  auto doc = load(c.inputs[0]);
  io::Reader root(doc);
  const auto& node = root;
  ValidationReport v;
  if (io::has_curve_data(node)) {
    v = validate_curve(io::read_curve(node));
    return from_validation(c.verb, v, json::object(), "curve");
  }
  auto t = io::read_type(node);
  v = check_structure(t);
  v.merge(check_balanced(t), "");
  return from_validation(c.verb, v, json::object(), "type");
}

inline Report run_enumerate(const Command& c) {
  EnumerationOptions opt;
  opt.genus = static_cast<int>(parse_int(c.options.at("genus"), "--genus"));
  if (c.options.count("contracted")) {
    auto n = parse_int(c.options.at("contracted"), "--contracted");
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "--contracted must be nonnegative");
    opt.contracted_legs = static_cast<std::size_t>(n);
  }
  opt.degree = parse_degree(c.options.at("degree"));
  auto e = parse_int(c.options.at("max-edges"), "--max-edges");
  if (e < 0) throw Error(ErrorCode::InvalidArgument, "--max-edges must be nonnegative");
  opt.max_edges = static_cast<std::size_t>(e);
  if (c.options.count("dim")) {
    auto d = parse_int(c.options.at("dim"), "--dim");
    if (d <= 0) throw Error(ErrorCode::InvalidArgument, "--dim must be positive");
    opt.lattice_dim = static_cast<std::size_t>(d);
  }
  opt.threads = c.threads;
  auto types = enumerate_types(opt);
  Report r;
  r.verb = c.verb;
  r.payload = io::types_document(types);
  r.payload.erase("schema");
  r.summary = std::to_string(types.size()) + " type(s)";
  return r;
}

inline Report run_classify(const Command& c) {
  auto doc = load(c.inputs[0]);
  auto t = io::read_type(io::Reader(doc));
  Report r;
  r.verb = c.verb;
  r.payload = type_summary(t);
  r.summary = std::string(to_string(classify(t).kind));
  return r;
}

inline Report run_resolve(const Command& c) {
  auto doc = load(c.inputs[0]);
  auto t = io::read_type(io::Reader(doc));
  auto v = t.graph.vertex_at(c.options.at("vertex"));
  auto res = resolve_4valent(t, v);
  Report r;
  r.verb = c.verb;
  r.payload = io::types_document(res);
  r.payload.erase("schema");
  r.summary = std::to_string(res.size()) + " resolution(s)";
  return r;
}

inline Report run_wallgraph(const Command& c) {
  auto doc = load(c.inputs[0]);
  std::vector<CombinatorialType> nodes;
  for (auto& t : io::read_types(io::Reader(doc)))
    if (classify(t).kind == WallKind::Weightless3Valent) nodes.push_back(std::move(t));
  auto wg = wall_graph(nodes);
  Report r;
  r.verb = c.verb;
  r.payload = {{"wallgraph", io::to_json(wg)}};
  r.payload["wallgraph"].erase("schema");
  r.summary = std::to_string(wg.nodes.size()) + " node(s), " + std::to_string(wg.walls.size()) + " wall(s)";
  if (c.options.count("connect-from")) {
    auto path = connected_through_walls(wg, c.options.at("connect-from"), c.options.at("connect-to"));
    r.payload["path"] = path ? json(*path) : json(nullptr);
    r.summary += path ? "; connected" : "; not connected";
  }
  return r;
}

inline Report run_validate_family(const Command& c) {
  auto doc = load(c.inputs[0]);
  auto f = io::read_family(io::Reader(doc));
  return from_validation(c.verb, validate_family(f), json::object(), "family");
}

inline Report run_fiber(const Command& c) {
  auto doc = load(c.inputs[0]);
  auto f = io::read_family(io::Reader(doc));
  auto q = parse_point(c.options.at("point"));
  auto res = fiber(f, c.options.at("face"), q);
  Report r;
  r.verb = c.verb;
  r.payload = {{"face", res.face}, {"coords", io::to_json(res.coords)}, {"curve", io::to_json(res.curve)}};
  r.summary = "fiber over " + tropmoduli::to_string(q) + " lies over face " + res.face;
  return r;
}

inline Report run_alpha(const Command& c) {
  auto doc = load(c.inputs[0]);
  auto f = io::read_family(io::Reader(doc));
  auto alpha = induced_alpha(f, c.threads);
  json faces = json::array();
  for (const auto& l : alpha.faces)
    faces.push_back({{"face", l.face}, {"canonical", l.canonical}, {"type", io::to_json(l.type)}, {"lift", io::to_json(l.lift)}});
  json strata = json::array();
  for (const auto& s : image_strata(alpha))
    strata.push_back({{"canonical", s.canonical},
                      {"image_dim", s.image_dim},
                      {"stratum_dim", s.stratum_dim},
                      {"full_dimensional", s.full_dimensional},
                      {"faces", s.faces}});
  Report r;
  r.verb = c.verb;
  r.payload = {{"faces", faces}, {"image_strata", strata}};
  r.summary = std::to_string(alpha.faces.size()) + " face lift(s), " + std::to_string(strata.size()) + " image strat" +
              (strata.size() == 1 ? "um" : "a");
  return r;
}

inline Report run_verdicts(const Command& c) {
  auto doc = load(c.inputs[0]);
  auto f = io::read_family(io::Reader(doc));
  auto alpha = induced_alpha(f, c.threads);
  std::vector<std::string> walls;
  if (c.options.count("face")) {
    walls.push_back(c.options.at("face"));
  } else {
    auto maximal = f.base.maximal_faces();
    for (const auto& face : f.base.faces)
      if (std::find(maximal.begin(), maximal.end(), face.id) == maximal.end()) walls.push_back(face.id);
  }
  std::vector<WallVerdict> out(walls.size());
  parallel_for(walls.size(), c.threads, [&](std::size_t i) { out[i] = wall_verdict(f, alpha, walls[i]); });
  json list = json::array();
  std::map<std::string, int> tally;
  for (const auto& v : out) {
    list.push_back(io::to_json(v));
    ++tally[to_string(v.verdict)];
  }
  Report r;
  r.verb = c.verb;
  r.payload = {{"verdicts", list}};
  for (const auto& [k, n] : tally) r.summary += (r.summary.empty() ? "" : ", ") + std::to_string(n) + " " + k;
  if (r.summary.empty()) r.summary = "no walls";
  return r;
}

inline Report run_propagate(const Command& c) {
  auto wdoc = load(c.inputs[0]);
  auto sdoc = load(c.inputs[1]);
  io::Reader wr(wdoc);
  auto wg = io::read_wall_graph(wr.has("wallgraph") ? wr["wallgraph"] : wr);
  auto seeds = io::Reader(sdoc)["seeds"].strings();
  auto res = propagate_closure(wg, seeds);
  Report r;
  r.verb = c.verb;
  r.payload = io::to_json(res);
  r.summary = std::to_string(res.nodes.size()) + " node(s) after " + std::to_string(res.trace.size()) + " step(s)";
  return r;
}

}  // namespace detail

inline Report error_report(const std::string& verb, const Error& e) {
  Report r;
  r.verb = verb;
  r.status = Status::Error;
  r.payload = {{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
  r.summary = e.what();
  return r;
}

inline Report execute(const Command& c) {
  using Handler = Report (*)(const Command&);
  static const std::map<std::string, Handler> handlers = {
      {"validate-complex", detail::run_validate_complex},
      {"skeleton", detail::run_skeleton},
      {"validate-curve", detail::run_validate_curve},
      {"enumerate", detail::run_enumerate},
      {"classify", detail::run_classify},
      {"resolve", detail::run_resolve},
      {"wallgraph", detail::run_wallgraph},
      {"validate-family", detail::run_validate_family},
      {"fiber", detail::run_fiber},
      {"alpha", detail::run_alpha},
      {"verdicts", detail::run_verdicts},
      {"propagate", detail::run_propagate},
  };
  auto it = handlers.find(c.verb);
  if (it == handlers.end()) return error_report(c.verb, Error(ErrorCode::UnknownVerb, "unknown verb '" + c.verb + "'"));
  try {
    return it->second(c);
  } catch (const Error& e) {
    return error_report(c.verb, e);
  }
}

inline std::string emit(const Report& r, const std::string& format) {
  if (format == "text") {
    std::string s = r.verb + ": " + to_string(r.status) + ": " + r.summary + "\n";
    for (const auto& v : r.violations.violations) s += v.rule + " violated at " + v.where + ": " + v.detail + "\n";
    return s;
  }
  json j = {{"schema", io::kSchema},
            {"verb", r.verb},
            {"status", to_string(r.status)},
            {"summary", r.summary},
            {"payload", r.payload}};
  return j.dump(2) + "\n";
}

/// The whole program: parse, execute, write, and return the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command c;
  try {
    c = parse_command(args);
  } catch (const Error& e) {
    err << e.what() << "\n" << usage();
    return 2;
  }
  auto report = execute(c);
  auto text = emit(report, c.format);
  if (c.output.empty()) {
    out << text;
  } else {
    std::ofstream f(c.output, std::ios::binary);
    if (!f) {
      err << "cannot write '" << c.output << "'\n";
      return 2;
    }
    f << text;
  }
  if (report.status == Status::Error) err << report.summary << "\n";
  return exit_code(report);
}

}  // namespace tropmoduli::cli
