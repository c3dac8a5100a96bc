#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gvb/cli.hpp"
#include "gvb/gvcore.hpp"
#include "gvb/mrcore.hpp"
#include "gvb/singlestate.hpp"

using namespace gvb;

namespace {

struct Options {
  std::string system;
  std::string file;
  std::optional<double> delta;
  bool curve = false;
  std::string curve_n;
  int points = 100;
  SolverConfig solver;
  bool serial = false;
  std::string format = "csv";
  std::string plot;
  std::string out;
  std::string manifest;
  std::string p_subset;
};

void add_system(CLI::App* cmd, Options& o) {
  auto* sys = cmd->add_option("--system", o.system, "swcc:L,w | rll:d,k | secc:L,w | secc-bits:L,w | file:<path>");
  auto* file = cmd->add_option("--file", o.file, "graph file (JSON)");
  sys->excludes(file);
  file->excludes(sys);
}

void add_bound(CLI::App* cmd, Options& o, bool with_subset) {
  add_system(cmd, o);
  auto* d = cmd->add_option("--delta", o.delta, "relative distance in [0,1]");
  auto* c = cmd->add_option("--curve", o.curve_n, "curve mode; optional number of samples (default --points)")
                ->expected(0, 1);
  cmd->callback([&o, c] { o.curve = c->count() > 0; });
  d->excludes(c);
  c->excludes(d);
  cmd->add_option("--points", o.points, "samples per curve segment")->check(CLI::Range(2, 1000000));
  cmd->add_option("--tol-power", o.solver.power_tol, "power iteration tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--tol-newton", o.solver.newton_tol, "Newton tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter-power", o.solver.power_max_iter, "power iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter-newton", o.solver.newton_max_iter, "Newton iteration cap")->check(CLI::PositiveNumber);
  cmd->add_flag("--serial", o.serial, "use the serial reference kernels");
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--plot", o.plot, "write an SVG with the GV, GV-MR and Cap-H(delta) curves");
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_option("--manifest", o.manifest, "manifest file (default <out>.manifest.json when --out is set)");
  if (with_subset) cmd->add_option("--p-subset", o.p_subset, "MR subset: weight=<w>");
}

LabelledGraph load(const Options& o, std::vector<std::string>& warnings, std::string& spec) {
  if (o.system.empty() && o.file.empty()) throw Error(ErrorKind::invalid_parameters, "one of --system or --file is required");
  spec = o.system.empty() ? "file:" + o.file : o.system;
  std::vector<Diagnostic> diags;
  LabelledGraph g = cli::load_system(spec, &diags);
  for (const auto& d : diags) warnings.push_back(d.message);
  for (const auto& d : validate(g))
    if (d.severity == Diagnostic::Severity::warning &&
        std::find(warnings.begin(), warnings.end(), d.message) == warnings.end())
      warnings.push_back(d.message);
  return g;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw Error(ErrorKind::invalid_parameters, "cannot write '" + o.out + "'");
  f << text;
}

void emit_manifest(const Options& o, const cli::RunManifest& m) {
  std::string path = o.manifest;
  if (path.empty() && !o.out.empty() && o.format == "csv") path = o.out + ".manifest.json";
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::invalid_parameters, "cannot write '" + path + "'");
  f << cli::manifest_json(m);
}

EdgeSubset subset_for(const Options& o, const LabelledGraph& g) {
  return o.p_subset.empty() ? default_subset(g) : cli::parse_p_subset(o.p_subset, g);
}

std::vector<CurvePoint> gv_curve_for(const LabelledGraph& g, int n, const SolverConfig& cfg) {
  if (g.single_state()) return ss_gv_curve(distance_profile(g.labels()), n, cfg);
  return gv_curve(g, n, cfg);
}

MrCurve mr_curve_for(const LabelledGraph& g, const EdgeSubset& subset, int n, const SolverConfig& cfg) {
  if (g.single_state()) return ss_mr_curve(partition_profile(g.labels(), subset), n, cfg);
  return mr_curve(*make_mr_model(g, subset), n, cfg);
}

std::string point_record(const Options& o, const nlohmann::ordered_json& fields, const cli::RunManifest& m) {
  if (o.format == "json") {
    nlohmann::ordered_json j = fields;
    j["manifest"] = nlohmann::ordered_json::parse(cli::manifest_json(m));
    return j.dump(2) + "\n";
  }
  std::string head, row;
  char buf[64];
  for (const auto& [k, v] : fields.items()) {
    head += (head.empty() ? "" : ",") + k;
    if (v.is_number_float())
      std::snprintf(buf, sizeof buf, "%.6f", v.get<double>());
    else if (v.is_string())
      std::snprintf(buf, sizeof buf, "%s", v.get<std::string>().c_str());
    else
      std::snprintf(buf, sizeof buf, "%s", v.dump().c_str());
    row += (row.empty() ? "" : ",") + std::string(buf);
  }
  return head + "\n" + row + "\n";
}

int run_bound(const std::string& command, Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (o.serial) o.solver.exec = ExecPolicy::serial;
  o.solver.check();
  cli::RunManifest m;
  m.command = command;
  m.solver = o.solver;
  const LabelledGraph g = load(o, m.warnings, m.system);
  const bool curve_mode = o.curve || !o.delta;
  if (command != "lb" && !o.delta && !o.curve)
    throw Error(ErrorKind::invalid_parameters, "one of --delta or --curve is required");
  int n = o.points;
  if (!o.curve_n.empty()) {
    try {
      std::size_t used = 0;
      n = std::stoi(o.curve_n, &used);
      if (used != o.curve_n.size()) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
  }
  if (n < 2) throw Error(ErrorKind::invalid_parameters, "a curve needs at least 2 points");
  m.points = curve_mode ? n : 1;
  auto finish = [&] {
    m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (!curve_mode) {
    const double delta = *o.delta;
    if (!(delta >= 0 && delta <= 1)) throw Error(ErrorKind::invalid_parameters, "--delta must lie in [0,1]");
    nlohmann::ordered_json f;
    if (command == "gv") {
      const auto r = g.single_state() ? ss_gv_fixed(distance_profile(g.labels()), delta, o.solver)
                                      : gv_fixed_delta(g, delta, o.solver);
      f = {{"delta", r.delta}, {"rate", r.rate}, {"y_star", r.y_star}, {"T_tilde", r.T_tilde},
           {"capacity", r.capacity}, {"newton_iterations", r.newton_iterations}};
    } else if (command == "mr") {
      const EdgeSubset subset = subset_for(o, g);
      const auto r = g.single_state() ? ss_mr_fixed(partition_profile(g.labels(), subset), delta, o.solver)
                                      : mr_fixed_delta(*make_mr_model(g, subset), delta, o.solver);
      f = {{"delta", r.delta}, {"rate", r.rate}, {"p_star", r.p_star}, {"x_star", r.x_star},
           {"y_star", r.y_star}, {"boundary", r.clamped}, {"newton", r.via_newton}};
    } else {
      const double cap = capacity(g, o.solver);
      f = {{"delta", delta}, {"rate", simple_lb(cap, delta)}, {"capacity", cap}};
    }
    finish();
    emit(o, point_record(o, f, m));
    emit_manifest(o, m);
    return 0;
  }

  std::vector<CurvePoint> curve;
  if (command == "gv") {
    curve = gv_curve_for(g, n, o.solver);
  } else if (command == "mr") {
    const MrCurve c = mr_curve_for(g, subset_for(o, g), n, o.solver);
    curve = c.points;
    if (c.failures > 0) m.warnings.push_back(std::to_string(c.failures) + " MR samples failed and were skipped");
  } else {
    curve = simple_lb_curve(capacity(g, o.solver), n);
  }
  int dropped = 0;
  curve = cli::finite_points(curve, &dropped);
  if (dropped > 0) m.warnings.push_back(std::to_string(dropped) + " non-finite points dropped");
  sort_by_delta(curve);

  if (!o.plot.empty()) {
    std::vector<cli::PlotSeries> series;
    series.push_back({"GV", "#1f77b4", gv_curve_for(g, n, o.solver)});
    try {
      series.push_back({"GV-MR (conjectured form)", "#d62728", mr_curve_for(g, subset_for(o, g), n, o.solver).points});
    } catch (const Error& e) {
      m.warnings.push_back(std::string("GV-MR curve omitted from plot: ") + e.what());
    }
    series.push_back({"Cap - H(delta)", "#2ca02c", simple_lb_curve(capacity(g, o.solver), n)});
    for (auto& s : series) {
      s.points = cli::finite_points(s.points, nullptr);
      sort_by_delta(s.points);
    }
    std::ofstream f(o.plot);
    if (!f) throw Error(ErrorKind::invalid_parameters, "cannot write '" + o.plot + "'");
    f << cli::render_svg(series, m.system);
  }
  finish();
  emit(o, o.format == "json" ? cli::curve_json(curve, m) : cli::curve_csv(curve));
  emit_manifest(o, m);
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int run_capacity(Options& o) {
  std::vector<std::string> warnings;
  std::string spec;
  const LabelledGraph g = load(o, warnings, spec);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::printf("%.4f\n", capacity(g, o.solver));
  return 0;
}

int run_profile(Options& o) {
  std::vector<std::string> warnings;
  std::string spec;
  const LabelledGraph g = load(o, warnings, spec);
  if (!g.single_state()) throw Error(ErrorKind::invalid_parameters, "distance profiles need a single-state graph");
  const DistanceProfile p = o.p_subset.empty() ? distance_profile(g.labels())
                                               : partition_profile(g.labels(), cli::parse_p_subset(o.p_subset, g));
  std::cout << profile_csv(p);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gilbert-Varshamov type lower bounds for binary constrained systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::tool_version);

  Options o;
  auto* cap = app.add_subcommand("capacity", "capacity in bits per symbol bit");
  add_system(cap, o);
  auto* gv = app.add_subcommand("gv", "GV bound at a distance or as a curve");
  add_bound(gv, o, false);
  auto* mr = app.add_subcommand("mr", "GV-MR bound at a distance or as a curve");
  add_bound(mr, o, true);
  auto* lb = app.add_subcommand("lb", "simple bound Cap - H(delta)");
  add_bound(lb, o, false);
  auto* prof = app.add_subcommand("profile", "pair distance counts of a single-state graph (CSV)");
  add_system(prof, o);
  prof->add_option("--p-subset", o.p_subset, "split the counts by the subset weight=<w>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (cap->parsed()) return run_capacity(o);
    if (prof->parsed()) return run_profile(o);
    if (gv->parsed()) return run_bound("gv", o);
    if (mr->parsed()) return run_bound("mr", o);
    return run_bound("lb", o);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return cli::exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
