#include "gvb/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace gvb::cli {

namespace {

std::pair<int, int> two_ints(const std::string& body, const std::string& spec) {
  int a = 0, b = 0;
  char comma = 0;
  std::istringstream is(body);
  if (!(is >> a >> comma >> b) || comma != ',' || !(is >> std::ws).eof())
    throw Error(ErrorKind::invalid_parameters, "expected two integers in system spec '" + spec + "'");
  return {a, b};
}

}  // namespace

LabelledGraph load_system(const std::string& spec, std::vector<Diagnostic>* warnings) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorKind::invalid_parameters, "system spec must look like family:args, got '" + spec + "'");
  const std::string family = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  if (family == "file") {
    std::ifstream in(body);
    if (!in) throw Error(ErrorKind::invalid_parameters, "cannot open graph file '" + body + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_graph(text, warnings);
  }
  const auto [a, b] = two_ints(body, spec);
  if (family == "swcc") return build_swcc(a, b);
  if (family == "rll") return build_rll(a, b);
  if (family == "secc") return build_secc(a, b);
  if (family == "secc-bits") return build_secc_multistate(a, b);
  throw Error(ErrorKind::invalid_parameters, "unknown system family '" + family + "'");
}

EdgeSubset parse_p_subset(const std::string& text, const LabelledGraph& g) {
  const std::string key = "weight=";
  int w = -1;
  if (text.rfind(key, 0) == 0) {
    try {
      std::size_t used = 0;
      w = std::stoi(text.substr(key.size()), &used);
      if (used != text.size() - key.size()) w = -1;
    } catch (const std::exception&) {
      w = -1;
    }
  }
  if (w < 0) throw Error(ErrorKind::invalid_parameters, "--p-subset expects weight=<w>, got '" + text + "'");
  EdgeSubset out;
  for (const auto& e : g.edges()) out.push_back(std::count(e.label.begin(), e.label.end(), '1') == w);
  return out;
}

int exit_code(const Error& e) { return e.is_numeric() ? 2 : 1; }

std::vector<CurvePoint> finite_points(const std::vector<CurvePoint>& curve, int* dropped) {
  std::vector<CurvePoint> out;
  int n = 0;
  for (const auto& p : curve) {
    if (std::isfinite(p.param) && std::isfinite(p.delta) && std::isfinite(p.rate))
      out.push_back(p);
    else
      ++n;
  }
  if (dropped) *dropped = n;
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "segment,param,delta,rate\n";
  char buf[160];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f\n", to_string(p.segment), p.param, p.delta, p.rate);
    out += buf;
  }
  return out;
}

namespace {

nlohmann::ordered_json manifest_object(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["system"] = m.system;
  j["solver"] = {{"power_tol", m.solver.power_tol},
                 {"power_max_iter", m.solver.power_max_iter},
                 {"newton_tol", m.solver.newton_tol},
                 {"newton_max_iter", m.solver.newton_max_iter},
                 {"exec", m.solver.exec == ExecPolicy::parallel ? "parallel" : "serial"}};
  j["points"] = m.points;
  j["tool_version"] = tool_version;
  j["wall_time_s"] = m.wall_time_s;
  j["warnings"] = m.warnings;
  return j;
}

}  // namespace

std::string manifest_json(const RunManifest& m) { return manifest_object(m).dump(2) + "\n"; }

std::string curve_json(const std::vector<CurvePoint>& curve, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["manifest"] = manifest_object(m);
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : curve)
    j["points"].push_back({{"segment", to_string(p.segment)}, {"param", p.param}, {"delta", p.delta}, {"rate", p.rate}});
  return j.dump(2) + "\n";
}

std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  constexpr double W = 640, H = 440, left = 60, right = 20, top = 40, bottom = 50;
  double dmax = 0.1, rmax = 0.1;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (p.rate > 0) dmax = std::max(dmax, p.delta);
      rmax = std::max(rmax, p.rate);
    }
  // Round the axes up to a tenth.
  dmax = std::min(1.0, std::ceil(dmax * 10 * 1.05) / 10);
  rmax = std::ceil(rmax * 10 * 1.05) / 10;
  auto px = [&](double d) { return left + (W - left - right) * d / dmax; };
  auto py = [&](double r) { return H - bottom - (H - top - bottom) * r / rmax; };

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(dmax) << "\" y2=\"" << py(0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\"" << py(rmax) << "\" stroke=\"black\"/>\n";
  const int xt = static_cast<int>(std::lround(dmax * 10)), yt = static_cast<int>(std::lround(rmax * 10));
  for (int i = 0; i <= xt; ++i) {
    const double d = i / 10.0;
    os << "<line x1=\"" << px(d) << "\" y1=\"" << py(0) << "\" x2=\"" << px(d) << "\" y2=\"" << py(0) + 5 << "\" stroke=\"black\"/>";
    os << "<text x=\"" << px(d) << "\" y=\"" << py(0) + 18 << "\" text-anchor=\"middle\">" << d << "</text>\n";
  }
  for (int i = 0; i <= yt; ++i) {
    const double r = i / 10.0;
    os << "<line x1=\"" << px(0) - 5 << "\" y1=\"" << py(r) << "\" x2=\"" << px(0) << "\" y2=\"" << py(r) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << px(0) - 8 << "\" y=\"" << py(r) + 4 << "\" text-anchor=\"end\">" << r << "</text>\n";
  }
  os << "<text x=\"" << (px(0) + px(dmax)) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">relative distance</text>\n";
  os << "<text transform=\"translate(16," << (py(0) + py(rmax)) / 2 << ") rotate(-90)\" text-anchor=\"middle\">rate</text>\n";

  os.precision(3);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : s.points)
      if (p.delta <= dmax) os << px(p.delta) << ',' << py(p.rate) << ' ';
    os << "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << W - 230 << "\" y1=\"" << ly << "\" x2=\"" << W - 205 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
       << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << W - 200 << "\" y=\"" << ly + 4 << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace gvb::cli
