#pragma once

#include <string>
#include <vector>

#include "gvb/eigen.hpp"
#include "gvb/error.hpp"
#include "gvb/gvcore.hpp"
#include "gvb/graphs.hpp"
#include "gvb/product.hpp"

namespace gvb::cli {

inline constexpr const char* tool_version = "0.1.0";

/// `swcc:L,w`, `rll:d,k`, `secc:L,w`, `secc-bits:L,w` (s = 1 SECC
/// presentation) or `file:<path>`. Graph warnings go to `warnings`.
LabelledGraph load_system(const std::string& spec, std::vector<Diagnostic>* warnings = nullptr);

/// `weight=<w>`: edges whose label has weight w.
EdgeSubset parse_p_subset(const std::string& text, const LabelledGraph& g);

/// Process exit status for a library error: 2 for numeric trouble, 1 otherwise.
int exit_code(const Error& e);

/// Points with a non-finite coordinate are dropped; `dropped` counts them.
std::vector<CurvePoint> finite_points(const std::vector<CurvePoint>& curve, int* dropped);

/// `segment,param,delta,rate`, six decimals, in the given order.
std::string curve_csv(const std::vector<CurvePoint>& curve);

struct RunManifest {
  std::string command;
  std::string system;
  SolverConfig solver;
  int points = 0;
  double wall_time_s = 0;
  std::vector<std::string> warnings;
};

std::string manifest_json(const RunManifest& m);
/// {"manifest": ..., "points": [...]}
std::string curve_json(const std::vector<CurvePoint>& curve, const RunManifest& m);

struct PlotSeries {
  std::string name;
  std::string color;
  std::vector<CurvePoint> points;
};

/// Rate against δ as a standalone SVG document with axis ticks.
std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title);

}  // namespace gvb::cli
