#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "gvb/cli.hpp"

using namespace gvb;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(GVBOUND_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gvbound_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("capacity command") {
  CHECK(run("capacity --system swcc:3,2").out == "0.5515\n");
  CHECK(run("capacity --system secc:3,2").out == "0.6667\n");
  const auto f = scratch("unconstrained.json");
  std::ofstream(f) << R"({"s":1,"states":["x"],"edges":[{"from":"x","to":"x","label":"0"},{"from":"x","to":"x","label":"1"}]})";
  const auto r = run("capacity --file " + f.string());
  CHECK(r.status == 0);
  CHECK(r.out == "1.0000\n");
}

TEST_CASE("point mode") {
  const auto gv = csv_rows(run("gv --system swcc:3,2 --delta 0.1").out);
  REQUIRE(gv.size() == 2);
  CHECK(gv[0][0] == "delta");
  CHECK(gv[0][1] == "rate");
  CHECK(std::abs(std::stod(gv[1][1]) - 0.202) <= 2e-3);

  const auto mr = run("mr --system rll:3,7 --delta 0.15 --format json");
  CHECK(mr.status == 0);
  const auto j = nlohmann::json::parse(mr.out);
  CHECK(std::abs(j["rate"].get<double>() - 0.095) <= 1e-3);
  CHECK(j["manifest"]["system"] == "rll:3,7");
  CHECK(j["manifest"]["tool_version"] == cli::tool_version);
}

TEST_CASE("curve mode") {
  const auto r = run("gv --system swcc:3,2 --curve 2");
  CHECK(r.status == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0] == std::vector<std::string>{"segment", "param", "delta", "rate"});
  CHECK(rows[1][2] == "0.000000");
  CHECK(rows[1][3] == "0.551463");
  bool found = false;
  for (const auto& row : rows)
    if (row[0] == "parametric" && row[3] == "0.000000") found = std::abs(std::stod(row[2]) - 0.313) <= 1e-3;
  CHECK(found);
  double prev = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double d = std::stod(rows[i][2]);
    CHECK(d >= prev);
    prev = d;
    CHECK(r.out.find("nan") == std::string::npos);
    CHECK(r.out.find("inf") == std::string::npos);
  }
}

TEST_CASE("identical runs give identical bytes") {
  const auto a = run("mr --system swcc:3,2 --curve --points 40");
  const auto b = run("mr --system swcc:3,2 --curve --points 40");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(run("gv --system rll:1,3 --curve 30 --serial").out == run("gv --system rll:1,3 --curve 30").out);
}

TEST_CASE("outputs, manifests and plots") {
  const auto out = scratch("curve.csv"), svg = scratch("curve.svg");
  fs::remove(out);
  fs::remove(svg);
  const auto r = run("gv --system rll:3,7 --curve 20 --out " + out.string() + " --plot " + svg.string());
  CHECK(r.status == 0);
  CHECK(fs::exists(out));
  CHECK(fs::exists(out.string() + ".manifest.json"));
  std::ifstream ms(out.string() + ".manifest.json");
  const auto m = nlohmann::json::parse(ms);
  CHECK(m["command"] == "gv");
  CHECK(m.contains("wall_time_s"));
  std::ifstream ss(svg);
  const std::string text((std::istreambuf_iterator<char>(ss)), std::istreambuf_iterator<char>());
  CHECK(text.rfind("<svg", 0) == 0);
  CHECK(text.find("GV-MR") != std::string::npos);
  CHECK(text.find("Cap - H") != std::string::npos);
}

TEST_CASE("single-state routing and profiles") {
  const auto prof = run("profile --system secc:3,2 --p-subset weight=2");
  CHECK(prof.status == 0);
  CHECK(prof.out == "t,alpha,beta,gamma\n0,3,0,1\n1,0,6,0\n2,6,0,0\n3,0,0,0\n");
  const auto gv = csv_rows(run("gv --system secc:3,2 --delta 0.3333333333333333").out);
  REQUIRE(gv.size() == 2);
  CHECK(std::abs(std::stod(gv[1][1]) - 0.006) <= 1e-3);
  CHECK(run("lb --system swcc:3,2 --curve 10").status == 0);
}

TEST_CASE("exit codes") {
  CHECK(run("gv --system swcc:3,9 --delta 0.1").status == 1);
  CHECK(run("gv --system nope:1,2 --delta 0.1").status == 1);
  CHECK(run("gv --system swcc:3,2").status == 1);
  CHECK(run("gv --system swcc:3,2 --delta 0.1 --curve 5").status == 1);
  CHECK(run("gv --system swcc:3,2 --delta 0.1 --max-iter-power 1").status == 2);
  CHECK(run("capacity --file /nonexistent/graph.json").status == 1);
}

TEST_CASE("library helpers") {
  std::vector<Diagnostic> warnings;
  CHECK(cli::load_system("secc-bits:3,2", &warnings).symbol_length() == 1);
  CHECK_THROWS_AS(cli::load_system("swcc:3", nullptr), Error);
  CHECK_THROWS_AS(cli::load_system("swcc:3,2,1", nullptr), Error);
  const auto g = cli::load_system("secc:3,2", nullptr);
  CHECK(cli::parse_p_subset("weight=2", g) == EdgeSubset{true, true, true, false});
  CHECK_THROWS_AS(cli::parse_p_subset("weight=x", g), Error);
  CHECK(cli::exit_code(Error(ErrorKind::no_convergence, "x")) == 2);
  CHECK(cli::exit_code(Error(ErrorKind::parse_error, "x")) == 1);

  int dropped = 0;
  const std::vector<CurvePoint> c{{Segment::parametric, 0, 0.1, 0.5}, {Segment::parametric, 0, NAN, 0.2}};
  CHECK(cli::finite_points(c, &dropped).size() == 1);
  CHECK(dropped == 1);
  CHECK(cli::curve_csv({c[0]}) == "segment,param,delta,rate\nparametric,0.000000,0.100000,0.500000\n");
}
