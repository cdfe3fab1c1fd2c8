#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "blowup/analysis.hpp"
#include "blowup/artifacts.hpp"
#include "blowup/error.hpp"
#include "blowup/solver.hpp"
#include "blowup/sweep.hpp"
#include "doctest.h"

using namespace blowup;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("blowup_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunResult short_run(double v0 = -0.05) {
  SimConfig cfg;
  cfg.v0 = v0;
  cfg.r_max = 3.0;
  cfg.max_steps = 300;
  cfg.slice_times = {0.1, 0.2};
  return run(cfg);
}

}  // namespace

TEST_CASE("artifacts: doubles round trip bit for bit") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> exp10(-300.0, 300.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = (i % 2 ? -1.0 : 1.0) * std::pow(10.0, exp10(rng));
    CHECK(parse_double(format_double(v)) == v);
  }
  for (double v : {0.0, 1.0, 0.1, -0.01, 1e-320, std::numeric_limits<double>::max()}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-0.01) == "-0.01");
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK_THROWS_AS(parse_double("1.2.3"), Error);
  CHECK_THROWS_AS(parse_double(""), Error);
}

TEST_CASE("artifacts: csv tables") {
  const auto dir = scratch("csv");
  const std::vector<std::string> header{"x", "y"};
  const std::vector<std::vector<double>> rows{{1.0, 2.5}, {-3.0, 1e-9}};
  write_csv(dir / "t.csv", header, rows);
  CHECK(slurp(dir / "t.csv") == "x,y\n1,2.5\n-3,1.0000000000000001e-09\n");
  const auto back = read_csv(dir / "t.csv");
  CHECK(back.header == header);
  CHECK(back.rows == rows);
  CHECK(back.column("y") == 1);
  CHECK_THROWS_AS(back.column("z"), Error);
  CHECK_THROWS_AS(read_csv(dir / "missing.csv"), Error);
  CHECK_THROWS_AS(write_csv(dir / "no" / "such" / "dir.csv", header, rows), Error);
}

TEST_CASE("artifacts: trace and slice files") {
  const auto dir = scratch("trace");
  const auto res = short_run();
  write_trace_csv(dir / "trace.csv", res.trace);
  const auto tr = read_trace_csv(dir / "trace.csv");
  REQUIRE(tr.size() == res.trace.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.samples[i].t == res.trace.samples[i].t);
    CHECK(tr.samples[i].f_origin == res.trace.samples[i].f_origin);
  }

  write_slices_csv(dir / "slices.csv", res.slices, res.grid);
  const auto sl = read_slices_csv(dir / "slices.csv");
  REQUIRE(sl.size() == 2);
  CHECK(sl[1].t == res.slices[1].t);
  CHECK(sl[1].f == res.slices[1].values.values);
  CHECK(sl[1].r.size() == res.grid.size());

  std::ofstream(dir / "bad.csv") << "t,f_origin\n0,1\n0,0.9\n";
  CHECK_THROWS_AS(read_trace_csv(dir / "bad.csv"), Error);
}

TEST_CASE("artifacts: fit file round trip") {
  const auto dir = scratch("fit");
  LinearFit line{-2810.0, 10200.0, 0.5, 1234};
  const auto e = cutoff_from_line(line, {3.0, 95.0});
  write_fit_csv(dir / "fit.csv", e, 1.0);
  const auto back = read_fit_csv(dir / "fit.csv");
  CHECK(back.f0 == 1.0);
  CHECK(back.extraction.c == e.c);
  CHECK(back.extraction.R == e.R);
  CHECK(back.extraction.fit.slope == line.slope);
  CHECK(back.extraction.fit.n_points == 1234);
  CHECK(back.extraction.window.hi == 95.0);
}

TEST_CASE("artifacts: run directory holds exactly the declared files, manifest last") {
  const auto dir = scratch("rundir");
  const auto res = short_run();
  std::ofstream(dir / "manifest.csv") << "stale\n";
  write_run_artifacts(dir, res);

  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
  CHECK(names == std::set<std::string>{"trace.csv", "slices.csv", "manifest.csv"});

  const auto m = read_manifest(dir);
  CHECK(m.at("f0") == "1");
  CHECK(m.at("v0") == "-0.050000000000000003");
  CHECK(m.at("halt_reason") == "max_steps");
  CHECK(m.at("steps") == "300");
  CHECK(m.at("slice_times") == "0.10000000000000001 0.20000000000000001");
  CHECK(m.at("tool_version") == std::string(tool_version()));
  CHECK(m.count("created_at") == 1);
  CHECK(m.count("output_dir") == 1);

  const auto mtime = fs::last_write_time(dir / "manifest.csv");
  CHECK(mtime >= fs::last_write_time(dir / "trace.csv"));
  CHECK(mtime >= fs::last_write_time(dir / "slices.csv"));
}

TEST_CASE("artifacts: failed write leaves no manifest") {
  const auto dir = scratch("partial");
  const auto res = short_run();
  write_run_artifacts(dir, res);
  REQUIRE(fs::exists(dir / "manifest.csv"));
  // Make slices.csv unwritable by turning it into a directory.
  fs::remove(dir / "slices.csv");
  fs::create_directory(dir / "slices.csv");
  CHECK_THROWS_AS(write_run_artifacts(dir, res), Error);
  CHECK_FALSE(fs::exists(dir / "manifest.csv"));
}

TEST_CASE("artifacts: sweep table output") {
  const auto dir = scratch("sweep");
  std::vector<SimConfig> cfgs(3);
  cfgs[0].v0 = -0.1;
  cfgs[1].v0 = -0.12;
  cfgs[2].v0 = 0.0;  // never collapses: extraction fails
  for (auto& c : cfgs) {
    c.r_max = 15.0;
    c.max_steps = 20000;
  }
  const auto rows = sweep_table(cfgs, WindowRule{}, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ok());
  CHECK(rows[1].ok());
  CHECK_FALSE(rows[2].ok());
  CHECK_FALSE(rows[2].error.empty());
  CHECK(rows[0].config.v0 == -0.1);

  write_sweep_csv(dir / "sweep.csv", rows);
  const auto text = slurp(dir / "sweep.csv");
  CHECK(text.rfind("v0,f0,dr,dt,r_max,c,R,fit_rms,window_lo,window_hi,status\n", 0) == 0);
  CHECK(text.find(",ok\n") != std::string::npos);
  CHECK(text.find("nan") != std::string::npos);

  const auto table = format_sweep_table(rows);
  CHECK(table.find("v0") != std::string::npos);

  // Same rows regardless of the worker count.
  const auto serial = sweep_table(cfgs, WindowRule{}, 1);
  write_sweep_csv(dir / "serial.csv", serial);
  CHECK(slurp(dir / "serial.csv") == text);
}
