#include <algorithm>
#include <cmath>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/solver.hpp"
#include "doctest.h"
#include "oracles/oracles.hpp"

using namespace blowup;

namespace {

SimConfig small_config(double v0, double r_max = 5.0) {
  SimConfig cfg;
  cfg.v0 = v0;
  cfg.r_max = r_max;
  return cfg;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t from = 0,
                    std::size_t to = 0) {
  if (to == 0) to = a.size();
  double m = 0.0;
  for (std::size_t j = from; j < to; ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("solver: config validation") {
  SimConfig ok;
  CHECK_NOTHROW(ok.validate());
  auto bad = [](auto mutate) {
    SimConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.dt = 0.02; }).validate(), Error);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.dr = 0.0; }).validate(), Error);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.f0 = -1.0; }).validate(), Error);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.stop_height = 1.5; }).validate(), Error);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.stop_height = 0.0; }).validate(), Error);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.r_max = 0.02; }).validate(), Error);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.corrector_iters = 0; }).validate(), Error);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.sample_every = 0; }).validate(), Error);
  CHECK(ok.effective_stop_height() == doctest::Approx(0.05));
}

TEST_CASE("solver: boundary formulas") {
  std::vector<double> c{0.0, 2.5, 2.5, 2.5, 0.0};
  apply_boundaries(std::span<double>(c));
  CHECK(c[0] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(c[4] == 2.5);

  const RadialGrid g(0.1, 8);
  RadialField even(g.size(), 0.0);
  for (std::size_t j = 1; j < g.size(); ++j) even[j] = 0.3 + 1.7 * g.r(j) * g.r(j);
  CHECK(apply_boundaries(even, g)[0] == doctest::Approx(0.3).epsilon(1e-14));

  std::vector<double> d{0.0, 1.0, 0.7, 0.5, 9.0};
  apply_boundaries(std::span<double>(d));
  CHECK(d[0] == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(d[4] == 0.5);
}

TEST_CASE("solver: initial levels") {
  const auto cfg = small_config(-0.01);
  const auto g = cfg.make_grid();
  const auto s = initialize(cfg, g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(s.f_cur[j] == 1.0);
    CHECK(s.f_prev[j] == doctest::Approx(1.00001).epsilon(1e-15));
    const double guess = 2.0 * s.f_cur[j] - s.f_prev[j];
    CHECK(guess == doctest::Approx(0.99999).epsilon(1e-15));
    CHECK((guess - s.f_prev[j]) / (2.0 * cfg.dt) == doctest::Approx(-0.01).epsilon(1e-9));
  }
  const auto still = initialize(small_config(0.0), g);
  CHECK(still.f_prev.values == still.f_cur.values);
}

TEST_CASE("solver: one step against the straight-line reimplementation") {
  SimConfig cfg;  // f0 = 1, v0 = -0.01, dr = 0.01, dt = 0.001, four passes
  cfg.r_max = 100.0;
  const auto g = cfg.make_grid();
  auto s = initialize(cfg, g);
  for (int k = 0; k < 3; ++k) {
    const auto expected = oracle::straight_step(s.f_prev.values, s.f_cur.values, cfg.dr, cfg.dt,
                                                cfg.corrector_iters);
    s = step(s, cfg, g);
    CHECK(max_abs_diff(s.f_cur.values, expected) <= 1e-13);
    CHECK(s.step_index == k + 1);
  }

  // A perturbed, non-constant state exercises every term.
  FieldState p;
  p.f_cur = RadialField(g.size(), 0.0);
  p.f_prev = RadialField(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double r = g.r(j);
    p.f_cur[j] = 0.7 + 0.2 * std::exp(-r * r);
    p.f_prev[j] = p.f_cur[j] + 0.003 * std::cos(r) * cfg.dt;
  }
  const auto expected = oracle::straight_step(p.f_prev.values, p.f_cur.values, cfg.dr, cfg.dt, 4);
  CHECK(max_abs_diff(step(p, cfg, g).f_cur.values, expected) <= 1e-13);
}

TEST_CASE("solver: constant state is stationary") {
  auto cfg = small_config(0.0, 20.0);
  const auto g = cfg.make_grid();
  auto s = initialize(cfg, g);
  Stepper stepper(cfg, g);
  for (int k = 0; k < 10000; ++k) stepper.advance(s);
  double dev = 0.0;
  for (double v : s.f_cur.values) dev = std::max(dev, std::abs(v - 1.0));
  CHECK(dev <= 1e-10);
  CHECK(s.t == doctest::Approx(10.0));
}

TEST_CASE("solver: forward then backward step returns the start") {
  SimConfig cfg = small_config(-0.01, 10.0);
  cfg.corrector_iters = 40;
  const auto g = cfg.make_grid();
  FieldState a;
  a.f_prev = RadialField(g.size(), 0.0);
  a.f_cur = RadialField(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double r = g.r(j);
    a.f_prev[j] = 0.9 + 0.05 * std::exp(-r * r) + 1e-5;
    a.f_cur[j] = 0.9 + 0.05 * std::exp(-r * r);
  }
  apply_boundaries(a.f_prev.view());
  apply_boundaries(a.f_cur.view());

  const auto fwd = step(a, cfg, g);
  FieldState back;
  back.f_prev = fwd.f_cur;
  back.f_cur = fwd.f_prev;
  const auto ret = step(back, cfg, g);
  CHECK(max_abs_diff(ret.f_cur.values, a.f_prev.values, 1, g.size() - 1) <= 1e-12);
}

TEST_CASE("solver: corrector delta is tiny for the standard parameters") {
  SimConfig cfg;
  cfg.r_max = 20.0;
  const auto g = cfg.make_grid();
  auto s = initialize(cfg, g);
  Stepper stepper(cfg, g);
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    stepper.advance(s);
    worst = std::max(worst, s.corrector_delta);
  }
  CHECK(worst <= 1e-10 * cfg.f0);
}

TEST_CASE("solver: boundary relations hold after each step") {
  SimConfig cfg = small_config(-0.05, 3.0);
  const auto g = cfg.make_grid();
  auto s = initialize(cfg, g);
  Stepper stepper(cfg, g);
  for (int k = 0; k < 500; ++k) {
    stepper.advance(s);
    const auto& f = s.f_cur;
    CHECK(std::abs(f[0] - (4.0 / 3.0 * f[1] - 1.0 / 3.0 * f[2])) <= 4e-16);
    CHECK(f[g.size() - 1] == f[g.size() - 2]);
  }
}

TEST_CASE("solver: stationary run halts at max_steps with a constant trace") {
  SimConfig cfg = small_config(0.0, 2.0);
  cfg.max_steps = 1000;
  const auto res = run(cfg);
  CHECK(res.halt_reason == HaltReason::MaxSteps);
  CHECK(res.steps == 1000);
  CHECK(res.trace.size() == 1001);
  for (const auto& s : res.trace.samples) CHECK(s.f_origin == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solver: fast collapse is monotone and stops at the stop height") {
  SimConfig cfg;
  cfg.v0 = -0.1;
  cfg.r_max = 20.0;
  cfg.slice_times = {1.0, 3.0, 3.0004, 5.0};
  const auto res = run(cfg);
  REQUIRE(res.halt_reason == HaltReason::ReachedStopHeight);
  CHECK(res.trace.samples.back().f_origin <= 0.05);
  CHECK(res.trace.samples[res.trace.size() - 2].f_origin > 0.05);

  const std::size_t skip = res.trace.size() / 100;
  for (std::size_t i = skip + 1; i < res.trace.size(); ++i) {
    CHECK(res.trace.samples[i].f_origin <= res.trace.samples[i - 1].f_origin);
  }
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace.samples[i].t > res.trace.samples[i - 1].t);

  // 3.0 and 3.0004 share a step; one slice each for 1, 3, 5.
  REQUIRE(res.slices.size() == 3);
  CHECK(res.slices[0].t == doctest::Approx(1.0));
  CHECK(res.slices[2].t == doctest::Approx(5.0));
  // Away from the origin the profile stays flat.
  const auto& last = res.slices[2].values;
  const double outer = last[last.size() - 1];
  for (std::size_t j = static_cast<std::size_t>(10.0 / cfg.dr); j < last.size(); ++j) {
    CHECK(std::abs(last[j] - outer) <= 0.05 * cfg.f0);
  }
}

TEST_CASE("solver: sampling decimates storage only") {
  SimConfig a;
  a.v0 = -0.05;
  a.r_max = 5.0;
  a.max_steps = 400;
  SimConfig b = a;
  b.sample_every = 10;
  const auto ra = run(a);
  const auto rb = run(b);
  REQUIRE(rb.trace.size() == 41);
  for (std::size_t i = 0; i < rb.trace.size(); ++i) {
    CHECK(rb.trace.samples[i].t == ra.trace.samples[10 * i].t);
    CHECK(rb.trace.samples[i].f_origin == ra.trace.samples[10 * i].f_origin);
  }
}

TEST_CASE("solver: passing the blow-up is reported") {
  SimConfig cfg;
  cfg.v0 = -0.5;
  cfg.dr = 0.05;
  cfg.dt = 0.05;
  cfg.r_max = 3.0;
  cfg.stop_height = 1e-12;
  const auto res = run(cfg);
  CHECK(res.halt_reason == HaltReason::BlowUpPassed);
  for (const auto& s : res.trace.samples) {
    CHECK(std::isfinite(s.f_origin));
    CHECK(s.f_origin > 0.0);
  }
}
