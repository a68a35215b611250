#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "steerkit/harness.hpp"
#include "steerkit/parallel.hpp"

using namespace steerkit;

namespace {

ScanConfig small_config() {
  ScanConfig c;
  c.cutoff = 2;
  c.seeds = 2;
  c.angle_count = 8;
  return c;
}

std::string csv_of(const ScanConfig& c) {
  std::ostringstream out;
  write_scan_csv(out, scan(c));
  return out.str();
}

}  // namespace

TEST_CASE("scan config parsing") {
  const ScanConfig d = parse_scan_config("{}");
  CHECK(d.dim == 2);
  CHECK(d.angle_count == 72);
  CHECK(d.filters.size() == 2);

  const ScanConfig c = parse_scan_config(
      R"({"dim": 3, "cutoff": 0, "n_a": 8, "interp": "nearest", "quadrature": "dh", "seeds": 3})");
  CHECK(c.dim == 3);
  CHECK(c.input_shape == std::vector<std::int64_t>{16, 16, 16});
  CHECK(c.axes == std::vector<std::string>{"y", "z"});
  CHECK(c.filters == std::vector<FilterKind>{FilterKind::nearest});
  CHECK(c.quadrature == Quadrature::driscoll_healy);

  CHECK_THROWS_AS(parse_scan_config(R"({"cutoffs": 2})"), Error);
  CHECK_THROWS_AS(parse_scan_config(R"({"input_shape": [10, 10]})"), Error);
  CHECK_THROWS_AS(parse_scan_config(R"({"angle_count": 0})"), Error);
  CHECK_THROWS_AS(parse_scan_config(R"({"axis": "y"})"), Error);
  CHECK_THROWS_AS(parse_scan_config(R"({"interp": "cubic"})"), Error);
  CHECK_THROWS(parse_scan_config("[1, 2]"));
}

TEST_CASE("canvas holds every rotation of the input") {
  const Box b = scan_canvas(2, {16, 16}, 2.0, 2);
  CHECK(b.shape == std::vector<std::int64_t>{50, 50});
  CHECK(scan_canvas(2, {15, 16}, 2.0, 2).shape == std::vector<std::int64_t>{49, 48});
}

TEST_CASE("model is a deterministic function of the seed") {
  const ScanConfig c = small_config();
  const Model a = build_model(c, FilterKind::linear, 4);
  const Model b = build_model(c, FilterKind::linear, 4);
  const Model other = build_model(c, FilterKind::linear, 5);
  const ScalarGridField f = scan_input(c, a.canvas, 4);
  CHECK(a(f) == b(f));
  CHECK(a(f) != other(f));
  CHECK(scan_input(c, a.canvas, 4).values == f.values);

  const ScalarGridField zero = ScalarGridField::zeros(a.canvas);
  for (double v : a(zero)) CHECK(v == 0.0);
  CHECK_THROWS_AS(equivariance_error(a, zero, 1.0, "z"), Error);
}

TEST_CASE("input sits in the middle of the canvas") {
  const ScanConfig c = small_config();
  const Box canvas = scan_canvas(2, c.input_shape, c.h, 2);
  const ScalarGridField f = scan_input(c, canvas, 0);
  std::int64_t lo = canvas.shape[0], hi = -1;
  for (std::size_t i = 0; i < canvas.sites(); ++i)
    if (f.values[i] != 0.0) {
      lo = std::min(lo, canvas.point(i)[0]);
      hi = std::max(hi, canvas.point(i)[0]);
    }
  CHECK(hi - lo + 1 == 16);
  CHECK(lo == canvas.shape[0] - 1 - hi);
}

TEST_CASE("equivariance error at identity and quarter turns") {
  const ScanConfig c = small_config();
  for (auto kind : {FilterKind::linear, FilterKind::nearest}) {
    const Model m = build_model(c, kind, 1);
    const ScalarGridField f = scan_input(c, m.canvas, 1);
    CHECK(equivariance_error(m, f, 0.0, "z") == 0.0);
    for (int q = 1; q <= 3; ++q) CHECK(equivariance_error(m, f, q * kPi / 2, "z") < 1e-6);
    CHECK(equivariance_error(m, f, kPi / 4, "z") > 0.0);
  }
}

TEST_CASE("3D cutoff-0 model under quarter turns about z") {
  ScanConfig c;
  c.dim = 3;
  c.cutoff = 0;
  c.n_r = 1;
  c.n_a = 8;
  c.h = 1.5;
  c.quadrature = Quadrature::driscoll_healy;
  c.input_shape = {14, 14, 14};
  const Model m = build_model(c, FilterKind::linear, 2);
  const ScalarGridField f = scan_input(c, m.canvas, 2);
  CHECK(equivariance_error(m, f, kPi / 2, "z") < 1e-6);
  CHECK(equivariance_error(m, f, kPi / 5, "y") > 0.0);
}

TEST_CASE("scan rows, determinism and thread independence") {
  const ScanConfig c = small_config();
  const auto rows = scan(c);
  REQUIRE(rows.size() == 2 * 2 * 8);
  CHECK(rows[0].angle_deg == 0.0);
  CHECK(rows[0].error == 0.0);
  for (const auto& r : rows) CHECK(r.error >= 0.0);

  const unsigned saved = thread_count();
  set_thread_count(1);
  const std::string one = csv_of(c);
  set_thread_count(3);
  const std::string three = csv_of(c);
  set_thread_count(saved);
  CHECK(one == three);
  CHECK(one.rfind("angle_deg,axis,filter,seed,error\n0,z,linear,0,0\n", 0) == 0);
}

TEST_CASE("error is continuous in the angle for linear filters") {
  ScanConfig c = small_config();
  c.filters = {FilterKind::linear};
  c.seeds = 1;
  c.angle_count = 72;
  const auto rows = scan(c);
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    if (std::fmod(rows[i].angle_deg, 90.0) == 0.0) continue;
    std::vector<double> around;
    for (std::size_t j = (i >= 3 ? i - 3 : 0); j <= std::min(rows.size() - 1, i + 3); ++j)
      if (j != i && std::fmod(rows[j].angle_deg, 90.0) != 0.0) around.push_back(rows[j].error);
    std::nth_element(around.begin(), around.begin() + around.size() / 2, around.end());
    CHECK(rows[i].error <= 10.0 * around[around.size() / 2]);
  }
}

TEST_CASE("rate slope") {
  std::vector<RateRow> rows;
  for (int n : {8, 16, 32, 64}) {
    rows.push_back({n, FilterKind::linear, 0, 3.0 / n});
    rows.push_back({n, FilterKind::linear, 1, 5.0 / n});
    rows.push_back({n, FilterKind::nearest, 0, 0.25});
  }
  CHECK(rate_slope(rows, FilterKind::linear) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(rate_slope(rows, FilterKind::nearest)) < 1e-12);
  CHECK_THROWS_AS(rate_slope(rows, FilterKind::cartesian), Error);

  ScanConfig c = small_config();
  c.seeds = 1;
  const auto study = rate_study(c, {8, 16});
  CHECK(study.size() == 4);
  for (const auto& r : study) CHECK(r.error > 0.0);
}

TEST_CASE("verification suites and the corrupted-CG control") {
  for (const char* suite : {"cg", "delta"}) {
    const auto results = verify(suite);
    CHECK(!results.empty());
    for (const auto& r : results) CHECK_MESSAGE(r.passed, r.suite << "." << r.name);
  }
  const auto bad = verify("cg", {true});
  const auto failed = std::count_if(bad.begin(), bad.end(), [](const CheckResult& r) { return !r.passed; });
  CHECK(failed > 0);
  CHECK(std::any_of(bad.begin(), bad.end(),
                    [](const CheckResult& r) { return !r.passed && r.name == "reconstruction"; }));
  CHECK_THROWS_AS(verify("nope"), Error);

  std::ostringstream out;
  print_report(out, bad);
  CHECK(out.str().find("FAIL cg.reconstruction") != std::string::npos);
}
