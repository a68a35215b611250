#include <cmath>
#include <random>

#include "doctest.h"
#include "steerkit/field.hpp"
#include "steerkit/interp.hpp"
#include "test_util.hpp"

using namespace steerkit;
using test::max_abs;

namespace {

const InterpKernelSpec kLinear2{InterpKind::linear, 2};
const InterpKernelSpec kNearest2{InterpKind::nearest, 2};

RVec vec(std::initializer_list<double> v) {
  RVec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x(i++) = a;
  return x;
}

ScalarGridField random_field(Box box, std::mt19937_64& rng) {
  ScalarGridField f = ScalarGridField::zeros(std::move(box));
  std::normal_distribution<double> g;
  for (auto& v : f.values) v = cplx(g(rng), g(rng));
  return f;
}

// Smooth bump sampled on a box.
ScalarGridField bump(Box box, double cx, double cy, double sigma) {
  ScalarGridField f = ScalarGridField::zeros(std::move(box));
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const Lattice p = f.box.point(i);
    const double dx = p[0] - cx, dy = p[1] - cy;
    f.values[i] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
  }
  return f;
}

}  // namespace

TEST_CASE("kernel weights") {
  const InterpKernelSpec lin1{InterpKind::linear, 1};
  CHECK(kernel_weight(lin1, vec({0.25}), {0}) == doctest::Approx(0.75));
  CHECK(kernel_weight(lin1, vec({0.25}), {1}) == doctest::Approx(0.25));
  CHECK(kernel_weight(lin1, vec({0.25}), {2}) == 0.0);
  CHECK(kernel_weight(kLinear2, vec({3, -2}), {3, -2}) == 1.0);
  const InterpKernelSpec near1{InterpKind::nearest, 1};
  CHECK(kernel_weight(near1, vec({0.5}), {1}) == 1.0);
  CHECK(kernel_weight(near1, vec({0.5}), {0}) == 0.0);
  CHECK(kernel_weight(near1, vec({-0.5}), {0}) == 1.0);
  CHECK(kernel_weight(near1, vec({0.49}), {0}) == 1.0);
}

TEST_CASE("kernel axioms") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (const auto& spec : {kLinear2, kNearest2}) {
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b)
        for (int c = -1; c <= 1; ++c)
          CHECK(kernel_weight(spec, vec({double(a), double(b)}), {a + c, b}) == (c == 0 ? 1.0 : 0.0));
    for (int i = 0; i < 200; ++i) {
      const RVec x = vec({u(rng), u(rng)});
      const Lattice z{std::int64_t(u(rng)), std::int64_t(u(rng))};
      double mass = 0;
      for (const auto& e : footprint(spec, x)) {
        mass += std::abs(e.weight);
        CHECK(e.weight == doctest::Approx(kernel_weight(spec, x, e.y)));
        const Lattice shifted{e.y[0] + z[0], e.y[1] + z[1]};
        const RVec xs = x + vec({double(z[0]), double(z[1])});
        CHECK(std::abs(kernel_weight(spec, xs, shifted) - kernel_weight(spec, x, e.y)) < 1e-12);
      }
      CHECK(mass <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("Hoelder continuity of the kernels") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3), small(-0.01, 0.01);
  double ratio = 0;
  for (int i = 0; i < 1000; ++i) {
    const RVec x = vec({u(rng), u(rng)});
    const RVec x2 = x + vec({small(rng), small(rng)});
    const Lattice y{std::int64_t(std::floor(x(0))), std::int64_t(std::floor(x(1)))};
    const double dw = std::abs(kernel_weight(kLinear2, x, y) - kernel_weight(kLinear2, x2, y));
    ratio = std::max(ratio, dw / (x - x2).norm());
    CHECK(std::abs(kernel_weight(kNearest2, x, y) - kernel_weight(kNearest2, x2, y)) <= 1.0);
  }
  CHECK(ratio <= 2.0);
}

TEST_CASE("interp_eval") {
  ScalarGridField f = ScalarGridField::zeros({{0, 0}, {1, 2}});
  f.values = {0.0, 1.0};
  CHECK(std::abs(interp_eval(f, kLinear2, vec({0, 0.5})) - 0.5) < 1e-15);
  std::mt19937_64 rng(7);
  const ScalarGridField r = random_field({{-2, -3}, {5, 6}}, rng);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const Lattice p = r.box.point(i);
    const RVec x = vec({double(p[0]), double(p[1])});
    CHECK(interp_eval(r, kLinear2, x) == r.values[i]);
    CHECK(interp_eval(r, kNearest2, x) == r.values[i]);
  }
  // Affine functions are reproduced by linear interpolation.
  ScalarGridField affine = ScalarGridField::zeros({{-10, -10}, {21, 21}});
  auto fa = [](double a, double b) { return cplx(0.5 + 2 * a - 0.75 * b, -a + 3 * b); };
  for (std::size_t i = 0; i < affine.values.size(); ++i) {
    const Lattice p = affine.box.point(i);
    affine.values[i] = fa(double(p[0]), double(p[1]));
  }
  std::uniform_real_distribution<double> u(-9, 9);
  double err = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    err = std::max(err, std::abs(interp_eval(affine, kLinear2, vec({a, b})) - fa(a, b)));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("resample at lattice-preserving motions") {
  std::mt19937_64 rng(9);
  const ScalarGridField f = random_field({{-3, -2}, {6, 5}}, rng);
  const ScalarGridField same = resample(f, kLinear2, RigidMotion::identity(2), f.box);
  CHECK(same.values == f.values);

  const RigidMotion shift = RigidMotion::translation(vec({2, -1}));
  const ScalarGridField moved = resample(f, kLinear2, shift);
  for (std::size_t i = 0; i < moved.values.size(); ++i) {
    const Lattice p = moved.box.point(i);
    CHECK(moved.values[i] == f.at({p[0] + 2, p[1] - 1}));
  }

  for (const auto& spec : {kLinear2, kNearest2}) {
    const ScalarGridField rot = resample(f, spec, RigidMotion::planar(kPi / 2));
    double total_in = 0, total_out = 0;
    for (std::size_t i = 0; i < rot.values.size(); ++i) {
      const Lattice p = rot.box.point(i);
      CHECK(rot.values[i] == f.at({-p[1], p[0]}));
      total_out += std::abs(rot.values[i]);
    }
    for (cplx v : f.values) total_in += std::abs(v);
    CHECK(total_in == doctest::Approx(total_out).epsilon(1e-14));
  }
}

TEST_CASE("Delta functional") {
  const RigidMotion quarter = RigidMotion::planar(kPi / 2);
  for (const auto& spec : {kLinear2, kNearest2}) {
    CHECK(delta(spec, RigidMotion::identity(2), 2) == 0.0);
    CHECK(delta(spec, RigidMotion::translation(vec({3, -1})), 2) == 0.0);
  }
  CHECK(delta(kLinear2, quarter, 2) < 1e-14);
  // Round-half-up ties are not rotation covariant: x = (1/2, -1/2).
  CHECK(delta(kNearest2, quarter, 2) == 1.0);
  const RigidMotion half = RigidMotion::translation(vec({0.5, 0}));
  const double d32 = delta(kLinear2, half, 2, 32);
  const double d64 = delta(kLinear2, half, 2, 64);
  CHECK(d32 > 0.0);
  CHECK(d32 == doctest::Approx(0.5));
  CHECK(d64 >= d32);
  CHECK(std::abs(d64 - d32) < 0.05 * d32);

  const RigidMotion turn = RigidMotion::planar(kPi / 6);
  const double r32 = delta(kLinear2, turn, 2, 32);
  const double r64 = delta(kLinear2, turn, 2, 64);
  CHECK(r32 > 0.0);
  CHECK(std::abs(r64 - r32) < 0.05 * r32);
  CHECK(delta(kNearest2, turn, 2, 16) == 1.0);
}

TEST_CASE("resample roundtrip stays within the Delta bound") {
  const ScalarGridField f = bump({{-8, -8}, {17, 17}}, 0.3, -0.6, 2.0);
  for (double angle : {kPi / 7, kPi / 5}) {
    const RigidMotion m = RigidMotion::planar(angle);
    const ScalarGridField back = resample(resample(f, kLinear2, m), kLinear2, se_inverse(m), f.box);
    double err = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i) err = std::max(err, std::abs(back.values[i] - f.values[i]));
    const double bound = (delta(kLinear2, m, 2, 8) + delta(kLinear2, se_inverse(m), 2, 8)) * f.l1_norm();
    CHECK(err <= 2 * bound);
    CHECK(err > 0.0);
  }
}

TEST_CASE("STFD1 roundtrip") {
  std::mt19937_64 rng(13);
  SteerableField f{{{-1, 2}, {3, 4}}, {}};
  f.add_block(IrrepId::make(2, 0), 2);
  f.add_block(IrrepId::make(2, -3), 1);
  std::normal_distribution<double> g;
  for (auto& b : f.blocks)
    for (auto& v : b.values) v = cplx(g(rng), g(rng));
  const auto bytes = encode_field(f);
  CHECK(std::string(bytes.begin(), bytes.begin() + 5) == "STFD1");
  const SteerableField back = decode_field(bytes);
  CHECK(back.box == f.box);
  REQUIRE(back.blocks.size() == 2);
  CHECK(back.blocks[1].irrep == f.blocks[1].irrep);
  CHECK(back.flat() == f.flat());
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_field(truncated), Error);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_field(bad), Error);
}
