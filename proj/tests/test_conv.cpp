#include <cmath>
#include <random>

#include "doctest.h"
#include "steerkit/conv.hpp"
#include "steerkit/layers.hpp"
#include "test_util.hpp"

using namespace steerkit;
using test::max_abs;

namespace {

BasisParams params2(int cutoff, FilterKind kind = FilterKind::linear) {
  BasisParams p;
  p.dim = 2;
  p.cutoff = cutoff;
  p.n_r = 2;
  p.n_a = 16;
  p.h = 2.0;
  p.kind = kind;
  if (kind == FilterKind::cartesian) p.taus = default_taus(2, 2);
  return p;
}

ScalarGridField random_scalar(Box box, std::mt19937_64& rng) {
  ScalarGridField f = ScalarGridField::zeros(std::move(box));
  std::normal_distribution<double> g;
  for (auto& v : f.values) v = g(rng);
  return f;
}

SteerableField random_steerable(Box box, const std::vector<int>& degrees, int channels, std::mt19937_64& rng) {
  SteerableField f{std::move(box), {}};
  std::normal_distribution<double> g;
  for (int l : degrees) {
    f.add_block(IrrepId::make(2, l), channels);
    for (auto& v : f.blocks.back().values) v = cplx(g(rng), g(rng));
  }
  return f;
}

SteerableField combine(const SteerableField& a, cplx x, const SteerableField& b, cplx y) {
  SteerableField out = a;
  for (std::size_t k = 0; k < out.blocks.size(); ++k)
    for (std::size_t i = 0; i < out.blocks[k].values.size(); ++i)
      out.blocks[k].values[i] = x * a.blocks[k].values[i] + y * b.blocks[k].values[i];
  return out;
}

}  // namespace

TEST_CASE("valid output box") {
  const Box out = valid_box({{0, 0}, {10, 12}}, filter_footprint(2, 2.0));
  CHECK(out.origin == Lattice{3, 3});
  CHECK(out.shape == std::vector<std::int64_t>{4, 6});
  CHECK_THROWS_AS(valid_box({{0, 0}, {6, 12}}, filter_footprint(2, 2.0)), Error);
}

TEST_CASE("first layer on zero and delta inputs") {
  const FilterBasis b = basis_first(params2(2));
  const KernelBank bank = assemble(b, random_weights(b, 1, 1, 3));
  const Box box{{-5, -5}, {11, 11}};
  const SteerableField zero = conv_first(ScalarGridField::zeros(box), bank);
  CHECK(test::max_value(zero) == 0.0);

  WeightSet single = WeightSet::zeros(b, 1, 1);
  for (std::size_t k = 0; k < b.keys.size(); ++k) single.at(1, k, 0, 0) = 1.0;
  ScalarGridField delta = ScalarGridField::zeros(box);
  delta.values[box.index({0, 0})] = 1.0;
  const SteerableField out = conv_first(delta, assemble(b, single));
  for (std::size_t k = 0; k < b.keys.size(); ++k) {
    const FieldBlock& blk = *out.find(b.keys[k][0]);
    for (std::size_t s = 0; s < out.box.sites(); ++s) {
      const Lattice x = out.box.point(s);
      const Lattice y{-x[0], -x[1]};
      const cplx expected = b.footprint.contains(y) ? b.at(1, k, b.footprint.index(y))(0, 0) : cplx{};
      CHECK(blk.values[s] == expected);
    }
  }
}

TEST_CASE("linearity and integer-translation equivariance") {
  std::mt19937_64 rng(5);
  const FilterBasis b = basis_higher(params2(2), CGTable(2, 16));
  const KernelBank bank = assemble(b, random_weights(b, 2, 2, 9));
  const Box box{{0, 0}, {12, 13}};
  const SteerableField f = random_steerable(box, {0, 1, 2}, 2, rng);
  const SteerableField g = random_steerable(box, {0, 1, 2}, 2, rng);
  const cplx a(0.7, -1.1), c(-2.0, 0.3);
  const SteerableField lhs = conv_higher(combine(f, a, g, c), bank);
  const SteerableField rhs = combine(conv_higher(f, bank), a, conv_higher(g, bank), c);
  CHECK(test::field_diff(lhs, rhs) < 1e-10 * std::max(1.0, test::max_value(rhs)));

  const SteerableField base = conv_higher(f, bank);
  for (const Lattice& z : {Lattice{3, -2}, Lattice{-7, 5}}) {
    SteerableField shifted = f;
    for (int k = 0; k < 2; ++k) shifted.box.origin[k] -= z[k];
    const SteerableField moved = conv_higher(shifted, bank);
    SteerableField expected = base;
    for (int k = 0; k < 2; ++k) expected.box.origin[k] -= z[k];
    CHECK(test::field_diff(moved, expected) == 0.0);
  }
}

TEST_CASE("cutoff-0 higher layer equals the first layer") {
  std::mt19937_64 rng(6);
  const BasisParams p = params2(0);
  const FilterBasis first = basis_first(p);
  const FilterBasis higher = basis_higher(p, CGTable(2, 16));
  const WeightSet w1 = random_weights(first, 1, 1, 1);
  WeightSet wh = WeightSet::zeros(higher, 1, 1);
  for (int r = 1; r <= 2; ++r) wh.at(r, 0, 0, 0) = w1.at(r, 0, 0, 0);  // |F| = 1
  const ScalarGridField f = random_scalar({{0, 0}, {10, 10}}, rng);
  CHECK(test::field_diff(conv_first(f, assemble(first, w1)), conv_higher(to_steerable(f), assemble(higher, wh))) <
        1e-14);
}

TEST_CASE("equivariance under quarter turns") {
  std::mt19937_64 rng(8);
  for (auto kind : {FilterKind::linear, FilterKind::nearest, FilterKind::cartesian}) {
    const BasisParams p = params2(3, kind);
    const FilterBasis first = build_basis(p, LayerKind::first);
    const FilterBasis higher = build_basis(p, LayerKind::higher);
    const KernelBank k1 = assemble(first, random_weights(first, 1, 2, 4));
    const KernelBank k2 = assemble(higher, random_weights(higher, 2, 1, 5));
    const SteerableField f = to_steerable(random_scalar({{-9, -8}, {19, 18}}, rng));
    const SteerableField out = conv_higher(conv_first(f, k1), k2);
    for (int q = 1; q <= 3; ++q) {
      const RMat r = rot2(q * kPi / 2);
      const SteerableField rotated = conv_higher(conv_first(test::rotate_lattice(f, r), k1), k2);
      CHECK(test::field_diff(test::rotate_lattice(out, r), rotated) < 1e-9);
    }
  }
}

TEST_CASE("Fourier-path oracle agrees with conv_first") {
  std::mt19937_64 rng(10);
  const BasisParams p = params2(2);
  const FilterBasis b = basis_first(p);
  const double c = oracle_rescale(p);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ScalarGridField f = random_scalar({{0, 0}, {8, 8}}, rng);
    const WeightSet w = random_weights(b, 1, 1, seed);
    SteerableField fast = conv_first(f, assemble(b, w));
    for (auto& blk : fast.blocks)
      for (auto& v : blk.values) v *= c;
    const SteerableField slow = conv_oracle_first(f, p, w);
    CHECK(test::field_diff(slow, fast) < 1e-6 * test::max_value(slow));
  }
  const ScalarGridField zero = ScalarGridField::zeros({{0, 0}, {8, 8}});
  CHECK(test::max_value(conv_oracle_first(zero, p, random_weights(b, 1, 1, 1))) == 0.0);
}

TEST_CASE("layers: normalize") {
  std::mt19937_64 rng(12);
  const SteerableField f = random_steerable({{0, 0}, {4, 5}}, {0, 1, 2}, 3, rng);
  const SteerableField n = normalize(f);
  for (std::size_t s = 0; s < f.box.sites(); ++s)
    for (int c = 0; c < 3; ++c) {
      double sq = 0;
      for (const auto& b : n.blocks) sq += std::norm(b.values[b.offset(s, 0, c)]);
      CHECK(std::abs(sq - 1.0) < 1e-12);
    }
  CHECK(test::field_diff(normalize(n), n) < 1e-12);
  CHECK(test::field_diff(normalize(combine(f, 3.5, f, 0.0)), n) < 1e-12);
  SteerableField z = f;
  for (auto& b : z.blocks) std::fill(b.values.begin(), b.values.end(), cplx{});
  CHECK(test::max_value(normalize(z)) == 0.0);
}

TEST_CASE("layers: avg_pool") {
  std::mt19937_64 rng(13);
  const SteerableField f = random_steerable({{2, -4}, {6, 8}}, {0, 3}, 2, rng);
  CHECK(test::field_diff(avg_pool(f, {1, 1}), f) == 0.0);
  const SteerableField p = avg_pool(f, {2, 4});
  CHECK(p.box.shape == std::vector<std::int64_t>{3, 2});
  for (std::size_t k = 0; k < f.blocks.size(); ++k)
    for (int c = 0; c < 2; ++c) {
      cplx a{}, b{};
      for (std::size_t s = 0; s < f.box.sites(); ++s) a += f.blocks[k].values[f.blocks[k].offset(s, 0, c)];
      for (std::size_t s = 0; s < p.box.sites(); ++s) b += p.blocks[k].values[p.blocks[k].offset(s, 0, c)];
      CHECK(std::abs(a - 8.0 * b) < 1e-10);
    }
  SteerableField constant = f;
  for (auto& b : constant.blocks) std::fill(b.values.begin(), b.values.end(), cplx(1.5, -0.5));
  for (cplx v : avg_pool(constant, {3, 2}).flat()) CHECK(std::abs(v - cplx(1.5, -0.5)) < 1e-15);
  CHECK_THROWS_AS(avg_pool(f, {4, 4}), Error);
}

TEST_CASE("layers: flatten_invariant") {
  std::mt19937_64 rng(14);
  SteerableField z = random_steerable({{0, 0}, {3, 3}}, {0, 1}, 2, rng);
  for (auto& b : z.blocks) std::fill(b.values.begin(), b.values.end(), cplx{});
  for (double v : flatten_invariant(z)) CHECK(v == 0.0);
  const SteerableField one = random_steerable({{5, 5}, {1, 1}}, {0, 1, 2}, 1, rng);
  double sq = 0;
  for (cplx v : one.flat()) sq += std::norm(v);
  CHECK(flatten_invariant(one)[0] == doctest::Approx(std::sqrt(sq)));
  const SteerableField f = random_steerable({{-3, -3}, {7, 7}}, {0, 1, 2}, 2, rng);
  const auto base = flatten_invariant(f);
  const auto turned = flatten_invariant(test::rotate_lattice(f, rot2(kPi / 2)));
  for (int c = 0; c < 2; ++c) CHECK(std::abs(base[c] - turned[c]) < 1e-12);
}

TEST_CASE("layers: CG nonlinearity") {
  std::mt19937_64 rng(15);
  const CGTable cg(2, 16);
  SteerableField scalar = random_steerable({{0, 0}, {3, 4}}, {0}, 2, rng);
  const NonlinearityWeights w0 = random_nonlinearity(scalar, cg, 1);
  REQUIRE(w0.keys.size() == 1);
  const SteerableField sq = cg_nonlinearity(scalar, w0, cg);
  for (std::size_t i = 0; i < sq.blocks[0].values.size(); ++i) {
    const cplx v = scalar.blocks[0].values[i];
    CHECK(std::abs(sq.blocks[0].values[i] - w0.eta[0] * v * v) < 1e-12);
  }

  const SteerableField f = random_steerable({{-3, -3}, {7, 7}}, {0, 1, 2, 3}, 2, rng);
  const NonlinearityWeights w = random_nonlinearity(f, cg, 2);
  for (const auto& k : w.keys) CHECK(k[0] == k[1] + k[2]);
  SteerableField zero = f;
  for (auto& b : zero.blocks) std::fill(b.values.begin(), b.values.end(), cplx{});
  CHECK(test::max_value(cg_nonlinearity(zero, w, cg)) == 0.0);
  const SteerableField out = cg_nonlinearity(f, w, cg);
  for (int q = 1; q <= 3; ++q) {
    const RMat r = rot2(q * kPi / 2);
    CHECK(test::field_diff(test::rotate_lattice(out, r), cg_nonlinearity(test::rotate_lattice(f, r), w, cg)) < 1e-9);
  }

  // 3D: equivariance under arbitrary rotations, pointwise.
  const CGTable cg3(3);
  SteerableField g{{{0, 0, 0}, {2, 1, 1}}, {}};
  std::normal_distribution<double> gauss;
  for (int l = 0; l <= 2; ++l) {
    g.add_block(IrrepId::make(3, l), 1);
    for (auto& v : g.blocks.back().values) v = cplx(gauss(rng), gauss(rng));
  }
  const NonlinearityWeights w3 = random_nonlinearity(g, cg3, 3);
  const RMat r = test::random_rotation(3, rng);
  SteerableField turned = g;
  for (auto& b : turned.blocks) {
    const CMat rho = wigner_d(b.irrep.degree, r);
    for (std::size_t s = 0; s < g.box.sites(); ++s) {
      Eigen::Map<CVec> v(&b.values[b.offset(s, 0, 0)], b.irrep.irrep_dim);
      v = (rho * v).eval();
    }
  }
  SteerableField expected = cg_nonlinearity(g, w3, cg3);
  for (auto& b : expected.blocks) {
    const CMat rho = wigner_d(b.irrep.degree, r);
    for (std::size_t s = 0; s < g.box.sites(); ++s) {
      Eigen::Map<CVec> v(&b.values[b.offset(s, 0, 0)], b.irrep.irrep_dim);
      v = (rho * v).eval();
    }
  }
  CHECK(test::field_diff(cg_nonlinearity(turned, w3, cg3), expected) < 1e-9);
}

TEST_CASE("layers: energy_invariant") {
  SteerableField f{{{0, 0}, {2, 1}}, {}};
  f.add_block(IrrepId::make(2, 0), 2);
  f.add_block(IrrepId::make(2, 1), 2);
  f.blocks[0].values = {cplx(3, 0), cplx(1, 0), cplx(0, 4), cplx(0, 0)};
  f.blocks[1].values = {cplx(1, 1), cplx(0, 0), cplx(0, 0), cplx(0, 2)};
  const auto e = energy_invariant(f);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == doctest::Approx(5.0));
  CHECK(e[1] == doctest::Approx(1.0));
  CHECK(e[2] == doctest::Approx(std::sqrt(2.0)));
  CHECK(e[3] == doctest::Approx(2.0));

  std::mt19937_64 rng(16);
  const SteerableField g = random_steerable({{-2, -3}, {5, 7}}, {-1, 0, 2}, 2, rng);
  const auto base = energy_invariant(g);
  const auto turned = energy_invariant(test::rotate_lattice(g, rot2(kPi / 2)));
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(std::abs(base[i] - turned[i]) < 1e-12);
}
