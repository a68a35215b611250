#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "steerkit/harness.hpp"
#include "steerkit/sphere.hpp"

namespace steerkit {

namespace {

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

RMat haar_rotation(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (d == 2) return rot2(kTwoPi * u(rng));
  if (d == 3) return euler_zyz(kTwoPi * u(rng), std::acos(1.0 - 2.0 * u(rng)), kTwoPi * u(rng));
  std::normal_distribution<double> g;
  RMat a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  Eigen::HouseholderQR<RMat> qr(a);
  RMat q = qr.householderQ();
  RMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

RVec random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RVec v(d);
  for (int i = 0; i < d; ++i) v(i) = g(rng);
  return v.normalized();
}

struct Report {
  std::string suite;
  std::vector<CheckResult>* out;
  void add(const std::string& name, double residual, double tolerance) {
    out->push_back({suite, name, residual, tolerance, std::isfinite(residual) && (residual < tolerance || (residual == 0 && tolerance == 0))});
  }
  void add_at_least(const std::string& name, double value, double floor) {
    out->push_back({suite, name, value, floor, value > floor});
  }
};

void corrupt(CGTable& table, const VerifyOptions& options) {
  if (options.corrupt_cg) {
    CGBlock b = *table.get(1, 1, 1);
    b.matrix.col(0) *= std::polar(1.0, kPi / 3);
    b.rebuild_tilde();
    table.override_block(std::move(b));
  }
}

void suite_cg(Report& r, const VerifyOptions& options) {
  CGTable table(3);
  corrupt(table, options);
  std::mt19937_64 rng(101);
  std::vector<RMat> rotations;
  for (int i = 0; i < 20; ++i) rotations.push_back(haar_rotation(3, rng));

  double recon = 0, inter = 0, ortho = 0, phase = 0;
  for (int l1 = 0; l1 <= 3; ++l1)
    for (int l2 = 0; l2 <= 3; ++l2) {
      const int n = (2 * l1 + 1) * (2 * l2 + 1);
      for (const RMat& g : rotations) {
        const CMat kr = Eigen::kroneckerProduct(wigner_d(l1, g), wigner_d(l2, g)).eval();
        CMat sum = CMat::Zero(n, n);
        for (int l = std::abs(l1 - l2); l <= l1 + l2; ++l) {
          const CGBlock* b = table.get(l, l1, l2);
          if (!b) {
            recon = INFINITY;
            continue;
          }
          const CMat rho = wigner_d(l, g);
          sum += b->matrix * rho * b->matrix.adjoint();
          inter = std::max(inter, max_abs(kr * b->matrix - b->matrix * rho));
        }
        recon = std::max(recon, max_abs(sum - kr));
      }
      for (int l = std::abs(l1 - l2); l <= l1 + l2; ++l) {
        const CGBlock* b = table.get(l, l1, l2);
        if (!b) continue;
        const CMat& c = b->matrix;
        ortho = std::max(ortho, max_abs(c.adjoint() * c - CMat::Identity(c.cols(), c.cols())));
        const double scale = c.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < c.size(); ++i)
          if (std::abs(c.data()[i]) > 1e-8 * scale) {
            const cplx v = c.data()[i];
            phase = std::max(phase, v.real() > 0 ? std::abs(v.imag()) / std::abs(v) : 1.0);
            break;
          }
      }
    }
  r.add("reconstruction", recon, 1e-9);
  r.add("intertwining", inter, 1e-9);
  r.add("orthonormality", ortho, 1e-10);
  r.add("phase_convention", phase, 1e-12);

  // Fourier transform of f(g, g) on SO(2) x SO(2), against a direct DFT.
  constexpr int kGrid = 64, kCut = 4;
  std::normal_distribution<double> gauss;
  CMat coef(2 * kCut + 1, 2 * kCut + 1);
  for (Eigen::Index i = 0; i < coef.size(); ++i) coef.data()[i] = cplx(gauss(rng), gauss(rng));
  const CGTable so2(2);
  double diag = 0;
  for (int k = -2 * kCut; k <= 2 * kCut; ++k) {
    cplx direct{};
    for (int j = 0; j < kGrid; ++j) {
      const double t = kTwoPi * j / kGrid;
      cplx v{};
      for (int k1 = -kCut; k1 <= kCut; ++k1)
        for (int k2 = -kCut; k2 <= kCut; ++k2) v += coef(k1 + kCut, k2 + kCut) * std::polar(1.0, (k1 + k2) * t);
      direct += v * std::polar(1.0, k * t);
    }
    direct /= double(kGrid);
    // The transform of e^{i(k1 g1 + k2 g2)} is supported at (-k1, -k2).
    cplx assembled{};
    for (int k1 = -kCut; k1 <= kCut; ++k1)
      for (int k2 = -kCut; k2 <= kCut; ++k2)
        if (const CGBlock* b = so2.get(k, k1, k2)) {
          CMat a(1, 1);
          a(0, 0) = coef(kCut - k1, kCut - k2);
          assembled += cg_decompose(a, *b)(0, 0);
        }
    diag = std::max(diag, std::abs(direct - assembled));
  }
  r.add("diagonal_restriction", diag, 1e-10);
}

void suite_sht(Report& r) {
  std::mt19937_64 rng(202);
  double err2 = 0, err3 = 0, err4 = 0;
  for (int i = 0; i < 30; ++i) {
    const double phi = std::uniform_real_distribution<double>(0, kTwoPi)(rng);
    const RVec s2 = random_unit(2, rng);
    for (int l = -4; l <= 4; ++l)
      err2 = std::max(err2, std::abs(harmonic_at(2, l, rot2(phi) * s2)(0) - irrep_so2(l, phi) * harmonic_at(2, l, s2)(0)));
    const RMat g3 = haar_rotation(3, rng);
    const RVec s3 = random_unit(3, rng);
    for (int l = 0; l <= 4; ++l)
      err3 = std::max(err3, max_abs(harmonic_at(3, l, g3 * s3) - wigner_d(l, g3) * harmonic_at(3, l, s3)));
  }
  for (int i = 0; i < 5; ++i) {
    const RMat g4 = haar_rotation(4, rng);
    const RVec s4 = random_unit(4, rng);
    for (int l = 0; l <= 2; ++l)
      err4 = std::max(err4, max_abs(harmonic_at(4, l, g4 * s4) - irrep_general(4, l, g4) * harmonic_at(4, l, s4)));
  }
  r.add("harmonic_steerability_2d", err2, 1e-10);
  r.add("harmonic_steerability_3d", err3, 1e-10);
  r.add("harmonic_steerability_4d", err4, 1e-7);

  const auto grid = AngularGrid::make(3, 10, Quadrature::driscoll_healy);
  Spectrum c = zero_spectrum(3, 4);
  std::normal_distribution<double> g;
  for (auto& v : c.coeffs)
    for (auto& x : v) x = cplx(g(rng), g(rng));
  const Spectrum back = sht(isht(c, grid), 4, grid);
  double rt = 0;
  for (std::size_t k = 0; k < c.coeffs.size(); ++k) rt = std::max(rt, max_abs(back.coeffs[k] - c.coeffs[k]));
  r.add("dh_roundtrip", rt, 1e-8);

  Spectrum y1 = zero_spectrum(3, 1);
  y1.coeffs[1](0) = 1.0;
  const RVec e = random_unit(3, rng);
  const double p24 = prop_sht_check(y1, 1, e, 24);
  const double p48 = prop_sht_check(y1, 1, e, 48);
  r.add("group_averaged_sht", p24, 1e-3);
  r.add("group_averaged_sht_converges", p48 / p24, 1.0);
}

double kernel_steer_residual(const KernelBank& bank, const RMat& g, InterpKind kind) {
  const InterpKernelSpec spec{kind, bank.dim};
  const RMat ginv = g.transpose();
  double err = 0;
  for (std::size_t e = 0; e < bank.entries.size(); ++e) {
    const auto& entry = bank.entries[e];
    const CMat rho = irrep_matrix(entry.rho, g), rho1 = irrep_matrix(entry.rho1, g);
    for (int o = 0; o < bank.out_channels; ++o)
      for (int i = 0; i < bank.in_channels; ++i) {
        std::vector<CMat> lhs(bank.footprint.sites(), CMat::Zero(entry.rho.irrep_dim, entry.rho1.irrep_dim));
        for (std::size_t z = 0; z < bank.footprint.sites(); ++z) {
          const Lattice zp = bank.footprint.point(z);
          RVec zv(bank.dim);
          for (int k = 0; k < bank.dim; ++k) zv(k) = static_cast<double>(zp[k]);
          for (const auto& fe : footprint(spec, snap_to_lattice(ginv * zv)))
            if (bank.footprint.contains(fe.y)) lhs[bank.footprint.index(fe.y)] += fe.weight * bank.at(e, z, o, i);
        }
        for (std::size_t y = 0; y < bank.footprint.sites(); ++y)
          err = std::max(err, max_abs(lhs[y] - rho * bank.at(e, y, o, i) * rho1.adjoint()));
      }
  }
  return err;
}

void suite_steer(Report& r) {
  BasisParams p;
  p.dim = 2;
  p.cutoff = 3;
  p.n_r = 2;
  p.n_a = 16;
  p.h = 2.0;
  p.kind = FilterKind::linear;
  const FilterBasis first = build_basis(p, LayerKind::first);
  const FilterBasis higher = build_basis(p, LayerKind::higher);
  double err = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const KernelBank k1 = assemble(first, random_weights(first, 1, 2, seed));
    const KernelBank k2 = assemble(higher, random_weights(higher, 2, 1, seed + 100));
    for (int q = 1; q <= 3; ++q) {
      err = std::max(err, kernel_steer_residual(k1, rot2(q * kPi / 2), InterpKind::linear));
      err = std::max(err, kernel_steer_residual(k2, rot2(q * kPi / 2), InterpKind::linear));
    }
  }
  r.add("kernel_quarter_turns", err, 1e-9);

  ScanConfig cfg;
  cfg.filters = {FilterKind::linear};
  const Model model = build_model(cfg, FilterKind::linear, 7);
  const ScalarGridField f = scan_input(cfg, model.canvas, 7);
  double eq = 0;
  for (int q = 1; q <= 3; ++q) eq = std::max(eq, equivariance_error(model, f, q * kPi / 2, "z"));
  r.add("model_quarter_turns", eq, 1e-6);
}

void suite_delta(Report& r) {
  const InterpKernelSpec lin{InterpKind::linear, 2};
  const InterpKernelSpec near{InterpKind::nearest, 2};
  r.add("identity", std::max(delta(lin, RigidMotion::identity(2), 2), delta(near, RigidMotion::identity(2), 2)),
        0.0);
  r.add("quarter_turn_linear", delta(lin, RigidMotion::planar(kPi / 2), 2), 1e-14);
  RVec half(2);
  half << 0.5, 0.0;
  const double h32 = delta(lin, RigidMotion::translation(half), 2, 32);
  const double h64 = delta(lin, RigidMotion::translation(half), 2, 64);
  r.add_at_least("half_translation_positive", h32, 0.0);
  r.add("half_translation_refinement", std::abs(h64 - h32) / h32, 0.05);
  const double t32 = delta(lin, RigidMotion::planar(kPi / 6), 2, 32);
  const double t64 = delta(lin, RigidMotion::planar(kPi / 6), 2, 64);
  r.add("rotation_refinement", std::abs(t64 - t32) / t32, 0.05);
}

void suite_oracle(Report& r) {
  BasisParams p;
  p.dim = 2;
  p.cutoff = 2;
  p.n_r = 2;
  p.n_a = 16;
  p.h = 2.0;
  p.kind = FilterKind::linear;
  const FilterBasis b = basis_first(p);
  const double c = oracle_rescale(p);
  std::mt19937_64 rng(404);
  std::normal_distribution<double> g;
  double err = 0;
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    ScalarGridField f = ScalarGridField::zeros({{0, 0}, {8, 8}});
    for (auto& v : f.values) v = g(rng);
    const WeightSet w = random_weights(b, 1, 1, seed);
    const SteerableField fast = conv_first(f, assemble(b, w));
    const SteerableField slow = conv_oracle_first(f, p, w);
    double diff = 0, scale = 0;
    for (std::size_t k = 0; k < slow.blocks.size(); ++k) {
      const FieldBlock* fb = fast.find(slow.blocks[k].irrep.degree);
      if (!fb) {
        diff = INFINITY;
        continue;
      }
      for (std::size_t i = 0; i < slow.blocks[k].values.size(); ++i) {
        diff = std::max(diff, std::abs(slow.blocks[k].values[i] - c * fb->values[i]));
        scale = std::max(scale, std::abs(slow.blocks[k].values[i]));
      }
    }
    err = std::max(err, diff / scale);
  }
  r.add("fourier_path", err, 1e-6);
}

}  // namespace

std::vector<CheckResult> verify(const std::string& suite, const VerifyOptions& options) {
  const std::vector<std::pair<std::string, std::function<void(Report&)>>> suites{
      {"cg", [&](Report& r) { suite_cg(r, options); }},
      {"sht", suite_sht},
      {"steer", suite_steer},
      {"delta", suite_delta},
      {"oracle", suite_oracle},
  };
  std::vector<CheckResult> results;
  bool found = false;
  for (const auto& [name, run] : suites) {
    if (suite != "all" && suite != name) continue;
    found = true;
    Report r{name, &results};
    run(r);
  }
  if (!found) throw Error("verify: unknown suite " + suite);
  return results;
}

}  // namespace steerkit
