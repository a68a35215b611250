#pragma once

// Sphere parameterization, angular grids and d-dimensional spherical
// harmonics.
//
// Angle conventions. theta = (theta_1, ..., theta_{d-1}) with theta_i in
// [0, pi] for i <= d-2 and theta_{d-1} in [0, 2pi). Writing t for the usual
// hyperspherical point (t_i = prod_{j<i} sin theta_j * cos theta_i,
// t_d = prod sin theta_j), the sphere point is
//   d = 2:  s = (cos theta_1, sin theta_1)
//   d >= 3: s = (t_2, ..., t_d, t_1)
// so in 3D theta_1 is the polar angle from the z axis and theta_2 the
// azimuth in the x-y plane, which makes rotations about z act on the grid.
//
// Harmonics are returned with unit pointwise norm ||Y(s)||_2 = 1 unless the
// name says otherwise. Components are ordered m = -l..l in 3D and by
// lexicographic order of the index chain (m_2, ..., m_{d-1}) in general d.

#include <span>
#include <vector>

#include "steerkit/common.hpp"

namespace steerkit {

enum class Quadrature : std::uint8_t { uniform = 0, driscoll_healy = 1 };

/// Tensor grid of n_a points per angle, polar angles shifted by half a step.
struct AngularGrid {
  int dim = 2;
  int n_a = 0;
  Quadrature scheme = Quadrature::uniform;
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;

  static AngularGrid make(int dim, int n_a, Quadrature scheme = Quadrature::uniform);
  std::size_t size() const { return nodes.size(); }
  /// Riemann-sum prefactor 2 pi^{d-1} / (n_a^{d-1} A(S^{d-1})).
  double riemann_factor() const;
};

RVec sphere_point(std::span<const double> theta, int d);
/// Inverse of sphere_point for a unit vector.
std::vector<double> sphere_angles(const RVec& s);

/// Driscoll-Healy polar weight (replaces sin theta_1).
double dh_weight(double theta1, int n_a);
/// Product weight prod_i (sin theta_i)^{d-1-i}.
double uniform_weight(std::span<const double> theta, int d);

/// Explicit finite sum for the Gegenbauer polynomial.
double gegenbauer_sum(int n, double alpha, double z);
double gegenbauer_recurrence(int n, double alpha, double z);
/// Gegenbauer polynomial; explicit sum for n <= 8, three-term recurrence above.
double gegenbauer(int n, double alpha, double z);

/// Associated Legendre function P_l^m(x) with the Condon-Shortley phase,
/// any |m| <= l (negative m through the reflection formula).
double assoc_legendre(int l, int m, double x);

struct HarmonicDims {
  std::int64_t dim;
  double area;
};

/// dim H_d^{(l)} (1 for d = 2) and the surface area A(S^{d-1}).
HarmonicDims harmonic_dims(int d, int l);

/// Index chains (m_1 = l, m_2, ..., m_{d-1}) in component order.
std::vector<std::vector<int>> harmonic_index_chains(int d, int l);

/// Unit-norm harmonic vector. d = 2: e^{ik theta}; d = 3: associated
/// Legendre form; d >= 4: Gegenbauer product form.
CVec harmonic(int d, int l, std::span<const double> theta);
CVec harmonic_at(int d, int l, const RVec& s);
/// L2-orthonormal harmonics (norm^2 = dim / area pointwise).
CVec harmonic_l2(int d, int l, std::span<const double> theta);
/// Unit-norm harmonic from the general Gegenbauer product formula (d >= 3).
CVec harmonic_gegenbauer(int d, int l, std::span<const double> theta);

/// Harmonics of one degree at every node of a grid (rows = nodes).
struct HarmonicTable {
  int dim;
  int degree;
  CMat values;
};
HarmonicTable harmonic_table(const AngularGrid& grid, int l);

/// Per-degree coefficient vectors of a sphere function. In 2D the degrees
/// run over -l_max..l_max, otherwise 0..l_max.
struct Spectrum {
  int dim = 3;
  std::vector<int> degrees;
  std::vector<CVec> coeffs;
  /// Set when 2 l_max + 2 > n_a on the grid that produced it.
  bool aliased = false;

  const CVec* find(int degree) const;
};

/// Spectrum with zero coefficients for every degree up to l_max.
Spectrum zero_spectrum(int dim, int l_max);

/// Discrete transform: Riemann sum of f Y over the grid.
Spectrum sht(std::span<const cplx> samples, int l_max, const AngularGrid& grid);
/// Synthesis f(s) = sum_l dim_l Y_l(s)^dagger c_l at the grid nodes.
std::vector<cplx> isht(const Spectrum& coeffs, const AngularGrid& grid);
/// Synthesis at an arbitrary unit vector.
cplx isht_eval(const Spectrum& coeffs, const RVec& s);

/// Max-abs difference between the SO(3) quadrature of f(R e) rho_l(R) and
/// (int f Y_l dsigma) Y_l(e)^dagger, for f synthesized from `f` (d = 3).
double prop_sht_check(const Spectrum& f, int l, const RVec& e, int so3_n);

}  // namespace steerkit
