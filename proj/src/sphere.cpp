#include "steerkit/sphere.hpp"

#include <cmath>

#include "steerkit/group.hpp"

namespace steerkit {

namespace {

double wrap_2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

// Product form with index chain m = (m_1 = l, ..., m_{d-1}), L2-normalized.
cplx gegenbauer_component(int d, std::span<const int> m, std::span<const double> theta) {
  double mag = 1.0 / std::sqrt(kTwoPi);
  for (int j = 1; j <= d - 2; ++j) {
    const int mj = m[j - 1];
    const int next = std::abs(m[j]);
    const double alpha = next + (d - j - 1) / 2.0;
    const int n = mj - next;
    const double log_norm2 = std::log(kPi) + (1.0 - 2.0 * alpha) * std::log(2.0) +
                             std::lgamma(n + 2.0 * alpha) - std::lgamma(n + 1.0) -
                             std::log(n + alpha) - 2.0 * std::lgamma(alpha);
    const double th = theta[j - 1];
    mag *= std::exp(-0.5 * log_norm2) * std::pow(std::sin(th), next) *
           gegenbauer(n, alpha, std::cos(th));
  }
  return std::polar(1.0, m[d - 2] * theta[d - 2]) * mag;
}

void chains_rec(int d, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  const int depth = static_cast<int>(cur.size());  // number of fixed entries
  if (depth == d - 1) {
    out.push_back(cur);
    return;
  }
  const int prev = cur.back();
  const int lo = depth == d - 2 ? -prev : 0;
  for (int v = lo; v <= prev; ++v) {
    cur.push_back(v);
    chains_rec(d, cur, out);
    cur.pop_back();
  }
}

CVec harmonic_legendre(int l, double polar, double azimuth) {
  CVec y(2 * l + 1);
  const double x = std::cos(polar);
  for (int m = -l; m <= l; ++m) {
    const double scale = std::sqrt(factorial(l + m) / factorial(l - m));
    y(m + l) = std::polar(scale * assoc_legendre(l, -m, x), m * azimuth);
  }
  return y;
}

}  // namespace

AngularGrid AngularGrid::make(int dim, int n_a, Quadrature scheme) {
  if (dim < 2) throw Error("angular grid needs dim >= 2");
  if (n_a < 2) throw Error("angular grid needs n_a >= 2");
  if (scheme == Quadrature::driscoll_healy && (dim != 3 || n_a % 2 != 0))
    throw Error("Driscoll-Healy quadrature requires dim 3 and even n_a");
  AngularGrid g;
  g.dim = dim;
  g.n_a = n_a;
  g.scheme = scheme;
  std::size_t count = 1;
  for (int i = 0; i < dim - 1; ++i) count *= static_cast<std::size_t>(n_a);
  g.nodes.reserve(count);
  g.weights.reserve(count);
  std::vector<int> a(dim - 1, 0);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::vector<double> theta(dim - 1);
    for (int i = 0; i < dim - 2; ++i) theta[i] = kPi / n_a * (a[i] + 0.5);
    theta[dim - 2] = kTwoPi / n_a * a[dim - 2];
    double w = uniform_weight(theta, dim);
    if (scheme == Quadrature::driscoll_healy) w = dh_weight(theta[0], n_a);
    g.nodes.push_back(std::move(theta));
    g.weights.push_back(w);
    for (int i = dim - 2; i >= 0; --i) {  // last angle varies fastest
      if (++a[i] < n_a) break;
      a[i] = 0;
    }
  }
  return g;
}

double AngularGrid::riemann_factor() const {
  return 2.0 * std::pow(kPi, dim - 1) / (std::pow(n_a, dim - 1) * harmonic_dims(dim, 0).area);
}

RVec sphere_point(std::span<const double> theta, int d) {
  if (static_cast<int>(theta.size()) != d - 1) throw Error("sphere_point: need d-1 angles");
  RVec t(d);
  double prod = 1.0;
  for (int i = 0; i < d - 1; ++i) {
    t(i) = prod * std::cos(theta[i]);
    prod *= std::sin(theta[i]);
  }
  t(d - 1) = prod;
  if (d == 2) return t;
  RVec s(d);
  for (int i = 0; i < d - 1; ++i) s(i) = t(i + 1);
  s(d - 1) = t(0);
  return s;
}

std::vector<double> sphere_angles(const RVec& s) {
  const int d = static_cast<int>(s.size());
  if (d < 2) throw Error("sphere_angles: dimension must be >= 2");
  if (d == 2) return {wrap_2pi(std::atan2(s(1), s(0)))};
  RVec t(d);
  t(0) = s(d - 1);
  for (int i = 1; i < d; ++i) t(i) = s(i - 1);
  t /= t.norm();
  std::vector<double> theta(d - 1);
  for (int i = 0; i < d - 2; ++i) {
    theta[i] = std::atan2(t.tail(d - i - 1).norm(), t(i));
  }
  theta[d - 2] = wrap_2pi(std::atan2(t(d - 1), t(d - 2)));
  return theta;
}

double dh_weight(double theta1, int n_a) {
  double sum = 0.0;
  for (int k = 0; k < n_a / 2; ++k) sum += std::sin((2 * k + 1) * theta1) / (2 * k + 1);
  return 4.0 / kPi * std::sin(theta1) * sum;
}

double uniform_weight(std::span<const double> theta, int d) {
  double w = 1.0;
  for (int i = 1; i <= d - 2; ++i) w *= std::pow(std::sin(theta[i - 1]), d - 1 - i);
  return w;
}

double gegenbauer_sum(int n, double alpha, double z) {
  if (n < 0 || alpha <= 0) throw Error("gegenbauer: need n >= 0 and alpha > 0");
  double sum = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double log_coef = std::lgamma(n - k + alpha) - std::lgamma(alpha) -
                            std::lgamma(k + 1.0) - std::lgamma(n - 2.0 * k + 1.0);
    sum += sign * std::exp(log_coef) * std::pow(2.0 * z, n - 2 * k);
  }
  return sum;
}

double gegenbauer_recurrence(int n, double alpha, double z) {
  if (n < 0 || alpha <= 0) throw Error("gegenbauer: need n >= 0 and alpha > 0");
  if (n == 0) return 1.0;
  double c0 = 1.0, c1 = 2.0 * alpha * z;
  for (int k = 2; k <= n; ++k) {
    const double c2 = (2.0 * z * (k + alpha - 1.0) * c1 - (k + 2.0 * alpha - 2.0) * c0) / k;
    c0 = c1;
    c1 = c2;
  }
  return c1;
}

double gegenbauer(int n, double alpha, double z) {
  return n <= 8 ? gegenbauer_sum(n, alpha, z) : gegenbauer_recurrence(n, alpha, z);
}

double assoc_legendre(int l, int m, double x) {
  if (l < 0 || std::abs(m) > l) throw Error("assoc_legendre: need |m| <= l");
  if (m < 0) {
    const int am = -m;
    const double sign = (am % 2 == 0) ? 1.0 : -1.0;
    return sign * factorial(l - am) / factorial(l + am) * assoc_legendre(l, am, x);
  }
  double pmm = 1.0;
  const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double fact = 1.0;
  for (int i = 1; i <= m; ++i) {
    pmm *= -fact * somx2;
    fact += 2.0;
  }
  if (l == m) return pmm;
  double pmmp1 = x * (2 * m + 1) * pmm;
  if (l == m + 1) return pmmp1;
  double pll = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = (x * (2 * ll - 1) * pmmp1 - (ll + m - 1) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

HarmonicDims harmonic_dims(int d, int l) {
  if (d < 2) throw Error("harmonic_dims: d must be >= 2");
  const double area = 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
  if (d == 2) return {1, area};
  if (l < 0) throw Error("harmonic_dims: negative degree");
  // (2l+d-2)(l+d-3)! / (l!(d-2)!) evaluated as an exact integer product.
  std::int64_t binom = 1;  // C(l+d-3, l)
  for (int i = 1; i <= d - 3; ++i) binom = binom * (l + i) / i;
  const std::int64_t dim = (l == 0) ? 1 : binom * (2 * l + d - 2) / (d - 2);
  return {dim, area};
}

std::vector<std::vector<int>> harmonic_index_chains(int d, int l) {
  if (d < 3) throw Error("index chains are defined for d >= 3");
  std::vector<std::vector<int>> out;
  std::vector<int> cur{l};
  chains_rec(d, cur, out);
  return out;
}

CVec harmonic_gegenbauer(int d, int l, std::span<const double> theta) {
  const auto chains = harmonic_index_chains(d, l);
  const auto dims = harmonic_dims(d, l);
  const double unit = std::sqrt(dims.area / static_cast<double>(dims.dim));
  CVec y(static_cast<Eigen::Index>(chains.size()));
  for (std::size_t i = 0; i < chains.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = unit * gegenbauer_component(d, chains[i], theta);
  return y;
}

CVec harmonic(int d, int l, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != d - 1) throw Error("harmonic: need d-1 angles");
  if (d == 2) {
    CVec y(1);
    y(0) = std::polar(1.0, l * theta[0]);
    return y;
  }
  if (l < 0) throw Error("harmonic: negative degree");
  if (d == 3) return harmonic_legendre(l, theta[0], theta[1]);
  return harmonic_gegenbauer(d, l, theta);
}

CVec harmonic_at(int d, int l, const RVec& s) {
  const auto theta = sphere_angles(s);
  return harmonic(d, l, theta);
}

CVec harmonic_l2(int d, int l, std::span<const double> theta) {
  const auto dims = harmonic_dims(d, l);
  return harmonic(d, l, theta) * std::sqrt(static_cast<double>(dims.dim) / dims.area);
}

HarmonicTable harmonic_table(const AngularGrid& grid, int l) {
  const auto id = IrrepId::make(grid.dim, l);
  HarmonicTable t{grid.dim, l, CMat(static_cast<Eigen::Index>(grid.size()), id.irrep_dim)};
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.values.row(static_cast<Eigen::Index>(i)) = harmonic(grid.dim, l, grid.nodes[i]).transpose();
  return t;
}

const CVec* Spectrum::find(int degree) const {
  for (std::size_t i = 0; i < degrees.size(); ++i)
    if (degrees[i] == degree) return &coeffs[i];
  return nullptr;
}

Spectrum zero_spectrum(int dim, int l_max) {
  Spectrum s;
  s.dim = dim;
  const int lo = dim == 2 ? -l_max : 0;
  for (int l = lo; l <= l_max; ++l) {
    s.degrees.push_back(l);
    s.coeffs.push_back(CVec::Zero(IrrepId::make(dim, l).irrep_dim));
  }
  return s;
}

Spectrum sht(std::span<const cplx> samples, int l_max, const AngularGrid& grid) {
  if (samples.size() != grid.size()) throw Error("sht: samples do not match grid");
  Spectrum out = zero_spectrum(grid.dim, l_max);
  out.aliased = 2 * l_max + 2 > grid.n_a;
  const double factor = grid.riemann_factor();
  for (std::size_t k = 0; k < out.degrees.size(); ++k) {
    CVec acc = CVec::Zero(out.coeffs[k].size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      acc += (samples[i] * grid.weights[i]) * harmonic(grid.dim, out.degrees[k], grid.nodes[i]);
    out.coeffs[k] = factor * acc;
  }
  return out;
}

std::vector<cplx> isht(const Spectrum& coeffs, const AngularGrid& grid) {
  std::vector<cplx> out(grid.size(), cplx{});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    cplx v{};
    for (std::size_t k = 0; k < coeffs.degrees.size(); ++k) {
      const double dim = static_cast<double>(harmonic_dims(grid.dim, coeffs.degrees[k]).dim);
      v += dim * harmonic(grid.dim, coeffs.degrees[k], grid.nodes[i]).dot(coeffs.coeffs[k]);
    }
    out[i] = v;
  }
  return out;
}

cplx isht_eval(const Spectrum& coeffs, const RVec& s) {
  const auto theta = sphere_angles(s);
  const int d = static_cast<int>(s.size());
  cplx v{};
  for (std::size_t k = 0; k < coeffs.degrees.size(); ++k) {
    const double dim = static_cast<double>(harmonic_dims(d, coeffs.degrees[k]).dim);
    // Eigen's dot conjugates its left operand: Y^dagger c.
    v += dim * harmonic(d, coeffs.degrees[k], theta).dot(coeffs.coeffs[k]);
  }
  return v;
}

double prop_sht_check(const Spectrum& f, int l, const RVec& e, int so3_n) {
  if (f.dim != 3 || e.size() != 3) throw Error("prop_sht_check is defined for d = 3");
  const int n = 2 * l + 1;
  CMat lhs = CMat::Zero(n, n);
  for (const auto& node : so3_quadrature(so3_n)) {
    const RMat r = euler_zyz(node.alpha, node.beta, node.gamma);
    const cplx value = isht_eval(f, RVec(r * e));
    lhs += (node.weight * value) * wigner_d(l, node.alpha, node.beta, node.gamma);
  }
  // Band limit of the synthesized function fixes an exact DH grid.
  int band = l;
  for (int deg : f.degrees) band = std::max(band, deg);
  const auto grid = AngularGrid::make(3, 2 * band + 2, Quadrature::driscoll_healy);
  const auto samples = isht(f, grid);
  const auto spectrum = sht(samples, band, grid);
  const CVec& coef = *spectrum.find(l);
  const CMat rhs = coef * harmonic_at(3, l, e).adjoint();
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace steerkit
