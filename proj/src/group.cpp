#include "steerkit/group.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "steerkit/sphere.hpp"

namespace steerkit {

namespace {

// Entries within 1e-15 of 0 or +-1 become exact.
double snap(double v) {
  constexpr double tol = 1e-15;
  if (std::abs(v) < tol) return 0.0;
  if (std::abs(v - 1.0) < tol) return 1.0;
  if (std::abs(v + 1.0) < tol) return -1.0;
  return v;
}

double wrap_2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

std::vector<double> angles_for(const RMat& r) {
  if (r.rows() == 2) return {wrap_2pi(std::atan2(r(1, 0), r(0, 0)))};
  if (r.rows() == 3) {
    const auto e = euler_from_matrix(r);
    return {e[0], e[1], e[2]};
  }
  return {};
}

}  // namespace

double factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(171, 1.0);
    for (int i = 1; i < 171; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0 || n > 170) throw Error("factorial argument out of range");
  return table[n];
}

IrrepId IrrepId::make(int dim, int degree) {
  if (dim < 2) throw Error("irrep dimension must be >= 2");
  if (dim == 2) return {dim, degree, 1};
  if (degree < 0) throw Error("negative irrep degree");
  return {dim, degree, static_cast<int>(harmonic_dims(dim, degree).dim)};
}

RMat rot2(double phi) {
  const double c = snap(std::cos(phi)), s = snap(std::sin(phi));
  RMat r(2, 2);
  r << c, -s, s, c;
  return r;
}

RMat rot_z(double angle) {
  const double c = snap(std::cos(angle)), s = snap(std::sin(angle));
  RMat r(3, 3);
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

RMat rot_y(double angle) {
  const double c = snap(std::cos(angle)), s = snap(std::sin(angle));
  RMat r(3, 3);
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

RMat euler_zyz(double alpha, double beta, double gamma) {
  return rot_z(alpha) * rot_y(beta) * rot_z(gamma);
}

std::array<double, 3> euler_from_matrix(const RMat& r) {
  const double cb = std::clamp(r(2, 2), -1.0, 1.0);
  const double sb = std::hypot(r(0, 2), r(1, 2));
  if (sb > 1e-12) {
    const double beta = std::atan2(sb, cb);
    const double alpha = std::atan2(r(1, 2), r(0, 2));
    const double gamma = std::atan2(r(2, 1), -r(2, 0));
    return {wrap_2pi(alpha), beta, wrap_2pi(gamma)};
  }
  if (cb > 0) return {wrap_2pi(std::atan2(r(1, 0), r(0, 0))), 0.0, 0.0};
  return {wrap_2pi(std::atan2(-r(1, 0), -r(0, 0))), kPi, 0.0};
}

RigidMotion RigidMotion::identity(int dim) {
  if (dim < 2) throw Error("motion dimension must be >= 2");
  RMat r = RMat::Identity(dim, dim);
  auto angles = angles_for(r);
  return {RVec::Zero(dim), std::move(r), std::move(angles)};
}

RigidMotion RigidMotion::planar(double phi, RVec translation) {
  if (translation.size() != 2) throw Error("planar motion needs a 2D translation");
  return {std::move(translation), rot2(phi), {wrap_2pi(phi)}};
}

RigidMotion RigidMotion::euler(double alpha, double beta, double gamma, RVec translation) {
  if (translation.size() != 3) throw Error("Euler motion needs a 3D translation");
  RMat r = euler_zyz(alpha, beta, gamma);
  auto angles = angles_for(r);
  return {std::move(translation), std::move(r), std::move(angles)};
}

RigidMotion RigidMotion::translation(RVec t) {
  const int d = static_cast<int>(t.size());
  RMat r = RMat::Identity(d, d);
  auto angles = angles_for(r);
  return {std::move(t), std::move(r), std::move(angles)};
}

RigidMotion RigidMotion::from_matrix(const RMat& r, RVec translation) {
  const auto d = translation.size();
  if (r.rows() != d || r.cols() != d) throw Error("rotation/translation dimension mismatch");
  if ((r.transpose() * r - RMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(r.determinant() - 1.0) > 1e-9)
    throw Error("matrix is not a proper rotation");
  RMat snapped = r.unaryExpr([](double v) { return snap(v); });
  auto angles = angles_for(snapped);
  return {std::move(translation), std::move(snapped), std::move(angles)};
}

bool RigidMotion::is_identity(double tol) const {
  return t_.cwiseAbs().maxCoeff() <= tol &&
         (r_ - RMat::Identity(dim(), dim())).cwiseAbs().maxCoeff() <= tol;
}

RigidMotion se_compose(const RigidMotion& m1, const RigidMotion& m2) {
  if (m1.dim() != m2.dim()) throw Error("se_compose: dimension mismatch");
  return RigidMotion::from_matrix(m1.rotation() * m2.rotation(),
                                  m1.t() + m1.rotation() * m2.t());
}

RigidMotion se_inverse(const RigidMotion& m) {
  const RMat rinv = m.rotation().transpose();
  return RigidMotion::from_matrix(rinv, -(rinv * m.t()));
}

cplx irrep_so2(int k, double phi) { return std::polar(1.0, k * phi); }

RMat wigner_small_d(int l, double beta) {
  if (l < 0) throw Error("wigner_small_d: negative degree");
  const int n = 2 * l + 1;
  RMat d(n, n);
  const double c = std::cos(beta / 2), s = std::sin(beta / 2);
  for (int mp = -l; mp <= l; ++mp) {
    for (int m = -l; m <= l; ++m) {
      double sum = 0.0;
      const int kmin = std::max(0, m - mp);
      const int kmax = std::min(l + m, l - mp);
      for (int k = kmin; k <= kmax; ++k) {
        const double sign = ((mp - m + k) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * std::pow(c, 2 * l + m - mp - 2 * k) * std::pow(s, mp - m + 2 * k) /
               (factorial(l + m - k) * factorial(k) * factorial(mp - m + k) * factorial(l - mp - k));
      }
      d(mp + l, m + l) =
          std::sqrt(factorial(l + mp) * factorial(l - mp) * factorial(l + m) * factorial(l - m)) * sum;
    }
  }
  return d;
}

CMat wigner_d(int l, double alpha, double beta, double gamma) {
  const int n = 2 * l + 1;
  const RMat dt = wigner_small_d(l, beta).transpose();
  CMat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out(i, j) = std::polar(1.0, (i - l) * alpha) * dt(i, j) * std::polar(1.0, (j - l) * gamma);
  return out;
}

CMat wigner_d(int l, const RMat& rotation) {
  const auto e = euler_from_matrix(rotation);
  return wigner_d(l, e[0], e[1], e[2]);
}

CMat irrep_general(int d, int l, const RMat& rotation) {
  if (d < 4) throw Error("irrep_general is for d >= 4");
  if (rotation.rows() != d || rotation.cols() != d) throw Error("irrep_general: rotation size");
  const auto dim = harmonic_dims(d, l).dim;
  const auto samples = static_cast<Eigen::Index>(std::max<std::int64_t>(3 * dim, 16));
  // Fixed sample directions.
  std::mt19937_64 rng(0x5eed0000ULL + 131u * d + l);
  std::normal_distribution<double> normal;
  CMat a(samples, dim), b(samples, dim);
  for (Eigen::Index i = 0; i < samples; ++i) {
    RVec s(d);
    for (int k = 0; k < d; ++k) s(k) = normal(rng);
    s.normalize();
    a.row(i) = harmonic_at(d, l, s).transpose();
    b.row(i) = harmonic_at(d, l, RVec(rotation * s)).transpose();
  }
  Eigen::ColPivHouseholderQR<CMat> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < dim) throw Error("irrep_general: sample system is rank deficient");
  const CMat rho_t = qr.solve(b);
  return rho_t.transpose();
}

CMat irrep_matrix(const IrrepId& id, const RMat& rotation) {
  if (rotation.rows() != id.dim) throw Error("irrep_matrix: dimension mismatch");
  if (id.dim == 2) {
    CMat m(1, 1);
    m(0, 0) = irrep_so2(id.degree, std::atan2(rotation(1, 0), rotation(0, 0)));
    return m;
  }
  if (id.dim == 3) return wigner_d(id.degree, rotation);
  return irrep_general(id.dim, id.degree, rotation);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

std::vector<SO3Node> so3_quadrature(int n, SO3Rule rule) {
  if (n < 2) throw Error("so3_quadrature: n must be >= 2");
  std::vector<double> betas(n), bw(n);
  if (rule == SO3Rule::midpoint) {
    for (int j = 0; j < n; ++j) {
      betas[j] = kPi * (j + 0.5) / n;
      bw[j] = std::sin(betas[j]);
    }
  } else {
    std::vector<double> x;
    gauss_legendre(n, x, bw);
    for (int j = 0; j < n; ++j) betas[j] = std::acos(x[j]);
  }
  double total = 0.0;
  for (double w : bw) total += w;
  std::vector<SO3Node> out;
  out.reserve(static_cast<std::size_t>(n) * n * n);
  const double per = 1.0 / (static_cast<double>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j)
      for (int g = 0; g < n; ++g)
        out.push_back({kTwoPi * a / n, betas[j], kTwoPi * g / n, per * bw[j] / total});
  return out;
}

}  // namespace steerkit
