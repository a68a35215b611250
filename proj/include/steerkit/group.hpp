#pragma once

// Rotation groups SO(2)/SO(3)/SO(d), rigid motions SE(d) and their irreps.
//
// Phase convention: the Wigner-D matrices are fixed by the harmonic
// steerability identity Y(R s) = rho(R) Y(s) with the sphere module's
// harmonics. For R = Rz(a) Ry(b) Rz(g) this gives
//   rho(R)_{m m'} = e^{i m a} d_{m' m}(b) e^{i m' g},
// with d the standard factorial-sum small-d matrix, rows/columns ordered
// m = -l..l.

#include <array>
#include <span>
#include <vector>

#include "steerkit/common.hpp"

namespace steerkit {

/// A symmetric-traceless irrep of SO(dim). For dim = 2 `degree` is the
/// frequency k of e^{ik theta} and may be negative.
struct IrrepId {
  int dim = 2;
  int degree = 0;
  int irrep_dim = 1;

  static IrrepId make(int dim, int degree);
  friend bool operator==(const IrrepId&, const IrrepId&) = default;
};

RMat rot2(double phi);
RMat rot_z(double angle);
RMat rot_y(double angle);
RMat euler_zyz(double alpha, double beta, double gamma);

/// Canonical z-y-z Euler angles of a 3D rotation. alpha, gamma in [0, 2pi),
/// beta in [0, pi]; gimbal-degenerate rotations get gamma = 0.
std::array<double, 3> euler_from_matrix(const RMat& r);

/// Element (t, R) of SE(dim).
class RigidMotion {
 public:
  static RigidMotion identity(int dim);
  static RigidMotion planar(double phi, RVec translation = RVec::Zero(2));
  static RigidMotion euler(double alpha, double beta, double gamma,
                           RVec translation = RVec::Zero(3));
  static RigidMotion translation(RVec t);
  /// Takes any proper rotation matrix; for dim 2 and 3 the angle storage is
  /// derived from it.
  static RigidMotion from_matrix(const RMat& r, RVec translation);

  int dim() const { return static_cast<int>(t_.size()); }
  const RVec& t() const { return t_; }
  const RMat& rotation() const { return r_; }
  /// phi for dim 2, (alpha, beta, gamma) for dim 3, empty otherwise.
  const std::vector<double>& angles() const { return angles_; }

  RVec apply(const RVec& x) const { return r_ * x + t_; }
  bool is_identity(double tol = 0.0) const;

 private:
  RigidMotion(RVec t, RMat r, std::vector<double> angles)
      : t_(std::move(t)), r_(std::move(r)), angles_(std::move(angles)) {}

  RVec t_;
  RMat r_;
  std::vector<double> angles_;
};

/// (t1 + R1 t2, R1 R2).
RigidMotion se_compose(const RigidMotion& m1, const RigidMotion& m2);
/// (-R^{-1} t, R^{-1}).
RigidMotion se_inverse(const RigidMotion& m);

cplx irrep_so2(int k, double phi);

/// Standard small-d matrix d^l_{m' m}(beta), row m', column m.
RMat wigner_small_d(int l, double beta);
CMat wigner_d(int l, double alpha, double beta, double gamma);
CMat wigner_d(int l, const RMat& rotation);

/// Symmetric-traceless irrep of SO(d), d >= 4, in the harmonic basis, fitted
/// by least squares from Y(R s_i) = rho Y(s_i) on sampled directions.
CMat irrep_general(int d, int l, const RMat& rotation);

/// Matrix of irrep `id` at a rotation matrix of matching dimension.
CMat irrep_matrix(const IrrepId& id, const RMat& rotation);

struct SO3Node {
  double alpha;
  double beta;
  double gamma;
  double weight;
};

enum class SO3Rule {
  /// Midpoint polar nodes with weights proportional to sin(beta).
  midpoint,
  /// Gauss-Legendre nodes in cos(beta); exact for band-limited integrands
  /// of total degree below n.
  gauss,
};

/// n^3 nodes of a Haar quadrature on SO(3) with weights summing to 1.
std::vector<SO3Node> so3_quadrature(int n, SO3Rule rule = SO3Rule::midpoint);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

double factorial(int n);

}  // namespace steerkit
