#pragma once

// Clebsch-Gordan blocks C^{(rho, rho1, rho2)}: the columns of the CG matrix
// of rho1 (x) rho2 belonging to rho, so that
//   (rho1(g) (x) rho2(g)) C = C rho(g).
// Tensor-product rows are ordered kron-style: row = i1 * d2 + i2.
// vec() stacks columns (column-major); tilde slice m is the d2 x d1 matrix
// with vec(C~_m) = conj(C[:, m]).

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>

#include "steerkit/common.hpp"
#include "steerkit/group.hpp"

namespace steerkit {

struct CGBlock {
  IrrepId rho;
  IrrepId rho1;
  IrrepId rho2;
  CMat matrix;                ///< (d1 d2) x d_rho
  std::vector<CMat> tilde;    ///< d_rho slices, each d2 x d1

  /// Recomputes `tilde` from `matrix`.
  void rebuild_tilde();
};

/// 1 when k = k1 + k2, else 0.
int cg_so2(int k, int k1, int k2);

/// Block for l in l1 (x) l2, absent outside |l1 - l2| <= l <= l1 + l2.
/// Computed by averaging (rho1 (x) rho2)(g) X rho(g)^dagger over an exact
/// SO(3) quadrature and orthonormalizing; the first significant entry is
/// made real positive.
std::optional<CGBlock> cg_so3(int l, int l1, int l2);

/// Cache of CG blocks keyed by (rho, rho1, rho2) degrees.
/// For dim 2 a nonzero `modulus` selects k = k1 + k2 (mod modulus).
class CGTable {
 public:
  explicit CGTable(int dim, int modulus = 0);

  int dim() const { return dim_; }
  int modulus() const { return modulus_; }

  /// Block or nullptr when the triple is excluded by the selection rule.
  const CGBlock* get(int l, int l1, int l2) const;
  /// Replaces a cached block (used to build negative controls).
  void override_block(CGBlock block);

 private:
  int dim_;
  int modulus_;
  mutable std::mutex mutex_;
  mutable std::map<std::tuple<int, int, int>, std::unique_ptr<CGBlock>> cache_;
  mutable std::map<std::tuple<int, int, int>, bool> absent_;
};

/// The rho-block of the diagonal-restriction transform:
/// (d1 d2 / d_rho) C^dagger A C.
CMat cg_decompose(const CMat& a, const CGBlock& block);

}  // namespace steerkit
