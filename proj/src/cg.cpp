#include "steerkit/cg.hpp"

#include <cmath>
#include <random>

namespace steerkit {

void CGBlock::rebuild_tilde() {
  const int d1 = rho1.irrep_dim, d2 = rho2.irrep_dim;
  tilde.clear();
  for (Eigen::Index m = 0; m < matrix.cols(); ++m) {
    CMat slice(d2, d1);
    for (int j = 0; j < d1; ++j)
      for (int i = 0; i < d2; ++i) slice(i, j) = std::conj(matrix(j * d2 + i, m));
    tilde.push_back(std::move(slice));
  }
}

int cg_so2(int k, int k1, int k2) { return k == k1 + k2 ? 1 : 0; }

std::optional<CGBlock> cg_so3(int l, int l1, int l2) {
  if (l < 0 || l1 < 0 || l2 < 0) throw Error("cg_so3: negative degree");
  if (l < std::abs(l1 - l2) || l > l1 + l2) return std::nullopt;
  const int d1 = 2 * l1 + 1, d2 = 2 * l2 + 1, d = 2 * l + 1;

  std::mt19937_64 rng(0xC6B10C5ULL + 1000003u * l + 1009u * l1 + l2);
  std::normal_distribution<double> normal;
  CMat x(d1 * d2, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = cplx(normal(rng), normal(rng));

  // Integrand is a band-limited function of total degree l1 + l2 + l.
  const int n = l1 + l2 + l + 2;
  CMat t = CMat::Zero(d1 * d2, d);
  for (const auto& node : so3_quadrature(n, SO3Rule::gauss)) {
    const CMat r1 = wigner_d(l1, node.alpha, node.beta, node.gamma);
    const CMat r2 = wigner_d(l2, node.alpha, node.beta, node.gamma);
    const CMat r = wigner_d(l, node.alpha, node.beta, node.gamma);
    const CMat y = x * r.adjoint();
    // (r1 (x) r2) vec(Y_col) = vec(r2 Y_col r1^T) with Y_col reshaped d2 x d1.
    for (int c = 0; c < d; ++c) {
      Eigen::Map<const CMat> col(y.col(c).data(), d2, d1);
      const CMat moved = r2 * col * r1.transpose();
      t.col(c) += node.weight * Eigen::Map<const CVec>(moved.data(), d1 * d2);
    }
  }

  Eigen::SelfAdjointEigenSolver<CMat> eig(t.adjoint() * t);
  const RVec vals = eig.eigenvalues().cwiseMax(1e-300);
  const CMat inv_sqrt = eig.eigenvectors() * vals.cwiseSqrt().cwiseInverse().asDiagonal() *
                        eig.eigenvectors().adjoint();
  CMat c = t * inv_sqrt;

  const double scale = c.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    bool done = false;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      if (std::abs(c(i, j)) > 1e-8 * scale) {
        c *= std::conj(c(i, j)) / std::abs(c(i, j));
        done = true;
        break;
      }
    }
    if (done) break;
  }

  CGBlock block{IrrepId::make(3, l), IrrepId::make(3, l1), IrrepId::make(3, l2), std::move(c), {}};
  block.rebuild_tilde();
  return block;
}

CGTable::CGTable(int dim, int modulus) : dim_(dim), modulus_(modulus) {
  if (dim != 2 && dim != 3) throw Error("CG tables are available for dim 2 and 3");
}

const CGBlock* CGTable::get(int l, int l1, int l2) const {
  const auto key = std::make_tuple(l, l1, l2);
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second.get();
  if (absent_.count(key)) return nullptr;
  std::optional<CGBlock> block;
  if (dim_ == 2) {
    const int diff = l - l1 - l2;
    const bool present = modulus_ > 0 ? ((diff % modulus_) + modulus_) % modulus_ == 0 : diff == 0;
    if (present) {
      CGBlock b{IrrepId::make(2, l), IrrepId::make(2, l1), IrrepId::make(2, l2), CMat::Ones(1, 1), {}};
      b.rebuild_tilde();
      block = std::move(b);
    }
  } else {
    block = cg_so3(l, l1, l2);
  }
  if (!block) {
    absent_[key] = true;
    return nullptr;
  }
  auto [it, inserted] = cache_.emplace(key, std::make_unique<CGBlock>(std::move(*block)));
  return it->second.get();
}

void CGTable::override_block(CGBlock block) {
  block.rebuild_tilde();
  const auto key = std::make_tuple(block.rho.degree, block.rho1.degree, block.rho2.degree);
  std::lock_guard lock(mutex_);
  absent_.erase(key);
  cache_[key] = std::make_unique<CGBlock>(std::move(block));
}

CMat cg_decompose(const CMat& a, const CGBlock& block) {
  const int d1 = block.rho1.irrep_dim, d2 = block.rho2.irrep_dim, d = block.rho.irrep_dim;
  if (a.rows() != d1 * d2 || a.cols() != d1 * d2) throw Error("cg_decompose: matrix size");
  return (static_cast<double>(d1 * d2) / d) * (block.matrix.adjoint() * a * block.matrix);
}

}  // namespace steerkit
