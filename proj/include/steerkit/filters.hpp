#pragma once

// Steerable filter bases, their learnable weights and assembled kernels.
//
// First layer:  M_r^{(rho)}(y) = r^{d-1} / (n_r^d n_a^{d-1})
//                 * sum_theta I(r h / n_r s(theta), y) Y^{(rho)}(s(theta)) w(theta)
// Higher layer: row m of M~_r^{(rho,rho1,rho2)}(y) is
//                 (1 / |F|) M_r^{(rho2)}(y)^T C~_m^{(rho,rho1,rho2)}
// with F = {0, ..., cutoff}. In 2D rho2 = [k - k1] mod n_a for interpolation
// bases and k - k1 for Cartesian bases, which also drop the 1/|F| factor.
//
// Offsets are the lattice points with |y|_inf <= ceil(h) + 1, lexicographic.

#include <array>
#include <string>
#include <vector>

#include "steerkit/cg.hpp"
#include "steerkit/common.hpp"
#include "steerkit/field.hpp"
#include "steerkit/interp.hpp"
#include "steerkit/sphere.hpp"

namespace steerkit {

enum class FilterKind : std::uint8_t { nearest = 0, linear = 1, cartesian = 2 };
enum class LayerKind : std::uint8_t { first = 0, higher = 1 };

const char* to_string(FilterKind k);
FilterKind parse_filter_kind(const std::string& s);

struct BasisParams {
  int dim = 2;
  int cutoff = 0;
  int n_r = 1;
  int n_a = 8;
  double h = 1.0;
  FilterKind kind = FilterKind::linear;
  Quadrature quadrature = Quadrature::uniform;
  /// Gaussian ring widths per shell (Cartesian bases only).
  std::vector<double> taus;
};

/// Ring widths used for Cartesian filters: 0.6 everywhere, except 0.4 on the
/// outermost 2D ring.
std::vector<double> default_taus(int dim, int n_r);

using DegreeTriple = std::array<int, 3>;

struct FilterBasis {
  BasisParams params;
  LayerKind layer = LayerKind::first;
  Box footprint;  ///< offsets y, in Box order
  /// First layer: (rho, 0, rho). Higher layer: (rho, rho1, rho2).
  std::vector<DegreeTriple> keys;
  /// table[r][key][y] is a d_rho x d_rho1 matrix (d_rho x 1 for the first layer).
  std::vector<std::vector<std::vector<CMat>>> table;

  int radial() const { return params.n_r; }
  std::size_t offsets() const { return footprint.sites(); }
  const CMat& at(int r, std::size_t key, std::size_t y) const { return table[r - 1][key][y]; }
};

/// Box of offsets with |y|_inf <= ceil(h) + 1.
Box filter_footprint(int dim, double h);

/// Degrees 0..cutoff.
std::vector<int> degree_set(int cutoff);

/// M_r^{(rho)} as an offsets x d_rho table for one shell and one degree.
CMat first_layer_shell(const BasisParams& p, int r, int degree, const Box& footprint);

FilterBasis basis_first(const BasisParams& p);
FilterBasis basis_higher(const BasisParams& p, const CGTable& cg);
/// Cartesian first/higher-layer basis; `p.kind` must be cartesian.
FilterBasis basis_cartesian(const BasisParams& p, LayerKind layer, const CGTable* cg = nullptr);
/// Dispatches on p.kind.
FilterBasis build_basis(const BasisParams& p, LayerKind layer);

/// Learnable weights w_r^{key}[out][in].
struct WeightSet {
  LayerKind layer = LayerKind::first;
  int dim = 2;
  int n_r = 1;
  int in_channels = 1;
  int out_channels = 1;
  std::vector<DegreeTriple> keys;
  std::vector<cplx> values;  ///< index ((r * keys + key) * out + o) * in + i, r zero-based

  static WeightSet zeros(const FilterBasis& basis, int in_channels, int out_channels);
  std::size_t index(int r, std::size_t key, int o, int i) const {
    return ((static_cast<std::size_t>(r - 1) * keys.size() + key) * out_channels + o) * in_channels + i;
  }
  cplx& at(int r, std::size_t key, int o, int i) { return values[index(r, key, o, i)]; }
  cplx at(int r, std::size_t key, int o, int i) const { return values[index(r, key, o, i)]; }
};

/// Weights with real and imaginary parts drawn from N(0, 1/2).
WeightSet random_weights(const FilterBasis& basis, int in_channels, int out_channels,
                         std::uint64_t seed);

/// K^{(rho, rho1)}(y) per output/input channel pair.
struct KernelBank {
  int dim = 2;
  Box footprint;
  int in_channels = 1;
  int out_channels = 1;
  struct Entry {
    IrrepId rho;
    IrrepId rho1;
    std::vector<CMat> k;  ///< index (y * out + o) * in + i
  };
  std::vector<Entry> entries;

  const CMat& at(std::size_t entry, std::size_t y, int o, int i) const {
    return entries[entry].k[(y * out_channels + o) * in_channels + i];
  }
};

KernelBank assemble(const FilterBasis& basis, const WeightSet& weights);

std::vector<std::uint8_t> encode_basis(const FilterBasis& b);
FilterBasis decode_basis(const std::vector<std::uint8_t>& bytes);
void save_basis(const std::string& path, const FilterBasis& b);
FilterBasis load_basis(const std::string& path);

std::vector<std::uint8_t> encode_weights(const WeightSet& w);
WeightSet decode_weights(const std::vector<std::uint8_t>& bytes);
void save_weights(const std::string& path, const WeightSet& w);
WeightSet load_weights(const std::string& path);

}  // namespace steerkit
