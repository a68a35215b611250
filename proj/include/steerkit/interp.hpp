#pragma once

// Interpolation kernels I(x, y) on Z^d, off-lattice evaluation, rigid-motion
// resampling and the equivariance-loss functional Delta(g).
//
// Nearest-neighbour ties round half up on every axis: y_i = floor(x_i + 1/2).

#include <optional>
#include <utility>
#include <vector>

#include "steerkit/common.hpp"
#include "steerkit/field.hpp"
#include "steerkit/group.hpp"

namespace steerkit {

enum class InterpKind : std::uint8_t { nearest = 0, linear = 1 };

struct InterpKernelSpec {
  InterpKind kind = InterpKind::linear;
  int dim = 2;

  double holder_alpha() const { return kind == InterpKind::nearest ? 0.0 : 1.0; }
  int footprint_radius() const { return 1; }
};

struct FootprintEntry {
  Lattice y;
  double weight;
};

double kernel_weight(const InterpKernelSpec& spec, const RVec& x, const Lattice& y);

/// Lattice points with nonzero I(x, y), in lexicographic order of y.
std::vector<FootprintEntry> footprint(const InterpKernelSpec& spec, const RVec& x);

cplx interp_eval(const ScalarGridField& f, const InterpKernelSpec& spec, const RVec& x);

/// g(x) = I[f](R x + t). The default output box covers the preimage of the
/// input support.
ScalarGridField resample(const ScalarGridField& f, const InterpKernelSpec& spec,
                         const RigidMotion& motion, std::optional<Box> out = std::nullopt);

/// Sampled estimate of Delta(g). Translations are sampled over the unit
/// cell; motions with a rotation over [-box_radius, box_radius)^d, each cell
/// refined `refinement` times per axis.
double delta(const InterpKernelSpec& spec, const RigidMotion& motion, int box_radius,
             int refinement = 32);

/// Moves coordinates within `tol` of an integer onto it.
RVec snap_to_lattice(RVec x, double tol = 1e-10);

}  // namespace steerkit
