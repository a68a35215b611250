#pragma once

// Steerable cross-correlation on lattice fields:
//   f^pre(x, rho) = sum_y sum_rho1 K^{(rho, rho1)}(y) f^in(x + y, rho1)
// over the valid region only (output box shrinks by the footprint on both
// sides). Accumulation per output site runs over y, then rho1, then input
// channel, so results do not depend on the thread schedule.

#include "steerkit/field.hpp"
#include "steerkit/filters.hpp"

namespace steerkit {

/// Output box of a valid correlation of `in` with kernels on `footprint`.
Box valid_box(const Box& in, const Box& footprint);

SteerableField conv_first(const ScalarGridField& in, const KernelBank& kernels);
/// First-layer correlation of a multi-channel scalar field (one degree-0 block).
SteerableField conv_first(const SteerableField& in, const KernelBank& kernels);
SteerableField conv_higher(const SteerableField& in, const KernelBank& kernels);

/// 2 pi^{d-1} h^d / A(S^{d-1}); conv_oracle_first = this factor * conv_first.
double oracle_rescale(const BasisParams& p);

/// Independent first-layer path: samples the patch f(x + r h / n_r s(theta))
/// by interpolation, takes its SHT on every shell and integrates the weight
/// spectrum radially with step h / n_r. Guarded to small instances.
SteerableField conv_oracle_first(const ScalarGridField& in, const BasisParams& p,
                                 const WeightSet& weights);

}  // namespace steerkit
