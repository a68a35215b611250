#pragma once

// Pointwise and pooling layers acting on steerable fields.

#include <vector>

#include "steerkit/cg.hpp"
#include "steerkit/field.hpp"
#include "steerkit/filters.hpp"

namespace steerkit {

/// Coefficients eta_{rho, rho1, rho2} of the CG nonlinearity.
struct NonlinearityWeights {
  std::vector<DegreeTriple> keys;
  std::vector<cplx> eta;
};

/// Triples (rho, rho1, rho2) over the field's degrees with a CG block present.
std::vector<DegreeTriple> nonlinearity_keys(const SteerableField& f, const CGTable& cg);
NonlinearityWeights random_nonlinearity(const SteerableField& f, const CGTable& cg, std::uint64_t seed);

/// out(x, rho) = sum eta C^dagger (f(x, rho1) (x) f(x, rho2)) per channel;
/// the output keeps the input's degrees.
SteerableField cg_nonlinearity(const SteerableField& f, const NonlinearityWeights& w, const CGTable& cg);

/// Divides every (site, channel) by its norm over all irreps; sites with norm
/// below eps are left unchanged.
SteerableField normalize(const SteerableField& f, double eps = 1e-12);

/// Non-overlapping window means; the window must divide the shape.
SteerableField avg_pool(const SteerableField& f, const std::vector<std::int64_t>& window);

/// sqrt(sum_rho |mean_x f(x, rho)|^2) per channel.
std::vector<double> flatten_invariant(const SteerableField& f);

/// sqrt(sum_x |f(x, rho)|^2) per block and channel, block-major.
std::vector<double> energy_invariant(const SteerableField& f);

}  // namespace steerkit
